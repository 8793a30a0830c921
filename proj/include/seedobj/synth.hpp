// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "seedobj/error.hpp"
#include "seedobj/eval.hpp"
#include "seedobj/grid.hpp"
#include "seedobj/objectness.hpp"

namespace seedobj {

/// Synthetic blob image: non-overlapping soft-edged ellipses (ellipsoids in
/// 3D) on a flat background with additive Gaussian noise.
///
/// Objects are assigned classes round-robin (1, 2, ..., C-1, 1, ...). Class c
/// has mean intensity `background_mean + c * contrast`.
struct SynthSpec {
    Shape shape{256, 256};
    std::size_t n_objects = 20;
    int num_classes = 3;
    double radius_min = 6.0;
    double radius_max = 12.0;
    double background_mean = 0.2;
    double contrast = 0.3;
    double noise_sigma = 0.05;
    double edge_width = 1.5;      ///< width in pixels of the linear intensity ramp at edges
    std::uint64_t rng_seed = 1;
    std::size_t max_attempts = 10000;
};

struct SynthSample {
    Grid image;
    LabelMap truth;
    SeedSet seeds;
};

namespace detail {

/// Uniform and normal draws built directly on the engine output, so the
/// sequence does not depend on the standard library's distribution classes.
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();   // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct Blob {
    std::array<double, max_rank> center{};
    std::array<double, max_rank> semi_axis{};
    double angle = 0.0;   // in-plane rotation of the last two axes
    int class_id = 1;
};

} // namespace detail

inline SynthSample synth_generate(const SynthSpec& spec) {
    const Shape& shape = spec.shape;
    const std::size_t rank = shape.rank();
    if (rank == 0) throw ValidationError("synth: shape is empty");
    if (spec.n_objects == 0) throw ValidationError("synth: n_objects must be >= 1");
    if (spec.num_classes < 2) throw ValidationError("synth: num_classes must be >= 2");
    if (!(spec.radius_min > 0.0) || spec.radius_max < spec.radius_min)
        throw ValidationError("synth: radii must satisfy 0 < radius_min <= radius_max");
    const double top = spec.background_mean + (spec.num_classes - 1) * spec.contrast;
    if (spec.background_mean < 0.0 || top > 1.0 || spec.contrast < 0.0)
        throw ValidationError("synth: class intensities must lie in [0,1]");
    if (spec.noise_sigma < 0.0) throw ValidationError("synth: noise sigma must be >= 0");
    for (std::size_t a = 0; a < rank; ++a)
        if (static_cast<double>(shape[a]) < 2.0 * spec.radius_max + 4.0)
            throw ValidationError("synth: grid too small for radius_max " +
                                  std::to_string(spec.radius_max));

    detail::PortableRng rng(spec.rng_seed);
    std::vector<detail::Blob> blobs;
    blobs.reserve(spec.n_objects);
    for (std::size_t k = 0; k < spec.n_objects; ++k) {
        detail::Blob b;
        b.class_id = 1 + static_cast<int>(k % static_cast<std::size_t>(spec.num_classes - 1));
        bool placed = false;
        for (std::size_t attempt = 0; attempt < spec.max_attempts && !placed; ++attempt) {
            double longest = 0.0;
            for (std::size_t a = 0; a < rank; ++a) {
                b.semi_axis[a] = rng.uniform(spec.radius_min, spec.radius_max);
                longest = std::max(longest, b.semi_axis[a]);
            }
            b.angle = rng.uniform(0.0, std::numbers::pi);
            for (std::size_t a = 0; a < rank; ++a) {
                const double lo = std::ceil(longest) + 1.0;
                const double hi = static_cast<double>(shape[a]) - std::ceil(longest) - 2.0;
                b.center[a] = std::floor(rng.uniform(lo, hi + 1.0));
            }
            placed = std::all_of(blobs.begin(), blobs.end(), [&](const detail::Blob& o) {
                double d2 = 0.0;
                double reach = 2.0 + spec.edge_width;
                for (std::size_t a = 0; a < rank; ++a) {
                    const double d = b.center[a] - o.center[a];
                    d2 += d * d;
                }
                reach += *std::max_element(b.semi_axis.begin(), b.semi_axis.begin() + rank) +
                         *std::max_element(o.semi_axis.begin(), o.semi_axis.begin() + rank);
                return d2 > reach * reach;
            });
        }
        if (!placed)
            throw ValidationError("synth: could not place object " + std::to_string(k) +
                                  " without overlap after " + std::to_string(spec.max_attempts) +
                                  " attempts");
        blobs.push_back(b);
    }

    const std::size_t n = shape.count();
    std::vector<double> clean(n, spec.background_mean);
    LabelMap truth{shape, std::vector<int>(n, background_class)};
    for (const detail::Blob& b : blobs) {
        const double fg = spec.background_mean + b.class_id * spec.contrast;
        const double min_axis =
            *std::min_element(b.semi_axis.begin(), b.semi_axis.begin() + rank);
        const double cs = std::cos(b.angle);
        const double sn = std::sin(b.angle);
        for (std::size_t i = 0; i < n; ++i) {
            const Coord c = shape.coord(i);
            std::array<double, max_rank> u{};
            for (std::size_t a = 0; a < rank; ++a)
                u[a] = static_cast<double>(c[a]) - b.center[a];
            // Rotate within the (row, col) plane.
            const double r0 = cs * u[rank - 2] - sn * u[rank - 1];
            const double r1 = sn * u[rank - 2] + cs * u[rank - 1];
            u[rank - 2] = r0;
            u[rank - 1] = r1;
            double q = 0.0;
            for (std::size_t a = 0; a < rank; ++a) q += (u[a] / b.semi_axis[a]) * (u[a] / b.semi_axis[a]);
            const double signed_dist = (1.0 - std::sqrt(q)) * min_axis;
            const double alpha = std::clamp(0.5 + signed_dist / spec.edge_width, 0.0, 1.0);
            if (alpha <= 0.0) continue;
            clean[i] += alpha * (fg - spec.background_mean);
            if (signed_dist >= 0.0) truth.labels[i] = b.class_id;
        }
    }

    std::vector<double> pixels(n);
    for (std::size_t i = 0; i < n; ++i)
        pixels[i] = std::clamp(clean[i] + spec.noise_sigma * rng.normal(), 0.0, 1.0);

    SeedSet seeds;
    seeds.num_classes = spec.num_classes;
    for (std::size_t k = 0; k < blobs.size(); ++k) {
        Coord c;
        c.rank = rank;
        for (std::size_t a = 0; a < rank; ++a) c[a] = static_cast<std::size_t>(blobs[k].center[a]);
        seeds.seeds.push_back({c, blobs[k].class_id, static_cast<std::uint32_t>(k)});
    }
    return {Grid(shape, 1, std::move(pixels)), std::move(truth), std::move(seeds)};
}

} // namespace seedobj
