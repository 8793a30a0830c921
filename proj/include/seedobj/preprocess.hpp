// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seedobj/error.hpp"
#include "seedobj/grid.hpp"

namespace seedobj {

/// Perona-Malik parameters. Intensities are assumed normalized to [0,1].
struct DiffusionParams {
    double kappa = 0.05;       ///< edge threshold in intensity units
    double step = 0.15;        ///< explicit time step
    std::size_t iterations = 10;
};

/// Perona-Malik diffusion with conductance exp(-(s/kappa)^2), faces
/// connectivity, Jacobi update. Fluxes are only exchanged between in-bounds
/// pairs so the per-channel mean is conserved.
inline Grid anisotropic_diffusion(const Grid& g, const DiffusionParams& p) {
    const Neighborhood hood(g.shape(), Connectivity::faces);
    if (!(p.kappa > 0.0)) throw ValidationError("diffusion kappa must be positive");
    if (!(p.step > 0.0) || p.step * static_cast<double>(hood.max_neighbors()) > 1.0)
        throw ValidationError("diffusion step " + std::to_string(p.step) +
                              " violates the stability bound 1/" +
                              std::to_string(hood.max_neighbors()));

    const std::size_t n = g.pixel_count();
    const std::size_t nc = g.channels();
    const double inv_k2 = 1.0 / (p.kappa * p.kappa);
    std::vector<double> cur(g.values().begin(), g.values().end());
    std::vector<double> next(cur.size());

    for (std::size_t it = 0; it < p.iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t ch = 0; ch < nc; ++ch) {
                const double v = cur[i * nc + ch];
                double flux = 0.0;
                hood.for_each(i, [&](std::size_t q) {
                    const double delta = cur[q * nc + ch] - v;
                    flux += std::exp(-delta * delta * inv_k2) * delta;
                });
                next[i * nc + ch] = v + p.step * flux;
            }
        }
        cur.swap(next);
    }
    return Grid(g.shape(), nc, std::move(cur));
}

/// Global 256-bin histogram equalization, per channel. Each value maps to the
/// cumulative fraction of samples at or below its bin.
inline Grid histogram_equalize(const Grid& g) {
    constexpr std::size_t bins = 256;
    const std::size_t n = g.pixel_count();
    const std::size_t nc = g.channels();
    const auto vals = g.values();
    auto bin_of = [](double v) {
        const double b = std::floor(std::clamp(v, 0.0, 1.0) * bins);
        return std::min<std::size_t>(bins - 1, static_cast<std::size_t>(b));
    };

    std::vector<double> out(vals.size());
    for (std::size_t ch = 0; ch < nc; ++ch) {
        std::array<std::size_t, bins> hist{};
        for (std::size_t i = 0; i < n; ++i) ++hist[bin_of(vals[i * nc + ch])];
        std::array<double, bins> map{};
        std::size_t running = 0;
        for (std::size_t b = 0; b < bins; ++b) {
            running += hist[b];
            map[b] = static_cast<double>(running) / static_cast<double>(n);
        }
        for (std::size_t i = 0; i < n; ++i) out[i * nc + ch] = map[bin_of(vals[i * nc + ch])];
    }
    return Grid(g.shape(), nc, std::move(out));
}

/// Per-channel affine match to target mean/std, clamped to [0,1].
/// A zero-variance channel is only shifted, which lands it on the target mean.
inline Grid channel_normalize(const Grid& g, std::span<const double> target_mean,
                              std::span<const double> target_std) {
    const std::size_t nc = g.channels();
    if (target_mean.size() != nc || target_std.size() != nc)
        throw ValidationError("channel_normalize: expected " + std::to_string(nc) +
                              " target means/stds, got " + std::to_string(target_mean.size()) +
                              "/" + std::to_string(target_std.size()));
    for (double s : target_std)
        if (!(s > 0.0)) throw ValidationError("channel_normalize: target std must be positive");

    const std::size_t n = g.pixel_count();
    const auto vals = g.values();
    std::vector<double> out(vals.size());
    for (std::size_t ch = 0; ch < nc; ++ch) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += vals[i * nc + ch];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = vals[i * nc + ch] - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        const double scale = sd > 0.0 ? target_std[ch] / sd : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = (vals[i * nc + ch] - mean) * scale + target_mean[ch];
            out[i * nc + ch] = std::clamp(v, 0.0, 1.0);
        }
    }
    return Grid(g.shape(), nc, std::move(out));
}

/// Conditioning applied before growing regions. Steps run in the order:
/// min-max normalization, channel normalization, equalization, diffusion.
struct PreprocessChain {
    bool normalize = true;
    struct ChannelTargets {
        std::vector<double> mean;
        std::vector<double> std;
    };
    std::optional<ChannelTargets> channel_targets;
    bool equalize = false;
    std::optional<DiffusionParams> diffusion;
};

inline Grid apply(const PreprocessChain& chain, const Grid& g) {
    Grid out = chain.normalize ? normalize_intensity(g) : g;
    if (chain.channel_targets)
        out = channel_normalize(out, chain.channel_targets->mean, chain.channel_targets->std);
    if (chain.equalize) out = histogram_equalize(out);
    if (chain.diffusion) out = anisotropic_diffusion(out, *chain.diffusion);
    return out;
}

} // namespace seedobj
