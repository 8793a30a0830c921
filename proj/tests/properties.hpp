// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "seedobj/seedobj.hpp"
#include "support.hpp"

/// Randomized invariant checks for the objectness pipeline. Each returns the
/// first violation found; unit tests run them with a few trials and the
/// acceptance suite with the full counts.

namespace seedobj::fixture {

struct Check {
    bool ok = true;
    std::size_t cases = 0;
    double worst = 0.0;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

inline std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << v;
    return os.str();
}

inline std::string describe(const Shape& s, std::size_t channels, std::size_t seeds) {
    std::ostringstream os;
    os << to_string(s) << " x" << channels << " with " << seeds << " seeds";
    return os.str();
}

/// grow_regions distances against the O(V^2) Dijkstra oracle.
inline Check oracle_equivalence(std::uint64_t seed, std::size_t trials_2d, std::size_t trials_3d,
                                double tol, std::size_t max_2d = 16, std::size_t max_3d = 8) {
    std::mt19937_64 rng(seed);
    Check out;
    for (std::size_t t = 0; t < trials_2d + trials_3d; ++t) {
        const bool volume = t >= trials_2d;
        const Shape s = volume ? random_shape_3d(rng, max_3d) : random_shape_2d(rng, max_2d);
        const std::size_t nc = pick(rng, 1, 3);
        const Grid g = random_grid(rng, s, nc);
        const SeedSet seeds = random_seeds(rng, s, pick(rng, 1, 5), 3);
        const Connectivity conn = t % 4 == 3 ? Connectivity::full : Connectivity::faces;
        const auto fast = grow_regions(g, seeds, conn).distance;
        const auto slow = dijkstra_reference(g, seeds, conn);
        for (std::size_t i = 0; i < fast.size(); ++i) {
            const double err = std::abs(fast[i] - slow[i]);
            out.worst = std::max(out.worst, err);
            if (!(err <= tol))
                out.fail(describe(s, nc, seeds.seeds.size()) + ": pixel " +
                         to_string(s.coord(i)) + " differs by " + sci(err));
        }
        ++out.cases;
    }
    return out;
}

/// Walking parent links reproduces every distance; ids and parents agree.
inline Check parent_chain(std::uint64_t seed, std::size_t trials) {
    std::mt19937_64 rng(seed);
    Check out;
    for (std::size_t t = 0; t < trials; ++t) {
        const Shape s = t % 3 == 2 ? random_shape_3d(rng) : random_shape_2d(rng, 24);
        const std::size_t nc = pick(rng, 1, 3);
        const Grid g = random_grid(rng, s, nc);
        const SeedSet seeds = random_seeds(rng, s, pick(rng, 1, 6), 3);
        const Connectivity conn = t % 2 ? Connectivity::full : Connectivity::faces;
        const GrowthResult r = grow_regions(g, seeds, conn);
        const Neighborhood hood(s, conn);

        std::vector<char> is_seed(s.count(), 0);
        for (const Seed& sd : seeds.seeds) {
            const std::size_t i = s.linear(sd.location);
            is_seed[i] = 1;
            if (r.distance[i] != 0.0 || r.parent[i] != i || r.identifier[i] != sd.instance_id)
                out.fail("seed " + to_string(sd.location) + " is not a root");
        }
        for (std::size_t p = 0; p < s.count(); ++p) {
            if (r.identifier[p] == no_identifier) out.fail("unlabeled pixel " + to_string(s.coord(p)));
            std::vector<std::size_t> path{p};
            while (!is_seed[path.back()]) {
                const std::size_t par = r.parent[path.back()];
                bool adjacent = false;
                hood.for_each(path.back(), [&](std::size_t q) { adjacent = adjacent || q == par; });
                if (!adjacent || path.size() > s.count()) {
                    out.fail("broken parent link at " + to_string(s.coord(path.back())));
                    break;
                }
                if (r.identifier[par] != r.identifier[path.back()])
                    out.fail("identifier changes along parent chain");
                path.push_back(par);
            }
            double d = 0.0;
            for (std::size_t k = path.size() - 1; k > 0; --k) {
                const auto a = g.pixel(path[k]);
                const auto b = g.pixel(path[k - 1]);
                for (std::size_t ch = 0; ch < nc; ++ch) d += (a[ch] - b[ch]) * (a[ch] - b[ch]);
            }
            const double err = std::abs(d - r.distance[p]);
            out.worst = std::max(out.worst, err);
            if (err > 1e-12 * static_cast<double>(path.size()))
                out.fail("chain sum differs at " + to_string(s.coord(p)));
        }
        ++out.cases;
    }
    return out;
}

inline bool same_growth(const GrowthResult& a, const GrowthResult& b) {
    return a.shape == b.shape && a.distance == b.distance && a.identifier == b.identifier &&
           a.parent == b.parent && a.seed_class == b.seed_class;
}

inline bool same_map(const ObjectnessMap& a, const ObjectnessMap& b) {
    return a.shape == b.shape && a.num_classes == b.num_classes &&
           a.probability == b.probability && a.background_mask == b.background_mask;
}

/// Adding a constant to every intensity leaves all outputs bit-identical.
/// Values and offsets are dyadic so the shifted grid is exactly representable.
inline Check offset_invariance(std::uint64_t seed, std::size_t trials) {
    std::mt19937_64 rng(seed);
    Check out;
    for (std::size_t t = 0; t < trials; ++t) {
        const Shape s = t % 3 == 2 ? random_shape_3d(rng) : random_shape_2d(rng);
        const std::size_t nc = pick(rng, 1, 3);
        const Grid g = random_grid(rng, s, nc, true);
        const double offset = static_cast<double>(pick(rng, 1, 64)) / 64.0;
        std::vector<double> shifted(g.values().begin(), g.values().end());
        for (double& v : shifted) v += offset;
        const Grid h(s, nc, std::move(shifted));
        const SeedSet seeds = random_seeds(rng, s, pick(rng, 1, 5), 3);
        ObjectnessConfig cfg;
        cfg.w = uniform(rng, 0.0, 60.0);
        if (!same_growth(grow_regions(g, seeds), grow_regions(h, seeds)))
            out.fail("growth differs under offset " + std::to_string(offset));
        if (!same_map(generate_objectness(g, seeds, cfg), generate_objectness(h, seeds, cfg)))
            out.fail("objectness differs under offset " + std::to_string(offset));
        if (!same_map(generate_objectness(g, seeds, cfg, PreprocessChain{}),
                      generate_objectness(h, seeds, cfg, PreprocessChain{})))
            out.fail("normalized objectness differs under offset " + std::to_string(offset));
        ++out.cases;
    }
    return out;
}

/// Shifting image and seeds into a larger canvas shifts every output. The
/// canvas is padded with a value far outside [0,1], so no optimal path
/// leaves the original window; the padded run is cropped back before the
/// comparison.
inline Check translation_equivariance(std::uint64_t seed, std::size_t trials) {
    std::mt19937_64 rng(seed);
    Check out;
    for (std::size_t t = 0; t < trials; ++t) {
        const bool volume = t % 3 == 2;
        const Shape s = volume ? random_shape_3d(rng, 6) : random_shape_2d(rng, 12);
        const std::size_t nc = pick(rng, 1, 3);
        const Grid g = random_grid(rng, s, nc);
        const SeedSet seeds = random_seeds(rng, s, pick(rng, 1, 5), 3);
        const Connectivity conn = t % 2 ? Connectivity::full : Connectivity::faces;

        Coord offset;
        offset.rank = s.rank();
        std::vector<std::size_t> big(s.rank());
        for (std::size_t a = 0; a < s.rank(); ++a) {
            offset[a] = pick(rng, 0, 4);
            big[a] = s[a] + offset[a] + pick(rng, 0, 4);
        }
        const Shape canvas{std::span<const std::size_t>(big)};
        const Grid padded = embed(g, canvas, offset, 1000.0);
        SeedSet moved = seeds;
        for (Seed& sd : moved.seeds)
            for (std::size_t a = 0; a < s.rank(); ++a) sd.location[a] += offset[a];

        const GrowthResult ref = grow_regions(g, seeds, conn);
        const GrowthResult wide = grow_regions(padded, moved, conn);
        GrowthResult crop;
        crop.shape = s;
        for (std::size_t i = 0; i < s.count(); ++i) {
            Coord c = s.coord(i);
            for (std::size_t a = 0; a < s.rank(); ++a) c[a] += offset[a];
            const std::size_t j = canvas.linear(c);
            Coord par = canvas.coord(wide.parent[j]);
            for (std::size_t a = 0; a < s.rank(); ++a) par[a] -= offset[a];
            crop.distance.push_back(wide.distance[j]);
            crop.identifier.push_back(wide.identifier[j]);
            crop.parent.push_back(s.linear(par));
            crop.seed_class.push_back(wide.seed_class[j]);
        }
        if (!same_growth(ref, crop)) out.fail("shifted growth differs for " + describe(s, nc, seeds.seeds.size()));
        ObjectnessConfig cfg;
        cfg.connectivity = conn;
        cfg.w = uniform(rng, 1.0, 80.0);
        if (!same_map(objectness_from_growth(ref, seeds, cfg), objectness_from_growth(crop, seeds, cfg)))
            out.fail("shifted objectness differs for " + describe(s, nc, seeds.seeds.size()));
        ++out.cases;
    }
    return out;
}

/// Rows of P sum to one, entries in [0,1], boundary pixels one-hot
/// background, Obj = 1 exactly wherever d = 0.
inline Check probability_rules(std::uint64_t seed, std::size_t trials, double tol) {
    std::mt19937_64 rng(seed);
    Check out;
    for (std::size_t t = 0; t < trials; ++t) {
        const Shape s = t % 3 == 2 ? random_shape_3d(rng) : random_shape_2d(rng, 20);
        const std::size_t nc = pick(rng, 1, 3);
        const Grid g = random_grid(rng, s, nc);
        const int classes = static_cast<int>(pick(rng, 2, 5));
        const SeedSet seeds = random_seeds(rng, s, pick(rng, 1, 6), classes);
        ObjectnessConfig cfg;
        cfg.w = uniform(rng, 0.0, 100.0);
        const GrowthResult r = grow_regions(g, seeds);
        const auto obj = distance_to_objectness(r.distance, cfg.w);
        const ObjectnessMap m = objectness_from_growth(r, seeds, cfg);
        for (std::size_t i = 0; i < s.count(); ++i) {
            double sum = 0.0;
            for (int c = 0; c < classes; ++c) {
                const double p = m.at(c, i);
                if (p < 0.0 || p > 1.0) out.fail("probability outside [0,1]");
                sum += p;
            }
            out.worst = std::max(out.worst, std::abs(sum - 1.0));
            if (std::abs(sum - 1.0) > tol) out.fail("row sum " + std::to_string(sum));
            if (m.background_mask[i]) {
                if (m.at(0, i) != 1.0) out.fail("boundary pixel is not one-hot background");
            }
            if (r.distance[i] == 0.0 && obj[i] != 1.0) out.fail("Obj != 1 where d = 0");
            if (r.distance[i] == 0.0 && !m.background_mask[i] && m.at(r.seed_class[i], i) != 1.0)
                out.fail("P != 1 for seed class where d = 0");
        }
        for (const Seed& sd : seeds.seeds) {
            const std::size_t i = s.linear(sd.location);
            if (m.background_mask[i] || m.at(sd.class_id, i) != 1.0)
                out.fail("seed pixel overridden at " + to_string(sd.location));
        }
        ++out.cases;
    }
    return out;
}

/// Both sides of every inter-region edge are marked, nothing else is.
inline Check boundary_symmetry(std::uint64_t seed, std::size_t trials) {
    std::mt19937_64 rng(seed);
    Check out;
    for (std::size_t t = 0; t < trials; ++t) {
        const Shape s = t % 3 == 2 ? random_shape_3d(rng) : random_shape_2d(rng, 20);
        const Grid g = random_grid(rng, s, pick(rng, 1, 3));
        const SeedSet seeds = random_seeds(rng, s, pick(rng, 1, 6), 3);
        const Connectivity conn = t % 2 ? Connectivity::full : Connectivity::faces;
        const GrowthResult r = grow_regions(g, seeds, conn);
        const auto mask = extract_boundaries(r, conn);
        for (std::size_t p = 0; p < s.count(); ++p) {
            bool differs = false;
            for (const Coord& q : neighbors(s.coord(p), s, conn)) {
                const std::size_t qi = s.linear(q);
                if (r.identifier[qi] != r.identifier[p]) {
                    differs = true;
                    if (!mask[qi]) out.fail("edge side unmarked at " + to_string(q));
                }
            }
            if (static_cast<bool>(mask[p]) != differs)
                out.fail("mask mismatch at " + to_string(s.coord(p)));
        }
        ++out.cases;
    }
    return out;
}

/// Larger w never raises Obj or any foreground probability.
inline Check monotone_in_w(std::uint64_t seed, std::size_t trials) {
    std::mt19937_64 rng(seed);
    Check out;
    for (std::size_t t = 0; t < trials; ++t) {
        const Shape s = t % 3 == 2 ? random_shape_3d(rng) : random_shape_2d(rng, 20);
        const Grid g = random_grid(rng, s, pick(rng, 1, 3));
        const SeedSet seeds = random_seeds(rng, s, pick(rng, 1, 6), 3);
        const GrowthResult r = grow_regions(g, seeds);
        const double w1 = uniform(rng, 0.0, 50.0);
        const double w2 = w1 + uniform(rng, 1e-3, 50.0);
        const auto o1 = distance_to_objectness(r.distance, w1);
        const auto o2 = distance_to_objectness(r.distance, w2);
        ObjectnessConfig c1, c2;
        c1.w = w1;
        c2.w = w2;
        const ObjectnessMap m1 = objectness_from_growth(r, seeds, c1);
        const ObjectnessMap m2 = objectness_from_growth(r, seeds, c2);
        for (std::size_t i = 0; i < s.count(); ++i) {
            if (o1[i] < o2[i]) out.fail("Obj increased with w at " + to_string(s.coord(i)));
            if (m1.at(0, i) > m2.at(0, i)) out.fail("background probability decreased with w");
        }
        ++out.cases;
    }
    return out;
}

/// Two runs with identical inputs (including diffusion and equalization)
/// produce bit-identical outputs.
inline Check determinism(std::uint64_t seed, std::size_t trials) {
    std::mt19937_64 rng(seed);
    Check out;
    for (std::size_t t = 0; t < trials; ++t) {
        const Shape s = t % 3 == 2 ? random_shape_3d(rng) : random_shape_2d(rng, 24);
        const Grid g = random_grid(rng, s, pick(rng, 1, 3));
        const SeedSet seeds = random_seeds(rng, s, pick(rng, 1, 6), 4);
        PreprocessChain chain;
        chain.equalize = t % 2 == 0;
        chain.diffusion = DiffusionParams{};
        ObjectnessConfig cfg;
        cfg.w = uniform(rng, 0.0, 100.0);
        cfg.connectivity = t % 2 ? Connectivity::full : Connectivity::faces;
        if (!same_map(generate_objectness(g, seeds, cfg, chain), generate_objectness(g, seeds, cfg, chain)))
            out.fail("objectness differs between runs");
        if (!same_growth(grow_regions(g, seeds, cfg.connectivity), grow_regions(g, seeds, cfg.connectivity)))
            out.fail("growth differs between runs");
        ++out.cases;
    }
    return out;
}

/// Reordering seeds changes no distance.
inline Check seed_order_invariance(std::uint64_t seed, std::size_t trials) {
    std::mt19937_64 rng(seed);
    Check out;
    for (std::size_t t = 0; t < trials; ++t) {
        const Shape s = random_shape_2d(rng, 16);
        const Grid g = random_grid(rng, s, pick(rng, 1, 3));
        SeedSet seeds = random_seeds(rng, s, pick(rng, 2, 6), 3);
        const auto before = grow_regions(g, seeds).distance;
        std::shuffle(seeds.seeds.begin(), seeds.seeds.end(), rng);
        const auto after = grow_regions(g, seeds).distance;
        for (std::size_t i = 0; i < before.size(); ++i)
            if (std::abs(before[i] - after[i]) > 1e-12) out.fail("distance depends on seed order");
        ++out.cases;
    }
    return out;
}

} // namespace seedobj::fixture
