// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "seedobj/error.hpp"
#include "seedobj/grid.hpp"
#include "seedobj/preprocess.hpp"

/// \file objectness.hpp
/// Soft multi-class objectness from point annotations.
///
/// Every seed floods the image through a priority queue keyed on the
/// cumulative squared intensity difference along the path (ties broken by
/// queue entry time). The flooding partitions the grid into one region per
/// seed; pixels on either side of a region border become hard background,
/// every other pixel gets probability exp(-w d) for its seed's class and the
/// remainder for background.

namespace seedobj {

inline constexpr int background_class = 0;
inline constexpr std::uint32_t no_identifier = std::numeric_limits<std::uint32_t>::max();

struct Seed {
    Coord location;
    int class_id = 1;          ///< foreground class, >= 1
    std::uint32_t instance_id = 0;
};

/// Ordered seeds. Order matters: earlier seeds win zero-cost ties.
struct SeedSet {
    std::vector<Seed> seeds;
    int num_classes = 2;       ///< including background (class 0)
};

/// Throws ValidationError on an empty set, out-of-bounds or duplicate
/// locations, duplicate instance ids or class ids outside [1, num_classes).
inline void validate_seeds(const SeedSet& s, const Shape& shape) {
    if (s.seeds.empty()) throw ValidationError("seed set is empty");
    if (s.num_classes < 2)
        throw ValidationError("num_classes must be >= 2 (background plus one class)");
    std::vector<char> taken(shape.count(), 0);
    std::vector<std::uint32_t> ids;
    ids.reserve(s.seeds.size());
    for (std::size_t k = 0; k < s.seeds.size(); ++k) {
        const Seed& seed = s.seeds[k];
        const std::string which = "seed " + std::to_string(k);
        if (!shape.contains(seed.location))
            throw ValidationError(which + " at " + to_string(seed.location) +
                                  " is outside grid " + to_string(shape));
        if (seed.class_id < 1 || seed.class_id >= s.num_classes)
            throw ValidationError(which + " has class " + std::to_string(seed.class_id) +
                                  ", expected 1.." + std::to_string(s.num_classes - 1));
        char& t = taken[shape.linear(seed.location)];
        if (t) throw ValidationError(which + " duplicates location " + to_string(seed.location));
        t = 1;
        ids.push_back(seed.instance_id);
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw ValidationError("seed instance ids are not unique");
}

/// Output of the flooding. All maps are indexed by linear pixel index.
struct GrowthResult {
    Shape shape;
    std::vector<double> distance;
    std::vector<std::uint32_t> identifier;
    std::vector<std::size_t> parent;      ///< linear index; seeds point to themselves
    std::vector<int> seed_class;

    Coord parent_of(const Coord& c) const { return shape.coord(parent[shape.linear(c)]); }
};

/// Squared L2 distance between the channel vectors of two pixels.
inline double intensity_cost(const Grid& g, std::size_t p, std::size_t q) {
    const auto a = g.pixel(p);
    const auto b = g.pixel(q);
    double sum = 0.0;
    for (std::size_t ch = 0; ch < a.size(); ++ch) {
        const double d = a[ch] - b[ch];
        sum += d * d;
    }
    return sum;
}

/// Multi-source label-setting flooding. A pixel is finalized the first time
/// it is popped; queued entries that were superseded by a cheaper path are
/// skipped (lazy deletion).
inline GrowthResult grow_regions(const Grid& g, const SeedSet& s,
                                 Connectivity conn = Connectivity::faces) {
    if (g.empty()) throw ValidationError("image is empty");
    validate_seeds(s, g.shape());

    const std::size_t n = g.pixel_count();
    GrowthResult r;
    r.shape = g.shape();
    r.distance.assign(n, std::numeric_limits<double>::infinity());
    r.identifier.assign(n, no_identifier);
    r.parent.assign(n, 0);
    r.seed_class.assign(n, background_class);

    struct Entry {
        double distance;
        std::uint64_t order;
        std::size_t index;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.distance != b.distance) return a.distance > b.distance;
            return a.order > b.order;
        }
    };
    std::vector<Entry> storage;
    storage.reserve(n);
    std::priority_queue<Entry, std::vector<Entry>, Later> queue(Later{}, std::move(storage));
    std::uint64_t order = 0;

    // Tentative owner of each pixel; copied into the result when finalized.
    std::vector<std::uint32_t> owner(n, no_identifier);
    std::vector<int> owner_class(n, background_class);
    std::vector<char> done(n, 0);

    for (const Seed& seed : s.seeds) {
        const std::size_t i = g.shape().linear(seed.location);
        r.distance[i] = 0.0;
        r.parent[i] = i;
        owner[i] = seed.instance_id;
        owner_class[i] = seed.class_id;
        queue.push({0.0, order++, i});
    }

    const Neighborhood hood(g.shape(), conn);
    while (!queue.empty()) {
        const Entry top = queue.top();
        queue.pop();
        const std::size_t p = top.index;
        if (done[p]) continue;
        done[p] = 1;
        r.identifier[p] = owner[p];
        r.seed_class[p] = owner_class[p];

        hood.for_each(p, [&](std::size_t q) {
            if (done[q]) return;
            const double candidate = top.distance + intensity_cost(g, p, q);
            if (candidate < r.distance[q]) {
                r.distance[q] = candidate;
                r.parent[q] = p;
                owner[q] = owner[p];
                owner_class[q] = owner_class[p];
                queue.push({candidate, order++, q});
            }
        });
    }
    return r;
}

/// Marks both pixels of every neighbor pair whose identifiers differ.
inline std::vector<std::uint8_t> extract_boundaries(const GrowthResult& r,
                                                    Connectivity conn = Connectivity::faces) {
    const std::size_t n = r.shape.count();
    std::vector<std::uint8_t> mask(n, 0);
    const Neighborhood hood(r.shape, conn);
    for (std::size_t p = 0; p < n; ++p) {
        hood.for_each(p, [&](std::size_t q) {
            if (r.identifier[q] != r.identifier[p]) mask[p] = 1;
        });
    }
    return mask;
}

/// Pointwise exp(-w d).
inline std::vector<double> distance_to_objectness(std::span<const double> distance, double w) {
    if (!(w >= 0.0) || !std::isfinite(w))
        throw ValidationError("objectness decay w must be a finite non-negative number");
    std::vector<double> obj(distance.size());
    for (std::size_t i = 0; i < distance.size(); ++i) obj[i] = std::exp(-w * distance[i]);
    return obj;
}

struct ObjectnessConfig {
    double w = 50.0;
    Connectivity connectivity = Connectivity::faces;
    bool boundary_as_background = true;
};

/// Per-pixel class distribution, stored class-major: the probability of
/// class `c` at pixel `i` is `probability[c * pixel_count + i]`.
struct ObjectnessMap {
    Shape shape;
    int num_classes = 0;
    std::vector<double> probability;
    std::vector<std::uint8_t> background_mask;

    std::size_t pixel_count() const { return shape.count(); }
    double at(int c, std::size_t i) const {
        return probability[static_cast<std::size_t>(c) * pixel_count() + i];
    }
    std::span<const double> plane(int c) const {
        return std::span<const double>(probability)
            .subspan(static_cast<std::size_t>(c) * pixel_count(), pixel_count());
    }
};

/// Splits each pixel's mass between its seed's class (obj) and background
/// (1 - obj). Boundary pixels become one-hot background unless they are seeds.
inline ObjectnessMap assemble_class_maps(const GrowthResult& r, const SeedSet& s,
                                         std::span<const double> obj,
                                         std::span<const std::uint8_t> boundary,
                                         const ObjectnessConfig& cfg) {
    const std::size_t n = r.shape.count();
    if (obj.size() != n || boundary.size() != n || r.seed_class.size() != n)
        throw ValidationError("assemble_class_maps: map sizes do not agree with grid " +
                              to_string(r.shape));
    const int nc = s.num_classes;
    if (nc < 2) throw ValidationError("num_classes must be >= 2");

    std::vector<char> is_seed(n, 0);
    for (const Seed& seed : s.seeds) is_seed[r.shape.linear(seed.location)] = 1;

    ObjectnessMap m;
    m.shape = r.shape;
    m.num_classes = nc;
    m.probability.assign(static_cast<std::size_t>(nc) * n, 0.0);
    m.background_mask.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = r.seed_class[i];
        if (c < 1 || c >= nc)
            throw ValidationError("pixel " + to_string(r.shape.coord(i)) + " has class " +
                                  std::to_string(c) + " outside 1.." + std::to_string(nc - 1));
        if (cfg.boundary_as_background && boundary[i] && !is_seed[i]) {
            m.probability[i] = 1.0;
            m.background_mask[i] = 1;
            continue;
        }
        m.probability[static_cast<std::size_t>(c) * n + i] = obj[i];
        m.probability[i] = 1.0 - obj[i];
    }
    return m;
}

/// Boundaries and class maps for an existing flooding result. The flooding
/// does not depend on w, so one result can serve many decay rates.
inline ObjectnessMap objectness_from_growth(const GrowthResult& r, const SeedSet& s,
                                            const ObjectnessConfig& cfg) {
    const auto boundary = extract_boundaries(r, cfg.connectivity);
    const auto obj = distance_to_objectness(r.distance, cfg.w);
    return assemble_class_maps(r, s, obj, boundary, cfg);
}

/// Optional preprocessing, then flooding, boundaries and class maps.
/// Without a chain the intensities are used as given.
inline ObjectnessMap generate_objectness(const Grid& g, const SeedSet& s,
                                         const ObjectnessConfig& cfg = {},
                                         const std::optional<PreprocessChain>& pre = std::nullopt) {
    const Grid conditioned = pre ? apply(*pre, g) : g;
    return objectness_from_growth(grow_regions(conditioned, s, cfg.connectivity), s, cfg);
}

} // namespace seedobj
