// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "seedobj/error.hpp"
#include "seedobj/grid.hpp"
#include "seedobj/objectness.hpp"

namespace seedobj {

/// Exact multi-source geodesic distances by the textbook O(V^2) Dijkstra:
/// no heap, the next pixel is found by a linear scan. Neighbor enumeration
/// and edge cost are computed directly from coordinates here, independently
/// of grow_regions. Intended as a test oracle for small grids.
inline std::vector<double> dijkstra_reference(const Grid& g, const SeedSet& s,
                                              Connectivity conn = Connectivity::faces) {
    if (g.empty()) throw ValidationError("image is empty");
    validate_seeds(s, g.shape());

    const Shape& shape = g.shape();
    const std::size_t n = shape.count();
    const std::size_t rank = shape.rank();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, inf);
    std::vector<char> settled(n, 0);
    for (const Seed& seed : s.seeds) dist[shape.linear(seed.location)] = 0.0;

    for (std::size_t round = 0; round < n; ++round) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!settled[i] && dist[i] < inf && (best == n || dist[i] < dist[best])) best = i;
        if (best == n) break;
        settled[best] = 1;

        const Coord c = shape.coord(best);
        // Walk every offset in {-1,0,1}^rank.
        std::vector<int> off(rank, -1);
        while (true) {
            int nonzero = 0;
            bool inside = true;
            Coord q = c;
            for (std::size_t a = 0; a < rank; ++a) {
                nonzero += off[a] != 0;
                const long v = static_cast<long>(c[a]) + off[a];
                if (v < 0 || v >= static_cast<long>(shape[a])) inside = false;
                else q[a] = static_cast<std::size_t>(v);
            }
            const bool allowed = nonzero > 0 && (conn == Connectivity::full || nonzero == 1);
            if (allowed && inside) {
                double cost = 0.0;
                for (std::size_t ch = 0; ch < g.channels(); ++ch) {
                    const double d = g.at(c, ch) - g.at(q, ch);
                    cost += d * d;
                }
                const std::size_t qi = shape.linear(q);
                if (dist[best] + cost < dist[qi]) dist[qi] = dist[best] + cost;
            }
            std::size_t a = rank;
            while (a > 0 && off[a - 1] == 1) off[--a] = -1;
            if (a == 0) break;
            ++off[a - 1];
        }
    }
    return dist;
}

} // namespace seedobj
