// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "seedobj/grid.hpp"
#include "support.hpp"

using namespace seedobj;

TEST(Neighbors, CornerFacesClipsToBounds) {
    const auto n = neighbors(Coord{0, 0}, Shape{4, 4}, Connectivity::faces);
    ASSERT_EQ(n.size(), 2u);
    EXPECT_EQ(n[0], (Coord{0, 1}));
    EXPECT_EQ(n[1], (Coord{1, 0}));
}

TEST(Neighbors, InteriorCounts) {
    EXPECT_EQ(neighbors(Coord{1, 1}, Shape{4, 4}, Connectivity::faces).size(), 4u);
    EXPECT_EQ(neighbors(Coord{1, 1}, Shape{4, 4}, Connectivity::full).size(), 8u);
    EXPECT_EQ(neighbors(Coord{1, 1, 1}, Shape{3, 3, 3}, Connectivity::faces).size(), 6u);
    EXPECT_EQ(neighbors(Coord{1, 1, 1}, Shape{3, 3, 3}, Connectivity::full).size(), 26u);
}

TEST(Neighbors, LexicographicOrder) {
    const auto n = neighbors(Coord{1, 1}, Shape{3, 3}, Connectivity::full);
    const std::vector<Coord> want{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}, {2, 2}};
    EXPECT_EQ(n, want);
}

TEST(Neighbors, SymmetricAndBounded) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const Shape s = trial % 2 ? fixture::random_shape_3d(rng, 5) : fixture::random_shape_2d(rng, 7);
        for (Connectivity conn : {Connectivity::faces, Connectivity::full}) {
            const std::size_t cap = s.rank() == 2 ? (conn == Connectivity::faces ? 4 : 8)
                                                  : (conn == Connectivity::faces ? 6 : 26);
            for (std::size_t i = 0; i < s.count(); ++i) {
                const Coord p = s.coord(i);
                const auto np = neighbors(p, s, conn);
                EXPECT_LE(np.size(), cap);
                bool interior = true;
                for (std::size_t a = 0; a < s.rank(); ++a)
                    interior = interior && p[a] > 0 && p[a] + 1 < s[a];
                if (interior) {
                    EXPECT_EQ(np.size(), cap);
                }
                for (const Coord& q : np) {
                    EXPECT_NE(q, p);
                    const auto nq = neighbors(q, s, conn);
                    EXPECT_NE(std::find(nq.begin(), nq.end(), p), nq.end());
                }
            }
        }
    }
}

TEST(Grid, RejectsBadConstruction) {
    EXPECT_THROW(Grid(Shape{2, 2}, 1, {1, 2, 3}), ValidationError);
    EXPECT_THROW(Grid(Shape{1, 2}, 1, {1, std::nan("")}), ValidationError);
    EXPECT_THROW(Shape({4}), ValidationError);
    EXPECT_THROW(Shape({2, 0}), ValidationError);
}

TEST(Grid, InterleavedLayout) {
    const Grid g(Shape{1, 2}, 3, {1, 2, 3, 4, 5, 6});
    EXPECT_EQ(g.at(Coord{0, 1}, 0), 4.0);
    EXPECT_EQ(g.pixel(1)[2], 6.0);
}

TEST(NormalizeIntensity, Endpoints) {
    const auto out = normalize_intensity(Grid(Shape{1, 2}, 1, {0, 255}));
    EXPECT_EQ(out.at(0), 0.0);
    EXPECT_EQ(out.at(1), 1.0);
}

TEST(NormalizeIntensity, ConstantMapsToZero) {
    const auto out = normalize_intensity(Grid::filled(Shape{3, 3}, 2, 7.0));
    for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(NormalizeIntensity, Midpoint) {
    const auto out = normalize_intensity(Grid(Shape{1, 3}, 1, {2, 4, 6}));
    EXPECT_EQ(out.at(0), 0.0);
    EXPECT_EQ(out.at(1), 0.5);
    EXPECT_EQ(out.at(2), 1.0);
}

TEST(NormalizeIntensity, JointOverChannels) {
    const auto out = normalize_intensity(Grid(Shape{1, 2}, 2, {0, 10, 5, 20}));
    EXPECT_DOUBLE_EQ(out.at(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(out.at(1, 0), 0.25);
}

TEST(NormalizeIntensity, IdempotentOnNormalizedInput) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Grid g = normalize_intensity(fixture::random_grid(rng, Shape{6, 5}, 2));
        const Grid twice = normalize_intensity(g);
        for (std::size_t k = 0; k < g.values().size(); ++k)
            EXPECT_NEAR(twice.values()[k], g.values()[k], 1e-15);
    }
}
