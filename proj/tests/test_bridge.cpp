// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "seedobj/bridge.hpp"
#include "support.hpp"

using namespace seedobj;
using namespace seedobj::bridge;

TEST(Bridge, MatchesStoredObjectness) {
    std::mt19937_64 rng(41);
    fixture::TempDir dir;
    for (int t = 0; t < 10; ++t) {
        const Grid g = fixture::random_grid(rng, fixture::random_shape_2d(rng, 12), 2);
        const SeedSet s = fixture::random_seeds(rng, g.shape(), 3, 3);
        std::vector<BoundSeed> bound;
        for (const Seed& sd : s.seeds) bound.push_back({{sd.location[1], sd.location[0]}, sd.class_id});
        BoundConfig cfg;
        cfg.num_classes = 3;
        const auto [prob, mask] = bound_generate_objectness(io::grid_to_tensor(g, io::Dtype::f32), bound, cfg);
        io::write_objectness(generate_objectness(io::tensor_to_grid(io::grid_to_tensor(g)), s, {}, PreprocessChain{}),
                             dir / "o.tns");
        EXPECT_EQ(prob.values, io::read_tensor(dir / "o.tns").values);
        EXPECT_EQ(mask.values, io::read_tensor(dir / "o.tns.bg").values);
    }
}

TEST(Bridge, ValidationMirrorsCore) {
    const BoundArray img = io::grid_to_tensor(Grid::filled(Shape{3, 4}, 1, 0.5));
    EXPECT_THROW(bound_generate_objectness(img, {}), ValidationError);
    const auto [prob, mask] = bound_generate_objectness(img, {{{1, 1}, 1}});
    for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(prob.values[12 + i], 1.0);
    EXPECT_EQ(prob.shape, (std::vector<std::size_t>{2, 3, 4}));
}

TEST(Bridge, LossesMatchKernels) {
    const std::vector<double> half(8, 0.5);
    const BoundArray s{{2, 2, 2}, 1, io::Dtype::f32, half};
    const std::vector<losses::PointLabel> pts{{0, 1, 1.0}};
    const auto b = bound_losses(s, pts, s, {2.0, 1.0}, {{1}, {}});
    EXPECT_NEAR(b.point, 0.693147, 1e-6);
    EXPECT_NEAR(b.objectness, 1.039721, 1e-6);
    EXPECT_NEAR(b.total, b.point + b.objectness + b.image, 1e-12);
}
