// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seedobj/losses.hpp"
#include "seedobj/objectness.hpp"
#include "seedobj/preprocess.hpp"
#include "seedobj/tensor_io.hpp"

/// Marshal-only surface for foreign-language bindings. Arrays use the
/// TensorFile layout (row-major, slowest axis first); nothing here computes
/// anything the core library does not.

namespace seedobj::bridge {

using BoundArray = io::Tensor;

/// Coordinates in seed-CSV order: x, y[, z].
struct BoundSeed {
    std::vector<std::size_t> xyz;
    int class_id = 1;
};

struct BoundConfig {
    double w = ObjectnessConfig{}.w;
    bool full_connectivity = false;
    bool boundary_as_background = true;
    bool normalize = true;
    std::optional<int> num_classes;
};

inline SeedSet to_seed_set(const std::vector<BoundSeed>& seeds, const Shape& shape,
                           std::optional<int> num_classes) {
    std::string csv = shape.rank() == 3 ? "x,y,z,class\n" : "x,y,class\n";
    for (const BoundSeed& s : seeds) {
        for (std::size_t v : s.xyz) csv += std::to_string(v) + ",";
        csv += std::to_string(s.class_id) + "\n";
    }
    return io::parse_seeds(csv, shape, num_classes, "bound seeds");
}

/// Returns P as f32 with shape (C, *grid) and the background mask as u8,
/// byte-for-byte what write_objectness would store.
inline std::pair<BoundArray, BoundArray> bound_generate_objectness(const BoundArray& image,
                                                                   const std::vector<BoundSeed>& seeds,
                                                                   const BoundConfig& cfg = {}) {
    const Grid g = io::tensor_to_grid(image, "bound image");
    const SeedSet s = to_seed_set(seeds, g.shape(), cfg.num_classes);
    PreprocessChain chain;
    chain.normalize = cfg.normalize;
    const ObjectnessConfig oc{cfg.w, cfg.full_connectivity ? Connectivity::full : Connectivity::faces,
                              cfg.boundary_as_background};
    const ObjectnessMap m = generate_objectness(g, s, oc, chain);
    const auto [prob, mask] = io::objectness_tensors(m);
    return {io::decode_tensor(io::encode_tensor(prob)), mask};
}

/// Point labels are (pixel index, label, alpha); S and the target use the
/// (C, *grid) layout.
inline losses::LossBreakdown bound_losses(const BoundArray& prediction,
                                          const std::vector<losses::PointLabel>& points,
                                          const BoundArray& target, const std::vector<double>& beta,
                                          const losses::ImagePresence& presence,
                                          const losses::LossWeights& weights = {}) {
    const ObjectnessMap s = io::objectness_from_tensor(prediction, "bound prediction");
    const ObjectnessMap t = io::objectness_from_tensor(target, "bound target");
    if (!(s.shape == t.shape) || s.num_classes != t.num_classes)
        throw ValidationError("bound_losses: prediction and target shapes differ");
    const losses::PredictionField field{s.num_classes, s.pixel_count(), s.probability};
    return losses::total_loss(field, points, {t.probability, beta}, presence, weights);
}

} // namespace seedobj::bridge
