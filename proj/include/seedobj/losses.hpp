// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "seedobj/error.hpp"

/// \file losses.hpp
/// Forward-only reference kernels for the weak-supervision objective:
/// partial cross-entropy on labeled points, weighted cross-entropy against
/// the objectness map, and an image-level presence term.
///
/// Every per-pixel field here is class-major, matching ObjectnessMap:
/// value of class c at pixel i is `values[c * pixel_count + i]`.

namespace seedobj::losses {

inline constexpr double log_floor = 1e-12;
inline constexpr double default_point_alpha = 1.0;
inline constexpr double default_background_alpha = 0.1;

inline double safe_log(double p) { return std::log(std::max(p, log_floor)); }

/// Network output S: a distribution over classes at every pixel.
struct PredictionField {
    int num_classes = 0;
    std::size_t pixel_count = 0;
    std::vector<double> values;

    double at(int c, std::size_t i) const {
        return values[static_cast<std::size_t>(c) * pixel_count + i];
    }
    void check() const {
        if (num_classes < 1 || values.size() != static_cast<std::size_t>(num_classes) * pixel_count)
            throw ValidationError("prediction field size " + std::to_string(values.size()) +
                                  " does not equal classes x pixels");
    }
};

struct PointLabel {
    std::size_t pixel = 0;
    int label = 0;
    double alpha = default_point_alpha;
};

struct ObjectnessTarget {
    std::span<const double> probability;  ///< class-major, same layout as S
    std::vector<double> beta;             ///< one positive weight per class
};

struct ImagePresence {
    std::vector<int> present;
    std::vector<int> absent;
};

struct LossWeights {
    double point = 1.0;
    double objectness = 1.0;
    double image = 1.0;
};

/// -sum_i alpha_i log S_{i,G_i} over the labeled pixels. With `mean` the sum
/// is divided by the number of labels.
inline double point_loss(const PredictionField& s, std::span<const PointLabel> points,
                         bool mean = false) {
    s.check();
    if (points.empty()) throw ValidationError("point_loss: label set is empty");
    std::vector<char> seen(s.pixel_count, 0);
    double total = 0.0;
    for (const PointLabel& p : points) {
        if (p.pixel >= s.pixel_count)
            throw ValidationError("point_loss: pixel index " + std::to_string(p.pixel) +
                                  " out of range");
        if (p.label < 0 || p.label >= s.num_classes)
            throw ValidationError("point_loss: label " + std::to_string(p.label) +
                                  " out of range");
        if (!(p.alpha > 0.0)) throw ValidationError("point_loss: alpha must be positive");
        if (seen[p.pixel]) throw ValidationError("point_loss: pixel " + std::to_string(p.pixel) +
                                                 " labeled twice");
        seen[p.pixel] = 1;
        total -= p.alpha * safe_log(s.at(p.label, p.pixel));
    }
    return mean ? total / static_cast<double>(points.size()) : total;
}

/// -(1/N) sum_i sum_c beta_c P_ic log S_ic.
inline double objectness_loss(const PredictionField& s, const ObjectnessTarget& t) {
    s.check();
    if (t.probability.size() != s.values.size())
        throw ValidationError("objectness_loss: target size " +
                              std::to_string(t.probability.size()) +
                              " does not match prediction size " +
                              std::to_string(s.values.size()));
    if (t.beta.size() != static_cast<std::size_t>(s.num_classes))
        throw ValidationError("objectness_loss: expected " + std::to_string(s.num_classes) +
                              " beta weights, got " + std::to_string(t.beta.size()));
    for (double b : t.beta)
        if (!(b > 0.0)) throw ValidationError("objectness_loss: beta must be positive");
    if (s.pixel_count == 0) return 0.0;

    double total = 0.0;
    for (int c = 0; c < s.num_classes; ++c) {
        const std::size_t base = static_cast<std::size_t>(c) * s.pixel_count;
        double per_class = 0.0;
        for (std::size_t i = 0; i < s.pixel_count; ++i) {
            const double p = t.probability[base + i];
            if (p != 0.0) per_class += p * safe_log(s.values[base + i]);
        }
        total += t.beta[static_cast<std::size_t>(c)] * per_class;
    }
    return -total / static_cast<double>(s.pixel_count);
}

/// Pixel with the highest probability for class c; ties go to the lowest index.
inline std::size_t strongest_pixel(const PredictionField& s, int c) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.pixel_count; ++i)
        if (s.at(c, i) > s.at(c, best)) best = i;
    return best;
}

/// Presence term read at each class's strongest pixel. An empty present or
/// absent set contributes nothing.
inline double image_level_loss(const PredictionField& s, const ImagePresence& pres) {
    s.check();
    if (pres.present.empty() && pres.absent.empty())
        throw ValidationError("image_level_loss: both presence sets are empty");
    if (s.pixel_count == 0) throw ValidationError("image_level_loss: prediction has no pixels");
    auto check_class = [&](int c) {
        if (c < 1 || c >= s.num_classes)
            throw ValidationError("image_level_loss: class " + std::to_string(c) +
                                  " outside 1.." + std::to_string(s.num_classes - 1));
    };
    for (int c : pres.present) check_class(c);
    for (int c : pres.absent) {
        check_class(c);
        if (std::find(pres.present.begin(), pres.present.end(), c) != pres.present.end())
            throw ValidationError("image_level_loss: class " + std::to_string(c) +
                                  " is both present and absent");
    }

    double loss = 0.0;
    if (!pres.present.empty()) {
        double sum = 0.0;
        for (int c : pres.present) sum += safe_log(s.at(c, strongest_pixel(s, c)));
        loss -= sum / static_cast<double>(pres.present.size());
    }
    if (!pres.absent.empty()) {
        double sum = 0.0;
        for (int c : pres.absent) sum += safe_log(1.0 - s.at(c, strongest_pixel(s, c)));
        loss -= sum / static_cast<double>(pres.absent.size());
    }
    return loss;
}

struct LossBreakdown {
    double point = 0.0;
    double objectness = 0.0;
    double image = 0.0;
    double total = 0.0;
};

inline LossBreakdown total_loss(const PredictionField& s, std::span<const PointLabel> points,
                                const ObjectnessTarget& target, const ImagePresence& pres,
                                const LossWeights& w = {}) {
    if (w.point < 0.0 || w.objectness < 0.0 || w.image < 0.0)
        throw ValidationError("loss weights must be non-negative");
    LossBreakdown b;
    b.point = point_loss(s, points);
    b.objectness = objectness_loss(s, target);
    b.image = image_level_loss(s, pres);
    b.total = w.point * b.point + w.objectness * b.objectness + w.image * b.image;
    return b;
}

} // namespace seedobj::losses
