// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seedobj/error.hpp"
#include "seedobj/grid.hpp"
#include "seedobj/objectness.hpp"
#include "seedobj/preprocess.hpp"

namespace seedobj {

/// Dense per-pixel class labels.
struct LabelMap {
    Shape shape;
    std::vector<int> labels;

    friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

struct IouReport {
    /// nullopt for classes that appear in neither map
    std::vector<std::optional<double>> per_class;
    double mean = 0.0;
};

/// Per-class intersection over union. Classes absent from both maps are left
/// out of the mean.
inline IouReport iou(const LabelMap& pred, const LabelMap& gt, int num_classes) {
    if (!(pred.shape == gt.shape) || pred.labels.size() != gt.labels.size())
        throw ValidationError("iou: prediction shape " + to_string(pred.shape) +
                              " does not match ground truth " + to_string(gt.shape));
    if (num_classes < 1) throw ValidationError("iou: num_classes must be positive");
    const auto nc = static_cast<std::size_t>(num_classes);
    std::vector<std::size_t> inter(nc, 0), uni(nc, 0);
    for (std::size_t i = 0; i < gt.labels.size(); ++i) {
        const int a = pred.labels[i];
        const int b = gt.labels[i];
        if (a < 0 || a >= num_classes || b < 0 || b >= num_classes)
            throw ValidationError("iou: label at pixel " + std::to_string(i) +
                                  " outside 0.." + std::to_string(num_classes - 1));
        if (a == b) {
            ++inter[static_cast<std::size_t>(a)];
            ++uni[static_cast<std::size_t>(a)];
        } else {
            ++uni[static_cast<std::size_t>(a)];
            ++uni[static_cast<std::size_t>(b)];
        }
    }
    IouReport r;
    r.per_class.resize(nc);
    double sum = 0.0;
    std::size_t included = 0;
    for (std::size_t c = 0; c < nc; ++c) {
        if (uni[c] == 0) continue;
        r.per_class[c] = static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
        sum += *r.per_class[c];
        ++included;
    }
    r.mean = included ? sum / static_cast<double>(included) : 0.0;
    return r;
}

/// Per-pixel argmax over the class distribution; ties go to the lower class,
/// so background wins any tie.
inline LabelMap threshold_predict(const ObjectnessMap& m) {
    const std::size_t n = m.pixel_count();
    LabelMap out{m.shape, std::vector<int>(n, background_class)};
    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        for (int c = 1; c < m.num_classes; ++c)
            if (m.at(c, i) > m.at(best, i)) best = c;
        out.labels[i] = best;
    }
    return out;
}

struct SweepRow {
    double w = 0.0;
    IouReport score;
};

struct SweepResult {
    double best_w = 0.0;
    double best_miou = 0.0;
    std::vector<SweepRow> table;
};

/// Scores every candidate decay rate by mIoU against `gt` and returns the
/// best one (ties go to the smaller w). `base` supplies connectivity and
/// boundary handling; its w is ignored.
inline SweepResult sweep_w(const Grid& g, const SeedSet& s, const LabelMap& gt,
                           std::span<const double> candidates, const ObjectnessConfig& base = {},
                           const std::optional<PreprocessChain>& pre = std::nullopt) {
    if (candidates.empty()) throw ValidationError("sweep_w: candidate list is empty");
    if (!(gt.shape == g.shape()))
        throw ValidationError("sweep_w: ground truth shape " + to_string(gt.shape) +
                              " does not match image " + to_string(g.shape()));
    const Grid conditioned = pre ? apply(*pre, g) : g;
    const GrowthResult growth = grow_regions(conditioned, s, base.connectivity);

    SweepResult result;
    bool first = true;
    for (double w : candidates) {
        ObjectnessConfig cfg = base;
        cfg.w = w;
        const IouReport score = iou(threshold_predict(objectness_from_growth(growth, s, cfg)), gt,
                                    s.num_classes);
        result.table.push_back({w, score});
        if (first || score.mean > result.best_miou ||
            (score.mean == result.best_miou && w < result.best_w)) {
            result.best_w = w;
            result.best_miou = score.mean;
            first = false;
        }
    }
    return result;
}

} // namespace seedobj
