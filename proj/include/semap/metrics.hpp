/* Copyright 2026 The Semap Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <array>
#include <optional>
#include <string>

#include "semap/fusion.hpp"
#include "semap/types.hpp"

namespace semap {

/// Voxel-level confusion statistics. Rows are ground truth, columns are
/// prediction. Prediction voxels with no ground-truth counterpart are only
/// counted in `excluded`; ground-truth voxels that the prediction misses or
/// labels Unknown are tallied per true class in `missed`.
struct ConfusionMatrix {
    std::array<std::array<std::int64_t, kNumLabels>, kNumLabels> counts{};
    std::array<std::int64_t, kNumLabels> missed{};
    std::int64_t excluded = 0;

    std::int64_t matched_total() const {
        std::int64_t total = 0;
        for (const auto& row : counts)
            for (std::int64_t v : row) total += v;
        return total;
    }
    std::int64_t missed_total() const {
        std::int64_t total = 0;
        for (std::int64_t v : missed) total += v;
        return total;
    }
};

/// Matches cells by identical voxel key. Throws ConfigError when the two maps
/// use different voxel sizes.
ConfusionMatrix confusion(const SemanticVoxelMap& prediction, const SemanticVoxelMap& truth);

/// TP / (TP + FP) down the prediction column; empty when the column is zero.
std::optional<double> accuracy(const ConfusionMatrix& cm, Label label);

/// TP / (TP + FP + FN); FN includes voxels of the class missing from the
/// prediction. Empty when the denominator is zero.
std::optional<double> iou(const ConfusionMatrix& cm, Label label);

struct MetricsReport {
    std::array<std::optional<double>, kNumLabels> per_class_accuracy{};
    std::array<std::optional<double>, kNumLabels> per_class_iou{};
    std::optional<double> average_accuracy;  // unweighted mean over defined classes
    std::optional<double> average_iou;
    std::int64_t matched = 0;
    std::int64_t excluded = 0;
    std::int64_t missed = 0;
};

MetricsReport compute_report(const ConfusionMatrix& cm);

/// Fixed-width human-readable table, one row per class plus the average row.
std::string format_report_table(const MetricsReport& report);

/// Machine-readable key=value lines covering the same content.
std::string format_report_kv(const MetricsReport& report);

}  // namespace semap
