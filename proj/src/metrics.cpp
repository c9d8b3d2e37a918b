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
#include "semap/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "semap/errors.hpp"

namespace semap {

ConfusionMatrix confusion(const SemanticVoxelMap& prediction, const SemanticVoxelMap& truth) {
    if (prediction.voxel_size != truth.voxel_size) {
        std::ostringstream msg;
        msg << "voxel size mismatch: prediction " << prediction.voxel_size << " vs truth " << truth.voxel_size;
        throw ConfigError(msg.str());
    }

    ConfusionMatrix cm;
    for (const auto& [key, truth_cell] : truth.cells) {
        const int t = static_cast<int>(truth_cell.final_label);
        const SemanticCell* pred_cell = prediction.find(key);
        if (pred_cell == nullptr || pred_cell->final_label == Label::Unknown) {
            ++cm.missed[t];
        } else {
            ++cm.counts[t][static_cast<int>(pred_cell->final_label)];
        }
    }
    for (const auto& [key, cell] : prediction.cells) {
        if (truth.find(key) == nullptr) ++cm.excluded;
    }
    return cm;
}

std::optional<double> accuracy(const ConfusionMatrix& cm, Label label) {
    const int l = static_cast<int>(label);
    const std::int64_t tp = cm.counts[l][l];
    std::int64_t fp = 0;
    for (int t = 0; t < kNumLabels; ++t) {
        if (t != l) fp += cm.counts[t][l];
    }
    if (tp + fp == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> iou(const ConfusionMatrix& cm, Label label) {
    const int l = static_cast<int>(label);
    const std::int64_t tp = cm.counts[l][l];
    std::int64_t fp = 0;
    std::int64_t fn = cm.missed[l];
    for (int k = 0; k < kNumLabels; ++k) {
        if (k == l) continue;
        fp += cm.counts[k][l];
        fn += cm.counts[l][k];
    }
    if (tp + fp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
}

MetricsReport compute_report(const ConfusionMatrix& cm) {
    MetricsReport report;
    double acc_sum = 0.0, iou_sum = 0.0;
    int acc_defined = 0, iou_defined = 0;
    for (int l = 0; l < kNumLabels; ++l) {
        report.per_class_accuracy[l] = accuracy(cm, static_cast<Label>(l));
        report.per_class_iou[l] = iou(cm, static_cast<Label>(l));
        if (report.per_class_accuracy[l]) {
            acc_sum += *report.per_class_accuracy[l];
            ++acc_defined;
        }
        if (report.per_class_iou[l]) {
            iou_sum += *report.per_class_iou[l];
            ++iou_defined;
        }
    }
    if (acc_defined > 0) report.average_accuracy = acc_sum / acc_defined;
    if (iou_defined > 0) report.average_iou = iou_sum / iou_defined;
    report.matched = cm.matched_total();
    report.excluded = cm.excluded;
    report.missed = cm.missed_total();
    return report;
}

namespace {

std::string metric_cell(const std::optional<double>& value) {
    if (!value) return "       n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%10.6f", *value);
    return buf;
}

std::string metric_value(const std::optional<double>& value) {
    if (!value) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", *value);
    return buf;
}

std::string lower(const char* s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::string format_report_table(const MetricsReport& report) {
    std::ostringstream out;
    out << "class         accuracy        iou\n";
    for (int l = 0; l < kNumLabels; ++l) {
        char name[16];
        std::snprintf(name, sizeof(name), "%-12s", label_name(static_cast<Label>(l)));
        out << name << metric_cell(report.per_class_accuracy[l]) << " " << metric_cell(report.per_class_iou[l])
            << "\n";
    }
    out << "average     " << metric_cell(report.average_accuracy) << " " << metric_cell(report.average_iou) << "\n";
    out << "voxels: matched=" << report.matched << " excluded=" << report.excluded << " missed=" << report.missed
        << "\n";
    return out.str();
}

std::string format_report_kv(const MetricsReport& report) {
    std::ostringstream out;
    for (int l = 0; l < kNumLabels; ++l) {
        const std::string name = lower(label_name(static_cast<Label>(l)));
        out << "accuracy." << name << "=" << metric_value(report.per_class_accuracy[l]) << "\n";
        out << "iou." << name << "=" << metric_value(report.per_class_iou[l]) << "\n";
    }
    out << "accuracy.average=" << metric_value(report.average_accuracy) << "\n";
    out << "iou.average=" << metric_value(report.average_iou) << "\n";
    out << "voxels.matched=" << report.matched << "\n";
    out << "voxels.excluded=" << report.excluded << "\n";
    out << "voxels.missed=" << report.missed << "\n";
    return out.str();
}

}  // namespace semap
