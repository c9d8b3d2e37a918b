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
#include "semap/types.hpp"

#include <Eigen/SVD>

#include "semap/errors.hpp"

namespace semap {

namespace {

constexpr const char* kLabelNames[] = {"Road", "Sidewalk", "Vehicle", "Building", "Vegetation", "Unknown"};

// Cityscapes-style palette, one color per label.
constexpr std::array<std::uint8_t, 3> kLabelColors[] = {
    {128, 64, 128},  // Road
    {244, 35, 232},  // Sidewalk
    {0, 0, 142},     // Vehicle
    {70, 70, 70},    // Building
    {107, 142, 35},  // Vegetation
    {0, 0, 0},       // Unknown
};

}  // namespace

const char* label_name(Label label) { return kLabelNames[static_cast<int>(label)]; }

Label parse_label(const std::string& name) {
    for (int i = 0; i <= kNumLabels; ++i)
        if (name == kLabelNames[i]) return static_cast<Label>(i);
    throw FormatError("unrecognized label name '" + name + "'");
}

std::array<std::uint8_t, 3> label_color(Label label) { return kLabelColors[static_cast<int>(label)]; }

Pose compose(const Pose& a, const Pose& b) {
    Pose out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    out.frame_index = b.frame_index;
    return out;
}

double orthonormality_error(const Eigen::Matrix3d& rotation) {
    const Eigen::Matrix3d defect = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
    return defect.cwiseAbs().maxCoeff();
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

}  // namespace semap
