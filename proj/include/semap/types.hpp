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

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace semap {

inline constexpr double kDefaultVoxelSize = 0.2;
inline constexpr double kDefaultProbFloor = 1e-3;
inline constexpr int kNumLabels = 5;

/// Semantic classes stored per voxel. Unknown marks never-observed cells and
/// never participates in distributions or metrics.
enum class Label : std::uint8_t {
    Road = 0,
    Sidewalk = 1,
    Vehicle = 2,
    Building = 3,
    Vegetation = 4,
    Unknown = 5,
};

const char* label_name(Label label);
// Throws FormatError for unrecognized names.
Label parse_label(const std::string& name);
std::array<std::uint8_t, 3> label_color(Label label);

/// Probability vector over the five semantic labels.
struct LabelDistribution {
    std::array<double, kNumLabels> p{};

    static LabelDistribution uniform() {
        LabelDistribution d;
        d.p.fill(1.0 / kNumLabels);
        return d;
    }

    double sum() const {
        double s = 0.0;
        for (double v : p) s += v;
        return s;
    }

    // Ties resolve to the lowest label index so results are reproducible.
    Label argmax() const {
        int best = 0;
        for (int i = 1; i < kNumLabels; ++i)
            if (p[i] > p[best]) best = i;
        return static_cast<Label>(best);
    }

    double& operator[](Label l) { return p[static_cast<int>(l)]; }
    double operator[](Label l) const { return p[static_cast<int>(l)]; }
};

/// Integer grid coordinates of one voxel, from floor(coordinate / voxel_size).
struct VoxelKey {
    std::int32_t x = 0;
    std::int32_t y = 0;
    std::int32_t z = 0;

    friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
    friend auto operator<=>(const VoxelKey&, const VoxelKey&) = default;
};

/// One (x, y) column of the voxel grid.
struct ColumnKey {
    std::int32_t x = 0;
    std::int32_t y = 0;

    friend bool operator==(const ColumnKey&, const ColumnKey&) = default;
    friend auto operator<=>(const ColumnKey&, const ColumnKey&) = default;
};

/// Rigid-body transform registering one sensor frame into the world.
struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    std::int64_t frame_index = 0;

    Pose inverse() const {
        Pose inv;
        inv.rotation = rotation.transpose();
        inv.translation = -(rotation.transpose() * translation);
        inv.frame_index = frame_index;
        return inv;
    }
};

Pose compose(const Pose& a, const Pose& b);

/// max |R^T R - I|, the orthonormality defect used for pose validation.
double orthonormality_error(const Eigen::Matrix3d& rotation);

/// Nearest rotation matrix (Frobenius sense) with determinant +1.
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m);

/// Points of one Lidar sweep in the sensor frame. Intensities are optional;
/// when present they are index-aligned with points.
struct PointCloud {
    std::vector<Eigen::Vector3d> points;
    std::vector<float> intensities;
    std::int64_t frame_index = 0;

    std::size_t size() const { return points.size(); }
    bool has_intensities() const { return !intensities.empty(); }
};

}  // namespace semap

template <>
struct std::hash<semap::VoxelKey> {
    std::size_t operator()(const semap::VoxelKey& k) const noexcept {
        const auto ux = static_cast<std::uint32_t>(k.x);
        const auto uy = static_cast<std::uint32_t>(k.y);
        const auto uz = static_cast<std::uint32_t>(k.z);
        return (ux * 73856093u) ^ (uy * 19349669u) ^ (uz * 83492791u);
    }
};

template <>
struct std::hash<semap::ColumnKey> {
    std::size_t operator()(const semap::ColumnKey& k) const noexcept {
        const auto ux = static_cast<std::uint32_t>(k.x);
        const auto uy = static_cast<std::uint32_t>(k.y);
        return (ux * 73856093u) ^ (uy * 19349669u);
    }
};
