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
#include "semap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semap/errors.hpp"

namespace semap {

namespace {
constexpr double kRotationTol = 1e-6;
}

PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud) {
    const double defect = orthonormality_error(pose.rotation);
    if (defect > kRotationTol) {
        std::ostringstream msg;
        msg << "rotation of frame " << pose.frame_index << " is not orthonormal: max |R^T R - I| = " << defect;
        throw ValidationError(msg.str());
    }

    PointCloud out;
    out.frame_index = cloud.frame_index;
    out.intensities = cloud.intensities;
    out.points.resize(cloud.points.size());

    const Eigen::Matrix3d r = pose.rotation;
    const Eigen::Vector3d t = pose.translation;
    const std::int64_t n = static_cast<std::int64_t>(cloud.points.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        out.points[i] = r * cloud.points[i] + t;
    }
    return out;
}

VoxelKey voxelize_point(const Eigen::Vector3d& p, double voxel_size) {
    return {static_cast<std::int32_t>(std::floor(p.x() / voxel_size)),
            static_cast<std::int32_t>(std::floor(p.y() / voxel_size)),
            static_cast<std::int32_t>(std::floor(p.z() / voxel_size))};
}

std::vector<VoxelKey> voxelize(const PointCloud& cloud, double voxel_size) {
    if (voxel_size <= 0.0) throw ParamError("voxel_size must be positive");

    const std::int64_t n = static_cast<std::int64_t>(cloud.points.size());
    std::vector<VoxelKey> keys(cloud.points.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        keys[i] = voxelize_point(cloud.points[i], voxel_size);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

OccupancyMap::OccupancyMap(double voxel_size_in) : voxel_size(voxel_size_in) {
    if (voxel_size <= 0.0) throw ParamError("voxel_size must be positive");
}

void OccupancyMap::integrate_frame(std::span<const VoxelKey> keys, std::int64_t frame_index) {
    if (frame_index < last_frame) {
        std::ostringstream msg;
        msg << "frame " << frame_index << " arrived after frame " << last_frame;
        throw SequencingError(msg.str());
    }
    last_frame = frame_index;
    for (const VoxelKey& key : keys) {
        cells.emplace(key, frame_index);  // no-op for cells seen before
    }
}

void OccupancyMap::merge(const OccupancyMap& other) {
    for (const auto& [key, first_seen] : other.cells) {
        auto [it, inserted] = cells.emplace(key, first_seen);
        if (!inserted && first_seen < it->second) it->second = first_seen;
    }
    last_frame = std::max(last_frame, other.last_frame);
}

}  // namespace semap
