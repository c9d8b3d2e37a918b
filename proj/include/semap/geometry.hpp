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

#include <span>
#include <unordered_map>
#include <vector>

#include "semap/types.hpp"

namespace semap {

/// Applies p' = R p + t to every point. Intensities and point order are
/// preserved. Throws ValidationError if the rotation is not orthonormal
/// (tolerance 1e-6 on max |R^T R - I|).
PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud);

/// Floor-based binning into half-open cells [i*s, (i+1)*s). Returns the
/// occupied keys as a sorted, duplicate-free vector.
std::vector<VoxelKey> voxelize(const PointCloud& cloud, double voxel_size);

VoxelKey voxelize_point(const Eigen::Vector3d& p, double voxel_size);

inline Eigen::Vector3d voxel_center(const VoxelKey& key, double voxel_size) {
    return {(key.x + 0.5) * voxel_size, (key.y + 0.5) * voxel_size, (key.z + 0.5) * voxel_size};
}

/// Accumulated occupancy over all integrated frames. Each cell remembers the
/// frame that first observed it; re-integration never changes existing cells.
struct OccupancyMap {
    explicit OccupancyMap(double voxel_size_in = kDefaultVoxelSize);

    /// Set-union of the current cells with `keys`. Frames must arrive with
    /// non-decreasing frame_index; otherwise throws SequencingError.
    void integrate_frame(std::span<const VoxelKey> keys, std::int64_t frame_index);

    /// Union with a map built independently (e.g. from a disjoint frame
    /// range). Keeps the smaller first-seen index per cell.
    void merge(const OccupancyMap& other);

    std::size_t size() const { return cells.size(); }
    bool contains(const VoxelKey& key) const { return cells.count(key) > 0; }

    double voxel_size;
    std::unordered_map<VoxelKey, std::int64_t> cells;  // key -> first seen frame
    std::int64_t last_frame = -1;
};

}  // namespace semap
