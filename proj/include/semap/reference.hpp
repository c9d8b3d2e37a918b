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

#include "semap/fusion.hpp"
#include "semap/geometry.hpp"
#include "semap/refine.hpp"
#include "semap/types.hpp"

namespace semap::reference {

/// Serial counterparts of the parallel kernels. They share the public
/// contracts but none of the acceleration machinery, so tests can check the
/// fast paths against them and the benchmark can measure the gap.

PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud);

std::vector<VoxelKey> voxelize(const PointCloud& cloud, double voxel_size);

/// Plain per-key observe loop in candidate order.
void fuse_frame(SemanticVoxelMap& map, const CameraModel& camera, const SegmentationFrame& seg,
                std::span<const VoxelKey> candidates);

CountGrid build_count_grid(const SemanticVoxelMap& map, Label label);

/// Exhaustive O(n^2) neighborhoods with the same deterministic expansion
/// order as the grid-indexed implementation.
DbscanResult dbscan(std::span<const VoxelKey> keys, double voxel_size, double eps, int min_pts);

}  // namespace semap::reference
