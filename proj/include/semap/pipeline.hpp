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

#include "semap/fusion.hpp"
#include "semap/geometry.hpp"
#include "semap/types.hpp"

namespace semap {

/// Frame-by-frame map construction: register the cloud, integrate occupancy,
/// then fuse the frame's label scores into the touched voxels. Frames must be
/// added in index order; the per-frame stages parallelize internally.
class MappingPipeline {
  public:
    MappingPipeline(CameraModel camera, double voxel_size = kDefaultVoxelSize,
                    double prob_floor = kDefaultProbFloor, FuseOptions fuse_options = {});

    void add_frame(const Pose& pose, const PointCloud& cloud, const SegmentationFrame& seg);

    /// Assigns final labels and returns the fused map.
    SemanticVoxelMap& finalize();

    const OccupancyMap& occupancy() const { return occupancy_; }
    const SemanticVoxelMap& semantic() const { return semantic_; }
    std::int64_t frames_processed() const { return frames_processed_; }

  private:
    CameraModel camera_;  // maps sensor-frame points to pixels
    FuseOptions fuse_options_;
    OccupancyMap occupancy_;
    SemanticVoxelMap semantic_;
    std::int64_t frames_processed_ = 0;
};

}  // namespace semap
