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
#include "semap/pipeline.hpp"

namespace semap {

MappingPipeline::MappingPipeline(CameraModel camera, double voxel_size, double prob_floor,
                                 FuseOptions fuse_options)
    : camera_(camera), fuse_options_(fuse_options), occupancy_(voxel_size), semantic_(voxel_size, prob_floor) {
    camera_.validate();
}

void MappingPipeline::add_frame(const Pose& pose, const PointCloud& cloud, const SegmentationFrame& seg) {
    const PointCloud registered = transform_cloud(pose, cloud);
    const std::vector<VoxelKey> keys = voxelize(registered, occupancy_.voxel_size);
    occupancy_.integrate_frame(keys, pose.frame_index);
    for (const VoxelKey& key : keys) semantic_.ensure_cell(key);
    fuse_frame(semantic_, compose_with_pose(camera_, pose), seg, keys, fuse_options_);
    ++frames_processed_;
}

SemanticVoxelMap& MappingPipeline::finalize() {
    finalize_labels(semantic_);
    return semantic_;
}

}  // namespace semap
