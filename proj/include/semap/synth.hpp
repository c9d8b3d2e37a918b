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

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "semap/fusion.hpp"
#include "semap/metrics.hpp"
#include "semap/refine.hpp"
#include "semap/types.hpp"

namespace semap {

/// Labeled axis-aligned box, corners in meters.
struct ScenePrimitive {
    Label label = Label::Unknown;
    Eigen::Vector3d lo = Eigen::Vector3d::Zero();
    Eigen::Vector3d hi = Eigen::Vector3d::Zero();
};

/// Rigid box translated by `step` meters every frame.
struct MovingObject {
    ScenePrimitive box;
    Eigen::Vector3d step = Eigen::Vector3d::Zero();
};

struct SceneSpec {
    std::vector<ScenePrimitive> primitives;
    std::vector<MovingObject> moving;
    std::vector<Pose> trajectory;
    std::uint64_t seed = 0;
};

struct SensorModel {
    CameraModel camera;
    double lidar_range = 120.0;
    double sample_step = 0.1;  // face sampling grid pitch, meters
};

/// Confusion noise injected into rendered label scores. At rate 0 and very
/// large sharpness the scores collapse to one-hot ground truth.
struct NoiseSpec {
    double confusion_rate = 0.0;
    std::vector<std::pair<Label, Label>> confusion_pairs = {{Label::Building, Label::Vegetation}};
    double softmax_sharpness = 8.0;
};

/// One parsed scene file.
struct SceneBundle {
    SceneSpec scene;
    SensorModel sensor;
    NoiseSpec noise;
};

/// Throws ValidationError on degenerate primitives, empty trajectories or
/// out-of-range noise parameters.
void validate_scene(const SceneBundle& bundle);

/// Line-oriented text format; see the README for the schema. Errors carry the
/// offending line number.
SceneBundle parse_scene_file(const std::filesystem::path& path);

/// Every voxel whose center lies inside a static primitive, labeled one-hot.
/// Overlaps resolve to the later primitive in list order. Moving objects
/// leave no ground truth.
SemanticVoxelMap generate_ground_truth(const SceneSpec& scene, double voxel_size);

struct FrameData {
    Pose pose;
    PointCloud cloud;  // sensor frame
    SegmentationFrame seg;
};

/// Deterministically samples primitive surfaces (moving boxes at their
/// frame-translated position) within lidar range, expresses them in the
/// sensor frame, and renders the label-score image by projecting occupied
/// voxel centers with a nearest-depth buffer, then injecting confusion noise.
/// The random stream is derived from (seed, frame_index) only.
FrameData simulate_frame(const SceneBundle& bundle, const SemanticVoxelMap& ground_truth, double voxel_size,
                         std::int64_t frame_index);

struct EndToEndResult {
    SemanticVoxelMap truth;
    SemanticVoxelMap unrefined;
    SemanticVoxelMap refined;
    MetricsReport unrefined_report;
    MetricsReport refined_report;
};

/// Mapping, fusion and finalization over the whole trajectory, evaluation
/// against the generated ground truth, then refinement and re-evaluation.
EndToEndResult run_end_to_end(const SceneBundle& bundle, const RefineParams& params,
                              double voxel_size = kDefaultVoxelSize, double prob_floor = kDefaultProbFloor);

}  // namespace semap
