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

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "semap/types.hpp"

namespace semap {

/// Pinhole-style camera described by a single 3x4 matrix mapping Lidar-frame
/// homogeneous points to (u, v, w) with pixel = (u/w, v/w) and depth w.
struct CameraModel {
    Eigen::Matrix<double, 3, 4> projection = Eigen::Matrix<double, 3, 4>::Identity();
    int width = 0;
    int height = 0;
    double min_depth = 1e-3;

    /// Throws ValidationError unless the projection has full row rank and
    /// the image size is positive.
    void validate() const;
};

struct PixelCoord {
    double u = 0.0;
    double v = 0.0;
};

/// Per-pixel label scores of one camera frame, width x height x 5 with the
/// five channels interleaved per pixel. Stored as float32 to match the file
/// format exactly.
struct SegmentationFrame {
    int width = 0;
    int height = 0;
    std::int64_t frame_index = 0;
    std::vector<float> scores;  // size width * height * kNumLabels

    static SegmentationFrame zeros(int width, int height, std::int64_t frame_index = 0);

    std::size_t pixel_offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * kNumLabels;
    }
    float score_at(int x, int y, int channel) const { return scores[pixel_offset(x, y) + channel]; }
    void set_pixel(int x, int y, const LabelDistribution& d) {
        const std::size_t off = pixel_offset(x, y);
        for (int c = 0; c < kNumLabels; ++c) scores[off + c] = static_cast<float>(d.p[c]);
    }
    LabelDistribution distribution_at(int x, int y) const {
        LabelDistribution d;
        const std::size_t off = pixel_offset(x, y);
        for (int c = 0; c < kNumLabels; ++c) d.p[c] = scores[off + c];
        return d;
    }
};

/// Rejects negative scores and brings every pixel onto the simplex. Pixels
/// already summing to 1 within 1e-6 are left untouched so that normalized
/// files reload bit-exactly; all-zero pixels become uniform (no evidence).
void normalize_scores(SegmentationFrame& frame);

struct SemanticCell {
    LabelDistribution distribution = LabelDistribution::uniform();
    Label final_label = Label::Unknown;
    std::uint32_t observations = 0;
};

/// Sparse map from voxel keys to fused label state. Geometry (the cell set)
/// is owned by integration; fusion only updates existing cells.
struct SemanticVoxelMap {
    explicit SemanticVoxelMap(double voxel_size_in = kDefaultVoxelSize, double prob_floor_in = kDefaultProbFloor);

    SemanticCell& ensure_cell(const VoxelKey& key) { return cells[key]; }
    const SemanticCell* find(const VoxelKey& key) const {
        auto it = cells.find(key);
        return it == cells.end() ? nullptr : &it->second;
    }
    std::size_t size() const { return cells.size(); }

    std::array<std::int64_t, kNumLabels + 1> counts_by_label() const;
    std::vector<VoxelKey> sorted_keys() const;

    double voxel_size;
    double prob_floor;
    std::unordered_map<VoxelKey, SemanticCell> cells;
};

/// (u, v, w) = P (x, y, z, 1); absent when w <= min_depth or the pixel falls
/// outside [0, width) x [0, height).
std::optional<PixelCoord> project_point(const CameraModel& camera, const Eigen::Vector3d& point);

/// Chains the sensor pose into the projection so world-frame points can be
/// projected directly: P' = P * [R^T | -R^T t].
CameraModel compose_with_pose(const CameraModel& camera, const Pose& pose);

/// posterior_i = prior_i * observed_i / Z, then components are floored at
/// prob_floor and the remaining mass rescaled so the result is an exact
/// distribution. prob_floor == 0 gives the pure product form. Throws
/// DataError when the evidence is fully disjoint from the prior (Z < 1e-30).
LabelDistribution bayes_update(const LabelDistribution& prior, const LabelDistribution& observed,
                               double prob_floor = kDefaultProbFloor);

/// Projects the voxel center into the camera and, if visible, folds the score
/// vector at the hit pixel into the cell. Returns whether an observation was
/// applied. The key must already exist in the map.
bool observe_voxel(SemanticVoxelMap& map, const VoxelKey& key, const CameraModel& camera,
                   const SegmentationFrame& seg);

struct FuseOptions {
    /// Optional visibility test: a candidate voxel is observed only when its
    /// depth is within `depth_slack` of the nearest candidate hitting the
    /// same pixel. Off by default; occluded voxels then receive the front
    /// surface's label, and the refinement stage owns the cleanup.
    bool depth_buffer = false;
    double depth_slack = 2.0 * kDefaultVoxelSize;
};

/// Applies observe_voxel to every candidate key (the keys integrated this
/// frame). Candidates must be present in the map and sorted; cells are
/// distinct so updates run in parallel.
void fuse_frame(SemanticVoxelMap& map, const CameraModel& camera, const SegmentationFrame& seg,
                std::span<const VoxelKey> candidates, const FuseOptions& options = {});

/// Sets final_label = argmax(distribution) for observed cells and Unknown for
/// never-observed ones.
void finalize_labels(SemanticVoxelMap& map);

}  // namespace semap
