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
#include "semap/fusion.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "semap/errors.hpp"
#include "semap/geometry.hpp"

namespace semap {

void CameraModel::validate() const {
    if (width <= 0 || height <= 0) throw ValidationError("camera image size must be positive");
    if (!projection.allFinite()) throw ValidationError("camera projection contains non-finite entries");
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(projection);
    const auto& sv = svd.singularValues();
    if (sv(2) <= 1e-12 * sv(0)) throw ValidationError("camera projection is rank-deficient");
}

SegmentationFrame SegmentationFrame::zeros(int width, int height, std::int64_t frame_index) {
    SegmentationFrame f;
    f.width = width;
    f.height = height;
    f.frame_index = frame_index;
    f.scores.assign(static_cast<std::size_t>(width) * height * kNumLabels, 0.0f);
    return f;
}

void normalize_scores(SegmentationFrame& frame) {
    const std::int64_t pixels = static_cast<std::int64_t>(frame.width) * frame.height;
    // Validate before mutating; exceptions must not leave the parallel loop.
    for (std::int64_t i = 0; i < pixels; ++i) {
        const float* px = frame.scores.data() + static_cast<std::size_t>(i) * kNumLabels;
        for (int c = 0; c < kNumLabels; ++c) {
            if (px[c] < 0.0f) {
                std::ostringstream msg;
                msg << "negative score " << px[c] << " at pixel " << i % frame.width << "," << i / frame.width
                    << " channel " << c;
                throw DataError(msg.str());
            }
        }
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < pixels; ++i) {
        float* px = frame.scores.data() + static_cast<std::size_t>(i) * kNumLabels;
        double sum = 0.0;
        for (int c = 0; c < kNumLabels; ++c) sum += px[c];
        if (sum == 0.0) {
            for (int c = 0; c < kNumLabels; ++c) px[c] = 1.0f / kNumLabels;
        } else if (std::abs(sum - 1.0) > 1e-6) {
            for (int c = 0; c < kNumLabels; ++c) px[c] = static_cast<float>(px[c] / sum);
        }
    }
}

SemanticVoxelMap::SemanticVoxelMap(double voxel_size_in, double prob_floor_in)
    : voxel_size(voxel_size_in), prob_floor(prob_floor_in) {
    if (voxel_size <= 0.0) throw ParamError("voxel_size must be positive");
    if (prob_floor < 0.0 || prob_floor >= 1.0 / kNumLabels)
        throw ParamError("prob_floor must lie in [0, 1/5)");
}

std::array<std::int64_t, kNumLabels + 1> SemanticVoxelMap::counts_by_label() const {
    std::array<std::int64_t, kNumLabels + 1> counts{};
    for (const auto& [key, cell] : cells) ++counts[static_cast<int>(cell.final_label)];
    return counts;
}

std::vector<VoxelKey> SemanticVoxelMap::sorted_keys() const {
    std::vector<VoxelKey> keys;
    keys.reserve(cells.size());
    for (const auto& [key, cell] : cells) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    return keys;
}

CameraModel compose_with_pose(const CameraModel& camera, const Pose& pose) {
    Eigen::Matrix4d world_to_sensor = Eigen::Matrix4d::Identity();
    world_to_sensor.block<3, 3>(0, 0) = pose.rotation.transpose();
    world_to_sensor.block<3, 1>(0, 3) = -(pose.rotation.transpose() * pose.translation);
    CameraModel composed = camera;
    composed.projection = camera.projection * world_to_sensor;
    return composed;
}

std::optional<PixelCoord> project_point(const CameraModel& camera, const Eigen::Vector3d& point) {
    const Eigen::Vector4d hom(point.x(), point.y(), point.z(), 1.0);
    const Eigen::Vector3d uvw = camera.projection * hom;
    if (uvw.z() <= camera.min_depth) return std::nullopt;
    const double u = uvw.x() / uvw.z();
    const double v = uvw.y() / uvw.z();
    if (u < 0.0 || u >= camera.width || v < 0.0 || v >= camera.height) return std::nullopt;
    return PixelCoord{u, v};
}

namespace {

// Pins every component below the floor to exactly the floor and rescales the
// unpinned mass; iterates because rescaling can push new components under.
void apply_floor(LabelDistribution& d, double floor) {
    std::array<bool, kNumLabels> pinned{};
    for (;;) {
        int pin_count = 0;
        double free_sum = 0.0;
        for (int i = 0; i < kNumLabels; ++i) {
            if (pinned[i])
                ++pin_count;
            else
                free_sum += d.p[i];
        }
        const double target = 1.0 - pin_count * floor;
        bool changed = false;
        for (int i = 0; i < kNumLabels; ++i) {
            if (!pinned[i] && d.p[i] * target / free_sum < floor) {
                pinned[i] = true;
                changed = true;
            }
        }
        if (!changed) {
            for (int i = 0; i < kNumLabels; ++i) {
                d.p[i] = pinned[i] ? floor : d.p[i] * target / free_sum;
            }
            return;
        }
    }
}

}  // namespace

LabelDistribution bayes_update(const LabelDistribution& prior, const LabelDistribution& observed,
                               double prob_floor) {
    LabelDistribution post;
    double z = 0.0;
    for (int i = 0; i < kNumLabels; ++i) {
        post.p[i] = prior.p[i] * observed.p[i];
        z += post.p[i];
    }
    if (z < 1e-30) throw DataError("degenerate evidence: prior and observation share no mass");
    for (int i = 0; i < kNumLabels; ++i) post.p[i] /= z;
    if (prob_floor > 0.0) apply_floor(post, prob_floor);
    return post;
}

namespace {

bool observe_cell(SemanticCell& cell, const VoxelKey& key, const SemanticVoxelMap& map,
                  const CameraModel& camera, const SegmentationFrame& seg) {
    const auto pixel = project_point(camera, voxel_center(key, map.voxel_size));
    if (!pixel) return false;
    const int px = static_cast<int>(std::floor(pixel->u));
    const int py = static_cast<int>(std::floor(pixel->v));
    if (px < 0 || px >= seg.width || py < 0 || py >= seg.height) return false;
    cell.distribution = bayes_update(cell.distribution, seg.distribution_at(px, py), map.prob_floor);
    cell.final_label = cell.distribution.argmax();
    ++cell.observations;
    return true;
}

}  // namespace

bool observe_voxel(SemanticVoxelMap& map, const VoxelKey& key, const CameraModel& camera,
                   const SegmentationFrame& seg) {
    auto it = map.cells.find(key);
    if (it == map.cells.end()) throw ValidationError("observe_voxel: key is not a map cell");
    return observe_cell(it->second, key, map, camera, seg);
}

void fuse_frame(SemanticVoxelMap& map, const CameraModel& camera, const SegmentationFrame& seg,
                std::span<const VoxelKey> candidates, const FuseOptions& options) {
    if (seg.width != camera.width || seg.height != camera.height)
        throw ConfigError("segmentation frame size does not match the camera image size");

    const std::int64_t n = static_cast<std::int64_t>(candidates.size());
    std::vector<SemanticCell*> cell_ptrs(candidates.size());
    for (std::int64_t i = 0; i < n; ++i) {
        auto it = map.cells.find(candidates[i]);
        if (it == map.cells.end()) throw ValidationError("fuse_frame: candidate key is not a map cell");
        cell_ptrs[i] = &it->second;
    }

    // Depth gate: nearest candidate depth per pixel, merged deterministically
    // from per-thread buffers (min is order-independent).
    std::vector<float> min_depth;
    if (options.depth_buffer) {
        min_depth.assign(static_cast<std::size_t>(camera.width) * camera.height,
                         std::numeric_limits<float>::infinity());
#pragma omp parallel
        {
            std::vector<float> local(min_depth.size(), std::numeric_limits<float>::infinity());
#pragma omp for schedule(static)
            for (std::int64_t i = 0; i < n; ++i) {
                const Eigen::Vector3d c = voxel_center(candidates[i], map.voxel_size);
                const Eigen::Vector3d uvw = camera.projection * Eigen::Vector4d(c.x(), c.y(), c.z(), 1.0);
                if (uvw.z() <= camera.min_depth) continue;
                const double u = uvw.x() / uvw.z();
                const double v = uvw.y() / uvw.z();
                if (u < 0.0 || u >= camera.width || v < 0.0 || v >= camera.height) continue;
                const std::size_t idx =
                    static_cast<std::size_t>(std::floor(v)) * camera.width + static_cast<std::size_t>(std::floor(u));
                local[idx] = std::min(local[idx], static_cast<float>(uvw.z()));
            }
#pragma omp critical
            for (std::size_t i = 0; i < min_depth.size(); ++i) min_depth[i] = std::min(min_depth[i], local[i]);
        }
    }

    std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            if (options.depth_buffer) {
                const Eigen::Vector3d c = voxel_center(candidates[i], map.voxel_size);
                const Eigen::Vector3d uvw = camera.projection * Eigen::Vector4d(c.x(), c.y(), c.z(), 1.0);
                if (uvw.z() <= camera.min_depth) continue;
                const double u = uvw.x() / uvw.z();
                const double v = uvw.y() / uvw.z();
                if (u < 0.0 || u >= camera.width || v < 0.0 || v >= camera.height) continue;
                const std::size_t idx =
                    static_cast<std::size_t>(std::floor(v)) * camera.width + static_cast<std::size_t>(std::floor(u));
                if (uvw.z() > min_depth[idx] + options.depth_slack) continue;
            }
            observe_cell(*cell_ptrs[i], candidates[i], map, camera, seg);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

void finalize_labels(SemanticVoxelMap& map) {
    for (auto& [key, cell] : map.cells) {
        cell.final_label = cell.observations > 0 ? cell.distribution.argmax() : Label::Unknown;
    }
}

}  // namespace semap
