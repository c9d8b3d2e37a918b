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
#include "semap/reference.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "semap/errors.hpp"

namespace semap::reference {

PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud) {
    const double defect = orthonormality_error(pose.rotation);
    if (defect > 1e-6) {
        std::ostringstream msg;
        msg << "rotation of frame " << pose.frame_index << " is not orthonormal: max |R^T R - I| = " << defect;
        throw ValidationError(msg.str());
    }
    PointCloud out;
    out.frame_index = cloud.frame_index;
    out.intensities = cloud.intensities;
    out.points.reserve(cloud.points.size());
    for (const Eigen::Vector3d& p : cloud.points) out.points.push_back(pose.rotation * p + pose.translation);
    return out;
}

std::vector<VoxelKey> voxelize(const PointCloud& cloud, double voxel_size) {
    if (voxel_size <= 0.0) throw ParamError("voxel_size must be positive");
    std::set<VoxelKey> keys;
    for (const Eigen::Vector3d& p : cloud.points) keys.insert(voxelize_point(p, voxel_size));
    return {keys.begin(), keys.end()};
}

void fuse_frame(SemanticVoxelMap& map, const CameraModel& camera, const SegmentationFrame& seg,
                std::span<const VoxelKey> candidates) {
    if (seg.width != camera.width || seg.height != camera.height)
        throw ConfigError("segmentation frame size does not match the camera image size");
    for (const VoxelKey& key : candidates) observe_voxel(map, key, camera, seg);
}

CountGrid build_count_grid(const SemanticVoxelMap& map, Label label) {
    CountGrid grid;
    grid.label = label;
    for (const auto& [key, cell] : map.cells) {
        if (cell.final_label == label) ++grid.cells[ColumnKey{key.x, key.y}];
    }
    return grid;
}

DbscanResult dbscan(std::span<const VoxelKey> keys_in, double voxel_size, double eps, int min_pts) {
    if (eps <= 0.0) throw ParamError("dbscan eps must be positive");
    if (min_pts < 1) throw ParamError("dbscan min_pts must be at least 1");

    std::vector<VoxelKey> keys(keys_in.begin(), keys_in.end());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    const std::int64_t n = static_cast<std::int64_t>(keys.size());

    std::vector<Eigen::Vector3d> centers(n);
    for (std::int64_t i = 0; i < n; ++i) centers[i] = voxel_center(keys[i], voxel_size);

    const double eps2 = eps * eps;
    std::vector<std::vector<std::int32_t>> neighbors(n);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            if ((centers[i] - centers[j]).squaredNorm() <= eps2)
                neighbors[i].push_back(static_cast<std::int32_t>(j));
        }
    }

    constexpr std::int32_t kUnassigned = -1;
    std::vector<std::int32_t> cluster_of(n, kUnassigned);
    std::int32_t next_cluster = 0;
    std::deque<std::int32_t> frontier;
    for (std::int32_t seed = 0; seed < n; ++seed) {
        if (cluster_of[seed] != kUnassigned) continue;
        if (static_cast<int>(neighbors[seed].size()) < min_pts) continue;
        const std::int32_t cid = next_cluster++;
        cluster_of[seed] = cid;
        frontier.assign(1, seed);
        while (!frontier.empty()) {
            const std::int32_t current = frontier.front();
            frontier.pop_front();
            if (static_cast<int>(neighbors[current].size()) < min_pts) continue;
            for (const std::int32_t next : neighbors[current]) {
                if (cluster_of[next] == kUnassigned) {
                    cluster_of[next] = cid;
                    frontier.push_back(next);
                }
            }
        }
    }

    DbscanResult result;
    result.clusters.resize(next_cluster);
    for (std::int64_t i = 0; i < n; ++i) {
        if (cluster_of[i] == kUnassigned)
            result.noise.push_back(keys[i]);
        else
            result.clusters[cluster_of[i]].members.push_back(keys[i]);
    }
    for (Cluster& cluster : result.clusters) {
        cluster.cardinality = static_cast<std::int64_t>(cluster.members.size());
        double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
        double min_y = std::numeric_limits<double>::infinity(), max_y = -min_y;
        for (const VoxelKey& key : cluster.members) {
            const Eigen::Vector3d c = voxel_center(key, voxel_size);
            min_x = std::min(min_x, c.x());
            max_x = std::max(max_x, c.x());
            min_y = std::min(min_y, c.y());
            max_y = std::max(max_y, c.y());
        }
        cluster.horizontal_extent = std::max(max_x - min_x, max_y - min_y);
    }
    return result;
}

}  // namespace semap::reference
