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
#include "semap/refine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "semap/errors.hpp"
#include "semap/geometry.hpp"

namespace semap {

void RefineParams::validate() const {
    if (eta_d <= 0) throw ParamError("eta_d must be positive");
    if (eta_l <= 0.0) throw ParamError("eta_l must be positive");
    if (dbscan_eps <= 0.0) throw ParamError("dbscan_eps must be positive");
    if (dbscan_min_pts < 1) throw ParamError("dbscan_min_pts must be at least 1");
    if (footprint_dilation < 0) throw ParamError("footprint_dilation must be non-negative");
}

CountGrid build_count_grid(const SemanticVoxelMap& map, Label label) {
    // Snapshot matching columns, then count with per-thread grids. Integer
    // adds commute, so the merged result is independent of the thread count.
    std::vector<ColumnKey> columns;
    columns.reserve(map.cells.size());
    for (const auto& [key, cell] : map.cells) {
        if (cell.final_label == label) columns.push_back({key.x, key.y});
    }

    CountGrid grid;
    grid.label = label;
    const std::int64_t n = static_cast<std::int64_t>(columns.size());
#pragma omp parallel
    {
        std::unordered_map<ColumnKey, std::int64_t> local;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) ++local[columns[i]];
#pragma omp critical
        for (const auto& [col, count] : local) grid.cells[col] += count;
    }
    return grid;
}

ColumnLabelGrid infer_column_labels(const CountGrid& building, const CountGrid& vegetation,
                                    const std::array<double, 2>& prior) {
    ColumnLabelGrid out;
    auto decide = [&](const ColumnKey& col) {
        if (out.cells.count(col)) return;
        const auto count_b = building.at(col);
        const auto count_v = vegetation.at(col);
        if (count_b + count_v == 0) return;
        // The shared denominator count_b + count_v cancels out of the argmax.
        const double score_b = prior[0] * static_cast<double>(count_b);
        const double score_v = prior[1] * static_cast<double>(count_v);
        ColumnLabel label = ColumnLabel::NoDecision;
        if (score_b > score_v)
            label = ColumnLabel::Building;
        else if (score_v > score_b)
            label = ColumnLabel::Vegetation;
        out.cells.emplace(col, label);
    };
    for (const auto& [col, count] : building.cells) decide(col);
    for (const auto& [col, count] : vegetation.cells) decide(col);
    return out;
}

std::int64_t apply_column_labels(SemanticVoxelMap& map, const ColumnLabelGrid& grid) {
    std::int64_t relabeled = 0;
    for (auto& [key, cell] : map.cells) {
        if (cell.final_label != Label::Building && cell.final_label != Label::Vegetation) continue;
        auto it = grid.cells.find({key.x, key.y});
        if (it == grid.cells.end() || it->second == ColumnLabel::NoDecision) continue;
        const Label target = it->second == ColumnLabel::Building ? Label::Building : Label::Vegetation;
        if (cell.final_label != target) {
            cell.final_label = target;
            ++relabeled;
        }
    }
    return relabeled;
}

std::unordered_set<ColumnKey> road_footprint(const SemanticVoxelMap& map, int dilation) {
    std::unordered_set<ColumnKey> base;
    for (const auto& [key, cell] : map.cells) {
        if (cell.final_label == Label::Road) base.insert({key.x, key.y});
    }
    if (dilation == 0) return base;

    std::unordered_set<ColumnKey> dilated;
    for (const ColumnKey& col : base) {
        for (int dx = -dilation; dx <= dilation; ++dx)
            for (int dy = -dilation; dy <= dilation; ++dy) dilated.insert({col.x + dx, col.y + dy});
    }
    return dilated;
}

std::int64_t road_support_filter(SemanticVoxelMap& map, const std::unordered_set<ColumnKey>& footprint) {
    std::int64_t removed = 0;
    for (auto it = map.cells.begin(); it != map.cells.end();) {
        if (it->second.final_label == Label::Vehicle && !footprint.count({it->first.x, it->first.y})) {
            it = map.cells.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

namespace {

// Shared by dbscan and its exhaustive reference so both routes agree on the
// boundary of the eps ball bit-for-bit.
bool within_eps(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double eps) {
    return (a - b).squaredNorm() <= eps * eps;
}

DbscanResult clusters_from_adjacency(const std::vector<VoxelKey>& keys,
                                     const std::vector<std::vector<std::int32_t>>& neighbors, int min_pts) {
    const std::int64_t n = static_cast<std::int64_t>(keys.size());
    std::vector<bool> core(n);
    for (std::int64_t i = 0; i < n; ++i) core[i] = static_cast<int>(neighbors[i].size()) >= min_pts;

    constexpr std::int32_t kUnassigned = -1;
    std::vector<std::int32_t> cluster_of(n, kUnassigned);
    std::vector<std::vector<std::int32_t>> members;
    std::deque<std::int32_t> frontier;
    for (std::int32_t seed = 0; seed < n; ++seed) {
        if (!core[seed] || cluster_of[seed] != kUnassigned) continue;
        const std::int32_t cid = static_cast<std::int32_t>(members.size());
        members.emplace_back();
        cluster_of[seed] = cid;
        frontier.assign(1, seed);
        while (!frontier.empty()) {
            const std::int32_t current = frontier.front();
            frontier.pop_front();
            members[cid].push_back(current);
            if (!core[current]) continue;  // border points do not expand
            for (const std::int32_t next : neighbors[current]) {
                if (cluster_of[next] == kUnassigned) {
                    cluster_of[next] = cid;
                    frontier.push_back(next);
                }
            }
        }
    }

    DbscanResult result;
    result.clusters.resize(members.size());
    for (std::size_t cid = 0; cid < members.size(); ++cid) {
        Cluster& cluster = result.clusters[cid];
        cluster.members.reserve(members[cid].size());
        std::sort(members[cid].begin(), members[cid].end());
        for (const std::int32_t idx : members[cid]) cluster.members.push_back(keys[idx]);
        cluster.cardinality = static_cast<std::int64_t>(cluster.members.size());
    }
    for (std::int64_t i = 0; i < n; ++i) {
        if (cluster_of[i] == kUnassigned) result.noise.push_back(keys[i]);
    }
    return result;
}

void compute_extents(DbscanResult& result, double voxel_size) {
    for (Cluster& cluster : result.clusters) {
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
}

}  // namespace

DbscanResult dbscan(std::span<const VoxelKey> keys_in, double voxel_size, double eps, int min_pts) {
    if (eps <= 0.0) throw ParamError("dbscan eps must be positive");
    if (min_pts < 1) throw ParamError("dbscan min_pts must be at least 1");

    std::vector<VoxelKey> keys(keys_in.begin(), keys_in.end());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    const std::int64_t n = static_cast<std::int64_t>(keys.size());

    // Keys within eps differ by at most ceil(eps / voxel_size) per axis; one
    // extra cell absorbs floating-point slack in the bound.
    const std::int32_t reach = static_cast<std::int32_t>(std::ceil(eps / voxel_size)) + 1;
    std::unordered_map<VoxelKey, std::int32_t> index;
    index.reserve(keys.size() * 2);
    for (std::int64_t i = 0; i < n; ++i) index.emplace(keys[i], static_cast<std::int32_t>(i));

    std::vector<std::vector<std::int32_t>> neighbors(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        const Eigen::Vector3d center = voxel_center(keys[i], voxel_size);
        auto& list = neighbors[i];
        for (std::int32_t dx = -reach; dx <= reach; ++dx) {
            for (std::int32_t dy = -reach; dy <= reach; ++dy) {
                for (std::int32_t dz = -reach; dz <= reach; ++dz) {
                    const VoxelKey probe{keys[i].x + dx, keys[i].y + dy, keys[i].z + dz};
                    auto it = index.find(probe);
                    if (it == index.end()) continue;
                    if (within_eps(center, voxel_center(probe, voxel_size), eps)) list.push_back(it->second);
                }
            }
        }
        std::sort(list.begin(), list.end());
    }

    DbscanResult result = clusters_from_adjacency(keys, neighbors, min_pts);
    compute_extents(result, voxel_size);
    return result;
}

ClusterStatus classify_cluster(const Cluster& cluster, const RefineParams& params) {
    const bool is_static = cluster.cardinality < params.eta_d && cluster.horizontal_extent < params.eta_l;
    return is_static ? ClusterStatus::Static : ClusterStatus::Moving;
}

RemovalStats remove_moving(SemanticVoxelMap& map, const RefineParams& params) {
    params.validate();
    RemovalStats stats;

    const auto footprint = road_footprint(map, params.footprint_dilation);
    stats.removed_off_road = road_support_filter(map, footprint);

    std::vector<VoxelKey> vehicle_keys;
    for (const auto& [key, cell] : map.cells) {
        if (cell.final_label == Label::Vehicle) vehicle_keys.push_back(key);
    }
    DbscanResult groups = dbscan(vehicle_keys, map.voxel_size, params.dbscan_eps, params.dbscan_min_pts);

    for (Cluster& cluster : groups.clusters) {
        cluster.status = classify_cluster(cluster, params);
        if (cluster.status == ClusterStatus::Moving) {
            ++stats.clusters_moving;
            for (const VoxelKey& key : cluster.members) map.cells.erase(key);
            stats.removed_moving += cluster.cardinality;
        } else {
            ++stats.clusters_static;
        }
    }
    for (const VoxelKey& key : groups.noise) {
        map.cells.erase(key);
        ++stats.removed_noise;
    }
    return stats;
}

RemovalStats refine(SemanticVoxelMap& map, const RefineParams& params) {
    params.validate();
    const CountGrid building = build_count_grid(map, Label::Building);
    const CountGrid vegetation = build_count_grid(map, Label::Vegetation);
    apply_column_labels(map, infer_column_labels(building, vegetation));
    return remove_moving(map, params);
}

}  // namespace semap
