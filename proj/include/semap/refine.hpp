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
#include <unordered_set>
#include <vector>

#include "semap/fusion.hpp"
#include "semap/types.hpp"

namespace semap {

/// Per-column voxel counts of one label.
struct CountGrid {
    Label label = Label::Unknown;
    std::unordered_map<ColumnKey, std::int64_t> cells;

    std::int64_t at(const ColumnKey& key) const {
        auto it = cells.find(key);
        return it == cells.end() ? 0 : it->second;
    }
};

enum class ColumnLabel : std::uint8_t { Building, Vegetation, NoDecision };

struct ColumnLabelGrid {
    std::unordered_map<ColumnKey, ColumnLabel> cells;
};

enum class ClusterStatus : std::uint8_t { Static, Moving };

/// One DBSCAN group of vehicle voxels.
struct Cluster {
    std::vector<VoxelKey> members;
    std::int64_t cardinality = 0;
    double horizontal_extent = 0.0;  // larger of the two horizontal AABB edges
    ClusterStatus status = ClusterStatus::Static;
};

struct DbscanResult {
    std::vector<Cluster> clusters;
    std::vector<VoxelKey> noise;
};

struct RefineParams {
    std::int64_t eta_d = 1500;       // cluster-size threshold
    double eta_l = 6.0;              // cluster-length threshold, meters
    double dbscan_eps = 0.6;         // neighborhood radius, meters
    int dbscan_min_pts = 10;         // core-point neighbor count, self included
    int footprint_dilation = 0;      // Chebyshev radius, grid cells

    void validate() const;
};

struct RemovalStats {
    std::int64_t removed_off_road = 0;
    std::int64_t removed_moving = 0;
    std::int64_t removed_noise = 0;
    std::int64_t clusters_static = 0;
    std::int64_t clusters_moving = 0;
};

/// Exact per-column counts of voxels whose final_label equals `label`.
CountGrid build_count_grid(const SemanticVoxelMap& map, Label label);

/// Per-column decision between Building and Vegetation: argmax of
/// prior(l) * count_l / (count_B + count_V); exact ties give NoDecision.
/// Columns with no Building or Vegetation voxels are absent from the result.
ColumnLabelGrid infer_column_labels(const CountGrid& building, const CountGrid& vegetation,
                                    const std::array<double, 2>& prior = {0.5, 0.5});

/// Overrides final_label of every Building/Vegetation voxel in a decided
/// column with the column label. Distributions and all other labels are left
/// intact. Returns the number of relabeled voxels.
std::int64_t apply_column_labels(SemanticVoxelMap& map, const ColumnLabelGrid& grid);

/// Columns containing at least one Road voxel, dilated by a Chebyshev radius.
std::unordered_set<ColumnKey> road_footprint(const SemanticVoxelMap& map, int dilation = 0);

/// Deletes Vehicle voxels whose column lies outside the footprint. Returns
/// the number of deleted voxels.
std::int64_t road_support_filter(SemanticVoxelMap& map, const std::unordered_set<ColumnKey>& footprint);

/// Standard DBSCAN over voxel centers with Euclidean distance; a point is a
/// core point iff it has >= min_pts neighbors within eps, counting itself.
/// Seeds are visited in sorted key order and expansion is FIFO, so border
/// points deterministically join the first cluster that reaches them.
/// Neighbor search uses a cell-binned index; see reference::dbscan for the
/// exhaustive counterpart.
DbscanResult dbscan(std::span<const VoxelKey> keys, double voxel_size, double eps, int min_pts);

/// Static iff (cardinality < eta_d) and (horizontal_extent < eta_l).
ClusterStatus classify_cluster(const Cluster& cluster, const RefineParams& params);

/// Road-support filter, then DBSCAN over the surviving Vehicle voxels, then
/// deletion of Moving clusters and of noise voxels. Static clusters are kept.
RemovalStats remove_moving(SemanticVoxelMap& map, const RefineParams& params);

/// Batch refinement: Building/Vegetation column correction first, then
/// moving-vehicle removal.
RemovalStats refine(SemanticVoxelMap& map, const RefineParams& params);

}  // namespace semap
