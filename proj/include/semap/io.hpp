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

#include <filesystem>
#include <string>
#include <vector>

#include "semap/fusion.hpp"
#include "semap/types.hpp"

namespace semap {

/// Lidar-to-image projection plus image size, as one pre-composed 3x4 matrix.
struct CalibrationSet {
    CameraModel camera;
};

/// KITTI raw scans: little-endian float32 quadruples (x, y, z, reflectance).
/// Records with non-finite values are skipped and counted in *rejected when
/// provided. Throws FormatError (with the byte offset) on truncated files.
PointCloud read_velodyne_bin(const std::filesystem::path& path, std::size_t* rejected = nullptr);
void write_velodyne_bin(const PointCloud& cloud, const std::filesystem::path& path);

/// One pose per line as 12 reals, row-major [R|t]. Rotations are validated
/// (orthonormality defect <= 1e-3, |det - 1| <= 0.1) and projected onto the
/// nearest rotation matrix.
std::vector<Pose> read_pose_file(const std::filesystem::path& path);
void write_pose_file(const std::vector<Pose>& poses, const std::filesystem::path& path);

/// Score-map container: magic "SSCR", little-endian uint32 W, H, C (C must be
/// 5), then W*H*C little-endian float32 values, row by row with channels
/// interleaved per pixel. Scores are normalized on load.
SegmentationFrame read_score_map(const std::filesystem::path& path);
void write_score_map(const SegmentationFrame& frame, const std::filesystem::path& path);

/// Key-value text file: "lidar_to_image:" followed by 12 reals (row-major
/// 3x4) and "image_size:" followed by width and height.
CalibrationSet read_calibration(const std::filesystem::path& path);
void write_calibration(const CalibrationSet& calib, const std::filesystem::path& path);

/// ASCII PLY with one vertex per voxel center, colored by the label palette.
void write_ply(const SemanticVoxelMap& map, const std::filesystem::path& path);

/// Text map format: a header carrying the voxel size, then one line per voxel
/// "ix iy iz label p0 p1 p2 p3 p4 obs_count" in sorted key order. Reals are
/// written with enough digits to round-trip exactly.
void serialize_map(const SemanticVoxelMap& map, const std::filesystem::path& path);
SemanticVoxelMap deserialize_map(const std::filesystem::path& path);

}  // namespace semap
