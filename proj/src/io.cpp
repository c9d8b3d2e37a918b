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
#include "semap/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "semap/errors.hpp"
#include "semap/geometry.hpp"

namespace semap {

namespace {

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::vector<double> parse_doubles(const std::string& line) {
    std::istringstream tokens(line);
    std::vector<double> values;
    double v;
    while (tokens >> v) values.push_back(v);
    return values;
}

bool is_blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

PointCloud read_velodyne_bin(const std::filesystem::path& path, std::size_t* rejected) {
    std::ifstream in = open_input(path, std::ios::in | std::ios::binary);
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    in.seekg(0, std::ios::beg);
    if (size % 16 != 0) {
        std::ostringstream msg;
        msg << "'" << path.string() << "': size " << size << " is not a multiple of 16; trailing record at byte "
            << (size - size % 16);
        throw FormatError(msg.str());
    }

    PointCloud cloud;
    const std::size_t count = static_cast<std::size_t>(size) / 16;
    cloud.points.reserve(count);
    cloud.intensities.reserve(count);
    std::size_t skipped = 0;
    float record[4];
    for (std::size_t i = 0; i < count; ++i) {
        in.read(reinterpret_cast<char*>(record), sizeof(record));
        if (!in) throw IoError("read failure in '" + path.string() + "'");
        if (!std::isfinite(record[0]) || !std::isfinite(record[1]) || !std::isfinite(record[2]) ||
            !std::isfinite(record[3])) {
            ++skipped;
            continue;
        }
        cloud.points.emplace_back(record[0], record[1], record[2]);
        cloud.intensities.push_back(record[3]);
    }
    if (rejected) *rejected = skipped;
    return cloud;
}

void write_velodyne_bin(const PointCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out = open_output(path, std::ios::out | std::ios::binary);
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const float record[4] = {static_cast<float>(cloud.points[i].x()), static_cast<float>(cloud.points[i].y()),
                                 static_cast<float>(cloud.points[i].z()),
                                 cloud.has_intensities() ? cloud.intensities[i] : 0.0f};
        out.write(reinterpret_cast<const char*>(record), sizeof(record));
    }
    if (!out) throw IoError("write failure in '" + path.string() + "'");
}

std::vector<Pose> read_pose_file(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<Pose> poses;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank_or_comment(line)) continue;
        const std::vector<double> v = parse_doubles(line);
        if (v.size() != 12) {
            std::ostringstream msg;
            msg << "'" << path.string() << "' line " << line_no << ": expected 12 values, got " << v.size();
            throw FormatError(msg.str());
        }
        Pose pose;
        pose.rotation << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
        pose.translation << v[3], v[7], v[11];
        pose.frame_index = static_cast<std::int64_t>(poses.size());

        const double det = pose.rotation.determinant();
        if (std::abs(det - 1.0) > 0.1) {
            std::ostringstream msg;
            msg << "'" << path.string() << "' line " << line_no << ": rotation determinant " << det
                << " is not close to 1";
            throw ValidationError(msg.str());
        }
        const double defect = orthonormality_error(pose.rotation);
        if (defect > 1e-3) {
            std::ostringstream msg;
            msg << "'" << path.string() << "' line " << line_no << ": rotation defect " << defect << " exceeds 1e-3";
            throw ValidationError(msg.str());
        }
        pose.rotation = nearest_rotation(pose.rotation);
        poses.push_back(pose);
    }
    return poses;
}

void write_pose_file(const std::vector<Pose>& poses, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    for (const Pose& pose : poses) {
        const Eigen::Matrix3d& r = pose.rotation;
        const Eigen::Vector3d& t = pose.translation;
        out << format_double(r(0, 0)) << " " << format_double(r(0, 1)) << " " << format_double(r(0, 2)) << " "
            << format_double(t(0)) << " " << format_double(r(1, 0)) << " " << format_double(r(1, 1)) << " "
            << format_double(r(1, 2)) << " " << format_double(t(1)) << " " << format_double(r(2, 0)) << " "
            << format_double(r(2, 1)) << " " << format_double(r(2, 2)) << " " << format_double(t(2)) << "\n";
    }
    if (!out) throw IoError("write failure in '" + path.string() + "'");
}

namespace {
constexpr char kScoreMagic[4] = {'S', 'S', 'C', 'R'};
}

SegmentationFrame read_score_map(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, std::ios::in | std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kScoreMagic, 4) != 0)
        throw FormatError("'" + path.string() + "': missing SSCR magic");

    std::uint32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) throw FormatError("'" + path.string() + "': truncated header");
    if (dims[2] != kNumLabels) {
        std::ostringstream msg;
        msg << "'" << path.string() << "': expected " << kNumLabels << " channels, got " << dims[2];
        throw FormatError(msg.str());
    }

    SegmentationFrame frame;
    frame.width = static_cast<int>(dims[0]);
    frame.height = static_cast<int>(dims[1]);
    const std::size_t expected = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    frame.scores.resize(expected);
    in.read(reinterpret_cast<char*>(frame.scores.data()), static_cast<std::streamsize>(expected * sizeof(float)));
    if (!in || in.gcount() != static_cast<std::streamsize>(expected * sizeof(float)))
        throw FormatError("'" + path.string() + "': payload shorter than W*H*C floats");
    char extra;
    if (in.read(&extra, 1)) throw FormatError("'" + path.string() + "': trailing bytes after payload");

    normalize_scores(frame);
    return frame;
}

void write_score_map(const SegmentationFrame& frame, const std::filesystem::path& path) {
    std::ofstream out = open_output(path, std::ios::out | std::ios::binary);
    out.write(kScoreMagic, 4);
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(frame.width), static_cast<std::uint32_t>(frame.height),
                                   kNumLabels};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(frame.scores.data()),
              static_cast<std::streamsize>(frame.scores.size() * sizeof(float)));
    if (!out) throw IoError("write failure in '" + path.string() + "'");
}

CalibrationSet read_calibration(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    CalibrationSet calib;
    bool have_matrix = false, have_size = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank_or_comment(line)) continue;
        std::istringstream tokens(line);
        std::string tag;
        tokens >> tag;
        std::vector<double> values;
        double v;
        while (tokens >> v) values.push_back(v);
        if (tag == "lidar_to_image:") {
            if (values.size() != 12) {
                std::ostringstream msg;
                msg << "'" << path.string() << "' line " << line_no << ": expected 12 values, got " << values.size();
                throw FormatError(msg.str());
            }
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 4; ++c) calib.camera.projection(r, c) = values[r * 4 + c];
            have_matrix = true;
        } else if (tag == "image_size:") {
            if (values.size() != 2) {
                std::ostringstream msg;
                msg << "'" << path.string() << "' line " << line_no << ": expected 2 values, got " << values.size();
                throw FormatError(msg.str());
            }
            calib.camera.width = static_cast<int>(values[0]);
            calib.camera.height = static_cast<int>(values[1]);
            have_size = true;
        } else {
            std::ostringstream msg;
            msg << "'" << path.string() << "' line " << line_no << ": unknown tag '" << tag << "'";
            throw FormatError(msg.str());
        }
    }
    if (!have_matrix || !have_size)
        throw FormatError("'" + path.string() + "': needs lidar_to_image: and image_size: entries");
    calib.camera.validate();
    return calib;
}

void write_calibration(const CalibrationSet& calib, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "lidar_to_image:";
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) out << " " << format_double(calib.camera.projection(r, c));
    out << "\n";
    out << "image_size: " << calib.camera.width << " " << calib.camera.height << "\n";
    if (!out) throw IoError("write failure in '" + path.string() + "'");
}

void write_ply(const SemanticVoxelMap& map, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "ply\nformat ascii 1.0\nelement vertex " << map.size()
        << "\nproperty float x\nproperty float y\nproperty float z\n"
           "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
    for (const VoxelKey& key : map.sorted_keys()) {
        const Eigen::Vector3d c = voxel_center(key, map.voxel_size);
        const auto color = label_color(map.cells.at(key).final_label);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.4f %.4f %.4f %u %u %u\n", c.x(), c.y(), c.z(), color[0], color[1],
                      color[2]);
        out << buf;
    }
    if (!out) throw IoError("write failure in '" + path.string() + "'");
}

void serialize_map(const SemanticVoxelMap& map, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "semap-map 1\n";
    out << "voxel_size " << format_double(map.voxel_size) << "\n";
    for (const VoxelKey& key : map.sorted_keys()) {
        const SemanticCell& cell = map.cells.at(key);
        out << key.x << " " << key.y << " " << key.z << " " << label_name(cell.final_label);
        for (double p : cell.distribution.p) out << " " << format_double(p);
        out << " " << cell.observations << "\n";
    }
    if (!out) throw IoError("write failure in '" + path.string() + "'");
}

SemanticVoxelMap deserialize_map(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line) || line != "semap-map 1")
        throw FormatError("'" + path.string() + "': missing 'semap-map 1' header");
    if (!std::getline(in, line)) throw FormatError("'" + path.string() + "': missing voxel_size header");
    std::istringstream header(line);
    std::string tag;
    double voxel_size = 0.0;
    header >> tag >> voxel_size;
    if (tag != "voxel_size" || !(voxel_size > 0.0))
        throw FormatError("'" + path.string() + "': malformed voxel_size header");

    SemanticVoxelMap map(voxel_size);
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank_or_comment(line)) continue;
        std::istringstream tokens(line);
        std::vector<std::string> fields;
        std::string field;
        while (tokens >> field) fields.push_back(field);
        if (fields.size() != 10) {
            std::ostringstream msg;
            msg << "'" << path.string() << "' line " << line_no << ": expected 10 tokens, got " << fields.size();
            throw FormatError(msg.str());
        }
        try {
            VoxelKey key{static_cast<std::int32_t>(std::stol(fields[0])),
                         static_cast<std::int32_t>(std::stol(fields[1])),
                         static_cast<std::int32_t>(std::stol(fields[2]))};
            SemanticCell cell;
            cell.final_label = parse_label(fields[3]);
            for (int c = 0; c < kNumLabels; ++c) cell.distribution.p[c] = std::stod(fields[4 + c]);
            cell.observations = static_cast<std::uint32_t>(std::stoul(fields[9]));
            map.cells[key] = cell;
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "'" << path.string() << "' line " << line_no << ": " << e.what();
            throw FormatError(msg.str());
        }
    }
    return map;
}

}  // namespace semap
