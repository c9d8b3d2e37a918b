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
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "semap/errors.hpp"
#include "semap/io.hpp"
#include "semap/metrics.hpp"
#include "semap/pipeline.hpp"
#include "semap/refine.hpp"
#include "semap/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct RunConfig {
    std::string poses, clouds, scores, calib, scene;
    std::string input, output, pred, truth, report, out_dir;
    double voxel_size = semap::kDefaultVoxelSize;
    double prob_floor = semap::kDefaultProbFloor;
    semap::RefineParams refine_params;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool do_refine = false;
    bool depth_buffer = false;
    bool emit_ply = false;
};

std::vector<fs::path> list_sorted(const fs::path& dir, const std::string& extension) {
    if (!fs::is_directory(dir)) throw semap::ConfigError("'" + dir.string() + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

void add_refine_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--eta-d", cfg.refine_params.eta_d,
                    "vehicle clusters with at least this many voxels are classified moving")
        ->capture_default_str();
    cmd->add_option("--eta-l", cfg.refine_params.eta_l,
                    "vehicle clusters at least this long horizontally (meters) are classified moving")
        ->capture_default_str();
    cmd->add_option("--dbscan-eps", cfg.refine_params.dbscan_eps, "clustering neighborhood radius in meters")
        ->capture_default_str();
    cmd->add_option("--dbscan-min-pts", cfg.refine_params.dbscan_min_pts,
                    "neighbors (self included) required for a core point")
        ->capture_default_str();
    cmd->add_option("--footprint-dilation", cfg.refine_params.footprint_dilation,
                    "Chebyshev dilation of the road footprint, in grid cells")
        ->capture_default_str();
}

void print_label_counts(const semap::SemanticVoxelMap& map) {
    const auto counts = map.counts_by_label();
    for (int l = 0; l <= semap::kNumLabels; ++l) {
        std::cout << "  " << semap::label_name(static_cast<semap::Label>(l)) << ": " << counts[l] << "\n";
    }
}

int cmd_build(const RunConfig& cfg) {
    const std::vector<semap::Pose> poses = semap::read_pose_file(cfg.poses);
    const auto cloud_files = list_sorted(cfg.clouds, ".bin");
    const auto score_files = list_sorted(cfg.scores, ".sscr");
    if (poses.empty() || poses.size() != cloud_files.size() || poses.size() != score_files.size()) {
        std::ostringstream msg;
        msg << "frame counts do not agree (or are zero): poses=" << poses.size() << " clouds=" << cloud_files.size()
            << " scores=" << score_files.size();
        throw semap::ConfigError(msg.str());
    }

    const semap::CalibrationSet calib = semap::read_calibration(cfg.calib);
    semap::FuseOptions fuse_options;
    fuse_options.depth_buffer = cfg.depth_buffer;
    fuse_options.depth_slack = 2.0 * cfg.voxel_size;
    semap::MappingPipeline pipeline(calib.camera, cfg.voxel_size, cfg.prob_floor, fuse_options);

    std::size_t rejected_total = 0;
    for (std::size_t i = 0; i < poses.size(); ++i) {
        std::size_t rejected = 0;
        semap::PointCloud cloud = semap::read_velodyne_bin(cloud_files[i], &rejected);
        rejected_total += rejected;
        cloud.frame_index = poses[i].frame_index;
        semap::SegmentationFrame seg = semap::read_score_map(score_files[i]);
        seg.frame_index = poses[i].frame_index;
        pipeline.add_frame(poses[i], cloud, seg);
    }
    semap::SemanticVoxelMap& map = pipeline.finalize();
    if (cfg.do_refine) semap::refine(map, cfg.refine_params);
    semap::serialize_map(map, cfg.output);

    std::cout << "frames: " << pipeline.frames_processed() << "\n";
    std::cout << "voxels: " << map.size() << "\n";
    if (rejected_total > 0) std::cout << "rejected records: " << rejected_total << "\n";
    print_label_counts(map);
    if (cfg.emit_ply) semap::write_ply(map, cfg.output + ".ply");
    std::cout << "wrote " << cfg.output << "\n";
    return 0;
}

int cmd_refine(const RunConfig& cfg) {
    semap::SemanticVoxelMap map = semap::deserialize_map(cfg.input);
    const auto before = map.counts_by_label();
    const semap::RemovalStats stats = semap::refine(map, cfg.refine_params);
    const auto after = map.counts_by_label();
    semap::serialize_map(map, cfg.output);

    std::cout << "voxel deltas by label:\n";
    for (int l = 0; l <= semap::kNumLabels; ++l) {
        std::cout << "  " << semap::label_name(static_cast<semap::Label>(l)) << ": " << before[l] << " -> "
                  << after[l] << " (" << (after[l] - before[l]) << ")\n";
    }
    std::cout << "clusters: static=" << stats.clusters_static << " moving=" << stats.clusters_moving << "\n";
    std::cout << "removed: off-road=" << stats.removed_off_road << " moving=" << stats.removed_moving
              << " noise=" << stats.removed_noise << "\n";
    if (cfg.emit_ply) semap::write_ply(map, cfg.output + ".ply");
    std::cout << "wrote " << cfg.output << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    const semap::SemanticVoxelMap pred = semap::deserialize_map(cfg.pred);
    const semap::SemanticVoxelMap truth = semap::deserialize_map(cfg.truth);
    const semap::MetricsReport report = semap::compute_report(semap::confusion(pred, truth));
    std::cout << semap::format_report_table(report);
    if (!cfg.report.empty()) {
        std::ofstream out(cfg.report);
        if (!out) throw semap::IoError("cannot open '" + cfg.report + "' for writing");
        out << semap::format_report_kv(report);
    } else {
        std::cout << semap::format_report_kv(report);
    }
    return 0;
}

int cmd_synth(const RunConfig& cfg) {
    semap::SceneBundle bundle = semap::parse_scene_file(cfg.scene);
    if (cfg.seed_given) bundle.scene.seed = cfg.seed;

    const fs::path out_dir(cfg.out_dir);
    fs::create_directories(out_dir / "velodyne");
    fs::create_directories(out_dir / "scores");

    const semap::SemanticVoxelMap truth = semap::generate_ground_truth(bundle.scene, cfg.voxel_size);
    semap::serialize_map(truth, out_dir / "truth.map");
    semap::write_pose_file(bundle.scene.trajectory, out_dir / "poses.txt");
    semap::CalibrationSet calib;
    calib.camera = bundle.sensor.camera;
    semap::write_calibration(calib, out_dir / "calib.txt");

    const std::int64_t frames = static_cast<std::int64_t>(bundle.scene.trajectory.size());
    std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t f = 0; f < frames; ++f) {
        try {
            const semap::FrameData frame = semap::simulate_frame(bundle, truth, cfg.voxel_size, f);
            char name[32];
            std::snprintf(name, sizeof(name), "%06lld", static_cast<long long>(f));
            semap::write_velodyne_bin(frame.cloud, out_dir / "velodyne" / (std::string(name) + ".bin"));
            semap::write_score_map(frame.seg, out_dir / "scores" / (std::string(name) + ".sscr"));
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::cout << "frames: " << frames << "\n";
    std::cout << "ground-truth voxels: " << truth.size() << "\n";
    std::cout << "wrote " << out_dir.string() << "\n";
    return 0;
}

int cmd_export_ply(const RunConfig& cfg) {
    const semap::SemanticVoxelMap map = semap::deserialize_map(cfg.input);
    semap::write_ply(map, cfg.output);
    std::cout << "wrote " << cfg.output << " (" << map.size() << " vertices)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semap: Lidar + label-score semantic 3D mapping pipeline"};
    app.require_subcommand(1);
    RunConfig cfg;

    CLI::App* build = app.add_subcommand("build", "register clouds, fuse per-pixel label scores, write the map");
    build->add_option("--poses", cfg.poses, "pose file, 12 reals per line (row-major [R|t])")->required();
    build->add_option("--clouds", cfg.clouds, "directory of .bin scans, frame order by filename")->required();
    build->add_option("--scores", cfg.scores, "directory of .sscr score maps, frame order by filename")->required();
    build->add_option("--calib", cfg.calib, "calibration file (lidar_to_image, image_size)")->required();
    build->add_option("--output", cfg.output, "output map file")->required();
    build->add_option("--voxel-size", cfg.voxel_size, "voxel edge length in meters")->capture_default_str();
    build->add_option("--prob-floor", cfg.prob_floor, "per-label probability floor applied after each update")
        ->capture_default_str();
    build->add_flag("--depth-buffer", cfg.depth_buffer,
                    "observe only voxels near the front surface of each pixel (default: off)");
    build->add_flag("--refine,!--no-refine", cfg.do_refine, "also run 3D refinement before writing (default: off)");
    build->add_flag("--emit-ply", cfg.emit_ply, "additionally write <output>.ply");
    add_refine_flags(build, cfg);

    CLI::App* refine = app.add_subcommand("refine", "column label correction + moving-vehicle removal");
    refine->add_option("--input", cfg.input, "input map file")->required();
    refine->add_option("--output", cfg.output, "output map file")->required();
    refine->add_flag("--emit-ply", cfg.emit_ply, "additionally write <output>.ply");
    add_refine_flags(refine, cfg);

    CLI::App* evaluate = app.add_subcommand("evaluate", "per-class accuracy and IoU against a ground-truth map");
    evaluate->add_option("--pred", cfg.pred, "predicted map file")->required();
    evaluate->add_option("--truth", cfg.truth, "ground-truth map file")->required();
    evaluate->add_option("--report", cfg.report, "write the key=value report here instead of stdout");

    CLI::App* synth = app.add_subcommand("synth", "generate synthetic frames and ground truth from a scene file");
    synth->add_option("--scene", cfg.scene, "scene description file")->required();
    synth->add_option("--out", cfg.out_dir, "output directory")->required();
    synth->add_option("--voxel-size", cfg.voxel_size, "voxel edge length for the ground-truth map")
        ->capture_default_str();
    synth->add_option("--seed", cfg.seed, "override the scene file's random seed")
        ->trigger_on_parse()
        ->each([&cfg](const std::string&) { cfg.seed_given = true; });

    CLI::App* export_ply = app.add_subcommand("export-ply", "write a colored PLY of a map file");
    export_ply->add_option("--input", cfg.input, "input map file")->required();
    export_ply->add_option("--output", cfg.output, "output .ply file")->required();

    try {
        app.parse(argc, argv);
        if (build->parsed()) return cmd_build(cfg);
        if (refine->parsed()) return cmd_refine(cfg);
        if (evaluate->parsed()) return cmd_evaluate(cfg);
        if (synth->parsed()) return cmd_synth(cfg);
        if (export_ply->parsed()) return cmd_export_ply(cfg);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const semap::Error& e) {
        std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
