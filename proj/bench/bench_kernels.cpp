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

// Times the OpenMP kernels against their serial reference implementations on
// synthetic inputs sized like one KITTI-scale frame batch.

#include <omp.h>

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "semap/fusion.hpp"
#include "semap/geometry.hpp"
#include "semap/reference.hpp"
#include "semap/refine.hpp"
#include "semap/types.hpp"

namespace {

using semap::Label;
using semap::LabelDistribution;
using semap::PointCloud;
using semap::Pose;
using semap::VoxelKey;

constexpr double kVoxelSize = 0.2;

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double start = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - start);
    }
    return best * 1000.0;
}

void report(const char* kernel, std::size_t n, double serial_ms, double parallel_ms) {
    std::printf("%-18s %10zu %12.2f %12.2f %9.2fx\n", kernel, n, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

PointCloud random_cloud(std::size_t n, std::mt19937_64& rng) {
    PointCloud cloud;
    cloud.points.reserve(n);
    std::uniform_real_distribution<double> coord(-60.0, 60.0);
    for (std::size_t i = 0; i < n; ++i) cloud.points.emplace_back(coord(rng), coord(rng), coord(rng));
    return cloud;
}

}  // namespace

int main(int argc, char** argv) {
    double scale = 1.0;
    if (argc > 1) scale = std::stod(argv[1]);
    std::mt19937_64 rng(7);

    std::printf("threads: %d  (set OMP_NUM_THREADS to vary)\n", omp_get_max_threads());
    std::printf("%-18s %10s %12s %12s %10s\n", "kernel", "n", "serial_ms", "parallel_ms", "speedup");

    // transform_cloud
    {
        const auto n = static_cast<std::size_t>(2'000'000 * scale);
        const PointCloud cloud = random_cloud(n, rng);
        Pose pose;
        pose.rotation = Eigen::AngleAxisd(0.42, Eigen::Vector3d::UnitZ()).toRotationMatrix();
        pose.translation = {10.0, -4.0, 1.0};
        PointCloud out;
        const double serial = time_best_of(3, [&] { out = semap::reference::transform_cloud(pose, cloud); });
        const double parallel = time_best_of(3, [&] { out = semap::transform_cloud(pose, cloud); });
        report("transform_cloud", n, serial, parallel);
    }

    // voxelize
    {
        const auto n = static_cast<std::size_t>(2'000'000 * scale);
        const PointCloud cloud = random_cloud(n, rng);
        std::vector<VoxelKey> keys;
        const double serial = time_best_of(3, [&] { keys = semap::reference::voxelize(cloud, kVoxelSize); });
        const double parallel = time_best_of(3, [&] { keys = semap::voxelize(cloud, kVoxelSize); });
        report("voxelize", n, serial, parallel);
    }

    // fuse_frame
    {
        const auto n = static_cast<std::size_t>(400'000 * scale);
        semap::CameraModel camera;
        camera.projection.setZero();
        camera.projection(0, 0) = 621.0;
        camera.projection(0, 2) = 621.0;  // u = fx*x/z + cx with z forward here
        camera.projection(1, 1) = 621.0;
        camera.projection(1, 2) = 187.0;
        camera.projection(2, 2) = 1.0;
        camera.width = 1242;
        camera.height = 375;

        std::uniform_real_distribution<double> coord(-30.0, 30.0);
        std::uniform_real_distribution<double> depth(1.0, 80.0);
        semap::SemanticVoxelMap serial_map(kVoxelSize), parallel_map(kVoxelSize);
        std::vector<VoxelKey> keys;
        for (std::size_t i = 0; i < n; ++i) {
            keys.push_back(semap::voxelize_point({coord(rng), coord(rng), depth(rng)}, kVoxelSize));
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        for (const VoxelKey& k : keys) {
            serial_map.ensure_cell(k);
            parallel_map.ensure_cell(k);
        }
        semap::SegmentationFrame seg = semap::SegmentationFrame::zeros(camera.width, camera.height);
        LabelDistribution d;
        d.p = {0.6, 0.1, 0.1, 0.1, 0.1};
        for (int y = 0; y < seg.height; ++y)
            for (int x = 0; x < seg.width; ++x) seg.set_pixel(x, y, d);

        const double serial = time_best_of(3, [&] { semap::reference::fuse_frame(serial_map, camera, seg, keys); });
        const double parallel = time_best_of(3, [&] { semap::fuse_frame(parallel_map, camera, seg, keys); });
        report("fuse_frame", keys.size(), serial, parallel);
    }

    // build_count_grid
    {
        const auto n = static_cast<std::size_t>(1'000'000 * scale);
        semap::SemanticVoxelMap map(kVoxelSize);
        std::uniform_int_distribution<int> cell(-300, 300);
        std::uniform_int_distribution<int> height(0, 30);
        std::uniform_int_distribution<int> label(0, semap::kNumLabels - 1);
        for (std::size_t i = 0; i < n; ++i) {
            auto& c = map.ensure_cell({cell(rng), cell(rng), height(rng)});
            c.final_label = static_cast<Label>(label(rng));
            c.observations = 1;
        }
        semap::CountGrid grid;
        const double serial =
            time_best_of(3, [&] { grid = semap::reference::build_count_grid(map, Label::Building); });
        const double parallel = time_best_of(3, [&] { grid = semap::build_count_grid(map, Label::Building); });
        report("build_count_grid", map.size(), serial, parallel);
    }

    // dbscan
    {
        const auto n = static_cast<std::size_t>(12'000 * scale);
        std::vector<VoxelKey> keys;
        std::uniform_int_distribution<int> blob(0, 40);
        std::uniform_int_distribution<int> offset(-400, 400);
        while (keys.size() < n) {
            const int bx = offset(rng), by = offset(rng);
            for (int i = 0; i < 200 && keys.size() < n; ++i) {
                keys.push_back({bx + blob(rng), by + blob(rng), blob(rng) % 8});
            }
        }
        semap::DbscanResult result;
        const double serial =
            time_best_of(1, [&] { result = semap::reference::dbscan(keys, kVoxelSize, 0.6, 10); });
        const double parallel = time_best_of(3, [&] { result = semap::dbscan(keys, kVoxelSize, 0.6, 10); });
        report("dbscan", keys.size(), serial, parallel);
    }

    return 0;
}
