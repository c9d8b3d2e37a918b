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
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "semap/errors.hpp"
#include "semap/geometry.hpp"

using namespace semap;

namespace {

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
    q.normalize();
    return q.toRotationMatrix();
}

PointCloud random_cloud(std::size_t n, std::mt19937_64& rng, double extent = 10.0) {
    std::uniform_real_distribution<double> coord(-extent, extent);
    PointCloud cloud;
    for (std::size_t i = 0; i < n; ++i) cloud.points.emplace_back(coord(rng), coord(rng), coord(rng));
    return cloud;
}

}  // namespace

TEST_CASE("transform_cloud basic cases") {
    PointCloud cloud;
    cloud.points.emplace_back(1.0, 2.0, 3.0);

    Pose identity;
    CHECK(transform_cloud(identity, cloud).points[0].isApprox(Eigen::Vector3d(1, 2, 3)));

    Pose shifted;
    shifted.translation = {10.0, 0.0, 0.0};
    CHECK(transform_cloud(shifted, cloud).points[0].isApprox(Eigen::Vector3d(11, 2, 3)));

    Pose quarter_turn;  // 90 degrees about +z
    quarter_turn.rotation << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    PointCloud unit_x;
    unit_x.points.emplace_back(1.0, 0.0, 0.0);
    const Eigen::Vector3d rotated = transform_cloud(quarter_turn, unit_x).points[0];
    CHECK(rotated.isApprox(Eigen::Vector3d(0, 1, 0), 1e-12));
}

TEST_CASE("transform_cloud preserves intensities and order") {
    PointCloud cloud;
    cloud.points = {{1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    cloud.intensities = {0.1f, 0.2f, 0.3f};
    Pose pose;
    pose.translation = {0, 0, 5};
    const PointCloud out = transform_cloud(pose, cloud);
    REQUIRE(out.points.size() == 3);
    CHECK(out.intensities == cloud.intensities);
    for (int i = 0; i < 3; ++i) CHECK(out.points[i].x() == doctest::Approx(i + 1.0));
}

TEST_CASE("transform_cloud rejects a non-orthonormal rotation and names the defect") {
    Pose bad;
    bad.rotation(0, 0) = 2.0;
    PointCloud cloud;
    cloud.points.emplace_back(0.0, 0.0, 0.0);
    CHECK_THROWS_WITH_AS(transform_cloud(bad, cloud), doctest::Contains("|R^T R - I|"), ValidationError);
}

TEST_CASE("rigid transforms preserve pairwise distances") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Pose pose;
        pose.rotation = random_rotation(rng);
        pose.translation = Eigen::Vector3d::Random() * 50.0;
        const PointCloud cloud = random_cloud(60, rng);
        const PointCloud moved = transform_cloud(pose, cloud);
        for (std::size_t i = 1; i < cloud.points.size(); ++i) {
            const double before = (cloud.points[i] - cloud.points[i - 1]).norm();
            const double after = (moved.points[i] - moved.points[i - 1]).norm();
            CHECK(std::abs(before - after) <= 1e-9);
        }
    }
}

TEST_CASE("pose composed with its inverse is the identity") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        Pose pose;
        pose.rotation = random_rotation(rng);
        pose.translation = Eigen::Vector3d::Random() * 20.0;
        const Pose round = compose(pose, pose.inverse());
        CHECK((round.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(round.translation.cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("voxelize uses the floor convention") {
    PointCloud cloud;
    cloud.points.emplace_back(0.1, 0.1, 0.1);
    auto keys = voxelize(cloud, 0.2);
    REQUIRE(keys.size() == 1);
    CHECK(keys[0] == VoxelKey{0, 0, 0});

    cloud.points[0] = {-0.1, 0.39, 0.2};
    keys = voxelize(cloud, 0.2);
    CHECK(keys[0] == VoxelKey{-1, 1, 1});
}

TEST_CASE("voxelize rejects a non-positive voxel size") {
    PointCloud cloud;
    CHECK_THROWS_AS(voxelize(cloud, 0.0), ParamError);
    CHECK_THROWS_AS(voxelize(cloud, -0.2), ParamError);
}

TEST_CASE("voxelize matches a per-cell occupancy enumeration on the unit cube") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PointCloud cloud;
    for (int i = 0; i < 1000; ++i) cloud.points.emplace_back(unit(rng), unit(rng), unit(rng));

    const auto keys = voxelize(cloud, 0.2);
    CHECK(keys.size() <= 125);

    // Occupancy recomputed per cell, independently of the voxelize path.
    std::set<VoxelKey> expected;
    for (std::int32_t x = 0; x <= 5; ++x)
        for (std::int32_t y = 0; y <= 5; ++y)
            for (std::int32_t z = 0; z <= 5; ++z) {
                const bool occupied = std::any_of(cloud.points.begin(), cloud.points.end(), [&](const auto& p) {
                    return p.x() >= 0.2 * x && p.x() < 0.2 * (x + 1) && p.y() >= 0.2 * y && p.y() < 0.2 * (y + 1) &&
                           p.z() >= 0.2 * z && p.z() < 0.2 * (z + 1);
                });
                if (occupied) expected.insert({x, y, z});
            }
    CHECK(std::set<VoxelKey>(keys.begin(), keys.end()) == expected);
}

TEST_CASE("voxelization is scale consistent") {
    std::mt19937_64 rng(14);
    const PointCloud cloud = random_cloud(500, rng);
    PointCloud doubled = cloud;
    for (auto& p : doubled.points) p *= 2.0;
    CHECK(voxelize(cloud, 0.2) == voxelize(doubled, 0.4));
}

TEST_CASE("voxel_center inverts voxelize") {
    CHECK(voxel_center({0, 0, 0}, 0.2).isApprox(Eigen::Vector3d(0.1, 0.1, 0.1)));
    CHECK(voxel_center({-1, 1, 1}, 0.2).isApprox(Eigen::Vector3d(-0.1, 0.3, 0.3)));

    std::mt19937_64 rng(15);
    std::uniform_int_distribution<std::int32_t> coord(-1000, 1000);
    for (int i = 0; i < 1000; ++i) {
        const VoxelKey key{coord(rng), coord(rng), coord(rng)};
        CHECK(voxelize_point(voxel_center(key, 0.2), 0.2) == key);
    }
}

TEST_CASE("integrate_frame unions keys and keeps first-seen frames") {
    OccupancyMap map(0.2);
    map.integrate_frame(std::vector<VoxelKey>{{0, 0, 0}}, 0);
    CHECK(map.size() == 1);

    map.integrate_frame(std::vector<VoxelKey>{{0, 0, 0}, {1, 0, 0}}, 1);
    CHECK(map.size() == 2);
    CHECK(map.cells.at({0, 0, 0}) == 0);
    CHECK(map.cells.at({1, 0, 0}) == 1);
}

TEST_CASE("integrate_frame rejects out-of-order frames") {
    OccupancyMap map(0.2);
    map.integrate_frame(std::vector<VoxelKey>{{0, 0, 0}}, 3);
    CHECK_THROWS_AS(map.integrate_frame(std::vector<VoxelKey>{{1, 0, 0}}, 2), SequencingError);
}

TEST_CASE("map contents equal the brute-force union over frames") {
    std::mt19937_64 rng(16);
    std::uniform_int_distribution<std::int32_t> coord(-5, 5);
    OccupancyMap map(0.2);
    std::set<VoxelKey> expected;
    for (int frame = 0; frame < 3; ++frame) {
        std::vector<VoxelKey> keys;
        for (int i = 0; i < 100; ++i) {
            const VoxelKey key{coord(rng), coord(rng), coord(rng)};
            keys.push_back(key);
            expected.insert(key);
        }
        map.integrate_frame(keys, frame);
    }
    std::set<VoxelKey> got;
    for (const auto& [key, seen] : map.cells) got.insert(key);
    CHECK(got == expected);
}

TEST_CASE("map content is insensitive to frame insertion order") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::int32_t> coord(-4, 4);
    std::vector<std::vector<VoxelKey>> frames;
    for (int f = 0; f < 4; ++f) {
        std::vector<VoxelKey> keys;
        for (int i = 0; i < 50; ++i) keys.push_back({coord(rng), coord(rng), coord(rng)});
        frames.push_back(keys);
    }

    OccupancyMap forward(0.2), permuted(0.2);
    for (int f = 0; f < 4; ++f) forward.integrate_frame(frames[f], f);
    const int order[4] = {2, 0, 3, 1};
    for (int f = 0; f < 4; ++f) permuted.integrate_frame(frames[order[f]], f);

    std::set<VoxelKey> a, b;
    for (const auto& [key, seen] : forward.cells) a.insert(key);
    for (const auto& [key, seen] : permuted.cells) b.insert(key);
    CHECK(a == b);
}

TEST_CASE("merging partial maps equals sequential integration") {
    std::mt19937_64 rng(18);
    std::uniform_int_distribution<std::int32_t> coord(-6, 6);
    std::vector<std::vector<VoxelKey>> frames;
    for (int f = 0; f < 6; ++f) {
        std::vector<VoxelKey> keys;
        for (int i = 0; i < 40; ++i) keys.push_back({coord(rng), coord(rng), coord(rng)});
        frames.push_back(keys);
    }

    OccupancyMap sequential(0.2);
    for (int f = 0; f < 6; ++f) sequential.integrate_frame(frames[f], f);

    OccupancyMap first_half(0.2), second_half(0.2);
    for (int f = 0; f < 3; ++f) first_half.integrate_frame(frames[f], f);
    for (int f = 3; f < 6; ++f) second_half.integrate_frame(frames[f], f);
    first_half.merge(second_half);

    CHECK(first_half.cells == sequential.cells);
    CHECK(first_half.last_frame == sequential.last_frame);
}
