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
#include "semap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "semap/errors.hpp"
#include "semap/geometry.hpp"
#include "semap/pipeline.hpp"

namespace semap {

namespace {

// splitmix64-style mixing; every frame gets an independent stream so frames
// can be simulated in any order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t frame) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (frame + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool contains_center(const ScenePrimitive& box, const Eigen::Vector3d& c) {
    return c.x() >= box.lo.x() && c.x() < box.hi.x() && c.y() >= box.lo.y() && c.y() < box.hi.y() &&
           c.z() >= box.lo.z() && c.z() < box.hi.z();
}

ScenePrimitive translate(const ScenePrimitive& box, const Eigen::Vector3d& offset) {
    ScenePrimitive out = box;
    out.lo += offset;
    out.hi += offset;
    return out;
}

/// Keys whose center lies inside the box, in sorted order.
std::vector<VoxelKey> box_voxels(const ScenePrimitive& box, double voxel_size) {
    std::vector<VoxelKey> keys;
    const VoxelKey lo = voxelize_point(box.lo, voxel_size);
    const VoxelKey hi = voxelize_point(box.hi, voxel_size);
    for (std::int32_t x = lo.x; x <= hi.x; ++x)
        for (std::int32_t y = lo.y; y <= hi.y; ++y)
            for (std::int32_t z = lo.z; z <= hi.z; ++z) {
                const VoxelKey key{x, y, z};
                if (contains_center(box, voxel_center(key, voxel_size))) keys.push_back(key);
            }
    return keys;
}

/// Regular grid over the six faces, inset so every sample stays strictly
/// inside the box footprint on the varying axes.
template <typename Emit>
void sample_faces(const ScenePrimitive& box, double step, Emit&& emit) {
    for (int axis = 0; axis < 3; ++axis) {
        const int u_axis = (axis + 1) % 3;
        const int v_axis = (axis + 2) % 3;
        const double inset_u = std::min(1e-3, (box.hi[u_axis] - box.lo[u_axis]) / 4.0);
        const double inset_v = std::min(1e-3, (box.hi[v_axis] - box.lo[v_axis]) / 4.0);
        const double inset_f = std::min(1e-3, (box.hi[axis] - box.lo[axis]) / 4.0);
        const double u0 = box.lo[u_axis] + inset_u;
        const double v0 = box.lo[v_axis] + inset_v;
        const auto nu = static_cast<std::int64_t>(std::floor((box.hi[u_axis] - inset_u - u0) / step)) + 1;
        const auto nv = static_cast<std::int64_t>(std::floor((box.hi[v_axis] - inset_v - v0) / step)) + 1;
        for (const double face : {box.lo[axis] + inset_f, box.hi[axis] - inset_f}) {
            for (std::int64_t iu = 0; iu < nu; ++iu) {
                for (std::int64_t iv = 0; iv < nv; ++iv) {
                    Eigen::Vector3d p;
                    p[axis] = face;
                    p[u_axis] = u0 + iu * step;
                    p[v_axis] = v0 + iv * step;
                    emit(p);
                }
            }
        }
    }
}

LabelDistribution peaked_scores(Label label, double sharpness) {
    const double off = std::exp(-sharpness);  // 0 for very large sharpness
    LabelDistribution d;
    double sum = 0.0;
    for (int i = 0; i < kNumLabels; ++i) {
        d.p[i] = (i == static_cast<int>(label)) ? 1.0 : off;
        sum += d.p[i];
    }
    for (int i = 0; i < kNumLabels; ++i) d.p[i] /= sum;
    return d;
}

}  // namespace

void validate_scene(const SceneBundle& bundle) {
    for (const ScenePrimitive& prim : bundle.scene.primitives) {
        if (!(prim.hi.x() > prim.lo.x() && prim.hi.y() > prim.lo.y() && prim.hi.z() > prim.lo.z()))
            throw ValidationError("scene primitive has non-positive volume");
        if (prim.label == Label::Unknown) throw ValidationError("scene primitive labeled Unknown");
    }
    for (const MovingObject& mov : bundle.scene.moving) {
        if (!(mov.box.hi.x() > mov.box.lo.x() && mov.box.hi.y() > mov.box.lo.y() && mov.box.hi.z() > mov.box.lo.z()))
            throw ValidationError("moving object has non-positive volume");
        if (mov.box.label == Label::Unknown) throw ValidationError("moving object labeled Unknown");
    }
    if (bundle.scene.trajectory.empty()) throw ValidationError("scene trajectory is empty");
    if (bundle.noise.confusion_rate < 0.0 || bundle.noise.confusion_rate >= 1.0 + 1e-12)
        throw ValidationError("confusion_rate must lie in [0, 1]");
    if (bundle.noise.softmax_sharpness <= 0.0) throw ValidationError("softmax_sharpness must be positive");
    if (bundle.sensor.lidar_range <= 0.0) throw ValidationError("lidar_range must be positive");
    if (bundle.sensor.sample_step <= 0.0) throw ValidationError("sample_step must be positive");
    bundle.sensor.camera.validate();
}

SceneBundle parse_scene_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");

    SceneBundle bundle;
    bundle.noise.confusion_pairs.clear();
    std::string line;
    std::size_t line_no = 0;

    auto fail = [&](const std::string& what) {
        std::ostringstream msg;
        msg << "'" << path.string() << "' line " << line_no << ": " << what;
        return FormatError(msg.str());
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream tokens(line);
        std::string tag;
        if (!(tokens >> tag)) continue;

        auto need_doubles = [&](std::size_t n) {
            std::vector<double> values;
            double v;
            while (tokens >> v) values.push_back(v);
            if (values.size() != n) {
                std::ostringstream what;
                what << "tag '" << tag << "' expects " << n << " numbers, got " << values.size();
                throw fail(what.str());
            }
            return values;
        };

        try {
            if (tag == "seed") {
                const auto v = need_doubles(1);
                bundle.scene.seed = static_cast<std::uint64_t>(v[0]);
            } else if (tag == "camera") {
                const auto v = need_doubles(6);
                // fx fy cx cy width height; +x forward, +y left, +z up.
                CameraModel& cam = bundle.sensor.camera;
                cam.projection.setZero();
                cam.projection(0, 0) = v[2];
                cam.projection(0, 1) = -v[0];
                cam.projection(1, 0) = v[3];
                cam.projection(1, 2) = -v[1];
                cam.projection(2, 0) = 1.0;
                cam.width = static_cast<int>(v[4]);
                cam.height = static_cast<int>(v[5]);
            } else if (tag == "lidar_range") {
                bundle.sensor.lidar_range = need_doubles(1)[0];
            } else if (tag == "sample_step") {
                bundle.sensor.sample_step = need_doubles(1)[0];
            } else if (tag == "primitive" || tag == "moving") {
                std::string label_name_str;
                if (!(tokens >> label_name_str)) throw fail("missing label");
                ScenePrimitive prim;
                prim.label = parse_label(label_name_str);
                std::vector<double> values;
                double v;
                while (tokens >> v) values.push_back(v);
                const std::size_t expected = tag == "moving" ? 9 : 6;
                if (values.size() != expected) {
                    std::ostringstream what;
                    what << "tag '" << tag << "' expects " << expected << " numbers after the label, got "
                         << values.size();
                    throw fail(what.str());
                }
                prim.lo = {values[0], values[1], values[2]};
                prim.hi = {values[3], values[4], values[5]};
                if (tag == "primitive") {
                    bundle.scene.primitives.push_back(prim);
                } else {
                    MovingObject mov;
                    mov.box = prim;
                    mov.step = {values[6], values[7], values[8]};
                    bundle.scene.moving.push_back(mov);
                }
            } else if (tag == "pose") {
                const auto v = need_doubles(12);
                Pose pose;
                pose.rotation << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
                pose.translation << v[3], v[7], v[11];
                pose.frame_index = static_cast<std::int64_t>(bundle.scene.trajectory.size());
                if (orthonormality_error(pose.rotation) > 1e-3) throw fail("pose rotation is not orthonormal");
                pose.rotation = nearest_rotation(pose.rotation);
                bundle.scene.trajectory.push_back(pose);
            } else if (tag == "noise_rate") {
                bundle.noise.confusion_rate = need_doubles(1)[0];
            } else if (tag == "noise_pair") {
                std::string a, b;
                if (!(tokens >> a >> b)) throw fail("tag 'noise_pair' expects two label names");
                bundle.noise.confusion_pairs.emplace_back(parse_label(a), parse_label(b));
            } else if (tag == "sharpness") {
                bundle.noise.softmax_sharpness = need_doubles(1)[0];
            } else {
                throw fail("unknown tag '" + tag + "'");
            }
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception& e) {
            throw fail(e.what());
        }
    }
    if (bundle.noise.confusion_pairs.empty())
        bundle.noise.confusion_pairs = {{Label::Building, Label::Vegetation}};
    validate_scene(bundle);
    return bundle;
}

SemanticVoxelMap generate_ground_truth(const SceneSpec& scene, double voxel_size) {
    SemanticVoxelMap map(voxel_size);
    for (const ScenePrimitive& prim : scene.primitives) {
        for (const VoxelKey& key : box_voxels(prim, voxel_size)) {
            SemanticCell& cell = map.ensure_cell(key);
            cell.distribution.p.fill(0.0);
            cell.distribution.p[static_cast<int>(prim.label)] = 1.0;
            cell.final_label = prim.label;  // later primitives win overlaps
            cell.observations = 1;
        }
    }
    return map;
}

FrameData simulate_frame(const SceneBundle& bundle, const SemanticVoxelMap& ground_truth, double voxel_size,
                         std::int64_t frame_index) {
    const SceneSpec& scene = bundle.scene;
    const SensorModel& sensor = bundle.sensor;
    if (frame_index < 0 || frame_index >= static_cast<std::int64_t>(scene.trajectory.size()))
        throw ParamError("simulate_frame: frame_index outside the trajectory");

    FrameData frame;
    frame.pose = scene.trajectory[frame_index];
    frame.cloud.frame_index = frame_index;

    const Pose sensor_from_world = frame.pose.inverse();
    const Eigen::Vector3d origin = frame.pose.translation;
    const double range2 = sensor.lidar_range * sensor.lidar_range;

    auto emit_point = [&](const Eigen::Vector3d& p) {
        if ((p - origin).squaredNorm() > range2) return;
        frame.cloud.points.push_back(sensor_from_world.rotation * p + sensor_from_world.translation);
    };

    // Static surfaces contribute only points whose voxel is real ground truth,
    // so mapping can never invent geometry the oracle does not know about.
    for (const ScenePrimitive& prim : scene.primitives) {
        sample_faces(prim, sensor.sample_step, [&](const Eigen::Vector3d& p) {
            if (ground_truth.find(voxelize_point(p, voxel_size)) == nullptr) return;
            emit_point(p);
        });
    }
    for (const MovingObject& mov : scene.moving) {
        const ScenePrimitive box = translate(mov.box, static_cast<double>(frame_index) * mov.step);
        sample_faces(box, sensor.sample_step, [&](const Eigen::Vector3d& p) { emit_point(p); });
    }

    // Render the label image: nearest occupied voxel center wins each pixel.
    const CameraModel camera = compose_with_pose(sensor.camera, frame.pose);
    const std::size_t pixel_count = static_cast<std::size_t>(camera.width) * camera.height;
    std::vector<double> depth(pixel_count, std::numeric_limits<double>::infinity());
    std::vector<Label> winner(pixel_count, Label::Unknown);

    auto splat = [&](const Eigen::Vector3d& center, Label label) {
        const Eigen::Vector3d uvw = camera.projection * Eigen::Vector4d(center.x(), center.y(), center.z(), 1.0);
        if (uvw.z() <= camera.min_depth) return;
        const double u = uvw.x() / uvw.z();
        const double v = uvw.y() / uvw.z();
        if (u < 0.0 || u >= camera.width || v < 0.0 || v >= camera.height) return;
        const std::size_t idx =
            static_cast<std::size_t>(std::floor(v)) * camera.width + static_cast<std::size_t>(std::floor(u));
        if (uvw.z() < depth[idx]) {
            depth[idx] = uvw.z();
            winner[idx] = label;
        }
    };

    for (const VoxelKey& key : ground_truth.sorted_keys())
        splat(voxel_center(key, voxel_size), ground_truth.find(key)->final_label);
    for (const MovingObject& mov : scene.moving) {
        const ScenePrimitive box = translate(mov.box, static_cast<double>(frame_index) * mov.step);
        for (const VoxelKey& key : box_voxels(box, voxel_size)) splat(voxel_center(key, voxel_size), box.label);
    }

    frame.seg = SegmentationFrame::zeros(camera.width, camera.height, frame_index);
    std::mt19937_64 rng(mix_seed(scene.seed, static_cast<std::uint64_t>(frame_index)));
    const LabelDistribution uniform = LabelDistribution::uniform();
    for (std::size_t i = 0; i < pixel_count; ++i) {
        const int x = static_cast<int>(i % camera.width);
        const int y = static_cast<int>(i / camera.width);
        if (winner[i] == Label::Unknown) {
            frame.seg.set_pixel(x, y, uniform);  // no surface, no evidence
            continue;
        }
        Label label = winner[i];
        if (bundle.noise.confusion_rate > 0.0) {
            for (const auto& [a, b] : bundle.noise.confusion_pairs) {
                if (label != a && label != b) continue;
                if (uniform01(rng) < bundle.noise.confusion_rate) label = (label == a) ? b : a;
                break;
            }
        }
        frame.seg.set_pixel(x, y, peaked_scores(label, bundle.noise.softmax_sharpness));
    }
    return frame;
}

EndToEndResult run_end_to_end(const SceneBundle& bundle, const RefineParams& params, double voxel_size,
                              double prob_floor) {
    validate_scene(bundle);
    EndToEndResult result{SemanticVoxelMap(voxel_size), SemanticVoxelMap(voxel_size), SemanticVoxelMap(voxel_size),
                          {}, {}};
    result.truth = generate_ground_truth(bundle.scene, voxel_size);

    MappingPipeline pipeline(bundle.sensor.camera, voxel_size, prob_floor);
    const auto frames = static_cast<std::int64_t>(bundle.scene.trajectory.size());
    for (std::int64_t f = 0; f < frames; ++f) {
        const FrameData frame = simulate_frame(bundle, result.truth, voxel_size, f);
        pipeline.add_frame(frame.pose, frame.cloud, frame.seg);
    }
    result.unrefined = pipeline.finalize();
    result.unrefined_report = compute_report(confusion(result.unrefined, result.truth));

    result.refined = result.unrefined;
    refine(result.refined, params);
    result.refined_report = compute_report(confusion(result.refined, result.truth));
    return result;
}

}  // namespace semap
