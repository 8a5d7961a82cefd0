#include "voxeltrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace voxeltrack {

namespace {

// Counter-based stream: every draw is keyed on (seed, purpose, indices) so
// frames and views can be rendered in any order with identical results.
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {}
    Rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
        std::uint64_t d = 0)
        : state_(splitmix64(splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b) ^ c) ^ d)) {}

    std::uint64_t next_u64() { return state_ = splitmix64(state_); }
    double uniform() { return double(next_u64() >> 11) * (1.0 / 9007199254740992.0); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() {
        // Box-Muller; keeps the generator portable across standard libraries
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    Eigen::VectorXd unit_vector(int dim) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v[i] = normal();
        const double n = v.norm();
        return n > 1e-12 ? Eigen::VectorXd(v / n) : unit_vector(dim);
    }

private:
    std::uint64_t state_;
};

enum StreamPurpose : std::uint64_t {
    kStreamScene = 0x5343454eULL,
    kStreamJitter = 0x4a495454ULL,
    kStreamDropout = 0x44524f50ULL,
    kStreamFalsePeak = 0x46414c53ULL,
};

struct CanonicalPose {
    double pelvis_height;
    std::array<Vec3, kNumJoints> offsets;  // relative to pelvis, local frame
};

// x lateral (left positive), y forward, z up
const std::array<CanonicalPose, 4>& pose_library() {
    static const std::array<CanonicalPose, 4> lib = [] {
        std::array<CanonicalPose, 4> l{};

        auto& stand = l[0];
        stand.pelvis_height = 1000;
        stand.offsets = {Vec3(0, 0, 0),        Vec3(0, 0, 550),     Vec3(0, 0, 760),
                         Vec3(210, 0, 500),    Vec3(300, 20, 240),  Vec3(330, 40, 0),
                         Vec3(-210, 0, 500),   Vec3(-300, 20, 240), Vec3(-330, 40, 0),
                         Vec3(110, 0, -60),    Vec3(120, 0, -500),  Vec3(130, 0, -940),
                         Vec3(-110, 0, -60),   Vec3(-120, 0, -500), Vec3(-130, 0, -940)};

        auto& walk_l = l[1];  // left leg and right arm forward
        walk_l = stand;
        walk_l.pelvis_height = 980;
        walk_l.offsets[4] = Vec3(300, -150, 260);
        walk_l.offsets[5] = Vec3(330, -260, 40);
        walk_l.offsets[7] = Vec3(-300, 170, 260);
        walk_l.offsets[8] = Vec3(-330, 300, 60);
        walk_l.offsets[10] = Vec3(120, 230, -460);
        walk_l.offsets[11] = Vec3(130, 330, -880);
        walk_l.offsets[13] = Vec3(-120, -220, -480);
        walk_l.offsets[14] = Vec3(-130, -330, -900);

        auto& walk_r = l[2];  // mirrored swing
        walk_r = stand;
        walk_r.pelvis_height = 980;
        walk_r.offsets[4] = Vec3(300, 170, 260);
        walk_r.offsets[5] = Vec3(330, 300, 60);
        walk_r.offsets[7] = Vec3(-300, -150, 260);
        walk_r.offsets[8] = Vec3(-330, -260, 40);
        walk_r.offsets[10] = Vec3(120, -220, -460);
        walk_r.offsets[11] = Vec3(130, -330, -880);
        walk_r.offsets[13] = Vec3(-120, 230, -480);
        walk_r.offsets[14] = Vec3(-130, 330, -900);

        auto& sit = l[3];
        sit = stand;
        sit.pelvis_height = 650;
        sit.offsets[10] = Vec3(120, 380, -120);
        sit.offsets[11] = Vec3(130, 420, -560);
        sit.offsets[13] = Vec3(-120, 380, -120);
        sit.offsets[14] = Vec3(-130, 420, -560);
        return l;
    }();
    return lib;
}

constexpr double kRoamMargin = 1000.0;  // keeps whole bodies inside the space
constexpr int kPoseCycleFrames = 15;

}  // namespace

std::vector<CameraParams> make_camera_ring(const ScenarioConfig& config) {
    if (config.camera_count < 1)
        throw std::invalid_argument("scenario: camera_count must be >= 1");
    const Vec3 center(config.space_extent.x() / 2, config.space_extent.y() / 2, 0);
    const Vec3 look_at = center + Vec3(0, 0, 1000);
    std::vector<CameraParams> cameras;
    for (int i = 0; i < config.camera_count; ++i) {
        const double angle = 2.0 * M_PI * i / config.camera_count;
        const Vec3 position = center + Vec3(config.camera_radius_mm * std::cos(angle),
                                            config.camera_radius_mm * std::sin(angle),
                                            config.camera_height_mm);
        const Vec3 forward = (look_at - position).normalized();
        Vec3 right = forward.cross(Vec3(0, 0, 1));
        if (right.norm() < 1e-9) right = Vec3(1, 0, 0);
        right.normalize();
        const Vec3 down = forward.cross(right).normalized();

        CameraParams cam;
        cam.id = i;
        cam.fx = cam.fy = config.focal_px;
        cam.cx = config.image_width / 2.0;
        cam.cy = config.image_height / 2.0;
        cam.image_width = config.image_width;
        cam.image_height = config.image_height;
        cam.rotation.row(0) = right.transpose();
        cam.rotation.row(1) = down.transpose();
        cam.rotation.row(2) = forward.transpose();
        cam.translation = -cam.rotation * position;
        cam.validate();
        cameras.push_back(cam);
    }
    return cameras;
}

std::vector<GTFrame> sample_scene(const ScenarioConfig& config,
                                  const std::vector<CameraParams>& cameras) {
    if (config.n_persons < 0) throw std::invalid_argument("scenario: n_persons must be >= 0");
    if (config.duration_frames < 0)
        throw std::invalid_argument("scenario: duration_frames must be >= 0");
    if (config.fps <= 0) throw std::invalid_argument("scenario: fps must be positive");

    const double lo_x = kRoamMargin, hi_x = config.space_extent.x() - kRoamMargin;
    const double lo_y = kRoamMargin, hi_y = config.space_extent.y() - kRoamMargin;
    if (config.n_persons > 0 && (hi_x <= lo_x || hi_y <= lo_y))
        throw std::invalid_argument("scenario: space too small for any person");

    Rng rng(config.seed, kStreamScene);

    struct Trajectory {
        std::vector<Eigen::Vector2d> points;  // closed polyline
        std::vector<double> cum_len;
        double total = 0;
    };

    std::vector<Trajectory> trajectories;
    std::vector<Eigen::Vector2d> spawns;
    for (int p = 0; p < config.n_persons; ++p) {
        if (size_t(p) < config.scripted_paths.size() && !config.scripted_paths[size_t(p)].empty()) {
            const auto& path = config.scripted_paths[size_t(p)];
            for (const Eigen::Vector2d& pt : path)
                if (pt.x() < 0 || pt.x() > config.space_extent.x() || pt.y() < 0 ||
                    pt.y() > config.space_extent.y())
                    throw std::invalid_argument(
                        "scenario: scripted_paths waypoint outside the space extent");
            spawns.push_back(path.front());
            Trajectory traj;
            traj.points = path;
            traj.points.push_back(path.front());  // loop
            traj.cum_len.push_back(0);
            for (size_t i = 1; i < traj.points.size(); ++i) {
                traj.total += (traj.points[i] - traj.points[i - 1]).norm();
                traj.cum_len.push_back(traj.total);
            }
            trajectories.push_back(std::move(traj));
            continue;
        }
        Eigen::Vector2d spawn;
        bool placed = false;
        for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
            spawn = {rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
            placed = true;
            for (const Eigen::Vector2d& other : spawns)
                if ((spawn - other).norm() < config.spawn_separation_mm) placed = false;
        }
        if (!placed)
            throw std::invalid_argument(
                "scenario: space too small to place all persons with the required separation");
        spawns.push_back(spawn);

        Trajectory traj;
        traj.points.push_back(spawn);
        for (int w = 0; w < config.waypoint_count; ++w)
            traj.points.push_back({rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)});
        traj.points.push_back(spawn);  // loop
        traj.cum_len.push_back(0);
        for (size_t i = 1; i < traj.points.size(); ++i) {
            traj.total += (traj.points[i] - traj.points[i - 1]).norm();
            traj.cum_len.push_back(traj.total);
        }
        trajectories.push_back(std::move(traj));
    }

    std::vector<Eigen::VectorXd> embeddings;
    for (int p = 0; p < config.n_persons; ++p) embeddings.push_back(rng.unit_vector(kReidDim));

    std::vector<GTFrame> frames(size_t(std::max(0, config.duration_frames)));
    for (int t = 0; t < config.duration_frames; ++t) {
        GTFrame& frame = frames[size_t(t)];
        frame.frame = t;
        for (int p = 0; p < config.n_persons; ++p) {
            const Trajectory& traj = trajectories[size_t(p)];
            Eigen::Vector2d position = traj.points.front();
            Eigen::Vector2d heading(0, 1);
            if (traj.total > 1e-9 && config.speed_mm_s > 0) {
                const double s = std::fmod(config.speed_mm_s * t / config.fps, traj.total);
                for (size_t i = 1; i < traj.points.size(); ++i) {
                    if (s <= traj.cum_len[i]) {
                        const double seg = traj.cum_len[i] - traj.cum_len[i - 1];
                        const double f = seg > 1e-9 ? (s - traj.cum_len[i - 1]) / seg : 0.0;
                        position = traj.points[i - 1] + f * (traj.points[i] - traj.points[i - 1]);
                        if (seg > 1e-9)
                            heading = (traj.points[i] - traj.points[i - 1]).normalized();
                        break;
                    }
                }
            }

            const int pose_idx =
                config.speed_mm_s > 0 ? (p + t / kPoseCycleFrames) % 4 : 0;
            const CanonicalPose& canon = pose_library()[size_t(pose_idx)];
            // yaw so the local forward axis follows the heading
            const double yaw = std::atan2(heading.y(), heading.x()) - M_PI / 2.0;
            const double cy = std::cos(yaw), sy = std::sin(yaw);

            GTPerson person;
            person.id = p + 1;
            person.embedding = embeddings[size_t(p)];
            for (int j = 0; j < kNumJoints; ++j) {
                const Vec3& o = canon.offsets[size_t(j)];
                person.pose.joints[j] =
                    Vec3(position.x() + cy * o.x() - sy * o.y(),
                         position.y() + sy * o.x() + cy * o.y(), canon.pelvis_height + o.z());
            }
            frame.persons.push_back(std::move(person));
        }

        // true occlusion fractions per view from the GT poses
        std::vector<Pose3D> poses;
        for (const GTPerson& person : frame.persons) poses.push_back(person.pose);
        for (size_t v = 0; v < cameras.size(); ++v) {
            const auto boxes = person_depth_boxes(poses, cameras[v], int(v));
            for (size_t p = 0; p < frame.persons.size(); ++p) {
                std::vector<PersonDepthBox> others;
                for (size_t q = 0; q < boxes.size(); ++q)
                    if (q != p) others.push_back(boxes[q]);
                frame.persons[p].occlusion.push_back(
                    occluded_fraction(boxes[p], others, config.heatmap_downsample));
            }
        }
    }
    return frames;
}

Simulator::Simulator(const ScenarioConfig& config) : config_(config) {
    cameras_ = make_camera_ring(config_);
    frames_ = sample_scene(config_, cameras_);
    // Occlusion corruption source per (person, view): a randomly chosen other
    // person's identity embedding. Sampling an occluded pelvis picks up the
    // body in front of it, so the contamination must be another identity, not
    // isotropic noise -- noise only dilutes and can never flip an association.
    Rng rng(config_.seed, kStreamScene, 0x44495354ULL);
    for (int p = 0; p < config_.n_persons; ++p)
        for (int v = 0; v < config_.camera_count; ++v) {
            if (config_.n_persons < 2 || frames_.empty()) {
                distractors_.push_back(rng.unit_vector(kReidDim));
                continue;
            }
            int q = int(rng.next_u64() % std::uint64_t(config_.n_persons - 1));
            if (q >= p) ++q;
            distractors_.push_back(frames_.front().persons[size_t(q)].embedding);
        }
}

FrameObservations Simulator::render_frame(int frame_index) const {
    if (frame_index < 0 || frame_index >= int(frames_.size()))
        throw std::out_of_range("render_frame: frame index out of range");
    const GTFrame& gt = frames_[size_t(frame_index)];
    const int hm_w = int(config_.image_width / config_.heatmap_downsample);
    const int hm_h = int(config_.image_height / config_.heatmap_downsample);

    FrameObservations obs;
    for (size_t v = 0; v < cameras_.size(); ++v) {
        const CameraParams& cam = cameras_[v];
        std::vector<Joint2D> joints2d;
        for (size_t p = 0; p < gt.persons.size(); ++p) {
            for (int j = 0; j < kNumJoints; ++j) {
                const PixelProjection proj = project_point(cam, gt.persons[p].pose.joints[j]);
                if (!proj.in_front()) continue;
                if (config_.missing_joint_rate > 0) {
                    Rng drop(config_.seed, kStreamDropout, std::uint64_t(frame_index),
                             std::uint64_t(v) << 32 | std::uint64_t(p), std::uint64_t(j));
                    if (drop.uniform() < config_.missing_joint_rate) continue;
                }
                double u = proj.u / config_.heatmap_downsample;
                double w = proj.v / config_.heatmap_downsample;
                if (config_.jitter_sigma_px > 0) {
                    Rng jitter(config_.seed, kStreamJitter, std::uint64_t(frame_index),
                               std::uint64_t(v) << 32 | std::uint64_t(p), std::uint64_t(j));
                    u += config_.jitter_sigma_px * jitter.normal();
                    w += config_.jitter_sigma_px * jitter.normal();
                }
                if (u < 0 || u >= hm_w || w < 0 || w >= hm_h) continue;
                joints2d.push_back({u, w, j, true});
            }
        }
        if (config_.false_peak_rate > 0) {
            for (int j = 0; j < kNumJoints; ++j) {
                Rng fp(config_.seed, kStreamFalsePeak, std::uint64_t(frame_index),
                       std::uint64_t(v), std::uint64_t(j));
                double rate = config_.false_peak_rate;
                while (rate > 0) {
                    const double p = std::min(rate, 1.0);
                    if (fp.uniform() < p)
                        joints2d.push_back(
                            {fp.uniform(0, hm_w - 1), fp.uniform(0, hm_h - 1), j, true});
                    rate -= 1.0;
                }
            }
        }
        obs.heatmaps.push_back(render_gaussian_heatmap(joints2d, config_.heatmap_sigma_px,
                                                       kNumJoints, hm_h, hm_w));

        // Re-ID map: far-to-near painting so nearer persons overwrite.
        ReidMap2D reid(kReidDim, hm_h, hm_w);
        std::vector<std::pair<double, size_t>> order;
        for (size_t p = 0; p < gt.persons.size(); ++p) {
            const PixelProjection proj = project_point(cam, gt.persons[p].pose.pelvis());
            if (proj.in_front()) order.emplace_back(-proj.depth, p);
        }
        std::sort(order.begin(), order.end());
        for (const auto& [neg_depth, p] : order) {
            const GTPerson& person = gt.persons[p];
            const PixelProjection proj = project_point(cam, person.pose.pelvis());
            const double frac = config_.reid_occlusion_corruption && !person.occlusion.empty()
                                    ? person.occlusion[v]
                                    : 0.0;
            Eigen::VectorXd emb = (1.0 - frac) * person.embedding +
                                  frac * distractors_[p * size_t(config_.camera_count) + v];
            const double n = emb.norm();
            if (n > 1e-12) emb /= n;
            const double cu = proj.u / config_.heatmap_downsample;
            const double cv = proj.v / config_.heatmap_downsample;
            const double r = config_.reid_spot_radius_px;
            for (int y = std::max(0, int(cv - r)); y <= std::min(hm_h - 1, int(cv + r)); ++y)
                for (int x = std::max(0, int(cu - r)); x <= std::min(hm_w - 1, int(cu + r)); ++x) {
                    if ((x - cu) * (x - cu) + (y - cv) * (y - cv) > r * r) continue;
                    for (int c = 0; c < kReidDim; ++c) reid.at(c, y, x) = float(emb[c]);
                }
        }
        obs.reid_maps.push_back(std::move(reid));
    }
    return obs;
}

std::string scenario_to_json_text(const ScenarioConfig& c) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["n_persons"] = c.n_persons;
    j["duration_frames"] = c.duration_frames;
    j["fps"] = c.fps;
    j["space_extent"] = {c.space_extent.x(), c.space_extent.y(), c.space_extent.z()};
    j["camera_count"] = c.camera_count;
    j["camera_radius_mm"] = c.camera_radius_mm;
    j["camera_height_mm"] = c.camera_height_mm;
    j["image_width"] = c.image_width;
    j["image_height"] = c.image_height;
    j["focal_px"] = c.focal_px;
    j["heatmap_downsample"] = c.heatmap_downsample;
    j["speed_mm_s"] = c.speed_mm_s;
    j["waypoint_count"] = c.waypoint_count;
    j["spawn_separation_mm"] = c.spawn_separation_mm;
    j["heatmap_sigma_px"] = c.heatmap_sigma_px;
    j["jitter_sigma_px"] = c.jitter_sigma_px;
    j["false_peak_rate"] = c.false_peak_rate;
    j["missing_joint_rate"] = c.missing_joint_rate;
    j["reid_spot_radius_px"] = c.reid_spot_radius_px;
    j["reid_occlusion_corruption"] = c.reid_occlusion_corruption;
    nlohmann::json paths = nlohmann::json::array();
    for (const auto& path : c.scripted_paths) {
        nlohmann::json pj = nlohmann::json::array();
        for (const Eigen::Vector2d& pt : path) pj.push_back({pt.x(), pt.y()});
        paths.push_back(std::move(pj));
    }
    j["scripted_paths"] = std::move(paths);
    return j.dump(2);
}

namespace {
template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument(std::string("scenario: invalid value for field '") + key + "'");
    }
}
}  // namespace

ScenarioConfig scenario_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("scenario: not valid JSON: ") + e.what());
    }
    ScenarioConfig c;
    read_field(j, "seed", c.seed);
    read_field(j, "n_persons", c.n_persons);
    read_field(j, "duration_frames", c.duration_frames);
    read_field(j, "fps", c.fps);
    if (j.contains("space_extent")) {
        const auto e = j.at("space_extent").get<std::vector<double>>();
        if (e.size() != 3) throw std::invalid_argument("scenario: space_extent must have 3 entries");
        c.space_extent = Vec3(e[0], e[1], e[2]);
    }
    read_field(j, "camera_count", c.camera_count);
    read_field(j, "camera_radius_mm", c.camera_radius_mm);
    read_field(j, "camera_height_mm", c.camera_height_mm);
    read_field(j, "image_width", c.image_width);
    read_field(j, "image_height", c.image_height);
    read_field(j, "focal_px", c.focal_px);
    read_field(j, "heatmap_downsample", c.heatmap_downsample);
    read_field(j, "speed_mm_s", c.speed_mm_s);
    read_field(j, "waypoint_count", c.waypoint_count);
    read_field(j, "spawn_separation_mm", c.spawn_separation_mm);
    read_field(j, "heatmap_sigma_px", c.heatmap_sigma_px);
    read_field(j, "jitter_sigma_px", c.jitter_sigma_px);
    read_field(j, "false_peak_rate", c.false_peak_rate);
    read_field(j, "missing_joint_rate", c.missing_joint_rate);
    read_field(j, "reid_spot_radius_px", c.reid_spot_radius_px);
    read_field(j, "reid_occlusion_corruption", c.reid_occlusion_corruption);
    if (j.contains("scripted_paths")) {
        std::vector<std::vector<std::array<double, 2>>> paths;
        try {
            paths = j.at("scripted_paths").get<std::vector<std::vector<std::array<double, 2>>>>();
        } catch (const nlohmann::json::exception&) {
            throw std::invalid_argument(
                "scenario: scripted_paths must be a list of [x, y] waypoint lists");
        }
        for (const auto& path : paths) {
            std::vector<Eigen::Vector2d> pts;
            for (const auto& pt : path) pts.emplace_back(pt[0], pt[1]);
            c.scripted_paths.push_back(std::move(pts));
        }
    }
    return c;
}

std::string gt_record_to_json(int frame, const GTPerson& person) {
    nlohmann::json j;
    j["frame"] = frame;
    j["person_id"] = person.id;
    nlohmann::json joints = nlohmann::json::array();
    for (int k = 0; k < kNumJoints; ++k)
        joints.push_back(
            {person.pose.joints[k].x(), person.pose.joints[k].y(), person.pose.joints[k].z()});
    j["joints"] = joints;
    std::vector<double> emb(size_t(person.embedding.size()));
    for (int i = 0; i < person.embedding.size(); ++i) emb[size_t(i)] = person.embedding[i];
    j["embedding"] = emb;
    j["occlusion"] = person.occlusion;
    return j.dump();
}

void export_dataset(const std::string& dir, const Simulator& sim, bool dump_heatmaps) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create dataset directory: " + dir);

    save_cameras(dir + "/cameras.json", sim.cameras());
    {
        std::ofstream out(dir + "/scenario.json");
        if (!out) throw std::runtime_error("cannot write scenario file: " + dir + "/scenario.json");
        out << scenario_to_json_text(sim.config()) << "\n";
    }
    {
        std::ofstream out(dir + "/gt.jsonl");
        if (!out) throw std::runtime_error("cannot write gt file: " + dir + "/gt.jsonl");
        for (const GTFrame& frame : sim.frames())
            for (const GTPerson& person : frame.persons)
                out << gt_record_to_json(frame.frame, person) << "\n";
    }
    if (dump_heatmaps) {
        for (const GTFrame& frame : sim.frames()) {
            const FrameObservations obs = sim.render_frame(frame.frame);
            for (size_t v = 0; v < obs.heatmaps.size(); ++v) {
                std::ostringstream name;
                name << dir << "/heatmap_f" << frame.frame << "_v" << v << ".vxhm";
                write_vxhm(name.str(), obs.heatmaps[v]);
            }
        }
    }
}

Dataset load_dataset(const std::string& dir) {
    Dataset ds;
    {
        std::ifstream in(dir + "/scenario.json");
        if (!in) throw std::runtime_error("cannot open scenario file: " + dir + "/scenario.json");
        std::stringstream ss;
        ss << in.rdbuf();
        ds.config = scenario_from_json_text(ss.str());
    }
    ds.cameras = load_cameras(dir + "/cameras.json");
    {
        std::ifstream in(dir + "/gt.jsonl");
        if (!in) throw std::runtime_error("cannot open gt file: " + dir + "/gt.jsonl");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const nlohmann::json j = nlohmann::json::parse(line);
            const int frame = j.at("frame").get<int>();
            GTPerson person;
            person.id = j.at("person_id").get<int>();
            const auto& joints = j.at("joints");
            if (joints.size() != kNumJoints)
                throw std::invalid_argument("gt record: expected 15 joints");
            for (int k = 0; k < kNumJoints; ++k)
                person.pose.joints[k] = Vec3(joints[k][0].get<double>(), joints[k][1].get<double>(),
                                             joints[k][2].get<double>());
            const auto emb = j.at("embedding").get<std::vector<double>>();
            person.embedding = Eigen::VectorXd(emb.size());
            for (size_t i = 0; i < emb.size(); ++i) person.embedding[long(i)] = emb[i];
            person.occlusion = j.at("occlusion").get<std::vector<double>>();
            while (int(ds.frames.size()) <= frame) {
                GTFrame f;
                f.frame = int(ds.frames.size());
                ds.frames.push_back(f);
            }
            ds.frames[size_t(frame)].persons.push_back(std::move(person));
        }
    }
    return ds;
}

}  // namespace voxeltrack
