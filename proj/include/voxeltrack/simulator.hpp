#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voxeltrack/geometry.hpp"
#include "voxeltrack/heatmap.hpp"
#include "voxeltrack/occlusion.hpp"

namespace voxeltrack {

struct ScenarioConfig {
    std::uint64_t seed = 1;
    int n_persons = 2;
    int duration_frames = 50;
    double fps = 15.0;

    Vec3 space_extent = Vec3(10000, 10000, 4000);  // mm, origin at zero

    int camera_count = 5;
    double camera_radius_mm = 8000.0;
    double camera_height_mm = 2500.0;
    int image_width = 1600;
    int image_height = 1216;
    double focal_px = 700.0;
    double heatmap_downsample = 4.0;

    double speed_mm_s = 1000.0;
    int waypoint_count = 4;
    double spawn_separation_mm = 500.0;
    // Optional explicit ground-plane waypoint loops; person p follows
    // scripted_paths[p] when one is given, otherwise a seeded random loop.
    // Lets a scene stage deterministic crossings for tracker stress tests.
    std::vector<std::vector<Eigen::Vector2d>> scripted_paths;

    double heatmap_sigma_px = 2.0;      // rendered blob width, heatmap pixels
    double jitter_sigma_px = 0.0;       // joint-pixel noise, heatmap pixels
    double false_peak_rate = 0.0;       // expected spurious peaks per joint channel per view
    double missing_joint_rate = 0.0;

    double reid_spot_radius_px = 5.0;   // pelvis neighborhood painted per view
    bool reid_occlusion_corruption = true;
};

ScenarioConfig scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const ScenarioConfig& config);

struct GTPerson {
    int id = 0;
    Pose3D pose;
    Eigen::VectorXd embedding;           // persistent unit identity embedding
    std::vector<double> occlusion;       // per view, true occluded fraction
};

struct GTFrame {
    int frame = 0;
    std::vector<GTPerson> persons;
};

struct FrameObservations {
    std::vector<Heatmap2D> heatmaps;   // per view
    std::vector<ReidMap2D> reid_maps;  // per view
};

// Cameras on a ring around the space center, looking at its midpoint.
std::vector<CameraParams> make_camera_ring(const ScenarioConfig& config);

class Simulator {
public:
    explicit Simulator(const ScenarioConfig& config);

    const ScenarioConfig& config() const { return config_; }
    const std::vector<CameraParams>& cameras() const { return cameras_; }
    const std::vector<GTFrame>& frames() const { return frames_; }

    // Deterministic in (config.seed, frame_index) only.
    FrameObservations render_frame(int frame_index) const;

private:
    ScenarioConfig config_;
    std::vector<CameraParams> cameras_;
    std::vector<GTFrame> frames_;
    std::vector<Eigen::VectorXd> distractors_;  // per person per view
};

// The scene trajectory part alone (poses + identities, occlusion filled in).
std::vector<GTFrame> sample_scene(const ScenarioConfig& config,
                                  const std::vector<CameraParams>& cameras);

// Writes cameras.json, scenario.json and gt.jsonl under dir; optionally the
// per-frame heatmap dumps.
void export_dataset(const std::string& dir, const Simulator& sim, bool dump_heatmaps = false);

struct Dataset {
    ScenarioConfig config;
    std::vector<CameraParams> cameras;
    std::vector<GTFrame> frames;
};

Dataset load_dataset(const std::string& dir);

std::string gt_record_to_json(int frame, const GTPerson& person);

}  // namespace voxeltrack
