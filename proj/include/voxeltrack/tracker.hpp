#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "voxeltrack/geometry.hpp"
#include "voxeltrack/occlusion.hpp"
#include "voxeltrack/pose.hpp"

namespace voxeltrack {

inline constexpr double kForbiddenCost = std::numeric_limits<double>::infinity();

// Minimum-cost bipartite matching; forbidden (infinite) entries are never
// selected. Ties break by (row, column).
struct Assignment {
    std::vector<std::pair<int, int>> matches;  // (row, column)
    std::vector<int> unmatched_rows;
    std::vector<int> unmatched_cols;
};

Assignment solve_assignment(const std::vector<std::vector<double>>& cost);

struct TrackerParams {
    double gate_mm = 500.0;          // raw mean-joint distance cap per frame
    double blend_alpha = 0.9;        // embedding EMA: a*old + (1-a)*new
    int max_unmatched_frames = 30;   // inactive strictly after this many
    bool pelvis_only_distance = false;
    bool use_appearance = true;
    bool use_location = true;
};

struct Tracklet {
    int id = 0;
    Pose3D last_pose;
    Eigen::VectorXd embedding;  // unit norm; zero-size until first valid feature
    int frames_since_match = 0;
    bool active = true;
    int last_frame = -1;
};

struct TrackRecord {
    int frame = 0;
    int track_id = 0;
    Pose3D pose;
    float confidence = 0.f;
};

// Raw mean-joint (or pelvis-only) Euclidean distances, mm.
std::vector<std::vector<double>> raw_location_distance(const std::vector<Tracklet>& tracklets,
                                                       const std::vector<Detection3D>& detections,
                                                       bool pelvis_only = false);

// Each tracklet's row divided by its row maximum (all-zero rows stay zero).
std::vector<std::vector<double>> location_distance(const std::vector<std::vector<double>>& raw);

// 0.5 * (1 - cosine). Entries where either side lacks a valid embedding fall
// back to the location distance.
std::vector<std::vector<double>> appearance_distance(const std::vector<Tracklet>& tracklets,
                                                     const std::vector<FusedReid>& features,
                                                     const std::vector<std::vector<double>>& loc_fallback);

// Elementwise mean, with entries above the raw-distance gate forbidden.
std::vector<std::vector<double>> final_cost(const std::vector<std::vector<double>>& loc,
                                            const std::vector<std::vector<double>>& app,
                                            const std::vector<std::vector<double>>& raw,
                                            double gate_mm);

class Tracker {
public:
    explicit Tracker(const TrackerParams& params = {}) : params_(params) {}

    // Advance one frame. Frame indices must be monotone increasing. Returns
    // records for matched (or newly spawned) tracklets.
    std::vector<TrackRecord> step(int frame, const std::vector<Detection3D>& detections,
                                  const std::vector<FusedReid>& features);

    const std::vector<Tracklet>& tracklets() const { return tracklets_; }
    const TrackerParams& params() const { return params_; }

private:
    TrackerParams params_;
    std::vector<Tracklet> tracklets_;
    int next_id_ = 1;
    int last_frame_ = -1;
};

// Newline-delimited JSON record stream.
std::string track_record_to_json(const TrackRecord& rec);
TrackRecord track_record_from_json(const std::string& line);
void save_track_records(const std::string& path, const std::vector<TrackRecord>& records);
std::vector<TrackRecord> load_track_records(const std::string& path);

}  // namespace voxeltrack
