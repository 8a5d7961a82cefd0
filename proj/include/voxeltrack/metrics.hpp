#pragma once

#include <map>
#include <string>
#include <vector>

#include "voxeltrack/geometry.hpp"

namespace voxeltrack {

struct EvalPose {
    int id = 0;
    Pose3D pose;
    float confidence = 1.f;
};

struct EvalFrame {
    int frame = 0;
    std::vector<EvalPose> gt;
    std::vector<EvalPose> pred;
};

struct PcpResult {
    std::map<int, double> per_actor;  // actor id -> fraction of correct parts
    double average = 0;
};

// Percentage of correct parts against each ground truth's closest estimate.
// A limb is correct when both endpoint errors are within
// threshold_fraction * GT limb length. False positives are not penalized.
PcpResult pcp3d(const std::vector<EvalFrame>& frames,
                const std::vector<std::pair<int, int>>& limbs, double threshold_fraction = 0.5);

struct ApResult {
    std::map<double, double> ap;  // K (mm) -> average precision
    double mpjpe_mm = 0;          // over true positives at the largest K
    int matched = 0;
};

// Detection-style AP with MPJPE < K as the true-positive rule; predictions
// are matched greedily in descending confidence order.
ApResult ap_and_mpjpe(const std::vector<EvalFrame>& frames, const std::vector<double>& k_list_mm);

struct MotResult {
    std::vector<double> mota_per_joint;
    std::vector<double> idf1_per_joint;
    std::vector<int> idsw_per_joint;
    double mota = 0;   // mean over joints
    double idf1 = 0;   // mean over joints
    int id_switches = 0;  // summed over joints
};

// CLEAR-style per-joint tracking metrics with a Hungarian frame matching
// gated at threshold_mm; IDF1 via global identity matching.
MotResult mot_per_joint(const std::vector<EvalFrame>& frames, double threshold_mm = 150.0);

struct MetricsReport {
    PcpResult pcp;
    ApResult ap;
    MotResult mot;

    std::string to_json() const;
    std::string to_table() const;
};

MetricsReport evaluate(const std::vector<EvalFrame>& frames,
                       const std::vector<double>& k_list_mm = {25, 50, 100},
                       double mot_threshold_mm = 150.0, double pcp_threshold = 0.5);

}  // namespace voxeltrack
