#pragma once

#include <string>

#include "voxeltrack/occlusion.hpp"
#include "voxeltrack/pose.hpp"
#include "voxeltrack/simulator.hpp"
#include "voxeltrack/tracker.hpp"
#include "voxeltrack/volume.hpp"

namespace voxeltrack {

struct EvalParams {
    std::vector<double> ap_k_mm = {25, 50, 100};
    double mot_threshold_mm = 150.0;
    double pcp_threshold = 0.5;
};

// Every tunable of the pipeline in one place.
struct RunConfig {
    ScenarioConfig scenario;

    std::array<int, 3> grid_bins = {160, 160, 64};
    float sparsify_threshold = 0.15f;
    SmoothParams smooth;
    double gt_sigma_mm = 62.5;

    DecodeParams decode;
    // Drop detections whose root confidence falls below this fraction of the
    // frame's strongest root: back-projection rays of different persons can
    // nearly cross far from any body and leave a weak phantom peak; a real
    // person is seen by more views and scores about twice as high.
    double min_rel_confidence = 0.5;
    OcclusionParams occlusion;
    bool use_occlusion_mask = true;
    TrackerParams tracker;
    EvalParams eval;

    VoxelGrid grid() const {
        VoxelGrid g;
        g.origin = Vec3::Zero();
        g.extent = scenario.space_extent;
        g.bins = grid_bins;
        return g;
    }

    void validate() const;
};

RunConfig run_config_from_json_text(const std::string& text);
std::string run_config_to_json_text(const RunConfig& config);
RunConfig load_run_config(const std::string& path);

}  // namespace voxeltrack
