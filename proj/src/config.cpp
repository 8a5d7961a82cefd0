#include "voxeltrack/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace voxeltrack {

using nlohmann::json;

void RunConfig::validate() const {
    if (grid_bins[0] < 1 || grid_bins[1] < 1 || grid_bins[2] < 1)
        throw std::invalid_argument("config: grid_bins entries must be >= 1");
    if (sparsify_threshold < 0)
        throw std::invalid_argument("config: sparsify_threshold must be >= 0");
    if (smooth.kernel_size < 1 || smooth.kernel_size % 2 == 0)
        throw std::invalid_argument("config: smooth.kernel_size must be odd and positive");
    if (smooth.sigma_voxels <= 0)
        throw std::invalid_argument("config: smooth.sigma_voxels must be positive");
    if (gt_sigma_mm <= 0) throw std::invalid_argument("config: gt_sigma_mm must be positive");
    if (decode.min_confidence <= 0 || decode.min_confidence >= 1)
        throw std::invalid_argument("config: decode.min_confidence must be in (0, 1)");
    if (decode.nms_radius_mm <= 0)
        throw std::invalid_argument("config: decode.nms_radius_mm must be positive");
    if (decode.crop_size < 2)
        throw std::invalid_argument("config: decode.crop_size must be >= 2");
    if (decode.select_sigma_mm <= 0)
        throw std::invalid_argument("config: decode.select_sigma_mm must be positive");
    if (min_rel_confidence < 0 || min_rel_confidence > 1)
        throw std::invalid_argument("config: min_rel_confidence must be in [0, 1]");
    if (occlusion.occluded_cutoff < 0 || occlusion.occluded_cutoff > 1)
        throw std::invalid_argument("config: occlusion.occluded_cutoff must be in [0, 1]");
    if (tracker.gate_mm <= 0) throw std::invalid_argument("config: tracker.gate_mm must be positive");
    if (tracker.blend_alpha < 0 || tracker.blend_alpha > 1)
        throw std::invalid_argument("config: tracker.blend_alpha must be in [0, 1]");
    if (tracker.max_unmatched_frames < 0)
        throw std::invalid_argument("config: tracker.max_unmatched_frames must be >= 0");
    if (eval.mot_threshold_mm <= 0)
        throw std::invalid_argument("config: eval.mot_threshold_mm must be positive");
    if (eval.ap_k_mm.empty()) throw std::invalid_argument("config: eval.ap_k_mm must not be empty");
    if (scenario.camera_count < 1)
        throw std::invalid_argument("config: scenario.camera_count must be >= 1");
}

namespace {
template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument(std::string("config: invalid value for field '") + key + "'");
    }
}
}  // namespace

RunConfig run_config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    RunConfig c;
    if (j.contains("scenario")) c.scenario = scenario_from_json_text(j.at("scenario").dump());
    read_field(j, "grid_bins", c.grid_bins);
    read_field(j, "sparsify_threshold", c.sparsify_threshold);
    if (j.contains("smooth")) {
        read_field(j.at("smooth"), "kernel_size", c.smooth.kernel_size);
        read_field(j.at("smooth"), "sigma_voxels", c.smooth.sigma_voxels);
    }
    read_field(j, "gt_sigma_mm", c.gt_sigma_mm);
    if (j.contains("decode")) {
        const json& d = j.at("decode");
        read_field(d, "root_channel", c.decode.root_channel);
        read_field(d, "min_confidence", c.decode.min_confidence);
        read_field(d, "nms_radius_mm", c.decode.nms_radius_mm);
        read_field(d, "crop_size", c.decode.crop_size);
        read_field(d, "mask_radius_voxels", c.decode.mask_radius_voxels);
        read_field(d, "peak_rel_threshold", c.decode.peak_rel_threshold);
        read_field(d, "select_sigma_mm", c.decode.select_sigma_mm);
    }
    read_field(j, "min_rel_confidence", c.min_rel_confidence);
    if (j.contains("occlusion")) {
        const json& o = j.at("occlusion");
        read_field(o, "occluded_cutoff", c.occlusion.occluded_cutoff);
        read_field(o, "soft_weighting", c.occlusion.soft_weighting);
    }
    read_field(j, "use_occlusion_mask", c.use_occlusion_mask);
    if (j.contains("tracker")) {
        const json& t = j.at("tracker");
        read_field(t, "gate_mm", c.tracker.gate_mm);
        read_field(t, "blend_alpha", c.tracker.blend_alpha);
        read_field(t, "max_unmatched_frames", c.tracker.max_unmatched_frames);
        read_field(t, "pelvis_only_distance", c.tracker.pelvis_only_distance);
        read_field(t, "use_appearance", c.tracker.use_appearance);
        read_field(t, "use_location", c.tracker.use_location);
    }
    if (j.contains("eval")) {
        const json& e = j.at("eval");
        read_field(e, "ap_k_mm", c.eval.ap_k_mm);
        read_field(e, "mot_threshold_mm", c.eval.mot_threshold_mm);
        read_field(e, "pcp_threshold", c.eval.pcp_threshold);
    }
    c.validate();
    return c;
}

std::string run_config_to_json_text(const RunConfig& c) {
    json j;
    j["scenario"] = json::parse(scenario_to_json_text(c.scenario));
    j["grid_bins"] = c.grid_bins;
    j["sparsify_threshold"] = c.sparsify_threshold;
    j["smooth"]["kernel_size"] = c.smooth.kernel_size;
    j["smooth"]["sigma_voxels"] = c.smooth.sigma_voxels;
    j["gt_sigma_mm"] = c.gt_sigma_mm;
    j["decode"]["root_channel"] = c.decode.root_channel;
    j["decode"]["min_confidence"] = c.decode.min_confidence;
    j["decode"]["nms_radius_mm"] = c.decode.nms_radius_mm;
    j["decode"]["crop_size"] = c.decode.crop_size;
    j["decode"]["mask_radius_voxels"] = c.decode.mask_radius_voxels;
    j["decode"]["peak_rel_threshold"] = c.decode.peak_rel_threshold;
    j["decode"]["select_sigma_mm"] = c.decode.select_sigma_mm;
    j["min_rel_confidence"] = c.min_rel_confidence;
    j["occlusion"]["occluded_cutoff"] = c.occlusion.occluded_cutoff;
    j["occlusion"]["soft_weighting"] = c.occlusion.soft_weighting;
    j["use_occlusion_mask"] = c.use_occlusion_mask;
    j["tracker"]["gate_mm"] = c.tracker.gate_mm;
    j["tracker"]["blend_alpha"] = c.tracker.blend_alpha;
    j["tracker"]["max_unmatched_frames"] = c.tracker.max_unmatched_frames;
    j["tracker"]["pelvis_only_distance"] = c.tracker.pelvis_only_distance;
    j["tracker"]["use_appearance"] = c.tracker.use_appearance;
    j["tracker"]["use_location"] = c.tracker.use_location;
    j["eval"]["ap_k_mm"] = c.eval.ap_k_mm;
    j["eval"]["mot_threshold_mm"] = c.eval.mot_threshold_mm;
    j["eval"]["pcp_threshold"] = c.eval.pcp_threshold;
    return j.dump(2);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return run_config_from_json_text(ss.str());
}

}  // namespace voxeltrack
