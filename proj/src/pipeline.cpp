#include "voxeltrack/pipeline.hpp"

#include <chrono>

namespace voxeltrack {

namespace {
double ms_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

Pipeline::Pipeline(const RunConfig& config, const std::vector<CameraParams>& cameras)
    : config_(config), cameras_(cameras), grid_(config.grid()), tracker_(config.tracker) {
    config_.validate();
    tables_ = build_projection_table(grid_, cameras_, config_.scenario.heatmap_downsample);
}

FrameResult Pipeline::process_frame(int frame_index, const FrameObservations& obs) {
    FrameResult result;

    auto t0 = std::chrono::steady_clock::now();
    const FeatureVolume volume = build_feature_volume(obs.heatmaps, tables_, grid_);
    const SparseVolume sparse = sparsify(volume, config_.sparsify_threshold);
    const JointHeatmap3D heatmap = smooth_volume(sparse, config_.smooth);
    result.timings.volume_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    std::vector<RootPeak> roots = detect_roots(heatmap, config_.decode);
    if (!roots.empty()) {
        // roots are sorted by descending confidence; cut phantom ray
        // crossings well below the strongest person in this frame.
        const double floor_conf = roots.front().confidence * config_.min_rel_confidence;
        while (!roots.empty() && roots.back().confidence < floor_conf) roots.pop_back();
    }
    result.detections = decode_poses(heatmap, roots, config_.decode);
    result.timings.decode_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    std::vector<Pose3D> poses;
    poses.reserve(result.detections.size());
    for (const Detection3D& det : result.detections) poses.push_back(det.pose);

    std::vector<std::vector<double>> fractions(result.detections.size(),
                                               std::vector<double>(cameras_.size(), 0.0));
    if (config_.use_occlusion_mask && !result.detections.empty()) {
        for (size_t v = 0; v < cameras_.size(); ++v) {
            const auto boxes = person_depth_boxes(poses, cameras_[v], int(v));
            for (size_t p = 0; p < boxes.size(); ++p) {
                std::vector<PersonDepthBox> others;
                for (size_t q = 0; q < boxes.size(); ++q)
                    if (q != p) others.push_back(boxes[q]);
                fractions[p][v] =
                    occluded_fraction(boxes[p], others, config_.scenario.heatmap_downsample);
            }
        }
    }

    result.features.reserve(result.detections.size());
    for (size_t p = 0; p < result.detections.size(); ++p) {
        Detection3D& det = result.detections[p];
        for (const CameraParams& cam : cameras_)
            det.pelvis_projections.push_back(project_point(cam, det.pose.pelvis()));
        const ReliabilityWeights weights = reliability_weights(fractions[p], config_.occlusion);
        result.features.push_back(sample_and_fuse_reid(det.pose.pelvis(), cameras_, obs.reid_maps,
                                                       weights,
                                                       config_.scenario.heatmap_downsample));
    }

    result.records = tracker_.step(frame_index, result.detections, result.features);
    result.timings.tracking_ms = ms_since(t0);
    return result;
}

TrackRunResult run_tracking(const RunConfig& config, const Simulator& sim) {
    Pipeline pipeline(config, sim.cameras());
    TrackRunResult out;
    for (const GTFrame& frame : sim.frames()) {
        const auto t0 = std::chrono::steady_clock::now();
        const FrameObservations obs = sim.render_frame(frame.frame);
        StageTimings timings;
        timings.render_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        FrameResult fr = pipeline.process_frame(frame.frame, obs);
        fr.timings.render_ms = timings.render_ms;
        out.total_timings += fr.timings;
        out.records.insert(out.records.end(), fr.records.begin(), fr.records.end());
        ++out.frames;
    }
    return out;
}

std::vector<EvalFrame> build_eval_frames(const std::vector<GTFrame>& gt,
                                         const std::vector<TrackRecord>& records) {
    std::vector<EvalFrame> frames(gt.size());
    for (size_t i = 0; i < gt.size(); ++i) {
        frames[i].frame = gt[i].frame;
        for (const GTPerson& person : gt[i].persons) {
            EvalPose pose;
            pose.id = person.id;
            pose.pose = person.pose;
            frames[i].gt.push_back(std::move(pose));
        }
    }
    for (const TrackRecord& rec : records) {
        if (rec.frame < 0 || rec.frame >= int(frames.size())) continue;
        EvalPose pose;
        pose.id = rec.track_id;
        pose.pose = rec.pose;
        pose.confidence = rec.confidence;
        frames[size_t(rec.frame)].pred.push_back(std::move(pose));
    }
    return frames;
}

}  // namespace voxeltrack
