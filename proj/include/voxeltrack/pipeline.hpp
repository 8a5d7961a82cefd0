#pragma once

#include <vector>

#include "voxeltrack/config.hpp"
#include "voxeltrack/metrics.hpp"

namespace voxeltrack {

struct StageTimings {
    double render_ms = 0;    // 2D heatmap / Re-ID synthesis
    double volume_ms = 0;    // fusion + sparsify + smoothing
    double decode_ms = 0;    // root detection + per-person decoding
    double tracking_ms = 0;  // occlusion reasoning + Re-ID fusion + linking

    StageTimings& operator+=(const StageTimings& o) {
        render_ms += o.render_ms;
        volume_ms += o.volume_ms;
        decode_ms += o.decode_ms;
        tracking_ms += o.tracking_ms;
        return *this;
    }
};

struct FrameResult {
    std::vector<Detection3D> detections;
    std::vector<FusedReid> features;
    std::vector<TrackRecord> records;
    StageTimings timings;
};

// Stateful per-sequence pipeline: volume fusion, decoding, occlusion-aware
// Re-ID fusion and tracking, fed one frame of observations at a time.
class Pipeline {
public:
    Pipeline(const RunConfig& config, const std::vector<CameraParams>& cameras);

    FrameResult process_frame(int frame_index, const FrameObservations& obs);

    const RunConfig& config() const { return config_; }
    const VoxelGrid& grid() const { return grid_; }

private:
    RunConfig config_;
    std::vector<CameraParams> cameras_;
    VoxelGrid grid_;
    std::vector<ProjectionTable> tables_;
    Tracker tracker_;
};

struct TrackRunResult {
    std::vector<TrackRecord> records;
    StageTimings total_timings;
    int frames = 0;
    StageTimings mean_timings() const {
        StageTimings m = total_timings;
        if (frames > 0) {
            m.render_ms /= frames;
            m.volume_ms /= frames;
            m.decode_ms /= frames;
            m.tracking_ms /= frames;
        }
        return m;
    }
};

// Full golden path: re-render observations from the dataset's scenario and
// track every frame.
TrackRunResult run_tracking(const RunConfig& config, const Simulator& sim);

// Pair GT and track records frame by frame for the metrics suite.
std::vector<EvalFrame> build_eval_frames(const std::vector<GTFrame>& gt,
                                         const std::vector<TrackRecord>& records);

}  // namespace voxeltrack
