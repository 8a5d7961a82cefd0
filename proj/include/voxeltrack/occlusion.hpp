#pragma once

#include <vector>

#include "voxeltrack/geometry.hpp"
#include "voxeltrack/heatmap.hpp"

namespace voxeltrack {

inline constexpr int kReidDim = 64;

// Depth-plane bounding box of a person's projected joints in one view.
struct PersonDepthBox {
    int view = 0;
    double depth = 0;  // mean camera-frame joint depth, mm
    double u_min = 0, v_min = 0, u_max = 0, v_max = 0;  // image pixels
    bool visible = false;
};

std::vector<PersonDepthBox> person_depth_boxes(const std::vector<Pose3D>& poses,
                                               const CameraParams& camera, int view_id = 0);

// Fraction of the target box's rasterized pixels covered by a strictly
// nearer box. Raster pitch given in pixels.
double occluded_fraction(const PersonDepthBox& target, const std::vector<PersonDepthBox>& others,
                         double resolution_px);

// Exact rectangle-intersection route; used as the oracle for the raster path.
double occluded_fraction_analytic(const PersonDepthBox& target,
                                  const std::vector<PersonDepthBox>& others);

struct ReliabilityWeights {
    std::vector<double> weights;  // per view, normalized to sum 1 when valid
    bool valid = false;           // false when every view is occluded away
};

struct OcclusionParams {
    double occluded_cutoff = 0.7;   // fraction above which a view is dropped
    bool soft_weighting = true;     // 1 - fraction below the cutoff; false = hard 0/1 mask
};

ReliabilityWeights reliability_weights(const std::vector<double>& fractions,
                                       const OcclusionParams& params = {});

struct FusedReid {
    Eigen::VectorXd embedding;  // unit norm when valid
    bool valid = false;
};

// Weighted average of per-view embeddings, L2-renormalized.
FusedReid fuse_reid(const std::vector<Eigen::VectorXd>& features, const ReliabilityWeights& weights);

// Convenience: sample each view's Re-ID map at the projected 3D pelvis and
// fuse with the given weights. Views where the pelvis projects out of frame
// contribute zero vectors.
FusedReid sample_and_fuse_reid(const Vec3& pelvis, const std::vector<CameraParams>& cameras,
                               const std::vector<ReidMap2D>& reid_maps,
                               const ReliabilityWeights& weights, double heatmap_downsample = 4.0);

}  // namespace voxeltrack
