#pragma once

#include <vector>

#include "voxeltrack/volume.hpp"

namespace voxeltrack {

struct RootPeak {
    VoxelCoord voxel;
    float confidence = 0.f;
};

struct DecodeParams {
    int root_channel = kPelvisJoint;
    double min_confidence = 0.3;
    double nms_radius_mm = 500.0;
    int crop_size = 32;            // voxels per side
    int mask_radius_voxels = 3;    // peak-window half-extent per joint
    double peak_rel_threshold = 0.3;  // candidate peaks >= this * channel max
    double select_sigma_mm = 600.0;   // distance prior for picking this person's blob
};

// Local heatmap peaks >= min_confidence, greedily suppressed so returned
// peaks are >= nms_radius_mm apart, sorted by descending confidence.
std::vector<RootPeak> detect_roots(const JointHeatmap3D& heatmap, const DecodeParams& params);

// Fixed-size per-person window around a detected pelvis. Per joint the
// channel is masked to the peak nearest the anchor and normalized to sum 1.
struct CropVolume {
    VoxelCoord anchor;
    int size = 32;
    int channels = 0;
    std::vector<float> values;            // [j][x][y][z]
    std::vector<bool> degenerate;         // per joint: channel had no mass

    float at(int j, int x, int y, int z) const {
        return values[((size_t(j) * size + x) * size + y) * size + z];
    }
    float& at(int j, int x, int y, int z) {
        return values[((size_t(j) * size + x) * size + y) * size + z];
    }
};

CropVolume extract_crop(const JointHeatmap3D& heatmap, const VoxelCoord& anchor,
                        const DecodeParams& params);

// Center of mass of the normalized channel, mapped to world mm. Degenerate
// channels return the anchor voxel center.
Vec3 soft_argmax(const CropVolume& crop, int joint, const VoxelGrid& grid);

struct Detection3D {
    Pose3D pose;
    float confidence = 0.f;
    VoxelCoord root_voxel;
    std::vector<bool> joint_degenerate;              // per joint
    std::vector<PixelProjection> pelvis_projections;  // per view, filled by the pipeline
};

std::vector<Detection3D> decode_poses(const JointHeatmap3D& heatmap,
                                      const std::vector<RootPeak>& roots,
                                      const DecodeParams& params);

// L1 distance summed over all joints and coordinates.
double pose_l1_loss(const Pose3D& pred, const Pose3D& target);

}  // namespace voxeltrack
