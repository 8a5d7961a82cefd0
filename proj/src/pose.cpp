#include "voxeltrack/pose.hpp"

#include <algorithm>
#include <cmath>

namespace voxeltrack {

namespace {

// Plateau-safe local maximum: strictly greater than later-scanned equal
// neighbors so a flat peak yields exactly one representative.
bool is_local_max(const JointHeatmap3D& hm, int channel, int x, int y, int z) {
    const VoxelGrid& grid = hm.grid;
    const float v = hm.at(channel, x, y, z);
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dz = -1; dz <= 1; ++dz) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                const int nx = x + dx, ny = y + dy, nz = z + dz;
                if (!grid.contains_index(nx, ny, nz)) continue;
                const float nv = hm.at(channel, nx, ny, nz);
                if (nv > v) return false;
                if (nv == v && (dx < 0 || (dx == 0 && (dy < 0 || (dy == 0 && dz < 0)))))
                    return false;
            }
    return true;
}

}  // namespace

std::vector<RootPeak> detect_roots(const JointHeatmap3D& heatmap, const DecodeParams& params) {
    if (params.min_confidence <= 0 || params.min_confidence >= 1)
        throw std::invalid_argument("detect_roots: min_confidence must be in (0, 1)");
    if (params.nms_radius_mm <= 0)
        throw std::invalid_argument("detect_roots: nms_radius_mm must be positive");
    if (params.root_channel < 0 || params.root_channel >= heatmap.channels)
        throw std::invalid_argument("detect_roots: root channel out of range");

    const VoxelGrid& grid = heatmap.grid;
    std::vector<RootPeak> candidates;
    for (int x = 0; x < grid.bins[0]; ++x)
        for (int y = 0; y < grid.bins[1]; ++y)
            for (int z = 0; z < grid.bins[2]; ++z) {
                const float v = heatmap.at(params.root_channel, x, y, z);
                if (v < params.min_confidence) continue;
                if (!is_local_max(heatmap, params.root_channel, x, y, z)) continue;
                candidates.push_back({{x, y, z}, v});
            }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const RootPeak& a, const RootPeak& b) {
                         if (a.confidence != b.confidence) return a.confidence > b.confidence;
                         return a.voxel < b.voxel;
                     });

    std::vector<RootPeak> peaks;
    for (const RootPeak& c : candidates) {
        const Vec3 pc = voxel_center(grid, c.voxel.x, c.voxel.y, c.voxel.z);
        bool suppressed = false;
        for (const RootPeak& kept : peaks) {
            const Vec3 pk = voxel_center(grid, kept.voxel.x, kept.voxel.y, kept.voxel.z);
            if ((pc - pk).norm() < params.nms_radius_mm) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) peaks.push_back(c);
    }
    return peaks;
}

CropVolume extract_crop(const JointHeatmap3D& heatmap, const VoxelCoord& anchor,
                        const DecodeParams& params) {
    const VoxelGrid& grid = heatmap.grid;
    if (!grid.contains_index(anchor.x, anchor.y, anchor.z))
        throw std::out_of_range("extract_crop: anchor outside grid");
    const int S = params.crop_size;
    const int half = S / 2;
    CropVolume crop;
    crop.anchor = anchor;
    crop.size = S;
    crop.channels = heatmap.channels;
    crop.values.assign(size_t(heatmap.channels) * S * S * S, 0.f);
    crop.degenerate.assign(size_t(heatmap.channels), false);

    for (int j = 0; j < heatmap.channels; ++j)
        for (int x = 0; x < S; ++x) {
            const int gx = anchor.x + x - half;
            if (gx < 0 || gx >= grid.bins[0]) continue;
            for (int y = 0; y < S; ++y) {
                const int gy = anchor.y + y - half;
                if (gy < 0 || gy >= grid.bins[1]) continue;
                for (int z = 0; z < S; ++z) {
                    const int gz = anchor.z + z - half;
                    if (gz < 0 || gz >= grid.bins[2]) continue;
                    crop.at(j, x, y, z) = heatmap.at(j, gx, gy, gz);
                }
            }
        }

    // Peak-window masking: score each candidate blob by value times a
    // Gaussian distance prior to the anchor and keep the largest, then
    // normalize the channel to unit mass. The prior prefers this person's
    // joint over an equally strong blob from a neighbour while still letting
    // a strong true blob beat a weak ridge artifact that happens to lie
    // closer to the pelvis.
    const Vec3 vs = grid.voxel_size();
    const double inv2s2 =
        1.0 / (2.0 * params.select_sigma_mm * params.select_sigma_mm);
    for (int j = 0; j < heatmap.channels; ++j) {
        float channel_max = 0.f;
        for (int x = 0; x < S; ++x)
            for (int y = 0; y < S; ++y)
                for (int z = 0; z < S; ++z)
                    channel_max = std::max(channel_max, crop.at(j, x, y, z));
        if (channel_max <= 0.f) {
            crop.degenerate[j] = true;
            continue;
        }
        const float peak_min = float(params.peak_rel_threshold) * channel_max;

        int best_x = -1, best_y = -1, best_z = -1;
        double best_score = 0;
        for (int x = 0; x < S; ++x)
            for (int y = 0; y < S; ++y)
                for (int z = 0; z < S; ++z) {
                    const float v = crop.at(j, x, y, z);
                    if (v < peak_min) continue;
                    bool local_max = true;
                    for (int dx = -1; dx <= 1 && local_max; ++dx)
                        for (int dy = -1; dy <= 1 && local_max; ++dy)
                            for (int dz = -1; dz <= 1 && local_max; ++dz) {
                                const int nx = x + dx, ny = y + dy, nz = z + dz;
                                if (nx < 0 || nx >= S || ny < 0 || ny >= S || nz < 0 || nz >= S)
                                    continue;
                                if (crop.at(j, nx, ny, nz) > v) local_max = false;
                            }
                    if (!local_max) continue;
                    const double dx_mm = (x - half) * vs.x();
                    const double dy_mm = (y - half) * vs.y();
                    const double dz_mm = (z - half) * vs.z();
                    const double d2_mm = dx_mm * dx_mm + dy_mm * dy_mm + dz_mm * dz_mm;
                    const double score = double(v) * std::exp(-d2_mm * inv2s2);
                    if (best_x < 0 || score > best_score) {
                        best_x = x;
                        best_y = y;
                        best_z = z;
                        best_score = score;
                    }
                }
        if (best_x < 0) {
            crop.degenerate[j] = true;
            continue;
        }

        const int rm = params.mask_radius_voxels;
        double sum = 0;
        for (int x = 0; x < S; ++x)
            for (int y = 0; y < S; ++y)
                for (int z = 0; z < S; ++z) {
                    if (std::abs(x - best_x) > rm || std::abs(y - best_y) > rm ||
                        std::abs(z - best_z) > rm)
                        crop.at(j, x, y, z) = 0.f;
                    else
                        sum += crop.at(j, x, y, z);
                }
        if (sum <= 0) {
            crop.degenerate[j] = true;
            continue;
        }
        const float inv = float(1.0 / sum);
        for (int x = 0; x < S; ++x)
            for (int y = 0; y < S; ++y)
                for (int z = 0; z < S; ++z) crop.at(j, x, y, z) *= inv;
    }
    return crop;
}

Vec3 soft_argmax(const CropVolume& crop, int joint, const VoxelGrid& grid) {
    const int S = crop.size;
    const int half = S / 2;
    const Vec3 vs = grid.voxel_size();
    if (crop.degenerate[size_t(joint)])
        return voxel_center(grid, crop.anchor.x, crop.anchor.y, crop.anchor.z);
    double mx = 0, my = 0, mz = 0;
    for (int x = 0; x < S; ++x)
        for (int y = 0; y < S; ++y)
            for (int z = 0; z < S; ++z) {
                const double v = crop.at(joint, x, y, z);
                if (v == 0) continue;
                mx += v * x;
                my += v * y;
                mz += v * z;
            }
    return grid.origin + Vec3((crop.anchor.x - half + mx + 0.5) * vs.x(),
                              (crop.anchor.y - half + my + 0.5) * vs.y(),
                              (crop.anchor.z - half + mz + 0.5) * vs.z());
}

std::vector<Detection3D> decode_poses(const JointHeatmap3D& heatmap,
                                      const std::vector<RootPeak>& roots,
                                      const DecodeParams& params) {
    std::vector<Detection3D> detections;
    detections.reserve(roots.size());
    for (const RootPeak& root : roots) {
        const CropVolume crop = extract_crop(heatmap, root.voxel, params);
        Detection3D det;
        det.confidence = root.confidence;
        det.root_voxel = root.voxel;
        det.joint_degenerate.assign(size_t(heatmap.channels), false);
        for (int j = 0; j < heatmap.channels && j < kNumJoints; ++j) {
            det.pose.joints[j] = soft_argmax(crop, j, heatmap.grid);
            det.joint_degenerate[size_t(j)] = crop.degenerate[size_t(j)];
        }
        detections.push_back(std::move(det));
    }
    return detections;
}

double pose_l1_loss(const Pose3D& pred, const Pose3D& target) {
    double sum = 0;
    for (int j = 0; j < kNumJoints; ++j)
        sum += (pred.joints[j] - target.joints[j]).cwiseAbs().sum();
    return sum;
}

}  // namespace voxeltrack
