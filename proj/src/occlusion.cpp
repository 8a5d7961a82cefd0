#include "voxeltrack/occlusion.hpp"

#include <algorithm>
#include <cmath>

namespace voxeltrack {

std::vector<PersonDepthBox> person_depth_boxes(const std::vector<Pose3D>& poses,
                                               const CameraParams& camera, int view_id) {
    std::vector<PersonDepthBox> boxes;
    boxes.reserve(poses.size());
    for (const Pose3D& pose : poses) {
        PersonDepthBox box;
        box.view = view_id;
        double depth_sum = 0;
        bool first = true;
        bool any_behind = false;
        for (int j = 0; j < kNumJoints; ++j) {
            const PixelProjection p = project_point(camera, pose.joints[j]);
            depth_sum += p.depth;
            if (p.depth <= 0) {
                any_behind = true;
                continue;
            }
            if (first) {
                box.u_min = box.u_max = p.u;
                box.v_min = box.v_max = p.v;
                first = false;
            } else {
                box.u_min = std::min(box.u_min, p.u);
                box.u_max = std::max(box.u_max, p.u);
                box.v_min = std::min(box.v_min, p.v);
                box.v_max = std::max(box.v_max, p.v);
            }
        }
        box.depth = depth_sum / kNumJoints;
        box.visible = !any_behind && box.depth > 0;
        boxes.push_back(box);
    }
    return boxes;
}

double occluded_fraction(const PersonDepthBox& target, const std::vector<PersonDepthBox>& others,
                         double resolution_px) {
    if (resolution_px <= 0)
        throw std::invalid_argument("occluded_fraction: resolution must be positive");
    if (!target.visible) return 0.0;
    const double w = target.u_max - target.u_min;
    const double h = target.v_max - target.v_min;
    if (w <= 0 || h <= 0) return 0.0;

    const int nu = std::max(1, int(std::ceil(w / resolution_px)));
    const int nv = std::max(1, int(std::ceil(h / resolution_px)));
    long covered = 0;
    for (int iv = 0; iv < nv; ++iv) {
        const double v = target.v_min + (iv + 0.5) * h / nv;
        for (int iu = 0; iu < nu; ++iu) {
            const double u = target.u_min + (iu + 0.5) * w / nu;
            for (const PersonDepthBox& o : others) {
                if (!o.visible || o.depth >= target.depth) continue;
                if (u >= o.u_min && u <= o.u_max && v >= o.v_min && v <= o.v_max) {
                    ++covered;
                    break;
                }
            }
        }
    }
    return double(covered) / (double(nu) * nv);
}

double occluded_fraction_analytic(const PersonDepthBox& target,
                                  const std::vector<PersonDepthBox>& others) {
    if (!target.visible) return 0.0;
    const double w = target.u_max - target.u_min;
    const double h = target.v_max - target.v_min;
    if (w <= 0 || h <= 0) return 0.0;

    // Union of nearer-box intersections via inclusion-exclusion on a small
    // set; the person counts here are tiny so the 2^n term is fine.
    std::vector<std::array<double, 4>> rects;  // clipped to the target box
    for (const PersonDepthBox& o : others) {
        if (!o.visible || o.depth >= target.depth) continue;
        const double x0 = std::max(target.u_min, o.u_min);
        const double x1 = std::min(target.u_max, o.u_max);
        const double y0 = std::max(target.v_min, o.v_min);
        const double y1 = std::min(target.v_max, o.v_max);
        if (x1 > x0 && y1 > y0) rects.push_back({x0, y0, x1, y1});
    }
    if (rects.empty()) return 0.0;
    double area = 0;
    const size_t n = rects.size();
    for (size_t mask = 1; mask < (size_t(1) << n); ++mask) {
        double x0 = target.u_min, y0 = target.v_min, x1 = target.u_max, y1 = target.v_max;
        int bits = 0;
        for (size_t i = 0; i < n; ++i)
            if (mask & (size_t(1) << i)) {
                ++bits;
                x0 = std::max(x0, rects[i][0]);
                y0 = std::max(y0, rects[i][1]);
                x1 = std::min(x1, rects[i][2]);
                y1 = std::min(y1, rects[i][3]);
            }
        if (x1 > x0 && y1 > y0) area += (bits % 2 == 1 ? 1.0 : -1.0) * (x1 - x0) * (y1 - y0);
    }
    return std::clamp(area / (w * h), 0.0, 1.0);
}

ReliabilityWeights reliability_weights(const std::vector<double>& fractions,
                                       const OcclusionParams& params) {
    ReliabilityWeights out;
    out.weights.assign(fractions.size(), 0.0);
    double sum = 0;
    for (size_t v = 0; v < fractions.size(); ++v) {
        const double f = fractions[v];
        if (f < 0 || f > 1)
            throw std::invalid_argument("reliability_weights: fraction outside [0, 1]");
        double raw = 0;
        if (f <= params.occluded_cutoff) raw = params.soft_weighting ? 1.0 - f : 1.0;
        out.weights[v] = raw;
        sum += raw;
    }
    if (sum > 0) {
        for (double& w : out.weights) w /= sum;
        out.valid = true;
    }
    return out;
}

FusedReid fuse_reid(const std::vector<Eigen::VectorXd>& features,
                    const ReliabilityWeights& weights) {
    FusedReid out;
    if (features.size() != weights.weights.size())
        throw std::invalid_argument("fuse_reid: view count mismatch");
    if (!weights.valid || features.empty()) return out;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(features[0].size());
    for (size_t v = 0; v < features.size(); ++v) {
        if (weights.weights[v] == 0.0) continue;
        if (features[v].size() != acc.size())
            throw std::invalid_argument("fuse_reid: embedding dimension mismatch");
        acc += weights.weights[v] * features[v];
    }
    const double norm = acc.norm();
    if (norm <= 1e-12) return out;
    out.embedding = acc / norm;
    out.valid = true;
    return out;
}

FusedReid sample_and_fuse_reid(const Vec3& pelvis, const std::vector<CameraParams>& cameras,
                               const std::vector<ReidMap2D>& reid_maps,
                               const ReliabilityWeights& weights, double heatmap_downsample) {
    std::vector<Eigen::VectorXd> features;
    features.reserve(cameras.size());
    for (size_t v = 0; v < cameras.size(); ++v) {
        const PixelProjection p = project_point(cameras[v], pelvis);
        Eigen::VectorXd f = Eigen::VectorXd::Zero(reid_maps[v].channels);
        if (p.in_front()) {
            const std::vector<float> s =
                sample_bilinear(reid_maps[v], p.u / heatmap_downsample, p.v / heatmap_downsample);
            for (int c = 0; c < reid_maps[v].channels; ++c) f[c] = s[size_t(c)];
            const double norm = f.norm();
            if (norm > 1e-12) f /= norm;
        }
        features.push_back(std::move(f));
    }
    return fuse_reid(features, weights);
}

}  // namespace voxeltrack
