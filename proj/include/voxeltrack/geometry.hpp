#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace voxeltrack {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr int kNumJoints = 15;
inline constexpr int kPelvisJoint = 0;

// Joint order: 0 pelvis, 1 neck, 2 head, 3-5 left arm (shoulder, elbow,
// wrist), 6-8 right arm, 9-11 left leg (hip, knee, ankle), 12-14 right leg.
const std::array<const char*, kNumJoints>& joint_names();

// 14 limbs as (parent, child) joint index pairs.
const std::vector<std::pair<int, int>>& limb_pairs();

struct CameraParams {
    int id = 0;
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    Mat3 rotation = Mat3::Identity();   // world-to-camera
    Vec3 translation = Vec3::Zero();    // mm
    int image_width = 0;
    int image_height = 0;

    void validate() const;
};

struct PixelProjection {
    double u = 0, v = 0;   // pixels at full image resolution
    double depth = 0;      // camera-frame z, mm
    bool in_front() const { return depth > 0.0; }
};

PixelProjection project_point(const CameraParams& cam, const Vec3& point);

struct VoxelGrid {
    Vec3 origin = Vec3::Zero();                  // mm
    Vec3 extent = Vec3(10000, 10000, 4000);      // mm
    std::array<int, 3> bins = {160, 160, 64};

    void validate() const;
    Vec3 voxel_size() const {
        return {extent.x() / bins[0], extent.y() / bins[1], extent.z() / bins[2]};
    }
    std::int64_t voxel_count() const {
        return std::int64_t(bins[0]) * bins[1] * bins[2];
    }
    std::int64_t flat_index(int x, int y, int z) const {
        return (std::int64_t(x) * bins[1] + y) * bins[2] + z;
    }
    bool contains_index(int x, int y, int z) const {
        return x >= 0 && x < bins[0] && y >= 0 && y < bins[1] && z >= 0 && z < bins[2];
    }
};

Vec3 voxel_center(const VoxelGrid& grid, int x, int y, int z);

struct Pose3D {
    std::array<Vec3, kNumJoints> joints;

    Pose3D() { joints.fill(Vec3::Zero()); }
    const Vec3& pelvis() const { return joints[kPelvisJoint]; }
};

// Mean per-joint Euclidean distance between two poses, mm.
double mean_joint_distance(const Pose3D& a, const Pose3D& b);

// Per-view voxel-to-pixel lookup. Pixel coordinates are stored at heatmap
// resolution (image / downsample) with fractional precision kept for
// bilinear sampling.
struct ProjectionTable {
    struct Entry {
        float u = 0, v = 0;     // heatmap-resolution pixels
        float depth = 0;        // mm
        bool visible = false;
    };
    int heatmap_width = 0;
    int heatmap_height = 0;
    std::vector<Entry> entries;  // voxel-major, grid.flat_index order

    const Entry& at(const VoxelGrid& grid, int x, int y, int z) const {
        return entries[grid.flat_index(x, y, z)];
    }
};

std::vector<ProjectionTable> build_projection_table(
    const VoxelGrid& grid, const std::vector<CameraParams>& cameras,
    double heatmap_downsample = 4.0);

// Camera calibration file I/O (JSON array of per-camera records).
std::vector<CameraParams> load_cameras(const std::string& path);
void save_cameras(const std::string& path, const std::vector<CameraParams>& cameras);
std::vector<CameraParams> cameras_from_json_text(const std::string& text);
std::string cameras_to_json_text(const std::vector<CameraParams>& cameras);

}  // namespace voxeltrack
