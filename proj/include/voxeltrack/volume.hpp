#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "voxeltrack/geometry.hpp"
#include "voxeltrack/heatmap.hpp"

namespace voxeltrack {

// Dense channel-major volume over a VoxelGrid:
// values[((c * X + x) * Y + y) * Z + z].
struct DenseVolume {
    VoxelGrid grid;
    int channels = 0;
    std::vector<float> values;

    DenseVolume() = default;
    DenseVolume(const VoxelGrid& g, int c)
        : grid(g), channels(c), values(size_t(c) * g.voxel_count(), 0.f) {}

    float at(int c, int x, int y, int z) const {
        return values[size_t(c) * grid.voxel_count() + grid.flat_index(x, y, z)];
    }
    float& at(int c, int x, int y, int z) {
        return values[size_t(c) * grid.voxel_count() + grid.flat_index(x, y, z)];
    }
    bool same_shape(const DenseVolume& o) const {
        return channels == o.channels && grid.bins == o.grid.bins;
    }
};

using FeatureVolume = DenseVolume;
using JointHeatmap3D = DenseVolume;

struct VoxelCoord {
    int x = 0, y = 0, z = 0;
    bool operator==(const VoxelCoord&) const = default;
    bool operator<(const VoxelCoord& o) const {
        if (x != o.x) return x < o.x;
        if (y != o.y) return y < o.y;
        return z < o.z;
    }
};

// Sorted-COO sparse volume with a hash index for kernel-offset lookups.
// features is row-major per coordinate: features[i * channels + c].
struct SparseVolume {
    VoxelGrid grid;
    int channels = 0;
    std::vector<VoxelCoord> coords;   // unique, lexicographically sorted
    std::vector<float> features;
    std::unordered_map<std::int64_t, std::int32_t> index;  // flat voxel -> row

    std::size_t nnz() const { return coords.size(); }
    double occupancy() const {
        return grid.voxel_count() ? double(nnz()) / double(grid.voxel_count()) : 0.0;
    }
    void rebuild_index();
    const float* row(std::size_t i) const { return features.data() + i * channels; }
    float* row(std::size_t i) { return features.data() + i * channels; }
};

// Fused volume: per voxel, the per-view bilinear heatmap samples summed and
// divided by the total camera count (invisible views contribute zero).
FeatureVolume build_feature_volume(const std::vector<Heatmap2D>& heatmaps,
                                   const std::vector<ProjectionTable>& tables,
                                   const VoxelGrid& grid);

// Keep a voxel iff its channel max >= threshold; retained vectors keep full
// precision.
SparseVolume sparsify(const DenseVolume& volume, float threshold = 0.15f);
DenseVolume densify(const SparseVolume& sparse);

// C_out x C_in x k x k x k cross-correlation kernel, zero padded, same size.
struct Conv3DKernel {
    int out_channels = 0;
    int in_channels = 0;
    int size = 0;  // odd
    std::vector<float> weights;  // [co][ci][kx][ky][kz]
    std::vector<float> bias;     // [co], optional (empty = zero)

    float w(int co, int ci, int kx, int ky, int kz) const {
        return weights[(((size_t(co) * in_channels + ci) * size + kx) * size + ky) * size + kz];
    }
    float& w(int co, int ci, int kx, int ky, int kz) {
        return weights[(((size_t(co) * in_channels + ci) * size + kx) * size + ky) * size + kz];
    }
    void validate() const;
};

// Channel-diagonal kernel with the same separable Gaussian in every channel.
Conv3DKernel gaussian_kernel(int channels, int size, double sigma_voxels);

DenseVolume conv3d_dense(const DenseVolume& volume, const Conv3DKernel& kernel);

// Output support is the dilation of the input support by the kernel
// footprint; values agree with the dense path there.
SparseVolume conv3d_sparse(const SparseVolume& sparse, const Conv3DKernel& kernel);

struct SmoothParams {
    int kernel_size = 5;
    double sigma_voxels = 1.0;
};

// Fixed per-channel Gaussian smoothing of the sparse volume, renormalized so
// blob peaks stay at the input peak level, clamped to [0, 1]. Analytic
// stand-in for a learned volume-to-heatmap network.
JointHeatmap3D smooth_volume(const SparseVolume& sparse, const SmoothParams& params = {});

// Ground-truth 3D heatmap: per voxel the max over persons of
// exp(-|center - joint|^2 / (2 sigma^2)).
JointHeatmap3D gt_heatmap3d(const std::vector<Pose3D>& poses, const VoxelGrid& grid,
                            double sigma_mm = 62.5);

// Frobenius norm of the elementwise difference.
double heatmap3d_loss(const JointHeatmap3D& pred, const JointHeatmap3D& target);

}  // namespace voxeltrack
