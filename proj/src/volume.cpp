#include "voxeltrack/volume.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace voxeltrack {

void SparseVolume::rebuild_index() {
    index.clear();
    index.reserve(coords.size() * 2);
    for (std::size_t i = 0; i < coords.size(); ++i)
        index.emplace(grid.flat_index(coords[i].x, coords[i].y, coords[i].z), std::int32_t(i));
}

FeatureVolume build_feature_volume(const std::vector<Heatmap2D>& heatmaps,
                                   const std::vector<ProjectionTable>& tables,
                                   const VoxelGrid& grid) {
    if (heatmaps.empty()) throw std::invalid_argument("build_feature_volume: no views");
    if (heatmaps.size() != tables.size())
        throw std::invalid_argument("build_feature_volume: view count mismatch");
    const int channels = heatmaps[0].channels;
    for (size_t v = 0; v < heatmaps.size(); ++v) {
        if (heatmaps[v].channels != channels)
            throw std::invalid_argument("build_feature_volume: channel count mismatch");
        if (tables[v].heatmap_width != heatmaps[v].width ||
            tables[v].heatmap_height != heatmaps[v].height)
            throw std::invalid_argument("build_feature_volume: table does not match heatmap shape");
    }

    // Per-view max-over-channels maps; voxels whose bilinear footprint is all
    // zero in a view are skipped for that view.
    std::vector<std::vector<float>> maxmaps(heatmaps.size());
    for (size_t v = 0; v < heatmaps.size(); ++v) {
        const Heatmap2D& hm = heatmaps[v];
        maxmaps[v].assign(size_t(hm.height) * hm.width, 0.f);
        const size_t plane = size_t(hm.height) * hm.width;
        for (int c = 0; c < hm.channels; ++c) {
            const float* p = hm.values.data() + c * plane;
            for (size_t i = 0; i < plane; ++i)
                maxmaps[v][i] = std::max(maxmaps[v][i], p[i]);
        }
    }

    FeatureVolume volume(grid, channels);
    const float inv_views = 1.0f / float(heatmaps.size());

    auto fill_rows = [&](int x0, int x1) {
        std::vector<float> acc(channels), sample(channels);
        for (int x = x0; x < x1; ++x)
            for (int y = 0; y < grid.bins[1]; ++y)
                for (int z = 0; z < grid.bins[2]; ++z) {
                    std::fill(acc.begin(), acc.end(), 0.f);
                    bool any = false;
                    const std::int64_t fi = grid.flat_index(x, y, z);
                    for (size_t v = 0; v < heatmaps.size(); ++v) {
                        const ProjectionTable::Entry& e = tables[v].entries[fi];
                        if (!e.visible) continue;
                        const Heatmap2D& hm = heatmaps[v];
                        const int px = std::min(int(e.u), hm.width - 1);
                        const int py = std::min(int(e.v), hm.height - 1);
                        const int px1 = std::min(px + 1, hm.width - 1);
                        const int py1 = std::min(py + 1, hm.height - 1);
                        const std::vector<float>& mm = maxmaps[v];
                        if (mm[size_t(py) * hm.width + px] == 0.f &&
                            mm[size_t(py) * hm.width + px1] == 0.f &&
                            mm[size_t(py1) * hm.width + px] == 0.f &&
                            mm[size_t(py1) * hm.width + px1] == 0.f)
                            continue;
                        sample_bilinear_into(hm, e.u, e.v, sample.data());
                        for (int c = 0; c < channels; ++c) acc[c] += sample[c];
                        any = true;
                    }
                    if (!any) continue;
                    for (int c = 0; c < channels; ++c)
                        volume.values[size_t(c) * grid.voxel_count() + fi] = acc[c] * inv_views;
                }
    };

    const int n_chunks = 8;
    std::vector<std::future<void>> futures;
    for (int c = 0; c < n_chunks; ++c) {
        const int x0 = grid.bins[0] * c / n_chunks;
        const int x1 = grid.bins[0] * (c + 1) / n_chunks;
        if (x0 < x1) futures.push_back(std::async(std::launch::async, fill_rows, x0, x1));
    }
    for (auto& f : futures) f.get();
    return volume;
}

SparseVolume sparsify(const DenseVolume& volume, float threshold) {
    if (threshold < 0) throw std::invalid_argument("sparsify: threshold must be >= 0");
    SparseVolume sparse;
    sparse.grid = volume.grid;
    sparse.channels = volume.channels;
    const std::int64_t n = volume.grid.voxel_count();
    for (int x = 0; x < volume.grid.bins[0]; ++x)
        for (int y = 0; y < volume.grid.bins[1]; ++y)
            for (int z = 0; z < volume.grid.bins[2]; ++z) {
                const std::int64_t fi = volume.grid.flat_index(x, y, z);
                float peak = 0.f;
                for (int c = 0; c < volume.channels; ++c)
                    peak = std::max(peak, volume.values[size_t(c) * n + fi]);
                const bool keep = threshold == 0.f ? peak > 0.f : peak >= threshold;
                if (!keep) continue;
                sparse.coords.push_back({x, y, z});
                for (int c = 0; c < volume.channels; ++c)
                    sparse.features.push_back(volume.values[size_t(c) * n + fi]);
            }
    sparse.rebuild_index();
    return sparse;
}

DenseVolume densify(const SparseVolume& sparse) {
    DenseVolume volume(sparse.grid, sparse.channels);
    const std::int64_t n = sparse.grid.voxel_count();
    for (std::size_t i = 0; i < sparse.coords.size(); ++i) {
        const VoxelCoord& c = sparse.coords[i];
        const std::int64_t fi = sparse.grid.flat_index(c.x, c.y, c.z);
        for (int ch = 0; ch < sparse.channels; ++ch)
            volume.values[size_t(ch) * n + fi] = sparse.features[i * sparse.channels + ch];
    }
    return volume;
}

void Conv3DKernel::validate() const {
    if (size < 1 || size % 2 == 0)
        throw std::invalid_argument("conv3d: kernel size must be odd and positive");
    if (out_channels < 1 || in_channels < 1)
        throw std::invalid_argument("conv3d: channel counts must be positive");
    if (weights.size() != size_t(out_channels) * in_channels * size * size * size)
        throw std::invalid_argument("conv3d: weight array size mismatch");
    if (!bias.empty() && bias.size() != size_t(out_channels))
        throw std::invalid_argument("conv3d: bias size mismatch");
}

Conv3DKernel gaussian_kernel(int channels, int size, double sigma_voxels) {
    Conv3DKernel k;
    k.out_channels = channels;
    k.in_channels = channels;
    k.size = size;
    k.weights.assign(size_t(channels) * channels * size * size * size, 0.f);
    const int r = size / 2;
    for (int c = 0; c < channels; ++c)
        for (int kx = 0; kx < size; ++kx)
            for (int ky = 0; ky < size; ++ky)
                for (int kz = 0; kz < size; ++kz) {
                    const double d2 = double((kx - r) * (kx - r) + (ky - r) * (ky - r) +
                                             (kz - r) * (kz - r));
                    k.w(c, c, kx, ky, kz) =
                        float(std::exp(-d2 / (2.0 * sigma_voxels * sigma_voxels)));
                }
    return k;
}

DenseVolume conv3d_dense(const DenseVolume& volume, const Conv3DKernel& kernel) {
    kernel.validate();
    if (kernel.in_channels != volume.channels)
        throw std::invalid_argument("conv3d_dense: input channel mismatch");
    DenseVolume out(volume.grid, kernel.out_channels);
    const int X = volume.grid.bins[0], Y = volume.grid.bins[1], Z = volume.grid.bins[2];
    const int r = kernel.size / 2;
    const std::int64_t n = volume.grid.voxel_count();

    auto fill_rows = [&](int x0, int x1) {
        for (int x = x0; x < x1; ++x)
            for (int y = 0; y < Y; ++y)
                for (int z = 0; z < Z; ++z)
                    for (int co = 0; co < kernel.out_channels; ++co) {
                        // x-major tap order, fixed regardless of threading
                        float acc = kernel.bias.empty() ? 0.f : kernel.bias[co];
                        for (int kx = 0; kx < kernel.size; ++kx) {
                            const int sx = x + kx - r;
                            if (sx < 0 || sx >= X) continue;
                            for (int ky = 0; ky < kernel.size; ++ky) {
                                const int sy = y + ky - r;
                                if (sy < 0 || sy >= Y) continue;
                                for (int kz = 0; kz < kernel.size; ++kz) {
                                    const int sz = z + kz - r;
                                    if (sz < 0 || sz >= Z) continue;
                                    const std::int64_t fi = volume.grid.flat_index(sx, sy, sz);
                                    for (int ci = 0; ci < kernel.in_channels; ++ci)
                                        acc += kernel.w(co, ci, kx, ky, kz) *
                                               volume.values[size_t(ci) * n + fi];
                                }
                            }
                        }
                        out.values[size_t(co) * n + out.grid.flat_index(x, y, z)] = acc;
                    }
    };

    const int n_chunks = 8;
    std::vector<std::future<void>> futures;
    for (int c = 0; c < n_chunks; ++c) {
        const int x0 = X * c / n_chunks;
        const int x1 = X * (c + 1) / n_chunks;
        if (x0 < x1) futures.push_back(std::async(std::launch::async, fill_rows, x0, x1));
    }
    for (auto& f : futures) f.get();
    return out;
}

SparseVolume conv3d_sparse(const SparseVolume& sparse, const Conv3DKernel& kernel) {
    kernel.validate();
    if (kernel.in_channels != sparse.channels)
        throw std::invalid_argument("conv3d_sparse: input channel mismatch");
    const VoxelGrid& grid = sparse.grid;
    const int r = kernel.size / 2;

    // Output support: dilation of the input support by the kernel footprint.
    // A dense mask scanned in flat order yields the coords already sorted and
    // deduplicated, cheaper than sort+unique on the expanded coordinate list.
    std::vector<std::uint8_t> mask(size_t(grid.voxel_count()), 0);
    for (const VoxelCoord& c : sparse.coords) {
        const int x0 = std::max(c.x - r, 0), x1 = std::min(c.x + r, grid.bins[0] - 1);
        const int y0 = std::max(c.y - r, 0), y1 = std::min(c.y + r, grid.bins[1] - 1);
        const int z0 = std::max(c.z - r, 0), z1 = std::min(c.z + r, grid.bins[2] - 1);
        for (int x = x0; x <= x1; ++x)
            for (int y = y0; y <= y1; ++y)
                std::fill(mask.begin() + grid.flat_index(x, y, z0),
                          mask.begin() + grid.flat_index(x, y, z1) + 1, std::uint8_t(1));
    }
    std::vector<VoxelCoord> out_coords;
    out_coords.reserve(sparse.coords.size() * size_t(kernel.size) * size_t(kernel.size));
    for (int x = 0; x < grid.bins[0]; ++x)
        for (int y = 0; y < grid.bins[1]; ++y) {
            const std::int64_t base = grid.flat_index(x, y, 0);
            for (int z = 0; z < grid.bins[2]; ++z)
                if (mask[size_t(base + z)]) out_coords.push_back({x, y, z});
        }

    SparseVolume out;
    out.grid = grid;
    out.channels = kernel.out_channels;
    out.coords = std::move(out_coords);
    out.features.assign(out.coords.size() * size_t(kernel.out_channels), 0.f);

    // Scatter pass: walk the input nonzeros once per output channel and
    // accumulate weighted taps into a dense buffer, then gather at the
    // dilated support. Avoids a hash lookup per output voxel per tap, which
    // dominates at low occupancy on large grids.
    std::vector<double> acc(size_t(grid.voxel_count()));
    for (int co = 0; co < kernel.out_channels; ++co) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t i = 0; i < sparse.coords.size(); ++i) {
            const VoxelCoord& c = sparse.coords[i];
            const float* src = sparse.row(i);
            const int x0 = std::max(c.x - r, 0), x1 = std::min(c.x + r, grid.bins[0] - 1);
            const int y0 = std::max(c.y - r, 0), y1 = std::min(c.y + r, grid.bins[1] - 1);
            const int z0 = std::max(c.z - r, 0), z1 = std::min(c.z + r, grid.bins[2] - 1);
            for (int ci = 0; ci < kernel.in_channels; ++ci) {
                const double v = src[ci];
                if (v == 0.0) continue;
                // out(o) = sum_k w(k) * in(o + k - r), so the input at c feeds
                // output o through tap k = c - o + r
                for (int ox = x0; ox <= x1; ++ox) {
                    const int kx = c.x - ox + r;
                    for (int oy = y0; oy <= y1; ++oy) {
                        const int ky = c.y - oy + r;
                        const float* w =
                            &kernel.weights[(((size_t(co) * kernel.in_channels + ci) *
                                                  kernel.size + kx) * kernel.size + ky) *
                                            kernel.size];
                        double* dst = &acc[size_t(grid.flat_index(ox, oy, z0))];
                        const int kz0 = c.z - z0 + r;
                        for (int j = 0; j <= z1 - z0; ++j) dst[j] += w[kz0 - j] * v;
                    }
                }
            }
        }
        const double bias = kernel.bias.empty() ? 0.0 : kernel.bias[size_t(co)];
        for (std::size_t i = 0; i < out.coords.size(); ++i) {
            const VoxelCoord& c = out.coords[i];
            out.row(i)[co] = float(bias + acc[size_t(grid.flat_index(c.x, c.y, c.z))]);
        }
    }
    out.rebuild_index();
    return out;
}

JointHeatmap3D smooth_volume(const SparseVolume& sparse, const SmoothParams& params) {
    JointHeatmap3D out(sparse.grid, sparse.channels);
    if (sparse.coords.empty()) return out;
    const int size = params.kernel_size;
    const int r = size / 2;
    // Normalized Gaussian taps (sum 1): smoothing preserves the fused
    // agreement level, so broad single-view ridges stay well below the
    // confidence of true multi-view intersections.
    std::vector<float> taps(size_t(size) * size * size);
    double tap_sum = 0;
    for (int kx = 0; kx < size; ++kx)
        for (int ky = 0; ky < size; ++ky)
            for (int kz = 0; kz < size; ++kz) {
                const double d2 = double((kx - r) * (kx - r) + (ky - r) * (ky - r) +
                                         (kz - r) * (kz - r));
                const double w = std::exp(-d2 / (2.0 * params.sigma_voxels * params.sigma_voxels));
                taps[(size_t(kx) * size + ky) * size + kz] = float(w);
                tap_sum += w;
            }
    for (float& t : taps) t = float(t / tap_sum);

    const VoxelGrid& grid = sparse.grid;
    const std::int64_t n = grid.voxel_count();
    for (std::size_t i = 0; i < sparse.coords.size(); ++i) {
        const VoxelCoord& c = sparse.coords[i];
        const float* src = sparse.row(i);
        for (int ch = 0; ch < sparse.channels; ++ch) {
            const float val = src[ch];
            if (val <= 0.f) continue;
            float* plane = out.values.data() + size_t(ch) * n;
            for (int kx = 0; kx < size; ++kx) {
                const int x = c.x + kx - r;
                if (x < 0 || x >= grid.bins[0]) continue;
                for (int ky = 0; ky < size; ++ky) {
                    const int y = c.y + ky - r;
                    if (y < 0 || y >= grid.bins[1]) continue;
                    for (int kz = 0; kz < size; ++kz) {
                        const int z = c.z + kz - r;
                        if (z < 0 || z >= grid.bins[2]) continue;
                        plane[grid.flat_index(x, y, z)] +=
                            val * taps[(size_t(kx) * size + ky) * size + kz];
                    }
                }
            }
        }
    }
    // Boundary renormalization: near the grid faces part of the kernel falls
    // outside the volume, so divide by the in-grid tap mass (separable per
    // axis) to keep boundary values at the level of the fused input.
    std::vector<double> tap1d(size);
    double sum1d = 0;
    for (int k = 0; k < size; ++k) {
        tap1d[k] = std::exp(-double((k - r) * (k - r)) /
                            (2.0 * params.sigma_voxels * params.sigma_voxels));
        sum1d += tap1d[k];
    }
    auto axis_norm = [&](int i, int bins) {
        double s = 0;
        for (int k = 0; k < size; ++k) {
            const int p = i + k - r;
            if (p >= 0 && p < bins) s += tap1d[k];
        }
        return float(s / sum1d);
    };
    std::vector<float> nx(grid.bins[0]), ny(grid.bins[1]), nz(grid.bins[2]);
    for (int i = 0; i < grid.bins[0]; ++i) nx[i] = axis_norm(i, grid.bins[0]);
    for (int i = 0; i < grid.bins[1]; ++i) ny[i] = axis_norm(i, grid.bins[1]);
    for (int i = 0; i < grid.bins[2]; ++i) nz[i] = axis_norm(i, grid.bins[2]);
    for (int ch = 0; ch < sparse.channels; ++ch) {
        float* plane = out.values.data() + size_t(ch) * n;
        for (int x = 0; x < grid.bins[0]; ++x)
            for (int y = 0; y < grid.bins[1]; ++y) {
                const float nxy = nx[x] * ny[y];
                float* row_ptr = plane + grid.flat_index(x, y, 0);
                if (nxy == 1.f) {
                    // Interior column: only the z-boundary bands need fixing
                    // (a normalized blur of [0,1] inputs stays in [0,1]).
                    for (int z = 0; z < std::min(r, grid.bins[2]); ++z)
                        row_ptr[z] = std::clamp(row_ptr[z] / nz[z], 0.f, 1.f);
                    for (int z = std::max(0, grid.bins[2] - r); z < grid.bins[2]; ++z)
                        row_ptr[z] = std::clamp(row_ptr[z] / nz[z], 0.f, 1.f);
                } else {
                    for (int z = 0; z < grid.bins[2]; ++z)
                        row_ptr[z] = std::clamp(row_ptr[z] / (nxy * nz[z]), 0.f, 1.f);
                }
            }
    }
    return out;
}

JointHeatmap3D gt_heatmap3d(const std::vector<Pose3D>& poses, const VoxelGrid& grid,
                            double sigma_mm) {
    if (sigma_mm <= 0) throw std::invalid_argument("gt_heatmap3d: sigma must be positive");
    JointHeatmap3D out(grid, kNumJoints);
    const Vec3 vs = grid.voxel_size();
    const double inv2s2 = 1.0 / (2.0 * sigma_mm * sigma_mm);
    const std::int64_t n = grid.voxel_count();
    const int rx = int(std::ceil(4.0 * sigma_mm / vs.x()));
    const int ry = int(std::ceil(4.0 * sigma_mm / vs.y()));
    const int rz = int(std::ceil(4.0 * sigma_mm / vs.z()));
    for (const Pose3D& pose : poses)
        for (int j = 0; j < kNumJoints; ++j) {
            const Vec3& joint = pose.joints[j];
            const int cx = int(std::floor((joint.x() - grid.origin.x()) / vs.x()));
            const int cy = int(std::floor((joint.y() - grid.origin.y()) / vs.y()));
            const int cz = int(std::floor((joint.z() - grid.origin.z()) / vs.z()));
            float* plane = out.values.data() + size_t(j) * n;
            for (int x = std::max(0, cx - rx); x <= std::min(grid.bins[0] - 1, cx + rx); ++x)
                for (int y = std::max(0, cy - ry); y <= std::min(grid.bins[1] - 1, cy + ry); ++y)
                    for (int z = std::max(0, cz - rz); z <= std::min(grid.bins[2] - 1, cz + rz); ++z) {
                        const double d2 = (voxel_center(grid, x, y, z) - joint).squaredNorm();
                        const float score = float(std::exp(-d2 * inv2s2));
                        float& cell = plane[grid.flat_index(x, y, z)];
                        cell = std::max(cell, score);
                    }
        }
    return out;
}

double heatmap3d_loss(const JointHeatmap3D& pred, const JointHeatmap3D& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("heatmap3d_loss: shape mismatch");
    double sum = 0;
    for (size_t i = 0; i < pred.values.size(); ++i) {
        const double d = double(pred.values[i]) - target.values[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace voxeltrack
