#pragma once

#include <string>
#include <vector>

#include "voxeltrack/geometry.hpp"

namespace voxeltrack {

// Channel-major 2D map: values[(c * height + v) * width + u]. Used both for
// joint heatmaps (channels = J) and Re-ID embedding maps (channels = d).
struct ChannelMap2D {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> values;

    ChannelMap2D() = default;
    ChannelMap2D(int c, int h, int w) : channels(c), height(h), width(w), values(size_t(c) * h * w, 0.f) {}

    float at(int c, int y, int x) const { return values[(size_t(c) * height + y) * width + x]; }
    float& at(int c, int y, int x) { return values[(size_t(c) * height + y) * width + x]; }
    bool same_shape(const ChannelMap2D& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

using Heatmap2D = ChannelMap2D;
using ReidMap2D = ChannelMap2D;

struct Joint2D {
    double u = 0, v = 0;  // heatmap-resolution pixels
    int channel = 0;
    bool visible = true;
};

// Per-joint Gaussian blobs, combined across persons with per-pixel max.
// Peak value is 1 at each visible joint location.
Heatmap2D render_gaussian_heatmap(const std::vector<Joint2D>& joints, double sigma,
                                  int channels, int height, int width);

// Bilinear sample of all channels at fractional (u, v). Coordinates outside
// [0, W-1] x [0, H-1] give the zero vector.
std::vector<float> sample_bilinear(const ChannelMap2D& map, double u, double v);
void sample_bilinear_into(const ChannelMap2D& map, double u, double v, float* out);

// Frobenius norm of the elementwise difference.
double loss_2d(const Heatmap2D& pred, const Heatmap2D& target);

// "VXHM" binary dump: 16-byte header {magic, u32 channels, u32 height,
// u32 width}, then little-endian float32 values.
void write_vxhm(const std::string& path, const ChannelMap2D& map);
ChannelMap2D read_vxhm(const std::string& path);

}  // namespace voxeltrack
