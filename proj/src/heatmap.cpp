#include "voxeltrack/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace voxeltrack {

Heatmap2D render_gaussian_heatmap(const std::vector<Joint2D>& joints, double sigma,
                                  int channels, int height, int width) {
    if (sigma <= 0) throw std::invalid_argument("render_gaussian_heatmap: sigma must be positive");
    Heatmap2D map(channels, height, width);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const int radius = int(std::ceil(4.0 * sigma));
    for (const Joint2D& j : joints) {
        if (!j.visible) continue;
        if (j.channel < 0 || j.channel >= channels)
            throw std::invalid_argument("render_gaussian_heatmap: joint channel out of range");
        const int x0 = std::max(0, int(std::floor(j.u)) - radius);
        const int x1 = std::min(width - 1, int(std::ceil(j.u)) + radius);
        const int y0 = std::max(0, int(std::floor(j.v)) - radius);
        const int y1 = std::min(height - 1, int(std::ceil(j.v)) + radius);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const double du = x - j.u;
                const double dv = y - j.v;
                const float val = float(std::exp(-(du * du + dv * dv) * inv2s2));
                float& cell = map.at(j.channel, y, x);
                cell = std::max(cell, val);
            }
    }
    return map;
}

void sample_bilinear_into(const ChannelMap2D& map, double u, double v, float* out) {
    if (u < 0.0 || v < 0.0 || u > map.width - 1 || v > map.height - 1) {
        std::fill(out, out + map.channels, 0.f);
        return;
    }
    const int x0 = std::min(int(u), map.width - 2 >= 0 ? map.width - 2 : 0);
    const int y0 = std::min(int(v), map.height - 2 >= 0 ? map.height - 2 : 0);
    const int x1 = std::min(x0 + 1, map.width - 1);
    const int y1 = std::min(y0 + 1, map.height - 1);
    const float fx = float(u - x0);
    const float fy = float(v - y0);
    const float w00 = (1 - fx) * (1 - fy), w10 = fx * (1 - fy);
    const float w01 = (1 - fx) * fy, w11 = fx * fy;
    const size_t plane = size_t(map.height) * map.width;
    const float* base = map.values.data();
    const size_t i00 = size_t(y0) * map.width + x0;
    const size_t i10 = size_t(y0) * map.width + x1;
    const size_t i01 = size_t(y1) * map.width + x0;
    const size_t i11 = size_t(y1) * map.width + x1;
    for (int c = 0; c < map.channels; ++c) {
        const float* p = base + c * plane;
        out[c] = w00 * p[i00] + w10 * p[i10] + w01 * p[i01] + w11 * p[i11];
    }
}

std::vector<float> sample_bilinear(const ChannelMap2D& map, double u, double v) {
    std::vector<float> out(map.channels);
    sample_bilinear_into(map, u, v, out.data());
    return out;
}

double loss_2d(const Heatmap2D& pred, const Heatmap2D& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("loss_2d: shape mismatch");
    double sum = 0;
    for (size_t i = 0; i < pred.values.size(); ++i) {
        const double d = double(pred.values[i]) - target.values[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

void write_vxhm(const std::string& path, const ChannelMap2D& map) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write heatmap dump: " + path);
    const char magic[4] = {'V', 'X', 'H', 'M'};
    out.write(magic, 4);
    const uint32_t dims[3] = {uint32_t(map.channels), uint32_t(map.height), uint32_t(map.width)};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(map.values.data()),
              std::streamsize(map.values.size() * sizeof(float)));
    if (!out) throw std::runtime_error("short write on heatmap dump: " + path);
}

ChannelMap2D read_vxhm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open heatmap dump: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "VXHM", 4) != 0)
        throw std::runtime_error("bad heatmap dump magic: " + path);
    uint32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) throw std::runtime_error("truncated heatmap dump header: " + path);
    ChannelMap2D map{int(dims[0]), int(dims[1]), int(dims[2])};
    in.read(reinterpret_cast<char*>(map.values.data()),
            std::streamsize(map.values.size() * sizeof(float)));
    if (!in) throw std::runtime_error("truncated heatmap dump data: " + path);
    return map;
}

}  // namespace voxeltrack
