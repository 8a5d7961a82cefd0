#pragma once

#include <array>
#include <string>
#include <vector>

#include "voxeltrack/volume.hpp"

namespace voxeltrack {

struct BenchRow {
    std::array<int, 3> grid_bins;
    double occupancy = 0;      // requested fraction of active voxels
    double dense_ms = 0;       // median over repeats
    double sparse_ms = 0;
    double speedup = 0;        // dense / sparse
    double max_abs_diff = 0;   // sparse vs dense on the dilated support
};

struct BenchParams {
    std::vector<std::array<int, 3>> grids = {{80, 80, 32}, {120, 120, 48}, {160, 160, 64}};
    std::vector<double> occupancies = {0.005, 0.01, 0.02, 0.05};
    int channels = 1;
    int kernel_size = 3;
    int repeats = 5;
    int warmup = 1;
    std::uint64_t seed = 7;
};

std::vector<BenchRow> run_conv_bench(const BenchParams& params);

// Character-separated table mirroring the rows (header + one line per row).
std::string bench_table(const std::vector<BenchRow>& rows, char sep = ',');

// Random sparse volume with about occupancy * voxel_count active voxels.
SparseVolume random_sparse_volume(const VoxelGrid& grid, int channels, double occupancy,
                                  std::uint64_t seed);

}  // namespace voxeltrack
