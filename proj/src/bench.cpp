#include "voxeltrack/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>

namespace voxeltrack {

SparseVolume random_sparse_volume(const VoxelGrid& grid, int channels, double occupancy,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> value(0.2f, 1.0f);
    const std::int64_t target = std::max<std::int64_t>(
        1, std::int64_t(double(grid.voxel_count()) * occupancy));

    std::vector<VoxelCoord> coords;
    coords.reserve(size_t(target));
    std::uniform_int_distribution<int> dx(0, grid.bins[0] - 1);
    std::uniform_int_distribution<int> dy(0, grid.bins[1] - 1);
    std::uniform_int_distribution<int> dz(0, grid.bins[2] - 1);
    for (std::int64_t i = 0; i < target; ++i) coords.push_back({dx(rng), dy(rng), dz(rng)});
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());

    SparseVolume sparse;
    sparse.grid = grid;
    sparse.channels = channels;
    sparse.coords = std::move(coords);
    sparse.features.resize(sparse.coords.size() * size_t(channels));
    for (float& f : sparse.features) f = value(rng);
    sparse.rebuild_index();
    return sparse;
}

namespace {

template <typename F>
double median_ms(F&& fn, int repeats, int warmup) {
    for (int i = 0; i < warmup; ++i) fn();
    std::vector<double> times;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        times.push_back(std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

Conv3DKernel random_kernel(int channels, int size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> w(-0.5f, 0.5f);
    Conv3DKernel k;
    k.out_channels = channels;
    k.in_channels = channels;
    k.size = size;
    k.weights.resize(size_t(channels) * channels * size * size * size);
    for (float& v : k.weights) v = w(rng);
    return k;
}

}  // namespace

std::vector<BenchRow> run_conv_bench(const BenchParams& params) {
    std::vector<BenchRow> rows;
    const Conv3DKernel kernel = random_kernel(params.channels, params.kernel_size, params.seed);
    for (const auto& bins : params.grids)
        for (const double occ : params.occupancies) {
            VoxelGrid grid;
            grid.origin = Vec3::Zero();
            grid.extent = Vec3(62.5 * bins[0], 62.5 * bins[1], 62.5 * bins[2]);
            grid.bins = bins;

            const SparseVolume sparse =
                random_sparse_volume(grid, params.channels, occ, params.seed + 1);
            const DenseVolume dense = densify(sparse);

            // correctness before speed
            const SparseVolume sparse_out = conv3d_sparse(sparse, kernel);
            const DenseVolume dense_out = conv3d_dense(dense, kernel);
            double max_diff = 0;
            const std::int64_t n = grid.voxel_count();
            for (size_t i = 0; i < sparse_out.coords.size(); ++i) {
                const VoxelCoord& c = sparse_out.coords[i];
                const std::int64_t fi = grid.flat_index(c.x, c.y, c.z);
                for (int ch = 0; ch < sparse_out.channels; ++ch)
                    max_diff = std::max(
                        max_diff, double(std::abs(sparse_out.features[i * sparse_out.channels + ch] -
                                                  dense_out.values[size_t(ch) * n + fi])));
            }

            BenchRow row;
            row.grid_bins = bins;
            row.occupancy = occ;
            row.max_abs_diff = max_diff;
            row.dense_ms = median_ms([&] { conv3d_dense(dense, kernel); }, params.repeats,
                                     params.warmup);
            row.sparse_ms = median_ms([&] { conv3d_sparse(sparse, kernel); }, params.repeats,
                                      params.warmup);
            row.speedup = row.sparse_ms > 0 ? row.dense_ms / row.sparse_ms : 0;
            rows.push_back(row);
        }
    return rows;
}

std::string bench_table(const std::vector<BenchRow>& rows, char sep) {
    std::ostringstream os;
    os << "grid" << sep << "occupancy" << sep << "dense_ms" << sep << "sparse_ms" << sep
       << "speedup" << sep << "max_abs_diff\n";
    for (const BenchRow& r : rows)
        os << r.grid_bins[0] << "x" << r.grid_bins[1] << "x" << r.grid_bins[2] << sep
           << r.occupancy << sep << r.dense_ms << sep << r.sparse_ms << sep << r.speedup << sep
           << r.max_abs_diff << "\n";
    return os.str();
}

}  // namespace voxeltrack
