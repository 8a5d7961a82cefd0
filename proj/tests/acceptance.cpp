// Acceptance gate: eight end-to-end criteria, one PASS/FAIL line each.
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "voxeltrack/bench.hpp"
#include "voxeltrack/metrics.hpp"
#include "voxeltrack/pipeline.hpp"

using namespace voxeltrack;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void criterion(int n, bool pass, const std::string& detail) {
    std::cout << "[criterion " << n << "] " << (pass ? "PASS" : "FAIL") << " - " << detail
              << std::endl;
    CHECK_MESSAGE(pass, "criterion ", n, ": ", detail);
}

struct EvalSummary {
    double mpjpe = 0;
    int idsw = 0;
    double idf1 = 0;
    double mota = 0;
    double secs = 0;
};

EvalSummary run_and_eval(const RunConfig& config, const Simulator& sim) {
    const auto t0 = Clock::now();
    const TrackRunResult r = run_tracking(config, sim);
    EvalSummary s;
    s.secs = seconds_since(t0);
    const auto frames = build_eval_frames(sim.frames(), r.records);
    const MetricsReport rep = evaluate(frames, config.eval.ap_k_mm, config.eval.mot_threshold_mm,
                                       config.eval.pcp_threshold);
    s.mpjpe = rep.ap.mpjpe_mm;
    s.idsw = rep.mot.id_switches;
    s.idf1 = rep.mot.idf1;
    s.mota = rep.mot.mota;
    return s;
}

VoxelGrid make_grid(int x, int y, int z, double voxel_mm = 62.5) {
    VoxelGrid g;
    g.origin = Vec3::Zero();
    g.extent = Vec3(x * voxel_mm, y * voxel_mm, z * voxel_mm);
    g.bins = {x, y, z};
    return g;
}

Pose3D pose_at(const Vec3& pelvis) {
    Pose3D p;
    for (int j = 0; j < kNumJoints; ++j) p.joints[j] = pelvis + Vec3(0, 0, 40.0 * j);
    return p;
}

EvalPose eval_pose(int id, const Vec3& pelvis, float confidence = 0.9f) {
    EvalPose p;
    p.id = id;
    p.pose = pose_at(pelvis);
    p.confidence = confidence;
    return p;
}

// Exhaustive per-joint identity matching: the IDF1 reference for small casts.
double brute_force_idf1(const std::vector<EvalFrame>& frames, int joint, double threshold_mm) {
    std::set<int> gt_ids, pred_ids;
    std::map<std::pair<int, int>, long> overlap;
    long gt_total = 0, pred_total = 0;
    for (const EvalFrame& f : frames) {
        gt_total += long(f.gt.size());
        pred_total += long(f.pred.size());
        for (const EvalPose& g : f.gt) gt_ids.insert(g.id);
        for (const EvalPose& p : f.pred) pred_ids.insert(p.id);
        for (const EvalPose& g : f.gt)
            for (const EvalPose& p : f.pred)
                if ((g.pose.joints[joint] - p.pose.joints[joint]).norm() <= threshold_mm)
                    ++overlap[{g.id, p.id}];
    }
    std::vector<int> gs(gt_ids.begin(), gt_ids.end()), ps(pred_ids.begin(), pred_ids.end());
    const size_t n = std::max(gs.size(), ps.size());
    std::vector<int> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = int(i);
    long best = 0;
    do {
        long total = 0;
        for (size_t i = 0; i < gs.size(); ++i) {
            if (size_t(perm[i]) >= ps.size()) continue;
            const auto it = overlap.find({gs[i], ps[size_t(perm[i])]});
            if (it != overlap.end()) total += it->second;
        }
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return (gt_total + pred_total) ? 2.0 * double(best) / double(gt_total + pred_total) : 0.0;
}

std::filesystem::path build_dir() {
    return std::filesystem::read_symlink("/proc/self/exe").parent_path().parent_path();
}

std::filesystem::path cli_path() {
    if (const char* env = std::getenv("VOXELTRACK_CLI")) return env;
    return build_dir() / "voxeltrack";
}

int run_cli(const std::string& args) {
    const std::string cmd = cli_path().string() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<missing " + path.string() + ">";
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

}  // namespace

TEST_CASE("criterion 1: geometric fidelity on a noiseless two-person scene") {
    RunConfig config;  // 160x160x64 grid, 5 views
    config.scenario.seed = 1;
    config.scenario.n_persons = 2;
    config.scenario.duration_frames = 50;
    const Simulator sim(config.scenario);
    const EvalSummary s = run_and_eval(config, sim);
    std::ostringstream d;
    d << "MPJPE " << s.mpjpe << " mm (< 31.25), 50 frames in " << s.secs << " s (< 60)";
    criterion(1, s.mpjpe < 31.25 && s.secs < 60.0, d.str());
}

TEST_CASE("criterion 2: soft-argmax recovers off-lattice blobs within 5 mm") {
    const VoxelGrid g = make_grid(48, 48, 32);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> off(-31.0, 31.0), base(1200, 1500);
    double worst = 0;
    int trials_ok = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        JointHeatmap3D hm(g, kNumJoints);
        const Vec3 target(base(rng) + off(rng), base(rng) + off(rng), 900 + off(rng));
        const double sigma = 62.5;  // one voxel, the width the pipeline itself renders
        // closed-form Gaussian, peak 1 at the off-lattice target
        for (int x = 0; x < g.bins[0]; ++x)
            for (int y = 0; y < g.bins[1]; ++y)
                for (int z = 0; z < g.bins[2]; ++z) {
                    const double d2 = (voxel_center(g, x, y, z) - target).squaredNorm();
                    hm.at(kPelvisJoint, x, y, z) = float(std::exp(-d2 / (2 * sigma * sigma)));
                }
        const auto peaks = detect_roots(hm, {});
        if (peaks.empty()) continue;
        ++trials_ok;
        const CropVolume crop = extract_crop(hm, peaks[0].voxel, {});
        const Vec3 out = soft_argmax(crop, kPelvisJoint, g);
        worst = std::max(worst, (out - target).norm());
    }
    std::ostringstream d;
    d << "worst error " << worst << " mm over " << trials_ok << "/1000 placements (< 5 mm)";
    criterion(2, trials_ok == 1000 && worst < 5.0, d.str());
}

TEST_CASE("criterion 3: sparse convolution equals dense and wins where it should") {
    // equality on 100 randomized small volumes
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> dim(4, 32), ch(1, 3), ks(0, 1);
    // activations are nonnegative like the fused volumes; weights signed
    std::uniform_real_distribution<float> val(0.05f, 1.f), wgt(-1.f, 1.f);
    double max_diff = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const VoxelGrid g = make_grid(dim(rng), dim(rng), dim(rng));
        const int channels = ch(rng);
        DenseVolume dense(g, channels);
        std::uniform_real_distribution<double> occ(0.02, 0.3);
        const double fill = occ(rng);
        std::bernoulli_distribution active(fill);
        for (float& v : dense.values) v = active(rng) ? val(rng) : 0.f;
        const SparseVolume sparse = sparsify(dense, 0.f);  // keeps all nonzeros

        Conv3DKernel k;
        k.out_channels = channels;
        k.in_channels = channels;
        k.size = ks(rng) ? 5 : 3;
        k.weights.resize(size_t(channels) * channels * k.size * k.size * k.size);
        for (float& w : k.weights) w = wgt(rng);
        k.bias.assign(size_t(channels), 0.f);

        const DenseVolume ref = conv3d_dense(dense, k);
        const SparseVolume out = conv3d_sparse(sparse, k);
        const std::int64_t n = g.voxel_count();
        for (size_t i = 0; i < out.coords.size(); ++i) {
            const VoxelCoord& c = out.coords[i];
            const std::int64_t fi = g.flat_index(c.x, c.y, c.z);
            for (int cc = 0; cc < channels; ++cc)
                max_diff = std::max(max_diff,
                                    double(std::abs(out.features[i * size_t(channels) + cc] -
                                                    ref.values[size_t(cc) * n + fi])));
        }
    }

    // timing: sparse must beat dense on the large grid at low occupancy
    BenchParams big;
    big.grids = {{160, 160, 64}};
    big.occupancies = {0.005, 0.01};
    const auto big_rows = run_conv_bench(big);
    bool big_ok = true;
    double bench_diff = 0;
    for (const BenchRow& r : big_rows) {
        big_ok = big_ok && r.sparse_ms < r.dense_ms;
        bench_diff = std::max(bench_diff, r.max_abs_diff);
    }

    // tiny dense grid at 50% occupancy: reported, no speedup demanded
    BenchParams tiny;
    tiny.grids = {{16, 16, 16}};
    tiny.occupancies = {0.5};
    const auto tiny_rows = run_conv_bench(tiny);

    std::ostringstream d;
    d << "max |sparse-dense| " << std::max(max_diff, bench_diff)
      << " (< 1e-5); 160x160x64 speedups";
    for (const BenchRow& r : big_rows) d << " " << r.speedup << "x@" << r.occupancy * 100 << "%";
    d << " (> 1x); 16^3@50% " << tiny_rows[0].speedup << "x (informational)";
    criterion(3, max_diff < 1e-5 && bench_diff < 1e-5 && big_ok, d.str());
}

TEST_CASE("criterion 4: occlusion-mask ablation on a staged crossing scene") {
    RunConfig config;
    config.scenario.seed = 9;
    config.scenario.n_persons = 2;
    config.scenario.duration_frames = 160;
    config.scenario.speed_mm_s = 2000;
    config.scenario.reid_spot_radius_px = 12;
    // X-shaped crossing paths; the first person's diagonal is shifted so the
    // closest approach is ~150 mm rather than a head-on collision
    const double h = 150.0 / std::sqrt(2.0);
    config.scenario.scripted_paths = {
        {{2800 - h, 2800 + h}, {7200 - h, 7200 + h}},
        {{7200, 2800}, {2800, 7200}},
    };
    config.grid_bins = {120, 120, 48};
    config.decode.nms_radius_mm = 250;
    config.tracker.gate_mm = 1200;
    config.eval.mot_threshold_mm = 1000;

    const Simulator sim(config.scenario);

    RunConfig poses_only = config;
    poses_only.tracker.use_appearance = false;
    RunConfig reid_unmasked = config;
    reid_unmasked.use_occlusion_mask = false;

    const EvalSummary a = run_and_eval(poses_only, sim);
    const EvalSummary b = run_and_eval(reid_unmasked, sim);
    const EvalSummary c = run_and_eval(config, sim);

    const bool ordering = a.idsw >= b.idsw && b.idsw >= c.idsw;
    const bool endpoint = c.idsw == 0 && a.idsw > 0;
    const bool idf1_best = c.idf1 > a.idf1 && c.idf1 > b.idf1;
    std::ostringstream d;
    d << "IDSW poses-only/reid/reid+mask " << a.idsw << "/" << b.idsw << "/" << c.idsw
      << " (ordering, masked = 0); IDF1 " << a.idf1 << "/" << b.idf1 << "/" << c.idf1
      << " (masked highest)";
    criterion(4, ordering && endpoint && idf1_best, d.str());
}

TEST_CASE("criterion 5: more views tighten MPJPE while tracking stays clean") {
    std::vector<double> mpjpe;
    std::vector<int> idsw;
    for (int views : {3, 4, 5}) {
        RunConfig config;
        config.scenario.seed = 1;
        config.scenario.n_persons = 2;
        config.scenario.duration_frames = 50;
        config.scenario.camera_count = views;
        config.scenario.jitter_sigma_px = 1.0;
        // parallel lanes 3 m apart: the trend isolates view count, not identity
        config.scenario.scripted_paths = {
            {{2000, 3500}, {8000, 3500}},
            {{8000, 6500}, {2000, 6500}},
        };
        config.grid_bins = {120, 120, 48};
        const Simulator sim(config.scenario);
        const EvalSummary s = run_and_eval(config, sim);
        mpjpe.push_back(s.mpjpe);
        idsw.push_back(s.idsw);
    }
    const bool trend = mpjpe[0] > mpjpe[1] && mpjpe[1] > mpjpe[2];
    const bool clean = idsw[0] == 0 && idsw[1] == 0 && idsw[2] == 0;
    std::ostringstream d;
    d << "MPJPE 3/4/5 views " << mpjpe[0] << "/" << mpjpe[1] << "/" << mpjpe[2]
      << " mm (strictly decreasing); IDSW " << idsw[0] << "/" << idsw[1] << "/" << idsw[2]
      << " (all 0)";
    criterion(5, trend && clean, d.str());
}

TEST_CASE("criterion 6: metrics match brute-force references exactly") {
    bool ok = true;
    std::ostringstream d;

    // perfect two-person sequence
    std::vector<EvalFrame> perfect(3);
    for (int f = 0; f < 3; ++f) {
        perfect[size_t(f)].frame = f;
        perfect[size_t(f)].gt = {eval_pose(0, Vec3(1000, 1000, 0)),
                                 eval_pose(1, Vec3(5000, 5000, 0))};
        perfect[size_t(f)].pred = perfect[size_t(f)].gt;
    }
    const MetricsReport rp = evaluate(perfect, {25, 100}, 150, 0.5);
    // counts and per-frame quantities exact; joint averages up to summation order
    ok = ok && std::abs(rp.mot.mota - 1.0) < 1e-12 && rp.mot.id_switches == 0 &&
         std::abs(rp.mot.idf1 - 1.0) < 1e-12 && rp.pcp.average == 1.0 &&
         rp.ap.ap.at(25) == 1.0 && rp.ap.mpjpe_mm == 0.0;

    // identity swap halfway: one swap event counted once per joint
    std::vector<EvalFrame> swap(10);
    for (int f = 0; f < 10; ++f) {
        swap[size_t(f)].frame = f;
        swap[size_t(f)].gt = {eval_pose(0, Vec3(1000, 1000, 0)), eval_pose(1, Vec3(5000, 5000, 0))};
        const int a = f < 5 ? 10 : 11, b = f < 5 ? 11 : 10;
        swap[size_t(f)].pred = {eval_pose(a, Vec3(1000, 1000, 0)),
                                eval_pose(b, Vec3(5000, 5000, 0))};
    }
    const MetricsReport rs = evaluate(swap, {25}, 150, 0.5);
    const int expected_idsw = 2 * kNumJoints;  // both tracks switch, per joint
    const double expected_mota = 1.0 - double(expected_idsw) / (2.0 * 10.0 * kNumJoints);
    // averaged quantities: identical up to the float summation over joints
    ok = ok && rs.mot.id_switches == expected_idsw &&
         std::abs(rs.mot.mota - expected_mota) < 1e-12 && std::abs(rs.mot.idf1 - 0.5) < 1e-12;

    // randomized small casts against the exhaustive IDF1 reference
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> pos(500, 6000);
    std::bernoulli_distribution miss(0.2), relabel(0.15);
    double worst_gap = 0;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<EvalFrame> frames(8);
        std::array<int, 3> labels = {20, 21, 22};
        for (int f = 0; f < 8; ++f) {
            frames[size_t(f)].frame = f;
            for (int p = 0; p < 3; ++p) {
                const Vec3 at(pos(rng), pos(rng), 0);
                frames[size_t(f)].gt.push_back(eval_pose(p, at));
                if (relabel(rng)) labels[size_t(p)] = 23 + p + f * 3;
                if (!miss(rng))
                    frames[size_t(f)].pred.push_back(
                        eval_pose(labels[size_t(p)], at + Vec3(30, -20, 10)));
            }
        }
        const MotResult mr = mot_per_joint(frames, 150);
        for (int j = 0; j < kNumJoints; ++j)
            worst_gap = std::max(worst_gap, std::abs(mr.idf1_per_joint[size_t(j)] -
                                                     brute_force_idf1(frames, j, 150)));
    }
    ok = ok && worst_gap < 1e-12;

    d << "perfect & swap sequences exact; IDF1 vs exhaustive reference gap " << worst_gap
      << " over 5 random casts";
    criterion(6, ok, d.str());
}

TEST_CASE("criterion 7: subcommands are byte-identical across repeated runs") {
    const auto base = std::filesystem::temp_directory_path() /
                      ("voxeltrack_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(base);
    RunConfig config;
    config.scenario.seed = 5;
    config.scenario.n_persons = 2;
    config.scenario.duration_frames = 6;
    config.scenario.camera_count = 4;
    config.scenario.jitter_sigma_px = 0.5;  // exercise the noise paths too
    config.grid_bins = {80, 80, 32};
    const auto cfg = base / "config.json";
    std::ofstream(cfg) << run_config_to_json_text(config);

    bool ok = true;
    std::string first_diff;
    auto compare = [&](const std::filesystem::path& a, const std::filesystem::path& b,
                       const char* name) {
        if (slurp(a / name) != slurp(b / name)) {
            ok = false;
            if (first_diff.empty()) first_diff = name;
        }
    };

    for (const char* round : {"a", "b"}) {
        const auto dir = base / round;
        ok = ok && run_cli("simulate --config " + cfg.string() + " --out " +
                           (dir / "ds").string()) == 0;
        ok = ok && run_cli("track --config " + cfg.string() + " --dataset " +
                           (dir / "ds").string() + " --out " + (dir / "trk").string()) == 0;
        ok = ok && run_cli("eval --config " + cfg.string() + " --gt " + (dir / "ds").string() +
                           " --tracks " + (dir / "trk" / "tracks.jsonl").string() + " --out " +
                           (dir / "rep").string()) == 0;
        ok = ok && run_cli("render --config " + cfg.string() + " --tracks " +
                           (dir / "trk" / "tracks.jsonl").string() + " --cameras " +
                           (dir / "ds" / "cameras.json").string() + " --out " +
                           (dir / "svg").string()) == 0;
    }
    for (const char* name : {"ds/cameras.json", "ds/scenario.json", "ds/gt.jsonl",
                             "trk/tracks.jsonl", "rep/report.json", "rep/report.txt"})
        compare(base / "a", base / "b", name);
    // every rendered file, byte for byte
    if (ok)
        for (const auto& entry : std::filesystem::directory_iterator(base / "a" / "svg"))
            compare(base / "a" / "svg", base / "b" / "svg",
                    entry.path().filename().c_str());

    std::ostringstream d;
    if (ok)
        d << "simulate/track/eval/render outputs byte-identical across two runs "
             "(wall-clock timing reports excluded)";
    else
        d << "mismatch or nonzero exit; first differing file: "
          << (first_diff.empty() ? "<none>" : first_diff);
    criterion(7, ok, d.str());
    std::filesystem::remove_all(base);
}

TEST_CASE("criterion 8: property suite is large enough and fast enough") {
    // count property test cases across the unit suites
    int properties = 0;
#ifdef VT_TEST_SOURCE_DIR
    const std::filesystem::path src_dir = VT_TEST_SOURCE_DIR;
#else
    const std::filesystem::path src_dir = build_dir().parent_path() / "tests";
#endif
    for (const auto& entry : std::filesystem::directory_iterator(src_dir)) {
        if (entry.path().extension() != ".cpp") continue;
        const std::string text = slurp(entry.path());
        const std::string needle = "TEST_CASE(\"property:";
        for (size_t at = text.find(needle); at != std::string::npos;
             at = text.find(needle, at + 1))
            ++properties;
    }

    // rerun every unit suite and time the lot
    const auto t0 = Clock::now();
    bool suites_ok = true;
    for (const char* suite : {"test_geometry", "test_heatmap", "test_volume", "test_pose",
                              "test_occlusion", "test_tracker", "test_metrics", "test_simulator",
                              "test_cli_io"}) {
        const std::string cmd = (build_dir() / "tests" / suite).string() + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        suites_ok = suites_ok && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    }
    const double secs = seconds_since(t0);

    std::ostringstream d;
    d << properties << " property tests (>= 30); all 9 unit suites green in " << secs
      << " s (< 300)";
    criterion(8, properties >= 30 && suites_ok && secs < 300.0, d.str());
}
