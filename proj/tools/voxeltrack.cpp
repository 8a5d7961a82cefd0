#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "voxeltrack/bench.hpp"
#include "voxeltrack/pipeline.hpp"
#include "voxeltrack/render.hpp"

namespace vt = voxeltrack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitInternal = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "json";
    std::int64_t seed_override = -1;
    int views_override = 0;
    std::string grid_override;
};

vt::RunConfig resolve_config(const CommonOpts& opts) {
    vt::RunConfig config;
    if (!opts.config_path.empty()) config = vt::load_run_config(opts.config_path);
    if (opts.seed_override >= 0) config.scenario.seed = std::uint64_t(opts.seed_override);
    if (opts.views_override > 0) config.scenario.camera_count = opts.views_override;
    if (!opts.grid_override.empty()) {
        std::array<int, 3> bins{};
        char sep1 = 0, sep2 = 0;
        std::istringstream ss(opts.grid_override);
        if (!(ss >> bins[0] >> sep1 >> bins[1] >> sep2 >> bins[2]) || sep1 != 'x' || sep2 != 'x')
            throw std::invalid_argument("--grid: expected XxYxZ, got '" + opts.grid_override + "'");
        config.grid_bins = bins;
    }
    config.validate();
    return config;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration file (JSON)");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed_override, "override scenario seed");
    cmd->add_option("--views", opts.views_override, "override camera count");
    cmd->add_option("--grid", opts.grid_override, "override grid bins, XxYxZ");
    cmd->add_option("--format", opts.format, "report format")
        ->check(CLI::IsMember({"json", "table"}));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

int cmd_simulate(const CommonOpts& opts, bool dump_heatmaps) {
    const vt::RunConfig config = resolve_config(opts);
    const vt::Simulator sim(config.scenario);
    vt::export_dataset(opts.out_dir, sim, dump_heatmaps);
    std::cout << "dataset written to " << opts.out_dir << " (" << sim.frames().size()
              << " frames, " << sim.cameras().size() << " views)\n";
    return kExitOk;
}

int cmd_track(const CommonOpts& opts, const std::string& dataset_dir) {
    vt::RunConfig config = resolve_config(opts);
    const vt::Dataset ds = vt::load_dataset(dataset_dir);
    config.scenario = ds.config;

    const vt::Simulator sim(config.scenario);
    if (sim.frames().size() != ds.frames.size())
        throw std::runtime_error("dataset " + dataset_dir + ": gt.jsonl has " +
                                 std::to_string(ds.frames.size()) +
                                 " frames but the scenario produces " +
                                 std::to_string(sim.frames().size()));

    const vt::TrackRunResult result = vt::run_tracking(config, sim);
    std::filesystem::create_directories(opts.out_dir);
    vt::save_track_records(opts.out_dir + "/tracks.jsonl", result.records);

    const vt::StageTimings mean = result.mean_timings();
    nlohmann::json timing;
    timing["frames"] = result.frames;
    timing["render_ms"] = mean.render_ms;
    timing["volume_ms"] = mean.volume_ms;
    timing["decode_ms"] = mean.decode_ms;
    timing["tracking_ms"] = mean.tracking_ms;
    write_text(opts.out_dir + "/timings.json", timing.dump(2) + "\n");

    std::cout << "stage          mean ms/frame\n";
    std::cout << "2D render      " << mean.render_ms << "\n";
    std::cout << "volume fusion  " << mean.volume_ms << "\n";
    std::cout << "pose decode    " << mean.decode_ms << "\n";
    std::cout << "tracking       " << mean.tracking_ms << "\n";
    std::cout << "tracks written to " << opts.out_dir << "/tracks.jsonl\n";
    return kExitOk;
}

int cmd_eval(const CommonOpts& opts, const std::string& gt_dir, const std::string& tracks_path) {
    const vt::RunConfig config = resolve_config(opts);
    const vt::Dataset ds = vt::load_dataset(gt_dir);
    const std::vector<vt::TrackRecord> records = vt::load_track_records(tracks_path);
    const auto frames = vt::build_eval_frames(ds.frames, records);
    const vt::MetricsReport report = vt::evaluate(frames, config.eval.ap_k_mm,
                                                  config.eval.mot_threshold_mm,
                                                  config.eval.pcp_threshold);
    std::filesystem::create_directories(opts.out_dir);
    write_text(opts.out_dir + "/report.json", report.to_json() + "\n");
    write_text(opts.out_dir + "/report.txt", report.to_table());
    std::cout << (opts.format == "table" ? report.to_table() : report.to_json() + "\n");
    return kExitOk;
}

int cmd_bench(const CommonOpts& opts) {
    vt::BenchParams params;
    const auto rows = vt::run_conv_bench(params);
    const std::string table = vt::bench_table(rows);
    std::filesystem::create_directories(opts.out_dir);
    write_text(opts.out_dir + "/bench.csv", table);
    std::cout << table;
    return kExitOk;
}

int cmd_render(const CommonOpts& opts, const std::string& tracks_path,
               const std::string& cameras_path) {
    const vt::RunConfig config = resolve_config(opts);
    const std::vector<vt::TrackRecord> records = vt::load_track_records(tracks_path);
    const std::vector<vt::CameraParams> cameras = vt::load_cameras(cameras_path);
    vt::render_tracks(opts.out_dir, records, cameras, config.scenario.space_extent);
    std::cout << "rendered " << records.size() << " records to " << opts.out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-view multi-person 3D pose tracking over a voxel volume"};
    app.require_subcommand(1);

    CommonOpts opts;
    bool dump_heatmaps = false;
    std::string dataset_dir, gt_dir, tracks_path, cameras_path;

    CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
    add_common(simulate, opts);
    simulate->add_flag("--dump-heatmaps", dump_heatmaps, "also write per-frame heatmap dumps");

    CLI::App* track = app.add_subcommand("track", "run the tracking pipeline on a dataset");
    add_common(track, opts);
    track->add_option("--dataset", dataset_dir, "dataset directory")->required();

    CLI::App* eval = app.add_subcommand("eval", "evaluate tracks against ground truth");
    add_common(eval, opts);
    eval->add_option("--gt", gt_dir, "dataset directory with gt.jsonl")->required();
    eval->add_option("--tracks", tracks_path, "track record file")->required();

    CLI::App* bench = app.add_subcommand("bench", "sparse vs dense convolution benchmark");
    add_common(bench, opts);

    CLI::App* render = app.add_subcommand("render", "render tracks to SVG");
    add_common(render, opts);
    render->add_option("--tracks", tracks_path, "track record file")->required();
    render->add_option("--cameras", cameras_path, "camera calibration file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(opts, dump_heatmaps);
        if (track->parsed()) return cmd_track(opts, dataset_dir);
        if (eval->parsed()) return cmd_eval(opts, gt_dir, tracks_path);
        if (bench->parsed()) return cmd_bench(opts);
        if (render->parsed()) return cmd_render(opts, tracks_path, cameras_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
