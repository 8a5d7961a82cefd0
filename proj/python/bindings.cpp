#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "voxeltrack/bench.hpp"
#include "voxeltrack/metrics.hpp"
#include "voxeltrack/pipeline.hpp"

namespace py = pybind11;
using namespace voxeltrack;

namespace {

std::string track_to_jsonl(const std::vector<TrackRecord>& records) {
    std::ostringstream out;
    for (const TrackRecord& r : records) out << track_record_to_json(r) << "\n";
    return out.str();
}

}  // namespace

PYBIND11_MODULE(_voxeltrack, m) {
    m.doc() = "multi-view multi-person 3D pose tracking over a voxel volume";

    py::class_<CameraParams>(m, "CameraParams")
        .def(py::init<>())
        .def_readwrite("id", &CameraParams::id)
        .def_readwrite("fx", &CameraParams::fx)
        .def_readwrite("fy", &CameraParams::fy)
        .def_readwrite("cx", &CameraParams::cx)
        .def_readwrite("cy", &CameraParams::cy)
        .def_readwrite("rotation", &CameraParams::rotation)
        .def_readwrite("translation", &CameraParams::translation)
        .def_readwrite("image_width", &CameraParams::image_width)
        .def_readwrite("image_height", &CameraParams::image_height)
        .def("validate", &CameraParams::validate);

    py::class_<PixelProjection>(m, "PixelProjection")
        .def_readonly("u", &PixelProjection::u)
        .def_readonly("v", &PixelProjection::v)
        .def_readonly("depth", &PixelProjection::depth)
        .def("in_front", &PixelProjection::in_front);

    py::class_<VoxelGrid>(m, "VoxelGrid")
        .def(py::init<>())
        .def_readwrite("origin", &VoxelGrid::origin)
        .def_readwrite("extent", &VoxelGrid::extent)
        .def_readwrite("bins", &VoxelGrid::bins)
        .def("voxel_size", &VoxelGrid::voxel_size)
        .def("voxel_count", &VoxelGrid::voxel_count);

    m.def("joint_names", [] {
        std::vector<std::string> names(joint_names().begin(), joint_names().end());
        return names;
    });
    m.def("limb_pairs", [] { return limb_pairs(); });
    m.def("project_point", &project_point, py::arg("camera"), py::arg("point"));
    m.def("voxel_center", &voxel_center, py::arg("grid"), py::arg("x"), py::arg("y"),
          py::arg("z"));

    m.def("cameras_from_json", &cameras_from_json_text, py::arg("text"));
    m.def("cameras_to_json", &cameras_to_json_text, py::arg("cameras"));

    m.def("scenario_from_json", &scenario_from_json_text, py::arg("text"));
    m.def("scenario_to_json", &scenario_to_json_text, py::arg("config"));
    m.def("config_from_json", &run_config_from_json_text, py::arg("text"));
    m.def("config_to_json", &run_config_to_json_text, py::arg("config"));

    py::class_<ScenarioConfig>(m, "ScenarioConfig").def(py::init<>());
    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def("validate", &RunConfig::validate);

    m.def(
        "simulate",
        [](const std::string& scenario_json, const std::string& out_dir, bool dump_heatmaps) {
            const Simulator sim(scenario_from_json_text(scenario_json));
            export_dataset(out_dir, sim, dump_heatmaps);
        },
        py::arg("scenario_json"), py::arg("out_dir"), py::arg("dump_heatmaps") = false,
        "Generate a synthetic dataset (cameras.json, scenario.json, gt.jsonl) in out_dir.");

    m.def(
        "track",
        [](const std::string& config_json) {
            const RunConfig config = run_config_from_json_text(config_json);
            const Simulator sim(config.scenario);
            const TrackRunResult result = run_tracking(config, sim);
            const StageTimings mean = result.mean_timings();
            py::dict timings;
            timings["frames"] = result.frames;
            timings["render_ms"] = mean.render_ms;
            timings["volume_ms"] = mean.volume_ms;
            timings["decode_ms"] = mean.decode_ms;
            timings["tracking_ms"] = mean.tracking_ms;
            return py::make_tuple(track_to_jsonl(result.records), timings);
        },
        py::arg("config_json"),
        "Run the full pipeline on the configured scenario; returns (tracks_jsonl, timings).");

    m.def(
        "track_and_evaluate",
        [](const std::string& config_json) {
            const RunConfig config = run_config_from_json_text(config_json);
            const Simulator sim(config.scenario);
            const TrackRunResult result = run_tracking(config, sim);
            const auto frames = build_eval_frames(sim.frames(), result.records);
            const MetricsReport report =
                evaluate(frames, config.eval.ap_k_mm, config.eval.mot_threshold_mm,
                         config.eval.pcp_threshold);
            return report.to_json();
        },
        py::arg("config_json"),
        "Run the pipeline and score it against ground truth; returns the report as JSON.");

    m.def(
        "conv_bench",
        [](const std::vector<std::array<int, 3>>& grids, const std::vector<double>& occupancies) {
            BenchParams params;
            if (!grids.empty()) params.grids = grids;
            if (!occupancies.empty()) params.occupancies = occupancies;
            return bench_table(run_conv_bench(params));
        },
        py::arg("grids") = std::vector<std::array<int, 3>>{},
        py::arg("occupancies") = std::vector<double>{},
        "Sparse vs dense 3D convolution benchmark; returns a CSV table.");
}
