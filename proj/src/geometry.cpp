#include "voxeltrack/geometry.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

namespace voxeltrack {

using nlohmann::json;

const std::array<const char*, kNumJoints>& joint_names() {
    static const std::array<const char*, kNumJoints> names = {
        "pelvis", "neck", "head",
        "l_shoulder", "l_elbow", "l_wrist",
        "r_shoulder", "r_elbow", "r_wrist",
        "l_hip", "l_knee", "l_ankle",
        "r_hip", "r_knee", "r_ankle"};
    return names;
}

const std::vector<std::pair<int, int>>& limb_pairs() {
    static const std::vector<std::pair<int, int>> limbs = {
        {0, 1}, {1, 2},
        {1, 3}, {3, 4}, {4, 5},
        {1, 6}, {6, 7}, {7, 8},
        {0, 9}, {9, 10}, {10, 11},
        {0, 12}, {12, 13}, {13, 14}};
    return limbs;
}

void CameraParams::validate() const {
    if (fx <= 0 || fy <= 0)
        throw std::invalid_argument("camera " + std::to_string(id) + ": focal lengths must be positive");
    if (image_width <= 0 || image_height <= 0)
        throw std::invalid_argument("camera " + std::to_string(id) + ": image dimensions must be positive");
    const Mat3 rtr = rotation.transpose() * rotation;
    if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6)
        throw std::invalid_argument("camera " + std::to_string(id) + ": rotation is not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > 1e-6)
        throw std::invalid_argument("camera " + std::to_string(id) + ": rotation determinant is not +1");
}

PixelProjection project_point(const CameraParams& cam, const Vec3& point) {
    const Vec3 pc = cam.rotation * point + cam.translation;
    PixelProjection out;
    out.depth = pc.z();
    if (pc.z() != 0.0) {
        out.u = cam.fx * pc.x() / pc.z() + cam.cx;
        out.v = cam.fy * pc.y() / pc.z() + cam.cy;
    }
    return out;
}

void VoxelGrid::validate() const {
    if (extent.minCoeff() <= 0)
        throw std::invalid_argument("voxel grid extent must be positive");
    if (bins[0] < 1 || bins[1] < 1 || bins[2] < 1)
        throw std::invalid_argument("voxel grid bins must be >= 1");
}

Vec3 voxel_center(const VoxelGrid& grid, int x, int y, int z) {
    if (!grid.contains_index(x, y, z))
        throw std::out_of_range("voxel index out of range");
    const Vec3 vs = grid.voxel_size();
    return grid.origin + Vec3((x + 0.5) * vs.x(), (y + 0.5) * vs.y(), (z + 0.5) * vs.z());
}

double mean_joint_distance(const Pose3D& a, const Pose3D& b) {
    double sum = 0;
    for (int j = 0; j < kNumJoints; ++j) sum += (a.joints[j] - b.joints[j]).norm();
    return sum / kNumJoints;
}

std::vector<ProjectionTable> build_projection_table(
    const VoxelGrid& grid, const std::vector<CameraParams>& cameras,
    double heatmap_downsample) {
    if (cameras.empty())
        throw std::invalid_argument("projection table needs at least one camera");
    grid.validate();

    std::vector<ProjectionTable> tables(cameras.size());
    for (size_t ci = 0; ci < cameras.size(); ++ci) {
        const CameraParams& cam = cameras[ci];
        cam.validate();
        ProjectionTable& table = tables[ci];
        table.heatmap_width = int(cam.image_width / heatmap_downsample);
        table.heatmap_height = int(cam.image_height / heatmap_downsample);
        table.entries.resize(size_t(grid.voxel_count()));

        auto fill_rows = [&](int x0, int x1) {
            for (int x = x0; x < x1; ++x)
                for (int y = 0; y < grid.bins[1]; ++y)
                    for (int z = 0; z < grid.bins[2]; ++z) {
                        const PixelProjection p = project_point(cam, voxel_center(grid, x, y, z));
                        ProjectionTable::Entry& e = table.entries[grid.flat_index(x, y, z)];
                        const double hu = p.u / heatmap_downsample;
                        const double hv = p.v / heatmap_downsample;
                        e.u = float(hu);
                        e.v = float(hv);
                        e.depth = float(p.depth);
                        e.visible = p.depth > 0.0 && hu >= 0.0 && hu < table.heatmap_width &&
                                    hv >= 0.0 && hv < table.heatmap_height;
                    }
        };

        const int n_chunks = 8;
        std::vector<std::future<void>> futures;
        for (int c = 0; c < n_chunks; ++c) {
            const int x0 = grid.bins[0] * c / n_chunks;
            const int x1 = grid.bins[0] * (c + 1) / n_chunks;
            if (x0 < x1)
                futures.push_back(std::async(std::launch::async, fill_rows, x0, x1));
        }
        for (auto& f : futures) f.get();
    }
    return tables;
}

std::string cameras_to_json_text(const std::vector<CameraParams>& cameras) {
    json arr = json::array();
    for (const CameraParams& c : cameras) {
        json rec;
        rec["id"] = c.id;
        rec["fx"] = c.fx;
        rec["fy"] = c.fy;
        rec["cx"] = c.cx;
        rec["cy"] = c.cy;
        std::vector<double> r(9);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r[i * 3 + j] = c.rotation(i, j);
        rec["R"] = r;
        rec["t"] = {c.translation.x(), c.translation.y(), c.translation.z()};
        rec["width"] = c.image_width;
        rec["height"] = c.image_height;
        arr.push_back(rec);
    }
    return arr.dump(2);
}

std::vector<CameraParams> cameras_from_json_text(const std::string& text) {
    json arr;
    try {
        arr = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("camera file: not valid JSON: ") + e.what());
    }
    if (!arr.is_array()) throw std::invalid_argument("camera file: expected a JSON array");
    std::vector<CameraParams> cameras;
    try {
        for (const json& rec : arr) {
            CameraParams c;
            c.id = rec.at("id").get<int>();
            c.fx = rec.at("fx").get<double>();
            c.fy = rec.at("fy").get<double>();
            c.cx = rec.at("cx").get<double>();
            c.cy = rec.at("cy").get<double>();
            const auto r = rec.at("R").get<std::vector<double>>();
            if (r.size() != 9) throw std::invalid_argument("camera file: R must have 9 entries");
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) c.rotation(i, j) = r[i * 3 + j];
            const auto t = rec.at("t").get<std::vector<double>>();
            if (t.size() != 3) throw std::invalid_argument("camera file: t must have 3 entries");
            c.translation = Vec3(t[0], t[1], t[2]);
            c.image_width = rec.at("width").get<int>();
            c.image_height = rec.at("height").get<int>();
            c.validate();
            cameras.push_back(c);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("camera file: bad record: ") + e.what());
    }
    return cameras;
}

std::vector<CameraParams> load_cameras(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open camera file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return cameras_from_json_text(ss.str());
}

void save_cameras(const std::string& path, const std::vector<CameraParams>& cameras) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write camera file: " + path);
    out << cameras_to_json_text(cameras) << "\n";
}

}  // namespace voxeltrack
