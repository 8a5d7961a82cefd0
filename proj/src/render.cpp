#include "voxeltrack/render.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace voxeltrack {

namespace {

const char* track_color(int id) {
    static const char* palette[] = {"#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
                                    "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080"};
    return palette[size_t(id) % (sizeof(palette) / sizeof(palette[0]))];
}

}  // namespace

std::string skeleton_svg(const std::vector<TrackRecord>& frame_records,
                         const CameraParams& camera) {
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << camera.image_width
        << "\" height=\"" << camera.image_height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const TrackRecord& rec : frame_records) {
        std::array<PixelProjection, kNumJoints> px;
        bool all_front = true;
        for (int j = 0; j < kNumJoints; ++j) {
            px[size_t(j)] = project_point(camera, rec.pose.joints[j]);
            all_front = all_front && px[size_t(j)].in_front();
        }
        if (!all_front) continue;
        const char* color = track_color(rec.track_id);
        for (const auto& [a, b] : limb_pairs())
            svg << "<line x1=\"" << px[size_t(a)].u << "\" y1=\"" << px[size_t(a)].v << "\" x2=\""
                << px[size_t(b)].u << "\" y2=\"" << px[size_t(b)].v << "\" stroke=\"" << color
                << "\" stroke-width=\"2\"/>\n";
        for (int j = 0; j < kNumJoints; ++j)
            svg << "<circle cx=\"" << px[size_t(j)].u << "\" cy=\"" << px[size_t(j)].v
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << px[0].u + 6 << "\" y=\"" << px[0].v - 6 << "\" fill=\"" << color
            << "\" font-size=\"16\">" << rec.track_id << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string trajectory_svg(const std::vector<TrackRecord>& records, const Vec3& space_extent) {
    const double scale = 0.06;  // mm to px
    const int w = int(space_extent.x() * scale) + 20;
    const int h = int(space_extent.y() * scale) + 20;
    std::map<int, std::vector<Vec3>> by_track;
    for (const TrackRecord& rec : records) by_track[rec.track_id].push_back(rec.pose.pelvis());

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& [id, points] : by_track) {
        svg << "<polyline fill=\"none\" stroke=\"" << track_color(id) << "\" stroke-width=\"2\" points=\"";
        for (const Vec3& p : points) svg << 10 + p.x() * scale << "," << 10 + p.y() * scale << " ";
        svg << "\"/>\n";
        if (!points.empty())
            svg << "<text x=\"" << 10 + points.back().x() * scale << "\" y=\""
                << 10 + points.back().y() * scale << "\" fill=\"" << track_color(id)
                << "\" font-size=\"14\">" << id << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void render_tracks(const std::string& out_dir, const std::vector<TrackRecord>& records,
                   const std::vector<CameraParams>& cameras, const Vec3& space_extent) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create render directory: " + out_dir);

    std::map<int, std::vector<TrackRecord>> by_frame;
    for (const TrackRecord& rec : records) by_frame[rec.frame].push_back(rec);

    for (const auto& [frame, frame_records] : by_frame)
        for (size_t v = 0; v < cameras.size(); ++v) {
            std::ostringstream name;
            name << out_dir << "/frame_" << frame << "_view_" << v << ".svg";
            std::ofstream out(name.str());
            if (!out) throw std::runtime_error("cannot write render file: " + name.str());
            out << skeleton_svg(frame_records, cameras[v]);
        }

    std::ofstream out(out_dir + "/trajectories.svg");
    if (!out) throw std::runtime_error("cannot write render file: " + out_dir + "/trajectories.svg");
    out << trajectory_svg(records, space_extent);
}

}  // namespace voxeltrack
