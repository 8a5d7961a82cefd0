#include "voxeltrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace voxeltrack {

namespace {
constexpr double kBig = 1e9;  // stands in for forbidden entries during solving
}

Assignment solve_assignment(const std::vector<std::vector<double>>& cost) {
    Assignment out;
    const int rows = int(cost.size());
    const int cols = rows ? int(cost[0].size()) : 0;
    if (rows == 0 || cols == 0) {
        for (int r = 0; r < rows; ++r) out.unmatched_rows.push_back(r);
        for (int c = 0; c < cols; ++c) out.unmatched_cols.push_back(c);
        return out;
    }
    for (const auto& row : cost)
        if (int(row.size()) != cols) throw std::invalid_argument("solve_assignment: ragged cost matrix");

    // Shortest-augmenting-path Hungarian with potentials; rows <= cols is
    // required, so transpose when needed.
    const bool transposed = rows > cols;
    const int n = transposed ? cols : rows;
    const int m = transposed ? rows : cols;
    auto entry = [&](int i, int j) {
        const double v = transposed ? cost[j][i] : cost[i][j];
        return std::isfinite(v) ? v : kBig;
    };

    std::vector<double> u(n + 1, 0), v(m + 1, 0);
    std::vector<int> match(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, std::numeric_limits<double>::max());
        std::vector<char> used(m + 1, false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            double delta = std::numeric_limits<double>::max();
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = entry(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(rows, -1);
    for (int j = 1; j <= m; ++j) {
        if (match[j] == 0) continue;
        const int i = match[j] - 1;
        const int r = transposed ? j - 1 : i;
        const int c = transposed ? i : j - 1;
        if (cost[r][c] < kBig / 2 && std::isfinite(cost[r][c])) row_to_col[r] = c;
    }
    std::vector<char> col_taken(cols, false);
    for (int r = 0; r < rows; ++r) {
        if (row_to_col[r] >= 0) {
            out.matches.emplace_back(r, row_to_col[r]);
            col_taken[row_to_col[r]] = true;
        } else {
            out.unmatched_rows.push_back(r);
        }
    }
    for (int c = 0; c < cols; ++c)
        if (!col_taken[c]) out.unmatched_cols.push_back(c);
    return out;
}

std::vector<std::vector<double>> raw_location_distance(const std::vector<Tracklet>& tracklets,
                                                       const std::vector<Detection3D>& detections,
                                                       bool pelvis_only) {
    std::vector<std::vector<double>> raw(tracklets.size(),
                                         std::vector<double>(detections.size(), 0.0));
    for (size_t t = 0; t < tracklets.size(); ++t)
        for (size_t d = 0; d < detections.size(); ++d)
            raw[t][d] = pelvis_only
                            ? (tracklets[t].last_pose.pelvis() - detections[d].pose.pelvis()).norm()
                            : mean_joint_distance(tracklets[t].last_pose, detections[d].pose);
    return raw;
}

std::vector<std::vector<double>> location_distance(const std::vector<std::vector<double>>& raw) {
    std::vector<std::vector<double>> loc = raw;
    for (auto& row : loc) {
        double row_max = 0;
        for (double v : row) row_max = std::max(row_max, v);
        if (row_max > 0)
            for (double& v : row) v /= row_max;
    }
    return loc;
}

std::vector<std::vector<double>> appearance_distance(
    const std::vector<Tracklet>& tracklets, const std::vector<FusedReid>& features,
    const std::vector<std::vector<double>>& loc_fallback) {
    std::vector<std::vector<double>> app(tracklets.size(),
                                         std::vector<double>(features.size(), 0.0));
    for (size_t t = 0; t < tracklets.size(); ++t) {
        const bool track_valid = tracklets[t].embedding.size() > 0;
        for (size_t d = 0; d < features.size(); ++d) {
            if (track_valid && features[d].valid)
                app[t][d] = 0.5 * (1.0 - tracklets[t].embedding.dot(features[d].embedding));
            else
                app[t][d] = loc_fallback[t][d];
        }
    }
    return app;
}

std::vector<std::vector<double>> final_cost(const std::vector<std::vector<double>>& loc,
                                            const std::vector<std::vector<double>>& app,
                                            const std::vector<std::vector<double>>& raw,
                                            double gate_mm) {
    if (loc.size() != app.size() || loc.size() != raw.size())
        throw std::invalid_argument("final_cost: shape mismatch");
    std::vector<std::vector<double>> cost = loc;
    for (size_t t = 0; t < loc.size(); ++t) {
        if (loc[t].size() != app[t].size() || loc[t].size() != raw[t].size())
            throw std::invalid_argument("final_cost: shape mismatch");
        for (size_t d = 0; d < loc[t].size(); ++d)
            cost[t][d] = raw[t][d] > gate_mm ? kForbiddenCost : 0.5 * (loc[t][d] + app[t][d]);
    }
    return cost;
}

std::vector<TrackRecord> Tracker::step(int frame, const std::vector<Detection3D>& detections,
                                       const std::vector<FusedReid>& features) {
    if (frame <= last_frame_)
        throw std::invalid_argument("Tracker::step: frame indices must be monotone increasing");
    if (features.size() != detections.size())
        throw std::invalid_argument("Tracker::step: feature count mismatch");
    last_frame_ = frame;

    std::vector<size_t> active;
    for (size_t i = 0; i < tracklets_.size(); ++i)
        if (tracklets_[i].active) active.push_back(i);

    std::vector<Tracklet> active_tracks;
    active_tracks.reserve(active.size());
    for (size_t i : active) active_tracks.push_back(tracklets_[i]);

    const auto raw = raw_location_distance(active_tracks, detections, params_.pelvis_only_distance);
    const auto loc = location_distance(raw);
    const auto app = appearance_distance(active_tracks, features, loc);

    std::vector<std::vector<double>> cost(active.size(),
                                          std::vector<double>(detections.size(), 0.0));
    for (size_t t = 0; t < active.size(); ++t)
        for (size_t d = 0; d < detections.size(); ++d) {
            double c;
            if (params_.use_location && params_.use_appearance)
                c = 0.5 * (loc[t][d] + app[t][d]);
            else if (params_.use_appearance)
                c = app[t][d];
            else
                c = loc[t][d];
            cost[t][d] = raw[t][d] > params_.gate_mm ? kForbiddenCost : c;
        }

    const Assignment assignment = solve_assignment(cost);

    std::vector<char> det_matched(detections.size(), false);
    std::vector<std::pair<int, size_t>> emitted;  // (track id, detection index)

    for (const auto& [t, d] : assignment.matches) {
        Tracklet& track = tracklets_[active[size_t(t)]];
        track.last_pose = detections[size_t(d)].pose;
        track.frames_since_match = 0;
        track.last_frame = frame;
        if (features[size_t(d)].valid) {
            if (track.embedding.size() == 0) {
                track.embedding = features[size_t(d)].embedding;
            } else {
                Eigen::VectorXd blended = params_.blend_alpha * track.embedding +
                                          (1.0 - params_.blend_alpha) * features[size_t(d)].embedding;
                const double norm = blended.norm();
                if (norm > 1e-12) track.embedding = blended / norm;
            }
        }
        det_matched[size_t(d)] = true;
        emitted.emplace_back(track.id, size_t(d));
    }

    for (int t : assignment.unmatched_rows) {
        Tracklet& track = tracklets_[active[size_t(t)]];
        ++track.frames_since_match;
        if (track.frames_since_match > params_.max_unmatched_frames) track.active = false;
    }

    for (size_t d = 0; d < detections.size(); ++d) {
        if (det_matched[d]) continue;
        Tracklet track;
        track.id = next_id_++;
        track.last_pose = detections[d].pose;
        track.last_frame = frame;
        if (features[d].valid) track.embedding = features[d].embedding;
        emitted.emplace_back(track.id, d);
        tracklets_.push_back(std::move(track));
    }

    std::sort(emitted.begin(), emitted.end());
    std::vector<TrackRecord> records;
    records.reserve(emitted.size());
    for (const auto& [id, d] : emitted) {
        TrackRecord rec;
        rec.frame = frame;
        rec.track_id = id;
        rec.pose = detections[d].pose;
        rec.confidence = detections[d].confidence;
        records.push_back(std::move(rec));
    }
    return records;
}

std::string track_record_to_json(const TrackRecord& rec) {
    nlohmann::json j;
    j["frame"] = rec.frame;
    j["track_id"] = rec.track_id;
    nlohmann::json joints = nlohmann::json::array();
    for (int k = 0; k < kNumJoints; ++k)
        joints.push_back({rec.pose.joints[k].x(), rec.pose.joints[k].y(), rec.pose.joints[k].z()});
    j["joints"] = joints;
    j["confidence"] = rec.confidence;
    return j.dump();
}

TrackRecord track_record_from_json(const std::string& line) {
    const nlohmann::json j = nlohmann::json::parse(line);
    TrackRecord rec;
    rec.frame = j.at("frame").get<int>();
    rec.track_id = j.at("track_id").get<int>();
    const auto& joints = j.at("joints");
    if (joints.size() != kNumJoints)
        throw std::invalid_argument("track record: expected 15 joints");
    for (int k = 0; k < kNumJoints; ++k)
        rec.pose.joints[k] = Vec3(joints[k][0].get<double>(), joints[k][1].get<double>(),
                                  joints[k][2].get<double>());
    rec.confidence = j.at("confidence").get<float>();
    return rec;
}

void save_track_records(const std::string& path, const std::vector<TrackRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write track records: " + path);
    for (const TrackRecord& rec : records) out << track_record_to_json(rec) << "\n";
}

std::vector<TrackRecord> load_track_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open track records: " + path);
    std::vector<TrackRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(track_record_from_json(line));
    }
    return records;
}

}  // namespace voxeltrack
