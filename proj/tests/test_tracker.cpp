#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <unistd.h>

#include "voxeltrack/tracker.hpp"

using namespace voxeltrack;

namespace {

Detection3D detection_at(const Vec3& pelvis, float confidence = 0.9f) {
    Detection3D d;
    for (int j = 0; j < kNumJoints; ++j) d.pose.joints[j] = pelvis + Vec3(0, 0, 40.0 * j);
    d.confidence = confidence;
    return d;
}

FusedReid feature(int axis, int dim = kReidDim) {
    FusedReid f;
    f.embedding = Eigen::VectorXd::Zero(dim);
    f.embedding[axis] = 1.0;
    f.valid = true;
    return f;
}

FusedReid invalid_feature() { return {}; }

Tracklet tracklet_at(int id, const Vec3& pelvis) {
    Tracklet t;
    t.id = id;
    for (int j = 0; j < kNumJoints; ++j) t.last_pose.joints[j] = pelvis + Vec3(0, 0, 40.0 * j);
    return t;
}

// Brute-force minimum-cost maximum matching for small matrices.
double brute_force_best(const std::vector<std::vector<double>>& cost, size_t* n_matched) {
    const size_t rows = cost.size(), cols = cost[0].size();
    const size_t n_sq = std::max(rows, cols);
    std::vector<int> perm(n_sq);
    for (size_t c = 0; c < n_sq; ++c) perm[c] = int(c);
    double best = std::numeric_limits<double>::max();
    size_t best_n = 0;
    do {
        double total = 0;
        size_t n = 0;
        for (size_t r = 0; r < rows; ++r) {
            if (size_t(perm[r]) >= cols) continue;
            const double v = cost[r][size_t(perm[r])];
            if (std::isfinite(v)) {
                total += v;
                ++n;
            }
        }
        if (n > best_n || (n == best_n && total < best)) {
            best = total;
            best_n = n;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (n_matched) *n_matched = best_n;
    return best_n ? best : 0.0;
}

}  // namespace

TEST_CASE("location_distance: row-max normalization hand example") {
    std::vector<Tracklet> tracks = {tracklet_at(1, Vec3(0, 0, 0))};
    std::vector<Detection3D> dets = {detection_at(Vec3(100, 0, 0)), detection_at(Vec3(400, 0, 0))};
    const auto raw = raw_location_distance(tracks, dets);
    CHECK(raw[0][0] == doctest::Approx(100));
    CHECK(raw[0][1] == doctest::Approx(400));
    const auto loc = location_distance(raw);
    CHECK(loc[0][0] == doctest::Approx(0.25));
    CHECK(loc[0][1] == doctest::Approx(1.0));
}

TEST_CASE("location_distance: identical poses give zero, single detection gives one") {
    std::vector<Tracklet> tracks = {tracklet_at(1, Vec3(500, 500, 0))};
    std::vector<Detection3D> same = {detection_at(Vec3(500, 500, 0))};
    const auto zero = location_distance(raw_location_distance(tracks, same));
    CHECK(zero[0][0] == doctest::Approx(0.0));
    std::vector<Detection3D> one = {detection_at(Vec3(700, 500, 0))};
    const auto single = location_distance(raw_location_distance(tracks, one));
    CHECK(single[0][0] == doctest::Approx(1.0));
}

TEST_CASE("location_distance: pelvis-only option uses only the root joint") {
    std::vector<Tracklet> tracks = {tracklet_at(1, Vec3(0, 0, 0))};
    std::vector<Detection3D> dets = {detection_at(Vec3(300, 0, 0))};
    // constructed poses differ by a pure translation, so both agree here
    const auto raw_mean = raw_location_distance(tracks, dets, false);
    const auto raw_pelvis = raw_location_distance(tracks, dets, true);
    CHECK(raw_mean[0][0] == doctest::Approx(300));
    CHECK(raw_pelvis[0][0] == doctest::Approx(300));
}

TEST_CASE("appearance_distance: cosine endpoints") {
    Tracklet t = tracklet_at(1, Vec3(0, 0, 0));
    t.embedding = feature(0).embedding;
    std::vector<Tracklet> tracks = {t};
    FusedReid opposite;
    opposite.embedding = -feature(0).embedding;
    opposite.valid = true;
    const std::vector<FusedReid> feats = {feature(0), feature(1), opposite};
    const std::vector<std::vector<double>> fallback(1, std::vector<double>(3, 0.123));
    const auto app = appearance_distance(tracks, feats, fallback);
    CHECK(app[0][0] == doctest::Approx(0.0));
    CHECK(app[0][1] == doctest::Approx(0.5));
    CHECK(app[0][2] == doctest::Approx(1.0));
}

TEST_CASE("appearance_distance: invalid features fall back to location") {
    std::vector<Tracklet> tracks = {tracklet_at(1, Vec3(0, 0, 0))};  // no embedding yet
    const std::vector<FusedReid> feats = {feature(0)};
    const std::vector<std::vector<double>> fallback = {{0.777}};
    const auto app = appearance_distance(tracks, feats, fallback);
    CHECK(app[0][0] == doctest::Approx(0.777));
}

TEST_CASE("final_cost: mean of the two metrics, gate forbids far pairs") {
    const std::vector<std::vector<double>> loc = {{0.2, 0.0}};
    const std::vector<std::vector<double>> app = {{0.4, 0.0}};
    const std::vector<std::vector<double>> raw = {{200.0, 2000.0}};
    const auto cost = final_cost(loc, app, raw, 500.0);
    CHECK(cost[0][0] == doctest::Approx(0.3));
    CHECK(std::isinf(cost[0][1]));
    CHECK_THROWS_AS(final_cost(loc, app, {{1.0}}, 500.0), std::invalid_argument);
}

TEST_CASE("solve_assignment: diagonal optimum on a 2x2") {
    const Assignment a = solve_assignment({{0.1, 0.9}, {0.9, 0.1}});
    REQUIRE(a.matches.size() == 2);
    CHECK(a.matches[0] == std::pair<int, int>(0, 0));
    CHECK(a.matches[1] == std::pair<int, int>(1, 1));
}

TEST_CASE("solve_assignment: forbidden entries are never selected") {
    const double inf = kForbiddenCost;
    const Assignment none = solve_assignment({{inf, inf}, {inf, inf}});
    CHECK(none.matches.empty());
    CHECK(none.unmatched_rows.size() == 2);
    CHECK(none.unmatched_cols.size() == 2);
    // one allowed entry forces the crossing match
    const Assignment one = solve_assignment({{inf, 0.9}, {inf, inf}});
    REQUIRE(one.matches.size() == 1);
    CHECK(one.matches[0] == std::pair<int, int>(0, 1));
}

TEST_CASE("solve_assignment: empty and rectangular shapes") {
    const Assignment empty = solve_assignment({});
    CHECK(empty.matches.empty());
    const Assignment wide = solve_assignment({{0.5, 0.1, 0.9}});
    REQUIRE(wide.matches.size() == 1);
    CHECK(wide.matches[0] == std::pair<int, int>(0, 1));
    CHECK(wide.unmatched_cols == std::vector<int>{0, 2});
    const Assignment tall = solve_assignment({{0.5}, {0.1}});
    REQUIRE(tall.matches.size() == 1);
    CHECK(tall.matches[0] == std::pair<int, int>(1, 0));
}

// property: matches the brute-force optimum (cost and cardinality) on random
// matrices with random forbidden entries.
TEST_CASE("property: assignment equals the brute-force optimum") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const size_t rows = size_t(dim(rng)), cols = size_t(dim(rng));
        std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
        for (auto& row : cost)
            for (double& v : row) v = val(rng) < 0.25 ? kForbiddenCost : val(rng);
        const Assignment a = solve_assignment(cost);
        double total = 0;
        for (const auto& [r, c] : a.matches) {
            CHECK(std::isfinite(cost[size_t(r)][size_t(c)]));
            total += cost[size_t(r)][size_t(c)];
        }
        size_t best_n = 0;
        const double best = brute_force_best(cost, &best_n);
        CHECK(a.matches.size() == best_n);
        if (best_n) CHECK(total == doctest::Approx(best).epsilon(1e-9));
    }
}

// property: adding a constant to every finite entry leaves the matching alone.
TEST_CASE("property: assignment is invariant to constant cost shifts") {
    std::mt19937 rng(72);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::vector<double>> cost(3, std::vector<double>(3));
        for (auto& row : cost)
            for (double& v : row) v = val(rng) < 0.2 ? kForbiddenCost : val(rng);
        std::vector<std::vector<double>> shifted = cost;
        for (auto& row : shifted)
            for (double& v : row)
                if (std::isfinite(v)) v += 10.0;
        const Assignment a = solve_assignment(cost);
        const Assignment b = solve_assignment(shifted);
        CHECK(a.matches == b.matches);
    }
}

TEST_CASE("Tracker: first frame spawns sequential ids") {
    Tracker tracker;
    const std::vector<Detection3D> dets = {detection_at(Vec3(1000, 1000, 0)),
                                           detection_at(Vec3(4000, 1000, 0)),
                                           detection_at(Vec3(7000, 1000, 0))};
    const std::vector<FusedReid> feats(3);
    const auto records = tracker.step(0, dets, feats);
    REQUIRE(records.size() == 3);
    CHECK(records[0].track_id == 1);
    CHECK(records[1].track_id == 2);
    CHECK(records[2].track_id == 3);
    CHECK(tracker.tracklets().size() == 3);
}

TEST_CASE("Tracker: steady following without switches") {
    Tracker tracker;
    std::vector<FusedReid> feats(2);
    for (int f = 0; f < 20; ++f) {
        const std::vector<Detection3D> dets = {detection_at(Vec3(1000 + 100 * f, 1000, 0)),
                                               detection_at(Vec3(8000 - 100 * f, 5000, 0))};
        const auto records = tracker.step(f, dets, feats);
        REQUIRE(records.size() == 2);
        CHECK(records[0].track_id == 1);
        CHECK(records[1].track_id == 2);
        CHECK((records[0].pose.pelvis() - dets[0].pose.pelvis()).norm() < 1e-9);
    }
}

TEST_CASE("Tracker: gate forbids a jump and spawns a new id instead") {
    TrackerParams p;
    p.gate_mm = 500;
    Tracker tracker(p);
    tracker.step(0, {detection_at(Vec3(1000, 1000, 0))}, {invalid_feature()});
    const auto records = tracker.step(1, {detection_at(Vec3(5000, 5000, 0))}, {invalid_feature()});
    REQUIRE(records.size() == 1);
    CHECK(records[0].track_id == 2);
}

TEST_CASE("Tracker: inactivity boundary is strictly more than the limit") {
    TrackerParams p;
    p.max_unmatched_frames = 5;
    Tracker tracker(p);
    tracker.step(0, {detection_at(Vec3(1000, 1000, 0))}, {invalid_feature()});
    // 5 empty frames: still active, redetection re-matches id 1
    for (int f = 1; f <= 5; ++f) tracker.step(f, {}, {});
    auto records = tracker.step(6, {detection_at(Vec3(1050, 1000, 0))}, {invalid_feature()});
    REQUIRE(records.size() == 1);
    CHECK(records[0].track_id == 1);
    // now 6 consecutive empty frames: inactive, next detection gets a new id
    for (int f = 7; f <= 12; ++f) tracker.step(f, {}, {});
    records = tracker.step(13, {detection_at(Vec3(1100, 1000, 0))}, {invalid_feature()});
    REQUIRE(records.size() == 1);
    CHECK(records[0].track_id == 2);
}

TEST_CASE("Tracker: embedding EMA blends and renormalizes") {
    TrackerParams p;
    p.blend_alpha = 0.9;
    Tracker tracker(p);
    tracker.step(0, {detection_at(Vec3(1000, 1000, 0))}, {feature(0)});
    tracker.step(1, {detection_at(Vec3(1010, 1000, 0))}, {feature(1)});
    const Tracklet& t = tracker.tracklets()[0];
    REQUIRE(t.embedding.size() == kReidDim);
    CHECK(t.embedding.norm() == doctest::Approx(1.0));
    // blended direction: 0.9 e0 + 0.1 e1, renormalized
    Eigen::VectorXd expect = 0.9 * feature(0).embedding + 0.1 * feature(1).embedding;
    expect.normalize();
    CHECK((t.embedding - expect).norm() < 1e-12);
}

TEST_CASE("Tracker: alpha = 1 freezes the embedding") {
    TrackerParams p;
    p.blend_alpha = 1.0;
    Tracker tracker(p);
    tracker.step(0, {detection_at(Vec3(1000, 1000, 0))}, {feature(0)});
    tracker.step(1, {detection_at(Vec3(1010, 1000, 0))}, {feature(1)});
    CHECK((tracker.tracklets()[0].embedding - feature(0).embedding).norm() < 1e-12);
}

TEST_CASE("Tracker: appearance rescues a location-ambiguous swap") {
    // two tracks converge to nearly the same spot; next frame the detections
    // sit symmetrically so location alone cannot tell them apart, but the
    // embeddings can.
    TrackerParams p;
    p.gate_mm = 2000;
    Tracker tracker(p);
    tracker.step(0, {detection_at(Vec3(4000, 5000, 0)), detection_at(Vec3(6000, 5000, 0))},
                 {feature(0), feature(1)});
    tracker.step(1, {detection_at(Vec3(4900, 5000, 0)), detection_at(Vec3(5100, 5000, 0))},
                 {feature(0), feature(1)});
    // swap the detection order; appearance must keep identities
    const auto records = tracker.step(
        2, {detection_at(Vec3(5600, 5000, 0)), detection_at(Vec3(4400, 5000, 0))},
        {feature(1), feature(0)});
    REQUIRE(records.size() == 2);
    CHECK(records[0].track_id == 1);  // id 1 carries embedding axis 0
    CHECK((records[0].pose.pelvis() - Vec3(4400, 5000, 0)).norm() < 1e-9);
    CHECK(records[1].track_id == 2);
    CHECK((records[1].pose.pelvis() - Vec3(5600, 5000, 0)).norm() < 1e-9);
}

TEST_CASE("Tracker: monotone frame indices enforced") {
    Tracker tracker;
    tracker.step(5, {}, {});
    CHECK_THROWS_AS(tracker.step(5, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(tracker.step(3, {}, {}), std::invalid_argument);
}

// property: ids are strictly increasing and never reused across a run.
TEST_CASE("property: track ids never recycle") {
    TrackerParams p;
    p.gate_mm = 100;  // tight gate forces frequent respawns
    p.max_unmatched_frames = 0;
    Tracker tracker(p);
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> pos(0, 9000);
    int max_seen = 0;
    for (int f = 0; f < 40; ++f) {
        std::vector<Detection3D> dets;
        std::vector<FusedReid> feats;
        const int n = 1 + f % 3;
        for (int i = 0; i < n; ++i) {
            dets.push_back(detection_at(Vec3(pos(rng), pos(rng), 0)));
            feats.push_back(invalid_feature());
        }
        for (const TrackRecord& r : tracker.step(f, dets, feats)) {
            // a record either extends an id we have seen or introduces a
            // strictly larger one
            CHECK(r.track_id <= max_seen + n);
            max_seen = std::max(max_seen, r.track_id);
        }
    }
    std::vector<int> ids;
    for (const Tracklet& t : tracker.tracklets()) ids.push_back(t.id);
    std::vector<int> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    CHECK(sorted.size() == ids.size());
}

// property: with slow motion and wide separation, location-only tracking
// never switches identities (geometric separation guarantee).
TEST_CASE("property: separated slow targets keep their ids with location only") {
    TrackerParams p;
    p.use_appearance = false;
    Tracker tracker(p);
    std::mt19937 rng(66);
    std::uniform_real_distribution<double> step_mm(-200, 200);  // < gate/2 = 250
    std::vector<Vec3> centers = {Vec3(1500, 1500, 0), Vec3(8000, 1500, 0), Vec3(1500, 8000, 0)};
    for (int f = 0; f < 60; ++f) {
        std::vector<Detection3D> dets;
        std::vector<FusedReid> feats;
        for (Vec3& c : centers) {
            c += Vec3(step_mm(rng), step_mm(rng), 0) * 0.5;
            dets.push_back(detection_at(c));
            feats.push_back(invalid_feature());
        }
        const auto records = tracker.step(f, dets, feats);
        REQUIRE(records.size() == 3);
        for (size_t i = 0; i < 3; ++i) CHECK(records[i].track_id == int(i) + 1);
    }
}

// property: identical input streams give byte-identical record streams.
TEST_CASE("property: tracker runs are deterministic") {
    auto run = [] {
        Tracker tracker;
        std::string dump;
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> pos(0, 9000);
        for (int f = 0; f < 30; ++f) {
            std::vector<Detection3D> dets;
            std::vector<FusedReid> feats;
            for (int i = 0; i < 3; ++i) {
                dets.push_back(detection_at(Vec3(pos(rng), pos(rng), 0)));
                feats.push_back(i % 2 ? feature(i) : invalid_feature());
            }
            for (const TrackRecord& r : tracker.step(f, dets, feats))
                dump += track_record_to_json(r) + "\n";
        }
        return dump;
    };
    CHECK(run() == run());
}

TEST_CASE("track record JSONL round-trip preserves all fields") {
    TrackRecord rec;
    rec.frame = 17;
    rec.track_id = 4;
    rec.confidence = 0.625f;
    for (int j = 0; j < kNumJoints; ++j) rec.pose.joints[j] = Vec3(j * 1.5, -j * 2.25, j * 0.125);
    const TrackRecord back = track_record_from_json(track_record_to_json(rec));
    CHECK(back.frame == rec.frame);
    CHECK(back.track_id == rec.track_id);
    CHECK(back.confidence == rec.confidence);
    for (int j = 0; j < kNumJoints; ++j) CHECK((back.pose.joints[j] - rec.pose.joints[j]).norm() == 0);

    const std::string path = "/tmp/voxeltrack_test_records_" + std::to_string(::getpid());
    save_track_records(path, {rec, rec});
    const auto loaded = load_track_records(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[1].track_id == 4);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_track_records("/nonexistent/records.jsonl"), std::runtime_error);
}
