#include "voxeltrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "voxeltrack/tracker.hpp"

namespace voxeltrack {

PcpResult pcp3d(const std::vector<EvalFrame>& frames,
                const std::vector<std::pair<int, int>>& limbs, double threshold_fraction) {
    if (limbs.empty()) throw std::invalid_argument("pcp3d: limb list is empty");
    std::map<int, std::pair<long, long>> counts;  // actor -> (correct, total)
    for (const EvalFrame& frame : frames) {
        for (const EvalPose& gt : frame.gt) {
            auto& [correct, total] = counts[gt.id];
            total += long(limbs.size());
            if (frame.pred.empty()) continue;
            const EvalPose* closest = nullptr;
            double best = std::numeric_limits<double>::max();
            for (const EvalPose& pred : frame.pred) {
                const double d = mean_joint_distance(gt.pose, pred.pose);
                if (d < best) {
                    best = d;
                    closest = &pred;
                }
            }
            for (const auto& [a, b] : limbs) {
                const double limb_len = (gt.pose.joints[a] - gt.pose.joints[b]).norm();
                const double ea = (gt.pose.joints[a] - closest->pose.joints[a]).norm();
                const double eb = (gt.pose.joints[b] - closest->pose.joints[b]).norm();
                if (ea <= threshold_fraction * limb_len && eb <= threshold_fraction * limb_len)
                    ++correct;
            }
        }
    }
    PcpResult out;
    double sum = 0;
    for (const auto& [actor, c] : counts) {
        const double frac = c.second ? double(c.first) / double(c.second) : 0.0;
        out.per_actor[actor] = frac;
        sum += frac;
    }
    out.average = counts.empty() ? 0.0 : sum / double(counts.size());
    return out;
}

ApResult ap_and_mpjpe(const std::vector<EvalFrame>& frames, const std::vector<double>& k_list_mm) {
    ApResult out;
    if (k_list_mm.empty()) return out;

    struct PredRef {
        int frame_index;
        int pred_index;
        float confidence;
    };
    std::vector<PredRef> preds;
    long total_gt = 0;
    for (int fi = 0; fi < int(frames.size()); ++fi) {
        total_gt += long(frames[fi].gt.size());
        for (int pi = 0; pi < int(frames[fi].pred.size()); ++pi)
            preds.push_back({fi, pi, frames[fi].pred[pi].confidence});
    }
    std::stable_sort(preds.begin(), preds.end(), [](const PredRef& a, const PredRef& b) {
        return a.confidence > b.confidence;
    });

    const double k_max = *std::max_element(k_list_mm.begin(), k_list_mm.end());
    for (const double k : k_list_mm) {
        std::vector<std::set<int>> matched_gt(frames.size());
        long tp = 0, fp = 0;
        double mpjpe_sum = 0;
        std::vector<double> precision, recall;
        for (const PredRef& p : preds) {
            const EvalFrame& frame = frames[size_t(p.frame_index)];
            const EvalPose& pred = frame.pred[size_t(p.pred_index)];
            int best_gt = -1;
            double best_d = std::numeric_limits<double>::max();
            for (int gi = 0; gi < int(frame.gt.size()); ++gi) {
                if (matched_gt[size_t(p.frame_index)].count(gi)) continue;
                const double d = mean_joint_distance(frame.gt[size_t(gi)].pose, pred.pose);
                if (d < best_d) {
                    best_d = d;
                    best_gt = gi;
                }
            }
            if (best_gt >= 0 && best_d < k) {
                matched_gt[size_t(p.frame_index)].insert(best_gt);
                ++tp;
                mpjpe_sum += best_d;
            } else {
                ++fp;
            }
            precision.push_back(double(tp) / double(tp + fp));
            recall.push_back(total_gt ? double(tp) / double(total_gt) : 0.0);
        }

        // all-points interpolated AP: integrate the monotone precision
        // envelope over recall
        double ap = 0;
        double prev_recall = 0;
        for (size_t i = 0; i < precision.size(); ++i) {
            double max_p = 0;
            for (size_t j = i; j < precision.size(); ++j) max_p = std::max(max_p, precision[j]);
            ap += (recall[i] - prev_recall) * max_p;
            prev_recall = recall[i];
        }
        out.ap[k] = ap;
        if (k == k_max) {
            out.mpjpe_mm = tp ? mpjpe_sum / double(tp) : 0.0;
            out.matched = int(tp);
        }
    }
    return out;
}

MotResult mot_per_joint(const std::vector<EvalFrame>& frames, double threshold_mm) {
    if (frames.empty()) throw std::invalid_argument("mot_per_joint: empty sequence");
    MotResult out;
    out.mota_per_joint.resize(kNumJoints, 0.0);
    out.idf1_per_joint.resize(kNumJoints, 0.0);
    out.idsw_per_joint.resize(kNumJoints, 0);

    for (int j = 0; j < kNumJoints; ++j) {
        long fn = 0, fp = 0, total_gt = 0;
        int idsw = 0;
        std::map<int, int> last_match;  // gt id -> last matched pred id
        std::map<int, long> gt_presence, pred_presence;
        std::map<std::pair<int, int>, long> overlap;  // (gt id, pred id) -> gated co-frames

        for (const EvalFrame& frame : frames) {
            total_gt += long(frame.gt.size());
            for (const EvalPose& g : frame.gt) ++gt_presence[g.id];
            for (const EvalPose& p : frame.pred) ++pred_presence[p.id];
            for (const EvalPose& g : frame.gt)
                for (const EvalPose& p : frame.pred)
                    if ((g.pose.joints[j] - p.pose.joints[j]).norm() <= threshold_mm)
                        ++overlap[{g.id, p.id}];

            // CLEAR matching: keep last frame's correspondence when still
            // within the gate, then Hungarian on the remainder.
            std::vector<int> gt_match(frame.gt.size(), -1);
            std::vector<char> pred_taken(frame.pred.size(), false);
            for (size_t gi = 0; gi < frame.gt.size(); ++gi) {
                const auto it = last_match.find(frame.gt[gi].id);
                if (it == last_match.end()) continue;
                for (size_t pi = 0; pi < frame.pred.size(); ++pi) {
                    if (pred_taken[pi] || frame.pred[pi].id != it->second) continue;
                    const double d =
                        (frame.gt[gi].pose.joints[j] - frame.pred[pi].pose.joints[j]).norm();
                    if (d <= threshold_mm) {
                        gt_match[gi] = int(pi);
                        pred_taken[pi] = true;
                    }
                    break;
                }
            }
            std::vector<int> free_gt, free_pred;
            for (size_t gi = 0; gi < frame.gt.size(); ++gi)
                if (gt_match[gi] < 0) free_gt.push_back(int(gi));
            for (size_t pi = 0; pi < frame.pred.size(); ++pi)
                if (!pred_taken[pi]) free_pred.push_back(int(pi));
            if (!free_gt.empty() && !free_pred.empty()) {
                std::vector<std::vector<double>> cost(free_gt.size(),
                                                      std::vector<double>(free_pred.size()));
                for (size_t a = 0; a < free_gt.size(); ++a)
                    for (size_t b = 0; b < free_pred.size(); ++b) {
                        const double d = (frame.gt[size_t(free_gt[a])].pose.joints[j] -
                                          frame.pred[size_t(free_pred[b])].pose.joints[j])
                                             .norm();
                        cost[a][b] = d <= threshold_mm ? d : kForbiddenCost;
                    }
                const Assignment assignment = solve_assignment(cost);
                for (const auto& [a, b] : assignment.matches)
                    gt_match[size_t(free_gt[size_t(a)])] = free_pred[size_t(b)];
            }

            long matched = 0;
            for (size_t gi = 0; gi < frame.gt.size(); ++gi) {
                if (gt_match[gi] < 0) continue;
                ++matched;
                const int gt_id = frame.gt[gi].id;
                const int pred_id = frame.pred[size_t(gt_match[gi])].id;
                const auto it = last_match.find(gt_id);
                if (it != last_match.end() && it->second != pred_id) ++idsw;
                last_match[gt_id] = pred_id;
            }
            fn += long(frame.gt.size()) - matched;
            fp += long(frame.pred.size()) - matched;
        }

        out.mota_per_joint[size_t(j)] =
            total_gt ? 1.0 - double(fn + fp + idsw) / double(total_gt) : 0.0;
        out.idsw_per_joint[size_t(j)] = idsw;

        // IDF1: bipartite matching of GT identities to prediction identities
        // maximizing total gated co-frames.
        std::vector<int> gt_ids, pred_ids;
        for (const auto& [id, n] : gt_presence) gt_ids.push_back(id);
        for (const auto& [id, n] : pred_presence) pred_ids.push_back(id);
        long idtp = 0;
        if (!gt_ids.empty() && !pred_ids.empty()) {
            std::vector<std::vector<double>> cost(gt_ids.size(),
                                                  std::vector<double>(pred_ids.size(), 0.0));
            for (size_t a = 0; a < gt_ids.size(); ++a)
                for (size_t b = 0; b < pred_ids.size(); ++b) {
                    const auto it = overlap.find({gt_ids[a], pred_ids[b]});
                    cost[a][b] = it == overlap.end() ? 0.0 : -double(it->second);
                }
            const Assignment assignment = solve_assignment(cost);
            for (const auto& [a, b] : assignment.matches) idtp += long(-cost[size_t(a)][size_t(b)]);
        }
        long gt_total = 0, pred_total = 0;
        for (const auto& [id, n] : gt_presence) gt_total += n;
        for (const auto& [id, n] : pred_presence) pred_total += n;
        out.idf1_per_joint[size_t(j)] =
            (gt_total + pred_total) ? 2.0 * double(idtp) / double(gt_total + pred_total) : 0.0;
    }

    for (int j = 0; j < kNumJoints; ++j) {
        out.mota += out.mota_per_joint[size_t(j)] / kNumJoints;
        out.idf1 += out.idf1_per_joint[size_t(j)] / kNumJoints;
        out.id_switches += out.idsw_per_joint[size_t(j)];
    }
    return out;
}

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    for (const auto& [actor, v] : pcp.per_actor)
        j["pcp3d"]["actor_" + std::to_string(actor)] = v * 100.0;
    j["pcp3d"]["average"] = pcp.average * 100.0;
    for (const auto& [k, v] : ap.ap) {
        std::ostringstream key;
        key << "ap_" << k;
        j["ap"][key.str()] = v * 100.0;
    }
    j["mpjpe_mm"] = ap.mpjpe_mm;
    j["mota"] = mot.mota;
    j["idf1"] = mot.idf1;
    j["id_switches"] = mot.id_switches;
    return j.dump(2);
}

std::string MetricsReport::to_table() const {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << "Actor";
    for (const auto& [actor, v] : pcp.per_actor) os << "  " << actor;
    os << "  Average PCP3D  MOTA  ID Switch  IDF1\n";
    os << "PCP3D";
    for (const auto& [actor, v] : pcp.per_actor) os << "  " << v * 100.0;
    os << "  " << pcp.average * 100.0 << "  " << mot.mota << "  " << mot.id_switches << "  "
       << mot.idf1 << "\n\n";
    os << "K(mm)  AP\n";
    for (const auto& [k, v] : ap.ap) os << k << "  " << v * 100.0 << "\n";
    os << "MPJPE  " << ap.mpjpe_mm << " mm\n";
    return os.str();
}

MetricsReport evaluate(const std::vector<EvalFrame>& frames, const std::vector<double>& k_list_mm,
                       double mot_threshold_mm, double pcp_threshold) {
    MetricsReport report;
    report.pcp = pcp3d(frames, limb_pairs(), pcp_threshold);
    report.ap = ap_and_mpjpe(frames, k_list_mm);
    report.mot = mot_per_joint(frames, mot_threshold_mm);
    return report;
}

}  // namespace voxeltrack
