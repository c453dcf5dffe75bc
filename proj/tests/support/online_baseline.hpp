#pragma once

// Frame-by-frame tracker written directly from the threshold rules, without the A-C graph.
// Each detection may only continue a track that ended on the previous frame:
//   - a candidate scoring >= C_thre is taken outright (best score, then lower index);
//   - tracks taken that way are off limits to everyone else;
//   - detections left with weak candidates (A_thre, C_thre) go through one Hungarian
//     round where starting a new track costs 1 - A_thre.
// Two detections claiming the same track with >= C_thre is reported as a conflict; the
// graph resolves those by merging, which this baseline does not model.

#include <algorithm>
#include <map>
#include <vector>

#include "acmot/affinity.hpp"
#include "acmot/assignment.hpp"
#include "acmot/optimizer.hpp"

namespace acmot::testing {

struct BaselineResult {
    TrackSet tracks;
    int conflicts = 0;
};

inline BaselineResult online_baseline(const DetectionsByFrame& detections, const AffinityConfig& cfg,
                                      int min_track_length, FrameIndex last_frame = 0) {
    struct Member {
        const Observation* obs;
        int order;  // global detection order, matches state creation order
    };
    struct Chain {
        std::vector<Member> members;
    };

    BaselineResult out;
    FrameIndex end = last_frame;
    if (!detections.empty()) end = std::max(end, detections.rbegin()->first);

    std::vector<Chain> chains;
    std::vector<int> open;  // chains whose last member is on the previous frame
    int order = 0;
    for (FrameIndex f = 1; f <= end; ++f) {
        auto it = detections.find(f);
        const std::vector<Observation> none;
        const std::vector<Observation>& dets = it == detections.end() ? none : it->second;

        // score[i][k]: detection i against open chain k
        std::vector<std::vector<double>> score(dets.size(), std::vector<double>(open.size(), 0.0));
        for (std::size_t k = 0; k < open.size(); ++k) {
            const auto& ch = chains[static_cast<std::size_t>(open[k])];
            KalmanTrack kt = KalmanTrack::start(*ch.members.front().obs, cfg);
            for (std::size_t m = 1; m < ch.members.size(); ++m) kt = kalman_update(kt, *ch.members[m].obs, cfg);
            std::vector<std::vector<double>> hists;
            std::vector<FrameIndex> frames;
            for (const auto& m : ch.members)
                if (m.obs->has_appearance()) {
                    hists.push_back(m.obs->appearance);
                    frames.push_back(m.obs->frame);
                }
            const auto pred = kalman_predict(kt, f, cfg);
            for (std::size_t i = 0; i < dets.size(); ++i) {
                const BBox& b = dets[i].bbox;
                const double mot = motion_affinity(pred.center(), Eigen::Vector2d(b.cx(), b.cy()), cfg.var_mot);
                const double shp = shape_affinity(pred.shape, Eigen::Vector2d(b.width, b.height), cfg.var_shp);
                double app = 1.0;
                if (dets[i].has_appearance() && !hists.empty())
                    app = bhattacharyya_coefficient(tracklet_appearance(hists, frames, cfg.discount), dets[i].appearance);
                score[i][k] = make_score(app, mot, shp).total;
            }
        }

        std::vector<int> pick(dets.size(), -1);  // chosen open index, -1 = none yet, -2 = lost a conflict
        std::vector<int> strong_claims(open.size(), 0);
        for (std::size_t i = 0; i < dets.size(); ++i) {
            for (std::size_t k = 0; k < open.size(); ++k) {
                if (score[i][k] < cfg.c_thre) continue;
                ++strong_claims[k];
                if (pick[i] < 0 || score[i][k] > score[i][static_cast<std::size_t>(pick[i])]) pick[i] = static_cast<int>(k);
            }
        }
        for (std::size_t k = 0; k < open.size(); ++k) {
            if (strong_claims[k] < 2) continue;
            ++out.conflicts;
            // Keep going with the best claimant only; the others start new tracks.
            int keep = -1;
            for (std::size_t i = 0; i < dets.size(); ++i)
                if (pick[i] == static_cast<int>(k) && (keep < 0 || score[i][k] > score[static_cast<std::size_t>(keep)][k]))
                    keep = static_cast<int>(i);
            for (std::size_t i = 0; i < dets.size(); ++i)
                if (pick[i] == static_cast<int>(k) && static_cast<int>(i) != keep) pick[i] = -2;
        }

        std::vector<std::size_t> weak_rows;
        std::vector<std::size_t> weak_cols;
        for (std::size_t i = 0; i < dets.size(); ++i) {
            if (pick[i] != -1) continue;
            bool any = false;
            for (std::size_t k = 0; k < open.size(); ++k)
                if (strong_claims[k] == 0 && score[i][k] > cfg.a_thre) {
                    any = true;
                    if (std::find(weak_cols.begin(), weak_cols.end(), k) == weak_cols.end()) weak_cols.push_back(k);
                }
            if (any) weak_rows.push_back(i);
        }
        if (!weak_rows.empty()) {
            // Columns ordered the way the tracker orders parents: by age of the candidate.
            std::sort(weak_cols.begin(), weak_cols.end(), [&](std::size_t a, std::size_t b) {
                return chains[static_cast<std::size_t>(open[a])].members.back().order <
                       chains[static_cast<std::size_t>(open[b])].members.back().order;
            });
            std::vector<std::vector<double>> cost(weak_rows.size(),
                                                  std::vector<double>(weak_cols.size() + weak_rows.size(), kInfeasible));
            for (std::size_t r = 0; r < weak_rows.size(); ++r) {
                for (std::size_t c = 0; c < weak_cols.size(); ++c) {
                    const double s = score[weak_rows[r]][weak_cols[c]];
                    if (s > cfg.a_thre) cost[r][c] = 1.0 - s;
                }
                cost[r][weak_cols.size() + r] = 1.0 - cfg.a_thre;
            }
            const Assignment asg = hungarian(cost);
            for (std::size_t r = 0; r < weak_rows.size(); ++r) {
                const auto col = static_cast<std::size_t>(asg.row_to_col[r]);
                if (col < weak_cols.size()) pick[weak_rows[r]] = static_cast<int>(weak_cols[col]);
            }
        }

        std::vector<int> next_open;
        for (std::size_t i = 0; i < dets.size(); ++i) {
            const Member m{&dets[i], order++};
            if (pick[i] >= 0) {
                const int chain = open[static_cast<std::size_t>(pick[i])];
                chains[static_cast<std::size_t>(chain)].members.push_back(m);
                next_open.push_back(chain);
            } else {
                chains.push_back({{m}});
                next_open.push_back(static_cast<int>(chains.size() - 1));
            }
        }
        open = std::move(next_open);
    }

    std::sort(chains.begin(), chains.end(),
              [](const Chain& a, const Chain& b) { return a.members.front().order < b.members.front().order; });
    int next_id = 1;
    for (const auto& ch : chains) {
        if (static_cast<int>(ch.members.size()) < min_track_length) continue;
        Track t;
        t.id = next_id++;
        for (const auto& m : ch.members) t.entries.push_back({m.obs->frame, m.obs->bbox, false});
        out.tracks.tracks.push_back(std::move(t));
    }
    return out;
}

}  // namespace acmot::testing
