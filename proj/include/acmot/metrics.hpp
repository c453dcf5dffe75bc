#pragma once

// CLEAR-MOT evaluation and the pairwise occlusion-length analysis of ground truth.

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "acmot/assignment.hpp"
#include "acmot/io_mot.hpp"
#include "acmot/types.hpp"

namespace acmot {

inline double iou(const BBox& a, const BBox& b) {
    if (!a.valid() || !b.valid()) throw PreconditionError("iou: non-positive box size");
    // Overlap measured from the offset between edges: coincident edges give exactly the side.
    auto overlap = [](double a0, double aw, double b0, double bw) {
        if (b0 < a0) {
            std::swap(a0, b0);
            std::swap(aw, bw);
        }
        const double d = b0 - a0;
        return std::min(aw, d + bw) - d;
    };
    const double w = overlap(a.left, a.width, b.left, b.width);
    const double h = overlap(a.top, a.height, b.top, b.height);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    const double inter = w * h;
    return std::min(1.0, inter / (a.area() + b.area() - inter));
}

struct IdBox {
    int id = 0;
    BBox bbox;
};

struct FrameMatch {
    std::vector<std::pair<int, int>> pairs;  // (gt id, hyp id)
    std::vector<double> ious;                // parallel to pairs
};

/// Keeps prior (gt -> hyp) matches that still overlap by iou_min, then matches the rest
/// with a maximum-cardinality, maximum-IoU assignment.
inline FrameMatch match_frame(const std::vector<IdBox>& gt, const std::vector<IdBox>& hyp,
                              const std::map<int, int>& prior, double iou_min = 0.5) {
    if (!(iou_min > 0.0 && iou_min < 1.0)) throw PreconditionError("match_frame: iou_min must be in (0,1)");
    FrameMatch out;
    std::vector<char> gt_used(gt.size(), 0), hyp_used(hyp.size(), 0);
    for (std::size_t g = 0; g < gt.size(); ++g) {
        auto it = prior.find(gt[g].id);
        if (it == prior.end()) continue;
        for (std::size_t h = 0; h < hyp.size(); ++h) {
            if (hyp_used[h] || hyp[h].id != it->second) continue;
            const double o = iou(gt[g].bbox, hyp[h].bbox);
            if (o >= iou_min) {
                gt_used[g] = hyp_used[h] = 1;
                out.pairs.emplace_back(gt[g].id, hyp[h].id);
                out.ious.push_back(o);
            }
            break;
        }
    }

    std::vector<std::size_t> rows, cols;
    for (std::size_t g = 0; g < gt.size(); ++g)
        if (!gt_used[g]) rows.push_back(g);
    for (std::size_t h = 0; h < hyp.size(); ++h)
        if (!hyp_used[h]) cols.push_back(h);
    if (rows.empty() || cols.empty()) return out;

    // A skip column per row priced above any possible gain keeps the match count maximal.
    const double skip = 1.0 + static_cast<double>(rows.size());
    std::vector<std::vector<double>> cost(rows.size(), std::vector<double>(cols.size() + rows.size(), kInfeasible));
    std::vector<std::vector<double>> overlap(rows.size(), std::vector<double>(cols.size(), 0.0));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            overlap[i][j] = iou(gt[rows[i]].bbox, hyp[cols[j]].bbox);
            if (overlap[i][j] >= iou_min) cost[i][j] = 1.0 - overlap[i][j];
        }
        cost[i][cols.size() + i] = skip;
    }
    const Assignment asg = hungarian(cost);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto j = static_cast<std::size_t>(asg.row_to_col[i]);
        if (j >= cols.size()) continue;
        out.pairs.emplace_back(gt[rows[i]].id, hyp[cols[j]].id);
        out.ious.push_back(overlap[i][j]);
    }
    return out;
}

struct EvalResult {
    double mota = 0.0;
    double motp = 0.0;
    int fp = 0;
    int fn = 0;
    int ids = 0;
    int fg = 0;
    int mt = 0;
    int ml = 0;
    int gt_total = 0;
    int matches = 0;
};

/// CLEAR-MOT over the union of frames of both inputs. Non-evaluable gt boxes are ignored.
inline EvalResult clear_mot(const LabeledTracks& gt, const LabeledTracks& hyp, double iou_min = 0.5) {
    std::map<FrameIndex, std::vector<IdBox>> gt_frames, hyp_frames;
    std::map<int, int> gt_len;
    for (const auto& [id, boxes] : gt.tracks)
        for (const auto& [f, b] : boxes)
            if (b.evaluable) {
                gt_frames[f].push_back({id, b.bbox});
                ++gt_len[id];
            }
    for (const auto& [id, boxes] : hyp.tracks)
        for (const auto& [f, b] : boxes) hyp_frames[f].push_back({id, b.bbox});

    EvalResult r;
    for (const auto& [id, n] : gt_len) r.gt_total += n;
    if (r.gt_total == 0) throw PreconditionError("clear_mot: ground truth has no evaluable boxes");

    std::set<FrameIndex> frames;
    for (const auto& [f, v] : gt_frames) frames.insert(f);
    for (const auto& [f, v] : hyp_frames) frames.insert(f);

    static const std::vector<IdBox> none;
    std::map<int, int> last_match;   // gt id -> hyp id of the latest match
    std::map<int, int> tracked;      // gt id -> matched frame count
    std::map<int, int> state;        // gt id -> 0 never tracked, 1 tracked, 2 lost after tracking
    double iou_sum = 0.0;
    for (FrameIndex f : frames) {
        auto gi = gt_frames.find(f);
        auto hi = hyp_frames.find(f);
        const auto& g = gi == gt_frames.end() ? none : gi->second;
        const auto& h = hi == hyp_frames.end() ? none : hi->second;
        const FrameMatch m = match_frame(g, h, last_match, iou_min);
        const auto matched = static_cast<int>(m.pairs.size());
        r.fp += static_cast<int>(h.size()) - matched;
        r.fn += static_cast<int>(g.size()) - matched;
        r.matches += matched;
        std::set<int> matched_gt;
        for (std::size_t k = 0; k < m.pairs.size(); ++k) {
            const auto [gid, hid] = m.pairs[k];
            auto it = last_match.find(gid);
            if (it != last_match.end() && it->second != hid) ++r.ids;
            last_match[gid] = hid;
            iou_sum += m.ious[k];
            ++tracked[gid];
            matched_gt.insert(gid);
        }
        for (const auto& box : g) {
            int& s = state[box.id];
            if (matched_gt.contains(box.id)) {
                if (s == 2) ++r.fg;
                s = 1;
            } else if (s == 1) {
                s = 2;
            }
        }
    }
    for (const auto& [id, n] : gt_len) {
        const double ratio = static_cast<double>(tracked[id]) / n;
        if (ratio >= 0.8) ++r.mt;
        if (ratio <= 0.2) ++r.ml;
    }
    r.mota = 1.0 - static_cast<double>(r.fp + r.fn + r.ids) / r.gt_total;
    r.motp = r.matches > 0 ? iou_sum / r.matches : 0.0;
    return r;
}

/// Run length (frames) -> number of maximal runs in which a pair of gt tracks overlaps
/// with IoU > overlap_min in consecutive frames.
inline std::map<int, int> occlusion_length_histogram(const LabeledTracks& gt, double overlap_min = 0.4) {
    std::map<int, int> hist;
    for (auto a = gt.tracks.begin(); a != gt.tracks.end(); ++a) {
        for (auto b = std::next(a); b != gt.tracks.end(); ++b) {
            int run = 0;
            FrameIndex prev = 0;
            for (const auto& [f, box] : a->second) {
                auto other = b->second.find(f);
                const bool over = other != b->second.end() && iou(box.bbox, other->second.bbox) > overlap_min;
                if (over && run > 0 && f == prev + 1) {
                    ++run;
                } else {
                    if (run > 0) ++hist[run];
                    run = over ? 1 : 0;
                }
                if (over) prev = f;
            }
            if (run > 0) ++hist[run];
        }
    }
    return hist;
}

}  // namespace acmot
