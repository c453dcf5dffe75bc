#pragma once

// Sliding-window optimization over the A-C graph. Each new frame t runs:
//   1. associate the new states with their active sets: each child takes its best
//      candidate at or above C_thre as a clear link, otherwise every candidate above
//      A_thre as an ambiguous one,
//   2. re-score every Ambiguous state of the window against its parents, dropping
//      weak parents and promoting a unique determined one,
//   3. resolve the oldest window frame with a Hungarian assignment and freeze it.
// At end of stream the window shrinks one frame at a time until everything is Clear.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "acmot/ac_graph.hpp"
#include "acmot/affinity.hpp"
#include "acmot/assignment.hpp"
#include "acmot/types.hpp"

namespace acmot {

struct TrackerConfig {
    int window_length = 25;
    AffinityConfig affinity;
    int min_track_length = 2;
    std::uint64_t seed = 0;  // reserved; the tracker is deterministic

    void validate() const {
        if (window_length < 1) throw PreconditionError("window length must be >= 1");
        if (min_track_length < 1) throw PreconditionError("min track length must be >= 1");
        affinity.validate();
    }

    GraphConfig graph_config() const { return {window_length, affinity.c_thre, affinity.a_thre}; }
};

struct Association {
    StateId child;
    StateId parent;
    double score = 0.0;
};

/// Keeps, per child, only its best clear candidate (ties to the lower parent id), or
/// every ambiguous candidate when none reaches `c_thre`. Candidates <= `a_thre` drop.
/// Output is sorted by (child, parent).
inline std::vector<Association> reduce_associations(std::vector<Association> batch, double c_thre,
                                                    double a_thre) {
    std::sort(batch.begin(), batch.end(), [](const Association& a, const Association& b) {
        return std::pair(a.child, a.parent) < std::pair(b.child, b.parent);
    });
    std::vector<Association> out;
    for (std::size_t i = 0; i < batch.size();) {
        std::size_t j = i;
        const Association* best = nullptr;
        for (; j < batch.size() && batch[j].child == batch[i].child; ++j)
            if (batch[j].score >= c_thre && (!best || batch[j].score > best->score)) best = &batch[j];
        if (best) out.push_back(*best);
        else
            for (std::size_t k = i; k < j; ++k)
                if (batch[k].score > a_thre) out.push_back(batch[k]);
        i = j;
    }
    return out;
}

/// Applies reduced associations in order; ids are resolved through merges first.
inline void apply_associations(ACGraph& g, const std::vector<Association>& batch, double c_thre) {
    for (const auto& a : batch) {
        const StateId child = g.resolve(a.child);
        const StateId parent = g.resolve(a.parent);
        if (child == parent || g.node(parent).frame >= g.node(child).frame) continue;
        if (a.score >= c_thre) g.connect_clear(child, parent, a.score);
        else g.connect_ambiguous(child, parent, a.score);
    }
}

/// Window length covering `delay_seconds` of video.
inline int window_for_frame_rate(double frame_rate, double delay_seconds = 1.0) {
    if (!(frame_rate > 0.0)) throw PreconditionError("frame rate must be > 0");
    return std::max(1, static_cast<int>(std::lround(frame_rate * delay_seconds)));
}

struct TrackEntry {
    FrameIndex frame = 0;
    BBox bbox;
    bool interpolated = false;

    bool operator==(const TrackEntry&) const = default;
};

struct Track {
    int id = 0;
    std::vector<TrackEntry> entries;
    std::vector<StateId> states;  // member states, in frame order

    bool operator==(const Track& o) const { return id == o.id && entries == o.entries; }
};

struct TrackSet {
    std::vector<Track> tracks;

    bool empty() const { return tracks.empty(); }
    bool operator==(const TrackSet&) const = default;
};

using DetectionsByFrame = std::map<FrameIndex, std::vector<Observation>>;

struct EnergyPoint {
    FrameIndex frame = 0;
    double energy = 0.0;
};

/// E = -sum over live states (frame <= through) of their best parent affinity.
inline double energy(const ACGraph& graph, std::optional<FrameIndex> through = std::nullopt) {
    double e = 0.0;
    const FrameIndex last = through.value_or(graph.latest_frame());
    for (FrameIndex f = 1; f <= last; ++f) {
        for (StateId s : graph.frame_states(f)) {
            const auto& n = graph.node(s);
            if (n.merged() || n.parents.empty()) continue;
            double best = n.parents.front().score;
            for (const auto& link : n.parents) best = std::max(best, link.score);
            e -= best;
        }
    }
    return e;
}

/// Best-parent contribution of one state to the energy (0 when parentless).
inline double energy_contribution(const ACGraph& graph, StateId s) {
    const auto& n = graph.node(s);
    if (n.merged() || n.parents.empty()) return 0.0;
    double best = n.parents.front().score;
    for (const auto& link : n.parents) best = std::max(best, link.score);
    return -best;
}

class SlidingWindowTracker {
public:
    /// One Step-2 drop/promote pass on a single Ambiguous state, after re-scoring.
    struct ShrinkPass {
        StateId state;
        double energy_before = 0.0;  // whole-graph energy, after re-scoring
        double energy_after = 0.0;
        double contribution_before = 0.0;
        double contribution_after = 0.0;
        bool dropped_all = false;
        bool promoted = false;
    };

    explicit SlidingWindowTracker(TrackerConfig cfg)
        : cfg_((cfg.validate(), cfg)), graph_(cfg_.graph_config()), model_(cfg_.affinity) {
        graph_.set_scorer(model_.scorer());
    }

    SlidingWindowTracker(const SlidingWindowTracker&) = delete;
    SlidingWindowTracker& operator=(const SlidingWindowTracker&) = delete;

    const TrackerConfig& config() const { return cfg_; }
    const ACGraph& graph() const { return graph_; }
    AffinityModel& model() { return model_; }
    FrameIndex current_frame() const { return current_; }

    /// Optional observer of every Step-2 pass.
    std::function<void(const ShrinkPass&)> on_shrink_pass;

    /// Ingests frame `frame` (must be current_frame() + 1) and runs Steps 1-3.
    std::vector<StateId> step_frame(FrameIndex frame, std::span<const Observation> detections) {
        if (frame != current_ + 1) throw PreconditionError("step_frame: frames must be consecutive");
        for (const auto& d : detections)
            if (d.frame != frame) throw PreconditionError("step_frame: detection frame does not match");
        current_ = frame;
        graph_.begin_frame(frame);

        std::vector<StateId> added;
        added.reserve(detections.size());
        for (const auto& d : detections) added.push_back(graph_.add_state(d));

        associate(added);
        shrink();
        while (graph_.finalized_through() < current_ - cfg_.window_length + 1) finalize_frame();
        return added;
    }

    /// Resolves the oldest unfinalized frame with a Hungarian assignment and freezes it.
    void finalize_frame() {
        const FrameIndex f = graph_.finalized_through() + 1;
        if (f > current_) throw PreconditionError("finalize_frame: nothing left to finalize");
        const CostMatrix m = build_cost_matrix(graph_, f, cfg_.affinity.a_thre);
        if (!m.rows.empty()) {
            const Assignment asg = hungarian(m.cost);
            for (std::size_t i = 0; i < m.rows.size(); ++i) {
                const StateId child = graph_.resolve(m.rows[i]);
                const auto& n = graph_.node(child);
                if (n.clarity == Clarity::Clear) continue;
                const auto col = static_cast<std::size_t>(asg.row_to_col[i]);
                if (m.is_birth(col)) {
                    graph_.strip_parents(child);
                    continue;
                }
                const StateId parent = m.parents[col];
                if (const ParentLink* link = n.find_parent(parent)) graph_.connect_clear(child, parent, link->score);
            }
        }
        for (StateId s : graph_.frame_states(f)) {
            const auto& n = graph_.node(s);
            if (n.merged()) continue;
            if (n.clarity == Clarity::Ambiguous) {
                ++forced_births_;
                graph_.strip_parents(s);
            }
        }
        graph_.advance_frontier(f);
        // Parents of the frozen frame are frozen too: record their final affinity.
        for (StateId s : graph_.frame_states(f)) {
            if (graph_.node(s).merged()) continue;
            if (auto fa = graph_.father(s)) graph_.set_link_score(s, *fa, model_.combined_affinity(graph_, s, *fa).total);
        }
    }

    /// End of stream: shrink the window until every frame is finalized.
    void flush() {
        while (graph_.finalized_through() < current_) finalize_frame();
    }

    /// Ambiguous states that survived an assignment (should stay 0).
    int forced_births() const { return forced_births_; }

    TrackSet extract_tracks() const {
        for (FrameIndex f = 1; f <= graph_.latest_frame(); ++f)
            for (StateId s : graph_.frame_states(f))
                if (!graph_.node(s).merged() && graph_.node(s).clarity == Clarity::Ambiguous)
                    throw PreconditionError("extract_tracks: graph still has ambiguous states (flush first)");
        TrackSet out;
        int next_id = 1;
        for (FrameIndex f = 1; f <= graph_.latest_frame(); ++f) {
            for (StateId head : graph_.frame_states(f)) {
                const auto& h = graph_.node(head);
                if (h.merged() || !h.parents.empty()) continue;
                std::vector<StateId> members{head};
                while (auto c = graph_.clear_child(members.back())) members.push_back(*c);
                if (static_cast<int>(members.size()) < cfg_.min_track_length) continue;
                out.tracks.push_back(make_track(next_id++, members));
            }
        }
        return out;
    }

private:
    Track make_track(int id, const std::vector<StateId>& members) const {
        Track t;
        t.id = id;
        t.states = members;
        for (std::size_t k = 0; k < members.size(); ++k) {
            const auto& n = graph_.node(members[k]);
            if (k > 0) {
                const auto& prev = graph_.node(members[k - 1]);
                const int gap = n.frame - prev.frame;
                for (int g = 1; g < gap; ++g) {
                    const double w = static_cast<double>(g) / gap;
                    const BBox& a = prev.obs.bbox;
                    const BBox& b = n.obs.bbox;
                    t.entries.push_back({prev.frame + g,
                                         {a.left + w * (b.left - a.left), a.top + w * (b.top - a.top),
                                          a.width + w * (b.width - a.width), a.height + w * (b.height - a.height)},
                                         true});
                }
            }
            t.entries.push_back({n.frame, n.obs.bbox, false});
        }
        return t;
    }

    void associate(const std::vector<StateId>& added) {
        // Score the whole batch against the pre-batch graph, then apply.
        std::vector<Association> batch;
        for (StateId id : added)
            for (StateId p : graph_.init_active_set(id))
                batch.push_back({id, p, model_.combined_affinity(graph_, id, p).total});
        apply_associations(graph_, reduce_associations(batch, cfg_.affinity.c_thre, cfg_.affinity.a_thre),
                           cfg_.affinity.c_thre);
    }

    void shrink() {
        const double c_thre = cfg_.affinity.c_thre;
        const double a_thre = cfg_.affinity.a_thre;
        for (FrameIndex f = graph_.finalized_through() + 1; f <= current_; ++f) {
            const std::vector<StateId> states = graph_.frame_states(f);
            for (StateId s : states) {
                if (graph_.node(s).merged() || graph_.node(s).clarity != Clarity::Ambiguous) continue;
                const std::vector<ParentLink> parents = graph_.node(s).parents;
                for (const auto& link : parents)
                    graph_.set_link_score(s, link.id, model_.combined_affinity(graph_, s, link.id).total);

                ShrinkPass pass;
                pass.state = s;
                if (on_shrink_pass) {
                    pass.energy_before = energy(graph_);
                    pass.contribution_before = energy_contribution(graph_, s);
                }
                std::vector<StateId> weak;
                for (const auto& link : graph_.node(s).parents)
                    if (link.score <= a_thre) weak.push_back(link.id);
                for (StateId p : weak) {
                    const auto& n = graph_.node(s);
                    if (n.merged() || n.clarity != Clarity::Ambiguous || !n.find_parent(p)) break;
                    graph_.disconnect(s, p);
                }
                pass.dropped_all = graph_.node(s).parents.empty();
                const auto& n = graph_.node(s);
                if (!n.merged() && n.clarity == Clarity::Ambiguous) {
                    int strong = 0;
                    ParentLink best{};
                    for (const auto& link : n.parents) {
                        if (link.score >= c_thre) {
                            ++strong;
                            best = link;
                        }
                    }
                    if (strong == 1) {
                        graph_.connect_clear(s, best.id, best.score);
                        pass.promoted = true;
                    }
                }
                if (on_shrink_pass) {
                    pass.energy_after = energy(graph_);
                    pass.contribution_after = graph_.node(s).merged() ? 0.0 : energy_contribution(graph_, s);
                    on_shrink_pass(pass);
                }
            }
        }
    }

    TrackerConfig cfg_;
    ACGraph graph_;
    AffinityModel model_;
    FrameIndex current_ = 0;
    int forced_births_ = 0;
};

struct RunResult {
    TrackSet tracks;
    std::vector<EnergyPoint> energy_trace;  // frame 0, then after each frame; last row includes the flush
    double final_energy = 0.0;
    int forced_births = 0;
};

/// Runs frames 1..max(last_frame, newest detection frame) and flushes.
inline RunResult run_sequence(const DetectionsByFrame& detections, const TrackerConfig& cfg, FrameIndex last_frame = 0) {
    SlidingWindowTracker tracker(cfg);
    FrameIndex end = last_frame;
    if (!detections.empty()) {
        if (detections.begin()->first < 1) throw PreconditionError("run_sequence: frame indices start at 1");
        end = std::max(end, detections.rbegin()->first);
    }
    RunResult out;
    out.energy_trace.push_back({0, 0.0});
    static const std::vector<Observation> none;
    for (FrameIndex f = 1; f <= end; ++f) {
        auto it = detections.find(f);
        tracker.step_frame(f, it == detections.end() ? std::span<const Observation>(none)
                                                     : std::span<const Observation>(it->second));
        if (f == end) tracker.flush();
        out.energy_trace.push_back({f, energy(tracker.graph())});
    }
    out.final_energy = energy(tracker.graph());
    out.tracks = tracker.extract_tracks();
    out.forced_births = tracker.forced_births();
    return out;
}

}  // namespace acmot
