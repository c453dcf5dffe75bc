#pragma once

// Ambiguity-Clearness graph: one state per detection, directed parent -> child
// associations, and the structural actions that keep it conflict-free.
//
// Terminology used below:
//   clear child      the (at most one) Clear child of a node; its only parent is that node
//   father           the single parent of a Clear node
//   frontier F       last finalized frame; nodes in frames <= F are Clear and their
//                    parent lists never change again
//   window           frames > F

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "acmot/types.hpp"

namespace acmot {

struct ParentLink {
    StateId id;
    double score = 0.0;
};

struct StateNode {
    StateId id;
    FrameIndex frame = 0;
    Observation obs;
    std::vector<ParentLink> parents;  // sorted by id
    std::vector<StateId> children;    // sorted by id
    Clarity clarity = Clarity::Clear;
    std::optional<StateId> merged_into;

    bool merged() const { return merged_into.has_value(); }

    const ParentLink* find_parent(StateId p) const {
        for (const auto& link : parents)
            if (link.id == p) return &link;
        return nullptr;
    }
};

struct GraphConfig {
    int window_length = 25;
    double c_thre = 0.5;
    double a_thre = 0.1;
};

class ACGraph {
public:
    /// Affinity of a (child, parent) pair evaluated against the current graph.
    using Scorer = std::function<double(const ACGraph&, StateId child, StateId parent)>;

    explicit ACGraph(GraphConfig cfg = {}) : cfg_(cfg) {
        if (cfg_.window_length < 1) throw PreconditionError("window length must be >= 1");
        if (!(cfg_.a_thre >= 0.0 && cfg_.a_thre < cfg_.c_thre && cfg_.c_thre <= 1.0))
            throw PreconditionError("thresholds must satisfy 0 <= a_thre < c_thre <= 1");
    }

    /// Links created without an explicit score (re-homing, merges) are scored by this
    /// callback. Without one every such link scores 1.
    void set_scorer(Scorer scorer) { scorer_ = std::move(scorer); }

    // ---- queries -------------------------------------------------------------------

    const GraphConfig& config() const { return cfg_; }
    int window_length() const { return cfg_.window_length; }
    FrameIndex latest_frame() const { return latest_frame_; }
    FrameIndex finalized_through() const { return frontier_; }
    std::size_t size() const { return nodes_.size(); }

    const StateNode& node(StateId id) const {
        check_id(id);
        return nodes_[id.value];
    }

    const std::vector<StateId>& frame_states(FrameIndex f) const {
        static const std::vector<StateId> empty;
        if (f < 1 || static_cast<std::size_t>(f) >= frames_.size()) return empty;
        return frames_[static_cast<std::size_t>(f)];
    }

    /// Follows merged_into links to the live state that absorbed `id`.
    StateId resolve(StateId id) const {
        check_id(id);
        while (nodes_[id.value].merged_into) id = *nodes_[id.value].merged_into;
        return id;
    }

    bool is_frozen(StateId id) const { return node(id).frame <= frontier_; }

    /// Rule-based clarity: Clear iff parentless, or a single parent scoring >= C_thre.
    Clarity classify(StateId id) const {
        const auto& n = node(id);
        if (n.merged()) throw PreconditionError("classify: state is merged");
        if (n.parents.empty()) return Clarity::Clear;
        if (n.parents.size() == 1 && n.parents.front().score >= cfg_.c_thre) return Clarity::Clear;
        return Clarity::Ambiguous;
    }

    std::optional<StateId> clear_child(StateId id) const {
        for (StateId c : node(id).children)
            if (nodes_[c.value].clarity == Clarity::Clear) return c;
        return std::nullopt;
    }

    /// The single parent of a Clear node, if any.
    std::optional<StateId> father(StateId id) const {
        const auto& n = node(id);
        if (n.clarity != Clarity::Clear || n.parents.empty()) return std::nullopt;
        return n.parents.front().id;
    }

    /// Last node of the clear-child chain starting at `id` whose frame is <= `frame`.
    StateId latest_clear_descendant_before(StateId id, FrameIndex frame) const {
        if (node(id).merged()) throw PreconditionError("chain walk from a merged state");
        StateId cur = id;
        while (auto c = clear_child(cur)) {
            if (nodes_[c->value].frame > frame) break;
            cur = *c;
        }
        return cur;
    }

    /// Candidate parents for a state in the newest frame: unmerged states in frames
    /// [max(1, t - l, F), frame - 1] with no clear child, or a clear child after `frame`.
    std::vector<StateId> init_active_set(StateId id) const {
        const auto& n = node(id);
        if (n.merged()) throw PreconditionError("init_active_set: state is merged");
        if (n.frame != latest_frame_) throw PreconditionError("init_active_set: state is not in the latest frame");
        std::vector<StateId> out;
        const FrameIndex lo = std::max({1, latest_frame_ - cfg_.window_length, frontier_});
        for (FrameIndex f = lo; f < n.frame; ++f) {
            for (StateId s : frame_states(f)) {
                if (nodes_[s.value].merged()) continue;
                auto cc = clear_child(s);
                if (!cc || nodes_[cc->value].frame > n.frame) out.push_back(s);
            }
        }
        return out;
    }

    /// Number of unmerged states in the window (frames > F).
    std::size_t window_node_count() const {
        std::size_t count = 0;
        for (FrameIndex f = frontier_ + 1; f <= latest_frame_; ++f)
            for (StateId s : frame_states(f))
                if (!nodes_[s.value].merged()) ++count;
        return count;
    }

    /// Deepest nesting of connect procedure calls (merges included in the connect that
    /// triggered them) reached by the last top-level action.
    int last_action_depth() const { return last_depth_; }

    // ---- actions -------------------------------------------------------------------

    StateId add_state(Observation obs) {
        if (obs.frame < 1) throw PreconditionError("add_state: frame index must be >= 1");
        if (obs.frame < latest_frame_) throw PreconditionError("add_state: out-of-order frame");
        if (obs.frame <= frontier_) throw PreconditionError("add_state: frame already finalized");
        if (!obs.bbox.valid()) throw PreconditionError("add_state: non-positive box size");
        if (obs.has_appearance()) require_normalized(obs.appearance, "add_state");

        StateId id(static_cast<std::uint32_t>(nodes_.size()));
        StateNode n;
        n.id = id;
        n.frame = obs.frame;
        n.obs = std::move(obs);
        nodes_.push_back(std::move(n));
        if (frames_.size() <= static_cast<std::size_t>(nodes_.back().frame))
            frames_.resize(static_cast<std::size_t>(nodes_.back().frame) + 1);
        frames_[static_cast<std::size_t>(nodes_.back().frame)].push_back(id);
        latest_frame_ = nodes_.back().frame;
        last_depth_ = 0;
        return id;
    }

    /// Moves the latest frame forward without adding states (frames with no detections).
    void begin_frame(FrameIndex frame) {
        if (frame < latest_frame_) throw PreconditionError("begin_frame: out-of-order frame");
        latest_frame_ = frame;
    }

    /// Connects `child` under `parent` as an ambiguous association (terminates when the
    /// child already has a determined parent or the parent's clear chain already occupies
    /// child's frame).
    void connect_ambiguous(StateId child, StateId parent, std::optional<double> score = std::nullopt) {
        check_connect(child, parent, "connect_ambiguous");
        Action act(*this);
        connect_ambiguous_impl(child, parent, score);
    }

    /// Connects `child` into `parent`'s tracklet as a clear association.
    void connect_clear(StateId child, StateId parent, std::optional<double> score = std::nullopt) {
        check_connect(child, parent, "connect_clear");
        Action act(*this);
        connect_clear_impl(child, parent, score);
    }

    /// Moves every association of `absorbed` onto `survivor` and tombstones `absorbed`.
    void merge_states(StateId survivor, StateId absorbed) {
        const auto& s = node(survivor);
        const auto& a = node(absorbed);
        if (survivor == absorbed) throw PreconditionError("merge_states: survivor == absorbed");
        if (s.frame != a.frame) throw PreconditionError("merge_states: states are in different frames");
        if (s.merged() || a.merged()) throw PreconditionError("merge_states: state already merged");
        if (s.frame <= frontier_) throw PreconditionError("merge_states: frame is finalized");
        Action act(*this);
        merge_impl(survivor, absorbed);
    }

    /// Removes one association and reclassifies the child: a lone remaining parent at or
    /// above C_thre is promoted to a clear association.
    void disconnect(StateId child, StateId parent) {
        const auto& c = node(child);
        if (c.merged()) throw PreconditionError("disconnect: state is merged");
        if (!c.find_parent(parent)) throw PreconditionError("disconnect: no such association");
        if (c.frame <= frontier_) throw PreconditionError("disconnect: child frame is finalized");
        Action act(*this);
        const bool was_clear = c.clarity == Clarity::Clear;
        remove_edge(parent, child);
        auto& n = mut(child);
        if (was_clear || n.parents.empty()) {
            n.clarity = Clarity::Clear;
            return;
        }
        if (n.parents.size() == 1 && n.parents.front().score >= cfg_.c_thre) {
            const ParentLink lone = n.parents.front();
            remove_edge(lone.id, child);
            connect_clear_impl(child, lone.id, lone.score);
        }
    }

    /// Drops every parent of `child`, leaving it a parentless Clear state (a track birth).
    void strip_parents(StateId child) {
        const auto& c = node(child);
        if (c.merged()) throw PreconditionError("strip_parents: state is merged");
        if (c.frame <= frontier_) throw PreconditionError("strip_parents: frame is finalized");
        Action act(*this);
        remove_all_parents(child);
        mut(child).clarity = Clarity::Clear;
    }

    /// Overwrites the recorded affinity of an existing association. Not structural.
    void set_link_score(StateId child, StateId parent, double score) {
        for (auto& link : mut(child).parents) {
            if (link.id == parent) {
                link.score = score;
                return;
            }
        }
        throw PreconditionError("set_link_score: no such association");
    }

    /// Declares every frame <= `frame` final. All states there must already be Clear.
    void advance_frontier(FrameIndex frame) {
        if (frame < frontier_) throw PreconditionError("advance_frontier: frontier cannot move back");
        if (frame > latest_frame_) throw PreconditionError("advance_frontier: beyond latest frame");
        for (FrameIndex f = frontier_ + 1; f <= frame; ++f)
            for (StateId s : frame_states(f))
                if (!nodes_[s.value].merged() && nodes_[s.value].clarity != Clarity::Clear)
                    throw PreconditionError("advance_frontier: ambiguous state in frame " + std::to_string(f));
        frontier_ = frame;
    }

    // ---- audit ---------------------------------------------------------------------

    /// Every broken structural invariant, one message each. Empty means consistent.
    std::vector<std::string> validate() const {
        std::vector<std::string> out;
        auto report = [&](StateId id, const std::string& msg) {
            out.push_back("state " + std::to_string(id.value) + ": " + msg);
        };
        for (const auto& n : nodes_) {
            if (n.merged()) {
                if (!n.parents.empty() || !n.children.empty()) report(n.id, "merged state still has associations");
                continue;
            }
            for (std::size_t i = 0; i < n.parents.size(); ++i) {
                const auto& link = n.parents[i];
                if (i > 0 && !(n.parents[i - 1].id < link.id)) report(n.id, "parent list not sorted/unique");
                if (!link.id.valid() || link.id.value >= nodes_.size()) {
                    report(n.id, "dangling parent");
                    continue;
                }
                const auto& p = nodes_[link.id.value];
                if (p.merged()) report(n.id, "parent is merged");
                if (p.frame == n.frame) report(n.id, "same-frame association");
                else if (p.frame > n.frame) report(n.id, "parent is not in an earlier frame");
                if (!std::binary_search(p.children.begin(), p.children.end(), n.id))
                    report(n.id, "parent does not list this state as child");
            }
            int clear_children = 0;
            FrameIndex clear_child_frame = 0;
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                StateId cid = n.children[i];
                if (i > 0 && !(n.children[i - 1] < cid)) report(n.id, "child list not sorted/unique");
                if (!cid.valid() || cid.value >= nodes_.size()) {
                    report(n.id, "dangling child");
                    continue;
                }
                const auto& c = nodes_[cid.value];
                if (!c.find_parent(n.id)) report(n.id, "child does not list this state as parent");
                if (c.clarity == Clarity::Clear) {
                    ++clear_children;
                    clear_child_frame = c.frame;
                }
            }
            if (clear_children > 1) report(n.id, "more than one clear child");
            if (clear_children == 1) {
                for (StateId cid : n.children) {
                    const auto& c = nodes_[cid.value];
                    if (c.clarity == Clarity::Ambiguous && c.frame >= clear_child_frame)
                        report(n.id, "ambiguous child not before the clear child");
                }
            }
            if (n.clarity == Clarity::Clear && n.parents.size() > 1) report(n.id, "clear state with several parents");
            if (n.clarity == Clarity::Ambiguous && n.parents.empty()) report(n.id, "ambiguous state without parents");
            if (n.frame <= frontier_ && n.clarity != Clarity::Clear) report(n.id, "ambiguous state in finalized frame");
        }
        return out;
    }

    /// Deterministic text form: one line per state, sorted by (frame, id).
    std::string dump() const {
        std::vector<StateId> order;
        order.reserve(nodes_.size());
        for (const auto& n : nodes_) order.push_back(n.id);
        std::sort(order.begin(), order.end(), [&](StateId a, StateId b) {
            const auto& na = nodes_[a.value];
            const auto& nb = nodes_[b.value];
            return std::pair(na.frame, a) < std::pair(nb.frame, b);
        });
        std::ostringstream os;
        for (StateId id : order) {
            const auto& n = nodes_[id.value];
            os << id.value << ' ' << n.frame << ' ' << to_string(n.clarity) << " p=[";
            for (std::size_t i = 0; i < n.parents.size(); ++i) os << (i ? "," : "") << n.parents[i].id.value;
            os << "] c=[";
            for (std::size_t i = 0; i < n.children.size(); ++i) os << (i ? "," : "") << n.children[i].value;
            os << "] m=";
            // Merged states name their surviving representative, not the intermediate hop.
            if (n.merged_into) os << resolve(id).value;
            else os << '-';
            os << '\n';
        }
        return os.str();
    }

    /// Unchecked mutable access for fault-injection tests.
    StateNode& mutable_node_for_testing(StateId id) { return mut(id); }

private:
    // RAII scope of one public action: resets depth tracking and normalizes transient
    // parentless-Ambiguous states on exit.
    struct Action {
        ACGraph& g;
        explicit Action(ACGraph& graph) : g(graph) {
            g.depth_ = 0;
            g.last_depth_ = 0;
            g.touched_.clear();
        }
        ~Action() {
            for (StateId id : g.touched_) {
                auto& n = g.nodes_[id.value];
                if (!n.merged() && n.clarity == Clarity::Ambiguous && n.parents.empty()) n.clarity = Clarity::Clear;
            }
            g.touched_.clear();
        }
        Action(const Action&) = delete;
        Action& operator=(const Action&) = delete;
    };

    struct Depth {
        ACGraph& g;
        explicit Depth(ACGraph& graph) : g(graph) {
            if (++g.depth_ > g.last_depth_) g.last_depth_ = g.depth_;
            if (g.depth_ > kMaxDepth) throw std::logic_error("ACGraph: runaway recursion");
        }
        ~Depth() { --g.depth_; }
        Depth(const Depth&) = delete;
        Depth& operator=(const Depth&) = delete;
    };

    static constexpr int kMaxDepth = 20000;

    void check_id(StateId id) const {
        if (!id.valid() || id.value >= nodes_.size()) throw PreconditionError("unknown state id");
    }

    StateNode& mut(StateId id) {
        check_id(id);
        return nodes_[id.value];
    }

    void check_connect(StateId child, StateId parent, const char* what) const {
        const auto& c = node(child);
        const auto& p = node(parent);
        if (child == parent) throw PreconditionError(std::string(what) + ": child == parent");
        if (c.merged() || p.merged()) throw PreconditionError(std::string(what) + ": state is merged");
        if (p.frame >= c.frame) throw PreconditionError(std::string(what) + ": parent must be in an earlier frame");
        if (c.frame <= frontier_) throw PreconditionError(std::string(what) + ": child frame is finalized");
    }

    double score_of(StateId child, StateId parent) const { return scorer_ ? scorer_(*this, child, parent) : 1.0; }

    void add_edge(StateId parent, StateId child, double score) {
        auto& p = nodes_[parent.value];
        auto& c = nodes_[child.value];
        auto pos = std::lower_bound(p.children.begin(), p.children.end(), child);
        if (pos != p.children.end() && *pos == child) return;
        p.children.insert(pos, child);
        auto ppos = std::lower_bound(c.parents.begin(), c.parents.end(), parent,
                                     [](const ParentLink& l, StateId id) { return l.id < id; });
        c.parents.insert(ppos, ParentLink{parent, score});
    }

    void remove_edge(StateId parent, StateId child) {
        auto& p = nodes_[parent.value];
        auto& c = nodes_[child.value];
        std::erase(p.children, child);
        std::erase_if(c.parents, [&](const ParentLink& l) { return l.id == parent; });
        touched_.push_back(child);
    }

    void remove_all_parents(StateId child) {
        const auto parents = nodes_[child.value].parents;
        for (const auto& link : parents) remove_edge(link.id, child);
    }

    // The node reached from `start` by following fathers while Clear and inside the window.
    StateId window_root(StateId start) const {
        StateId cur = start;
        while (true) {
            auto f = father(cur);
            if (!f || nodes_[f->value].frame <= frontier_) return cur;
            cur = *f;
        }
    }

    double conf(StateId id) const {
        const auto& n = nodes_[id.value];
        return n.parents.empty() ? 0.0 : n.parents.front().score;
    }

    // Higher father affinity wins; ties go to the smaller id.
    bool wins_over(StateId a, StateId b) const {
        const double ca = conf(a);
        const double cb = conf(b);
        if (ca != cb) return ca > cb;
        return a < b;
    }

    void connect_ambiguous_impl(StateId child, StateId parent, std::optional<double> score) {
        Depth d(*this);
        child = resolve(child);
        parent = resolve(parent);
        auto& c = nodes_[child.value];
        // A parentless state is Clear only by default and may still gain candidates.
        if (c.clarity == Clarity::Clear && !c.parents.empty()) return;
        if (nodes_[parent.value].frame >= c.frame) return;
        const StateId xp = latest_clear_descendant_before(parent, c.frame);
        if (nodes_[xp.value].frame >= c.frame) return;
        if (c.find_parent(xp)) return;
        const double s = (xp == parent && score) ? *score : score_of(child, xp);
        add_edge(xp, child, s);
        nodes_[child.value].clarity = Clarity::Ambiguous;
    }

    void connect_clear_impl(StateId child, StateId parent, std::optional<double> score) {
        Depth d(*this);
        child = resolve(child);
        parent = resolve(parent);
        if (child == parent || nodes_[parent.value].frame >= nodes_[child.value].frame) return;
        const auto& c = nodes_[child.value];
        if (c.clarity == Clarity::Ambiguous || c.parents.empty()) {
            insert_clear(child, parent, score);
            return;
        }
        if (c.parents.front().id == parent) return;
        join(child, parent, score);
    }

    // Inserts `child` into `parent`'s tracklet right after the latest chain member that
    // is not after child's frame; same-frame collisions merge.
    void insert_clear(StateId child, StateId parent, std::optional<double> score) {
        const FrameIndex frame = nodes_[child.value].frame;
        const StateId xp = latest_clear_descendant_before(parent, frame);
        if (xp == child) return;
        if (nodes_[xp.value].frame == frame) {
            merge_impl(std::min(child, xp), std::max(child, xp));
            return;
        }
        remove_all_parents(child);
        std::vector<StateId> same_frame;
        std::vector<StateId> later;
        for (StateId s : nodes_[xp.value].children) {
            const FrameIndex sf = nodes_[s.value].frame;
            if (sf == frame) same_frame.push_back(s);
            else if (sf > frame) later.push_back(s);
        }
        for (StateId s : same_frame) remove_edge(xp, s);
        const double s = (xp == parent && score) ? *score : score_of(child, xp);
        add_edge(xp, child, s);
        nodes_[child.value].clarity = Clarity::Clear;
        for (StateId cld : later) {
            const bool was_clear = nodes_[cld.value].clarity == Clarity::Clear;
            remove_edge(xp, cld);
            if (nodes_[cld.value].merged()) continue;
            if (was_clear) connect_clear_impl(cld, child, std::nullopt);
            else connect_ambiguous_impl(cld, child, std::nullopt);
        }
    }

    // Joins the tracklets of a Clear, fathered `child` and of `parent`.
    void join(StateId child, StateId parent, std::optional<double> score) {
        const StateId r1 = window_root(child);
        const StateId r2 = window_root(parent);
        if (r1 == r2) return;
        const FrameIndex f1 = nodes_[r1.value].frame;
        const FrameIndex f2 = nodes_[r2.value].frame;
        if (f1 == f2) {
            resolve_same_frame(r1, r2);
            return;
        }
        const StateId later = f1 > f2 ? r1 : r2;
        const StateId earlier = f1 > f2 ? r2 : r1;
        const std::optional<double> direct = (later == child && earlier == parent) ? score : std::nullopt;
        auto pinned = father(later);
        if (!pinned) {
            insert_clear(later, earlier, direct);
            return;
        }
        // `later` hangs from a frozen father. A parentless Clear window tracklet starting
        // earlier slots in after that father, so both tracklets end up interleaved.
        const auto& e = nodes_[earlier.value];
        if (!is_frozen(earlier) && e.clarity == Clarity::Clear && e.parents.empty()) {
            insert_clear(earlier, *pinned, std::nullopt);
            return;
        }
        // Otherwise joining means cutting the pinned link.
        const StateId xp = latest_clear_descendant_before(earlier, nodes_[later.value].frame);
        if (nodes_[xp.value].frame == nodes_[later.value].frame) {
            resolve_same_frame(later, xp);
            return;
        }
        const double incoming = (xp == earlier && direct) ? *direct : score_of(later, xp);
        const double held = conf(later);
        if (incoming > held || (incoming == held && xp < *pinned)) {
            remove_edge(*pinned, later);
            insert_clear(later, earlier, direct);
        }
    }

    // Two distinct states of the same frame that must end up as one.
    void resolve_same_frame(StateId a, StateId b) {
        const bool a_clear = nodes_[a.value].clarity == Clarity::Clear;
        const bool b_clear = nodes_[b.value].clarity == Clarity::Clear;
        StateId survivor;
        StateId absorbed;
        if (a_clear && b_clear) {
            survivor = wins_over(a, b) ? a : b;
            absorbed = survivor == a ? b : a;
            remove_all_parents(absorbed);
            nodes_[absorbed.value].clarity = Clarity::Ambiguous;
        } else if (a_clear != b_clear) {
            survivor = a_clear ? a : b;
            absorbed = a_clear ? b : a;
        } else {
            survivor = std::min(a, b);
            absorbed = std::max(a, b);
        }
        merge_impl(survivor, absorbed);
    }

    void merge_impl(StateId survivor, StateId absorbed) {
        survivor = resolve(survivor);
        absorbed = resolve(absorbed);
        if (survivor == absorbed) return;
        auto& a = nodes_[absorbed.value];
        const bool was_clear = a.clarity == Clarity::Clear;
        const auto parents = a.parents;
        std::vector<std::pair<StateId, bool>> children;
        for (StateId c : a.children) children.emplace_back(c, nodes_[c.value].clarity == Clarity::Clear);

        remove_all_parents(absorbed);
        for (const auto& [c, clear] : children) {
            remove_edge(absorbed, c);
            // An ambiguous child that just lost its last parent stays Ambiguous so that
            // the re-home below can still attach it (normalized when the action ends).
            if (!clear) nodes_[c.value].clarity = Clarity::Ambiguous;
        }
        nodes_[absorbed.value].merged_into = survivor;
        nodes_[absorbed.value].clarity = Clarity::Clear;

        if (was_clear) {
            if (!parents.empty()) connect_clear_impl(survivor, parents.front().id, std::nullopt);
        } else {
            for (const auto& link : parents) connect_ambiguous_impl(survivor, link.id, std::nullopt);
        }
        for (const auto& [c, clear] : children) {
            if (nodes_[c.value].merged()) continue;
            if (clear) connect_clear_impl(c, survivor, std::nullopt);
            else connect_ambiguous_impl(c, survivor, std::nullopt);
        }
    }

    GraphConfig cfg_;
    Scorer scorer_;
    std::vector<StateNode> nodes_;
    std::vector<std::vector<StateId>> frames_;
    FrameIndex latest_frame_ = 0;
    FrameIndex frontier_ = 0;
    int depth_ = 0;
    int last_depth_ = 0;
    std::vector<StateId> touched_;
};

}  // namespace acmot
