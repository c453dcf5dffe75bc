#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "acmot/io_mot.hpp"
#include "acmot/optimizer.hpp"
#include "acmot/synth.hpp"
#include "support/batch_order.hpp"
#include "support/graph_fuzz.hpp"
#include "support/online_baseline.hpp"

using namespace acmot;
using acmot::testing::obs_at;

namespace {

Observation det(FrameIndex f, double cx, double cy, std::vector<double> app = {}, double w = 20.0, double h = 40.0) {
    Observation o;
    o.frame = f;
    o.bbox = {cx - 0.5 * w, cy - 0.5 * h, w, h};
    o.appearance = std::move(app);
    return o;
}

void feed(SlidingWindowTracker& t, FrameIndex f, const std::vector<Observation>& dets) {
    t.step_frame(f, std::span<const Observation>(dets));
}

void run_scene(SlidingWindowTracker& t, const Scene& sc) {
    static const std::vector<Observation> none;
    for (FrameIndex f = 1; f <= sc.n_frames; ++f) {
        auto it = sc.detections.find(f);
        t.step_frame(f, it == sc.detections.end() ? std::span<const Observation>(none)
                                                  : std::span<const Observation>(it->second));
    }
}

Scene preset_scene(const std::string& name, std::uint64_t seed) {
    auto spec = scenario_suite(name).front();
    spec.seed = seed;
    return generate_scene(spec);
}

TrackerConfig with_window(int l) {
    TrackerConfig cfg;
    cfg.window_length = l;
    return cfg;
}

// Three well separated targets moving in straight lines, one detection each per frame.
DetectionsByFrame separated_targets(FrameIndex frames) {
    DetectionsByFrame d;
    for (FrameIndex f = 1; f <= frames; ++f)
        for (int k = 0; k < 3; ++k) d[f].push_back(det(f, 100.0 + 3.0 * f, 100.0 + 300.0 * k + 1.5 * k * f));
    return d;
}

}  // namespace

// ---- config ---------------------------------------------------------------------------------

TEST(TrackerConfig, Validation) {
    TrackerConfig c;
    EXPECT_NO_THROW(c.validate());
    c.window_length = 0;
    EXPECT_THROW(c.validate(), PreconditionError);
    c = {};
    c.min_track_length = 0;
    EXPECT_THROW(c.validate(), PreconditionError);
    EXPECT_THROW(SlidingWindowTracker(with_window(-1)), PreconditionError);
}

TEST(TrackerConfig, WindowFromFrameRate) {
    EXPECT_EQ(window_for_frame_rate(25.0), 25);
    EXPECT_EQ(window_for_frame_rate(30.0), 30);
    EXPECT_EQ(window_for_frame_rate(14.0), 14);
    EXPECT_EQ(window_for_frame_rate(0.2), 1);
    EXPECT_EQ(window_for_frame_rate(10.0, 2.0), 20);
    EXPECT_THROW(window_for_frame_rate(0.0), PreconditionError);
}

// ---- energy ---------------------------------------------------------------------------------

TEST(Energy, EmptyGraphIsZero) { EXPECT_EQ(energy(ACGraph{}), 0.0); }

TEST(Energy, MaxOverParents) {
    ACGraph g({5, 0.5, 0.1});
    const auto p1 = g.add_state(obs_at(1, 0));
    const auto p2 = g.add_state(obs_at(1, 50));
    g.begin_frame(2);
    const auto c = g.add_state(obs_at(2));
    g.connect_ambiguous(c, p1, 0.3);
    g.connect_ambiguous(c, p2, 0.4);
    EXPECT_NEAR(energy(g), -0.4, 1e-15);
    EXPECT_NEAR(energy_contribution(g, c), -0.4, 1e-15);
    EXPECT_EQ(energy_contribution(g, p1), 0.0);
}

TEST(Energy, ThreeStateChain) {
    ACGraph g({5, 0.5, 0.1});
    const auto a = g.add_state(obs_at(1));
    g.begin_frame(2);
    const auto b = g.add_state(obs_at(2));
    g.connect_clear(b, a, 0.9);
    g.begin_frame(3);
    const auto c = g.add_state(obs_at(3));
    g.connect_clear(c, b, 0.8);
    EXPECT_NEAR(energy(g), -1.7, 1e-12);
    EXPECT_NEAR(energy(g, 2), -0.9, 1e-12);
}

TEST(Energy, MergedStatesExcluded) {
    ACGraph g({5, 0.5, 0.1});
    const auto p = g.add_state(obs_at(1));
    g.begin_frame(2);
    const auto a = g.add_state(obs_at(2, 0));
    const auto b = g.add_state(obs_at(2, 1));
    g.connect_clear(a, p, 0.9);
    g.connect_clear(b, p, 0.7);
    EXPECT_TRUE(g.node(b).merged() || g.node(a).merged());
    EXPECT_NEAR(energy(g), -0.9, 1e-12);
}

// ---- Step 1 ---------------------------------------------------------------------------------

TEST(StepFrame, StrongCandidateGivesClearEdge) {
    SlidingWindowTracker t(with_window(5));
    feed(t, 1, {det(1, 100, 100)});
    // exp(-d^2 / 800) = 0.9
    const double d = std::sqrt(800.0 * std::log(1.0 / 0.9));
    const auto added = [&] {
        std::vector<Observation> v{det(2, 100 + d, 100)};
        return t.step_frame(2, std::span<const Observation>(v));
    }();
    const auto& n = t.graph().node(added[0]);
    EXPECT_EQ(n.clarity, Clarity::Clear);
    ASSERT_EQ(n.parents.size(), 1u);
    EXPECT_NEAR(n.parents[0].score, 0.9, 1e-12);
    t.flush();
    const auto tracks = t.extract_tracks();
    ASSERT_EQ(tracks.tracks.size(), 1u);
    EXPECT_EQ(tracks.tracks[0].entries.size(), 2u);
}

TEST(StepFrame, TwoWeakCandidatesGiveAmbiguousState) {
    SlidingWindowTracker t(with_window(5));
    feed(t, 1, {det(1, 100, 100, {1, 0, 0}), det(1, 100, 100, {0, 1, 0})});
    std::vector<Observation> v{det(2, 100, 100, {0.09, 0.16, 0.75})};  // Bhattacharyya 0.3 and 0.4
    const auto added = t.step_frame(2, std::span<const Observation>(v));
    const auto& n = t.graph().node(added[0]);
    EXPECT_EQ(n.clarity, Clarity::Ambiguous);
    ASSERT_EQ(n.parents.size(), 2u);
    EXPECT_NEAR(n.parents[0].score, 0.3, 1e-12);
    EXPECT_NEAR(n.parents[1].score, 0.4, 1e-12);
}

TEST(StepFrame, OnlyWeakCandidatesGiveParentlessState) {
    SlidingWindowTracker t(with_window(5));
    feed(t, 1, {det(1, 100, 100, {1, 0, 0}), det(1, 100, 100, {0, 1, 0})});
    std::vector<Observation> v{det(2, 100, 100, {0.0081, 0.0064, 0.9855})};  // 0.09 and 0.08
    const auto added = t.step_frame(2, std::span<const Observation>(v));
    const auto& n = t.graph().node(added[0]);
    EXPECT_EQ(n.clarity, Clarity::Clear);
    EXPECT_TRUE(n.parents.empty());
}

TEST(StepFrame, RejectsNonConsecutiveFrames) {
    SlidingWindowTracker t(with_window(3));
    feed(t, 1, {});
    EXPECT_THROW(feed(t, 3, {}), PreconditionError);
    EXPECT_THROW(feed(t, 2, {det(5, 0, 0)}), PreconditionError);
    EXPECT_NO_THROW(feed(t, 2, {}));
}

// ---- Step 3 ---------------------------------------------------------------------------------

TEST(ReduceAssociations, BestClearCandidateWins) {
    const std::vector<Association> in{
        {StateId(9), StateId(3), 0.6}, {StateId(9), StateId(1), 0.8}, {StateId(9), StateId(2), 0.3}};
    const auto out = reduce_associations(in, 0.5, 0.1);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].parent, StateId(1));
}

TEST(ReduceAssociations, TieGoesToLowerParent) {
    const std::vector<Association> in{{StateId(9), StateId(4), 0.7}, {StateId(9), StateId(2), 0.7}};
    const auto out = reduce_associations(in, 0.5, 0.1);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].parent, StateId(2));
}

TEST(ReduceAssociations, WeakCandidatesKeptAboveAThreOnly) {
    const std::vector<Association> in{{StateId(8), StateId(5), 0.2},
                                      {StateId(8), StateId(1), 0.1},
                                      {StateId(7), StateId(2), 0.49},
                                      {StateId(8), StateId(3), 0.3}};
    const auto out = reduce_associations(in, 0.5, 0.1);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].child, StateId(7));
    EXPECT_EQ(out[1].parent, StateId(3));
    EXPECT_EQ(out[2].parent, StateId(5));
}

TEST(ReduceAssociations, ThresholdIsInclusiveForClear) {
    const auto out = reduce_associations({{StateId(5), StateId(1), 0.5}, {StateId(5), StateId(2), 0.4}}, 0.5, 0.1);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].parent, StateId(1));
}

TEST(ReduceAssociations, EveryApplicationOrderGivesTheSameGraph) {
    int compared = 0;
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        const auto r = acmot::testing::check_batch_order(seed);
        if (r.batch_size < 2) continue;
        ++compared;
        EXPECT_TRUE(r.identical) << "seed " << seed;
    }
    EXPECT_GE(compared, 100);
}

TEST(FinalizeFrame, ContendedParentGoesToStrongerChild) {
    // A and B sit on frame 1; child 1 scores 0.45 against A, child 2 scores 0.3 / 0.2.
    SlidingWindowTracker t(with_window(1));
    const auto parents = [&] {
        std::vector<Observation> v{det(1, 100, 100, {1, 0, 0}), det(1, 100, 100, {0, 1, 0})};
        return t.step_frame(1, std::span<const Observation>(v));
    }();
    std::vector<Observation> v{det(2, 100, 100, {0.2025, 0.0025, 0.795}), det(2, 100, 100, {0.09, 0.04, 0.87})};
    const auto kids = t.step_frame(2, std::span<const Observation>(v));
    EXPECT_EQ(t.graph().finalized_through(), 2);
    EXPECT_EQ(t.graph().father(kids[0]), parents[0]);
    EXPECT_EQ(t.graph().father(kids[1]), parents[1]);
    EXPECT_EQ(t.forced_births(), 0);
}

TEST(FinalizeFrame, NoAmbiguousStatesIsNoop) {
    SlidingWindowTracker t(with_window(2));
    feed(t, 1, {det(1, 100, 100)});
    feed(t, 2, {det(2, 102, 100)});
    const std::string before = t.graph().dump();
    t.finalize_frame();
    const std::string after = t.graph().dump();
    EXPECT_EQ(before, after);
    EXPECT_EQ(t.graph().finalized_through(), 2);
}

TEST(FinalizeFrame, NothingLeftThrows) {
    SlidingWindowTracker t(with_window(1));
    feed(t, 1, {det(1, 100, 100)});
    EXPECT_THROW(t.finalize_frame(), PreconditionError);
}

TEST(FinalizeFrame, FrameIsClearAfterwards) {
    const Scene sc = preset_scene("occlusion-heavy", 3);
    SlidingWindowTracker t(with_window(6));
    static const std::vector<Observation> none;
    for (FrameIndex f = 1; f <= sc.n_frames; ++f) {
        auto it = sc.detections.find(f);
        t.step_frame(f, it == sc.detections.end() ? std::span<const Observation>(none)
                                                  : std::span<const Observation>(it->second));
        for (FrameIndex g = 1; g <= t.graph().finalized_through(); ++g)
            for (StateId s : t.graph().frame_states(g))
                if (!t.graph().node(s).merged()) ASSERT_EQ(t.graph().node(s).clarity, Clarity::Clear);
    }
    EXPECT_EQ(t.forced_births(), 0);
}

// ---- flush ----------------------------------------------------------------------------------

TEST(Flush, AllClearGraphIsNoopBeyondFrontier) {
    SlidingWindowTracker t(with_window(4));
    feed(t, 1, {det(1, 100, 100)});
    feed(t, 2, {det(2, 103, 100)});
    const std::string before = t.graph().dump();
    t.flush();
    EXPECT_EQ(t.graph().dump(), before);
    EXPECT_EQ(t.graph().finalized_through(), 2);
    t.flush();
    EXPECT_EQ(t.graph().finalized_through(), 2);
}

TEST(Flush, LeavesNoAmbiguityOnAnyPreset) {
    for (const auto& name : scenario_names()) {
        for (int l : {1, 4, 15}) {
            SlidingWindowTracker t(with_window(l));
            run_scene(t, preset_scene(name, 2));
            t.flush();
            const auto& g = t.graph();
            EXPECT_EQ(g.finalized_through(), g.latest_frame());
            for (FrameIndex f = 1; f <= g.latest_frame(); ++f)
                for (StateId s : g.frame_states(f)) {
                    const auto& n = g.node(s);
                    if (n.merged()) continue;
                    EXPECT_EQ(n.clarity, Clarity::Clear) << name << " l=" << l;
                    EXPECT_LE(n.parents.size(), 1u) << name << " l=" << l;
                }
            EXPECT_TRUE(g.validate().empty()) << name << " l=" << l;
            EXPECT_NO_THROW(t.extract_tracks());
        }
    }
}

TEST(Flush, WindowLongerThanSequenceBehavesAsBatch) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto spec = scenario_suite("occlusion-heavy").front();
        spec.n_frames = 5;
        spec.seed = seed;
        const Scene sc = generate_scene(spec);
        const auto batch = run_sequence(sc.detections, with_window(5), sc.n_frames);
        const auto longer = run_sequence(sc.detections, with_window(40), sc.n_frames);
        EXPECT_EQ(format_results(batch.tracks), format_results(longer.tracks)) << "seed " << seed;
        EXPECT_EQ(batch.final_energy, longer.final_energy);
    }
}

// ---- run_sequence ---------------------------------------------------------------------------

TEST(RunSequence, EmptyStream) {
    const auto r = run_sequence({}, TrackerConfig{});
    EXPECT_TRUE(r.tracks.empty());
    EXPECT_EQ(r.final_energy, 0.0);
    ASSERT_EQ(r.energy_trace.size(), 1u);
    const auto r2 = run_sequence({}, TrackerConfig{}, 7);
    EXPECT_TRUE(r2.tracks.empty());
    EXPECT_EQ(r2.energy_trace.size(), 8u);
}

TEST(RunSequence, RejectsFrameZero) {
    DetectionsByFrame d;
    d[0].push_back(det(0, 1, 1));
    EXPECT_THROW(run_sequence(d, TrackerConfig{}), PreconditionError);
}

TEST(RunSequence, SingleTargetOneTrackForAnyWindow) {
    auto spec = scenario_suite("unambiguous").front();
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        spec.seed = seed;
        const Scene sc = generate_scene(spec);
        for (int l : {1, 2, 5, 25, sc.n_frames}) {
            const auto r = run_sequence(sc.detections, with_window(l), sc.n_frames);
            ASSERT_EQ(r.tracks.tracks.size(), 1u) << "l=" << l;
            const auto& e = r.tracks.tracks[0].entries;
            ASSERT_EQ(static_cast<int>(e.size()), sc.n_frames);
            for (int f = 0; f < sc.n_frames; ++f) {
                EXPECT_EQ(e[static_cast<std::size_t>(f)].frame, f + 1);
                EXPECT_EQ(e[static_cast<std::size_t>(f)].bbox, sc.detections.at(f + 1).front().bbox);
            }
        }
    }
}

TEST(RunSequence, EnergyTraceShape) {
    const Scene sc = preset_scene("crossing", 1);
    const auto r = run_sequence(sc.detections, with_window(5), sc.n_frames);
    ASSERT_EQ(static_cast<int>(r.energy_trace.size()), sc.n_frames + 1);
    for (int f = 0; f <= sc.n_frames; ++f) EXPECT_EQ(r.energy_trace[static_cast<std::size_t>(f)].frame, f);
    EXPECT_EQ(r.energy_trace.back().energy, r.final_energy);
    EXPECT_LT(r.final_energy, 0.0);
}

TEST(RunSequence, Deterministic) {
    for (const auto& name : scenario_names()) {
        const Scene sc = preset_scene(name, 7);
        const auto a = run_sequence(sc.detections, with_window(8), sc.n_frames);
        const auto b = run_sequence(sc.detections, with_window(8), sc.n_frames);
        EXPECT_EQ(format_results(a.tracks), format_results(b.tracks)) << name;
        EXPECT_EQ(a.final_energy, b.final_energy);
    }
}

TEST(RunSequence, NoStateInTwoTracks) {
    for (const auto& name : scenario_names()) {
        SlidingWindowTracker t(with_window(10));
        run_scene(t, preset_scene(name, 4));
        t.flush();
        std::set<std::uint32_t> seen;
        for (const auto& tr : t.extract_tracks().tracks) {
            for (std::size_t k = 1; k < tr.entries.size(); ++k) ASSERT_LT(tr.entries[k - 1].frame, tr.entries[k].frame);
            for (StateId s : tr.states) EXPECT_TRUE(seen.insert(s.value).second) << name;
        }
    }
}

TEST(RunSequence, UnambiguousSceneIndependentOfWindow) {
    const FrameIndex frames = 30;
    const auto d = separated_targets(frames);
    const std::string ref = format_results(run_sequence(d, with_window(1), frames).tracks);
    for (int l : {2, 5, 30}) EXPECT_EQ(format_results(run_sequence(d, with_window(l), frames).tracks), ref) << "l=" << l;
    EXPECT_EQ(run_sequence(d, with_window(5), frames).tracks.tracks.size(), 3u);
}

TEST(RunSequence, UnambiguousPresetIndependentOfWindow) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Scene sc = preset_scene("unambiguous", seed);
        const std::string ref = format_results(run_sequence(sc.detections, with_window(1), sc.n_frames).tracks);
        for (int l : {2, 5, sc.n_frames})
            EXPECT_EQ(format_results(run_sequence(sc.detections, with_window(l), sc.n_frames).tracks), ref);
    }
}

// ---- l = 1 against the per-frame baseline ---------------------------------------------------

TEST(OnlineEquivalence, MatchesPerFrameBaselineOnCrossingScenes) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Scene sc = preset_scene("crossing", seed);
        const TrackerConfig cfg = with_window(1);
        const auto r = run_sequence(sc.detections, cfg, sc.n_frames);
        const auto b = acmot::testing::online_baseline(sc.detections, cfg.affinity, cfg.min_track_length, sc.n_frames);
        ASSERT_EQ(b.conflicts, 0) << "seed " << seed;
        EXPECT_EQ(format_results(r.tracks), format_results(b.tracks)) << "seed " << seed;
        EXPECT_TRUE(r.tracks == b.tracks) << "seed " << seed;
    }
}

TEST(OnlineEquivalence, MatchesBaselineWheneverNoConflicts) {
    int compared = 0;
    for (const auto& name : scenario_names()) {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            const Scene sc = preset_scene(name, seed);
            const TrackerConfig cfg = with_window(1);
            const auto b = acmot::testing::online_baseline(sc.detections, cfg.affinity, cfg.min_track_length, sc.n_frames);
            if (b.conflicts > 0) continue;
            ++compared;
            EXPECT_TRUE(run_sequence(sc.detections, cfg, sc.n_frames).tracks == b.tracks) << name << " seed " << seed;
        }
    }
    EXPECT_GE(compared, 12);
}

// ---- Step 2 energy --------------------------------------------------------------------------

TEST(ShrinkStep, EnergyDoesNotRiseOnPassesThatKeepAParent) {
    int checked = 0;
    for (const std::string name : {"occlusion-heavy", "cluttered"}) {
        for (int l : {3, 8}) {
            for (std::uint64_t seed = 1; seed <= 4; ++seed) {
                SlidingWindowTracker t(with_window(l));
                t.on_shrink_pass = [&](const SlidingWindowTracker::ShrinkPass& p) {
                    if (p.dropped_all) return;
                    ++checked;
                    EXPECT_LE(p.energy_after, p.energy_before + 1e-9) << name << " l=" << l << " seed " << seed;
                    EXPECT_LE(p.contribution_after, p.contribution_before + 1e-9);
                };
                run_scene(t, preset_scene(name, seed));
            }
        }
    }
    EXPECT_GT(checked, 50);
}

// ---- extract_tracks -------------------------------------------------------------------------

TEST(ExtractTracks, ChainOverTenFrames) {
    SlidingWindowTracker t(with_window(3));
    for (FrameIndex f = 1; f <= 10; ++f) feed(t, f, {det(f, 100 + 2.0 * f, 200)});
    t.flush();
    const auto ts = t.extract_tracks();
    ASSERT_EQ(ts.tracks.size(), 1u);
    EXPECT_EQ(ts.tracks[0].id, 1);
    EXPECT_EQ(ts.tracks[0].entries.size(), 10u);
    for (const auto& e : ts.tracks[0].entries) EXPECT_FALSE(e.interpolated);
}

TEST(ExtractTracks, GapIsInterpolatedAndFlagged) {
    SlidingWindowTracker t(with_window(3));
    feed(t, 1, {det(1, 100, 200)});
    feed(t, 2, {det(2, 110, 200)});
    feed(t, 3, {});
    feed(t, 4, {det(4, 130, 204, {}, 24, 44)});
    feed(t, 5, {det(5, 140, 204, {}, 24, 44)});
    t.flush();
    const auto ts = t.extract_tracks();
    ASSERT_EQ(ts.tracks.size(), 1u);
    const auto& e = ts.tracks[0].entries;
    ASSERT_EQ(e.size(), 5u);
    EXPECT_EQ(e[2].frame, 3);
    EXPECT_TRUE(e[2].interpolated);
    // midpoint of (100,180,20,40) and (118,182,24,44)
    EXPECT_NEAR(e[2].bbox.left, 109.0, 1e-12);
    EXPECT_NEAR(e[2].bbox.top, 181.0, 1e-12);
    EXPECT_NEAR(e[2].bbox.width, 22.0, 1e-12);
    EXPECT_NEAR(e[2].bbox.height, 42.0, 1e-12);
    for (std::size_t k : {0u, 1u, 3u, 4u}) EXPECT_FALSE(e[k].interpolated);
}

TEST(ExtractTracks, SingletonSuppressed) {
    SlidingWindowTracker t(with_window(2));
    feed(t, 1, {det(1, 100, 100), det(1, 900, 900)});
    feed(t, 2, {det(2, 102, 100)});
    t.flush();
    EXPECT_EQ(t.extract_tracks().tracks.size(), 1u);
    TrackerConfig keep = with_window(2);
    keep.min_track_length = 1;
    SlidingWindowTracker t1(keep);
    feed(t1, 1, {det(1, 100, 100), det(1, 900, 900)});
    feed(t1, 2, {det(2, 102, 100)});
    t1.flush();
    EXPECT_EQ(t1.extract_tracks().tracks.size(), 2u);
}

TEST(ExtractTracks, IdsFollowFirstFrameThenState) {
    SlidingWindowTracker t(with_window(2));
    feed(t, 1, {det(1, 500, 100)});
    feed(t, 2, {det(2, 500, 100), det(2, 100, 700)});
    feed(t, 3, {det(3, 500, 100), det(3, 100, 700)});
    t.flush();
    const auto ts = t.extract_tracks();
    ASSERT_EQ(ts.tracks.size(), 2u);
    EXPECT_EQ(ts.tracks[0].entries.front().frame, 1);
    EXPECT_EQ(ts.tracks[1].entries.front().frame, 2);
    EXPECT_EQ(ts.tracks[1].id, 2);
}

TEST(ExtractTracks, RejectedBeforeFlush) {
    SlidingWindowTracker t(with_window(5));
    feed(t, 1, {det(1, 100, 100, {1, 0, 0}), det(1, 100, 100, {0, 1, 0})});
    feed(t, 2, {det(2, 100, 100, {0.09, 0.16, 0.75})});
    EXPECT_THROW(t.extract_tracks(), PreconditionError);
    t.flush();
    EXPECT_NO_THROW(t.extract_tracks());
}
