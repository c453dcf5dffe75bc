// acmot: track / sweep / eval / synth / energy

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acmot/acmot.hpp"

using namespace acmot;
namespace fs = std::filesystem;

namespace {

// Collects outputs in memory and writes them together; if any write fails, the files
// already written by this run are removed again.
class Outputs {
public:
    void add(std::string path, std::string text) { files_.emplace_back(std::move(path), std::move(text)); }

    void commit() {
        std::vector<std::string> written;
        try {
            for (const auto& [path, text] : files_) {
                detail::write_text_file(path, text);
                written.push_back(path);
            }
        } catch (...) {
            std::error_code ec;
            for (const auto& p : written) fs::remove(p, ec);
            throw;
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

struct TuneFlags {
    std::string config;
    std::optional<int> window;
    std::optional<double> c_thre;
    std::optional<double> a_thre;
};

void add_tune_flags(CLI::App* cmd, TuneFlags& t, bool with_window) {
    cmd->add_option("--config", t.config, "key=value tracker overrides")->check(CLI::ExistingFile);
    if (with_window) cmd->add_option("--window", t.window, "window length l (frames)")->check(CLI::Range(1, 1000000));
    cmd->add_option("--cthre", t.c_thre, "clear-association threshold")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--athre", t.a_thre, "ambiguous-association threshold")->check(CLI::Range(0.0, 1.0));
}

// Window precedence: --window, then window_length from --config, then seqinfo, then 25.
TrackerConfig make_config(const TuneFlags& t, const std::optional<SequenceMeta>& seq) {
    TrackerConfig cfg;
    bool window_from_config = false;
    if (!t.config.empty()) {
        auto in = detail::open_input(t.config);
        std::stringstream text;
        text << in.rdbuf();
        window_from_config = text.str().find("window_length") != std::string::npos;
        apply_config(cfg, text, t.config);
    }
    if (t.window) cfg.window_length = *t.window;
    else if (!window_from_config && seq) cfg.window_length = seq->default_window_length();
    if (t.c_thre) cfg.affinity.c_thre = *t.c_thre;
    if (t.a_thre) cfg.affinity.a_thre = *t.a_thre;
    cfg.validate();
    return cfg;
}

std::vector<int> parse_windows(const std::string& text) {
    std::vector<int> out;
    std::set<int> seen;
    for (auto field : detail::split_csv(text)) {
        const int l = detail::parse_int(field, "--windows", 1);
        if (l < 1) throw ParseError("--windows: window lengths must be >= 1");
        if (!seen.insert(l).second) {
            std::cerr << "warning: duplicate window length " << l << " ignored\n";
            continue;
        }
        out.push_back(l);
    }
    if (out.empty()) throw ParseError("--windows: empty list");
    return out;
}

struct Input {
    DetectionsByFrame detections;
    FrameIndex last_frame = 0;
    std::optional<SequenceMeta> seq;
};

Input load_input(const std::string& det, const std::string& appearance, const std::string& seqinfo) {
    Input in;
    const DetFile d = parse_det_file(det);
    if (d.rejected > 0) std::cerr << "warning: " << d.rejected << " detection lines with non-positive size skipped\n";
    in.detections = d.detections;
    if (!appearance.empty()) attach_appearance(in.detections, parse_appearance_file(appearance));
    if (!seqinfo.empty()) {
        in.seq = read_seqinfo(seqinfo);
        if (!in.detections.empty() && in.detections.rbegin()->first > in.seq->seq_length)
            throw ParseError(det + ": detections beyond seqLength " + std::to_string(in.seq->seq_length));
        in.last_frame = in.seq->seq_length;
    }
    return in;
}

std::string energy_rows(int window, const std::vector<EnergyPoint>& trace, bool with_window) {
    std::ostringstream out;
    for (const auto& p : trace) {
        if (with_window) out << window << ',';
        out << p.frame << ',' << detail::format_exact(p.energy) << '\n';
    }
    return out.str();
}

std::string eval_row(const std::string& name, const EvalResult& r) {
    std::ostringstream out;
    out << name << ',' << detail::format_exact(r.mota) << ',' << detail::format_exact(r.motp) << ',' << r.mt << ','
        << r.ml << ',' << r.fp << ',' << r.fn << ',' << r.ids << ',' << r.fg << '\n';
    return out.str();
}

// ---- subcommands ----------------------------------------------------------------------------

struct TrackArgs {
    std::string det, seqinfo, appearance, out, energy_csv;
    TuneFlags tune;
};

void cmd_track(const TrackArgs& a) {
    const Input in = load_input(a.det, a.appearance, a.seqinfo);
    const TrackerConfig cfg = make_config(a.tune, in.seq);
    const RunResult r = run_sequence(in.detections, cfg, in.last_frame);
    Outputs out;
    out.add(a.out, format_results(r.tracks));
    if (!a.energy_csv.empty()) out.add(a.energy_csv, "frame,energy\n" + energy_rows(cfg.window_length, r.energy_trace, false));
    out.commit();
    std::cerr << r.tracks.tracks.size() << " tracks, final energy " << r.final_energy << ", window " << cfg.window_length
              << '\n';
}

struct SweepArgs {
    std::string det, gt, appearance, seqinfo, preset, windows = "1,2,5,10,20", out;
    int seeds = 0;
    int jobs = 1;
    bool no_timing = false;
    TuneFlags tune;
};

void cmd_sweep(const SweepArgs& a) {
    const bool synthetic = !a.preset.empty();
    if (synthetic == !a.det.empty()) throw CLI::ValidationError("sweep", "give either --preset or --det/--gt");
    if (!synthetic && a.gt.empty()) throw CLI::ValidationError("sweep", "--det needs --gt");
    if (synthetic && a.seeds < 1) throw CLI::ValidationError("sweep", "--preset needs --seeds K (K >= 1)");
    if (!synthetic && a.seeds > 0) throw CLI::ValidationError("sweep", "--seeds applies to --preset only");
    const std::vector<int> windows = parse_windows(a.windows);

    struct Job {
        int window;
        std::uint64_t seed;
    };
    struct Scenario {
        DetectionsByFrame detections;
        LabeledTracks gt;
        FrameIndex last_frame = 0;
        std::optional<SequenceMeta> seq;
    };
    std::vector<Scenario> scenarios;
    std::vector<std::uint64_t> seeds;
    if (synthetic) {
        const ScenarioSpec base = scenario_suite(a.preset).front();
        for (int s = 1; s <= a.seeds; ++s) {
            ScenarioSpec spec = base;
            spec.seed = static_cast<std::uint64_t>(s);
            Scene sc = generate_scene(spec);
            scenarios.push_back({std::move(sc.detections), std::move(sc.gt), sc.n_frames, std::nullopt});
            seeds.push_back(spec.seed);
        }
    } else {
        Input in = load_input(a.det, a.appearance, a.seqinfo);
        LabeledTracks gt = parse_gt_file(a.gt);
        const FrameIndex last = std::max(in.last_frame, gt.last_frame());
        scenarios.push_back({std::move(in.detections), std::move(gt), last, in.seq});
        seeds.push_back(0);
    }

    std::vector<Job> jobs;
    for (int l : windows)
        for (std::size_t k = 0; k < seeds.size(); ++k) jobs.push_back({l, k});

    auto run = [&](const Job& j) {
        const Scenario& sc = scenarios[j.seed];
        TuneFlags t = a.tune;
        t.window = j.window;
        const TrackerConfig cfg = make_config(t, sc.seq);
        const auto start = std::chrono::steady_clock::now();
        const RunResult r = run_sequence(sc.detections, cfg, sc.last_frame);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        const EvalResult ev = clear_mot(sc.gt, to_labeled(r.tracks));
        std::ostringstream row;
        row << j.window << ',' << seeds[j.seed] << ',' << detail::format_exact(r.final_energy) << ','
            << detail::format_exact(ev.mota) << ',' << ev.ids << ',' << (a.no_timing ? "0" : detail::format_fixed2(ms))
            << '\n';
        return row.str();
    };

    std::vector<std::string> rows(jobs.size());
    const auto workers = static_cast<std::size_t>(std::max(1, a.jobs));
    for (std::size_t begin = 0; begin < jobs.size(); begin += workers) {
        std::vector<std::future<std::string>> batch;
        const std::size_t end = std::min(jobs.size(), begin + workers);
        for (std::size_t k = begin; k < end; ++k) batch.push_back(std::async(std::launch::async, run, jobs[k]));
        for (std::size_t k = begin; k < end; ++k) rows[k] = batch[k - begin].get();
    }
    std::string csv = "window_length,seed,final_energy,mota,ids,runtime_ms\n";
    for (const auto& r : rows) csv += r;
    Outputs out;
    out.add(a.out, csv);
    out.commit();
}

struct EvalArgs {
    std::string gt, res, out, name;
    double iou = 0.5;
};

void cmd_eval(const EvalArgs& a) {
    const LabeledTracks gt = parse_gt_file(a.gt);
    const LabeledTracks res = parse_gt_file(a.res);
    if (res.last_frame() > gt.last_frame())
        throw ParseError("sequence length mismatch: results reach frame " + std::to_string(res.last_frame()) +
                         ", ground truth ends at frame " + std::to_string(gt.last_frame()));
    const EvalResult r = clear_mot(gt, res, a.iou);
    const std::string name = a.name.empty() ? fs::path(a.gt).stem().string() : a.name;
    Outputs out;
    out.add(a.out, "sequence,mota,motp,mt,ml,fp,fn,ids,fg\n" + eval_row(name, r));
    out.commit();
}

struct SynthArgs {
    std::string preset, spec, outdir;
    std::optional<std::uint64_t> seed;
};

void cmd_synth(const SynthArgs& a) {
    if (a.preset.empty() == a.spec.empty()) throw CLI::ValidationError("synth", "give exactly one of --preset or --spec");
    ScenarioSpec spec = a.preset.empty() ? read_scenario_spec(a.spec) : scenario_suite(a.preset).front();
    if (a.seed) spec.seed = *a.seed;
    const Scene sc = generate_scene(spec);
    fs::create_directories(a.outdir);
    Outputs out;
    const fs::path dir(a.outdir);
    out.add((dir / "det.txt").string(), format_det(sc.detections));
    out.add((dir / "gt.txt").string(), format_gt(sc.gt));
    out.add((dir / "appearance.txt").string(), format_appearance(sc.detections));
    out.commit();
}

struct EnergyArgs {
    std::string det, appearance, seqinfo, windows = "1,2,5,10,20", out;
    TuneFlags tune;
};

void cmd_energy(const EnergyArgs& a) {
    const Input in = load_input(a.det, a.appearance, a.seqinfo);
    std::string csv = "window_length,frame,energy\n";
    for (int l : parse_windows(a.windows)) {
        TuneFlags t = a.tune;
        t.window = l;
        const RunResult r = run_sequence(in.detections, make_config(t, in.seq), in.last_frame);
        csv += energy_rows(l, r.energy_trace, true);
    }
    Outputs out;
    out.add(a.out, csv);
    out.commit();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-object tracking with the Ambiguity-Clearness graph"};
    app.require_subcommand(1);

    TrackArgs track;
    auto* t = app.add_subcommand("track", "track one detection file");
    t->add_option("--det", track.det, "MOT det file")->required()->check(CLI::ExistingFile);
    t->add_option("--seqinfo", track.seqinfo, "seqinfo.ini (frame rate sets the default window)")->check(CLI::ExistingFile);
    t->add_option("--appearance", track.appearance, "descriptor file: frame,det_index,v1..vK")->check(CLI::ExistingFile);
    t->add_option("--out", track.out, "result file")->required();
    t->add_option("--energy-csv", track.energy_csv, "per-frame energy trace");
    add_tune_flags(t, track.tune, true);

    SweepArgs sweep;
    auto* s = app.add_subcommand("sweep", "final energy / MOTA / IDS over window lengths");
    s->add_option("--det", sweep.det, "MOT det file")->check(CLI::ExistingFile);
    s->add_option("--gt", sweep.gt, "MOT gt file")->check(CLI::ExistingFile);
    s->add_option("--appearance", sweep.appearance, "descriptor file: frame,det_index,v1..vK")->check(CLI::ExistingFile);
    s->add_option("--seqinfo", sweep.seqinfo, "seqinfo.ini (frame rate sets the default window)")->check(CLI::ExistingFile);
    s->add_option("--preset", sweep.preset, "synthetic preset instead of --det/--gt");
    s->add_option("--seeds", sweep.seeds, "seeds 1..K for --preset")->check(CLI::Range(1, 100000));
    s->add_option("--windows", sweep.windows, "comma-separated window lengths")->capture_default_str();
    s->add_option("--jobs", sweep.jobs, "concurrent runs")->check(CLI::Range(1, 256))->capture_default_str();
    s->add_flag("--no-timing", sweep.no_timing, "write runtime_ms as 0 (byte-stable output)");
    s->add_option("--out", sweep.out, "CSV")->required();
    add_tune_flags(s, sweep.tune, false);

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "CLEAR-MOT metrics of a result file");
    e->add_option("--gt", eval.gt, "MOT gt file")->required()->check(CLI::ExistingFile);
    e->add_option("--res", eval.res, "tracker result file")->required()->check(CLI::ExistingFile);
    e->add_option("--iou", eval.iou, "match threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    e->add_option("--name", eval.name, "sequence column (default: gt file stem)");
    e->add_option("--out", eval.out, "report CSV")->required();

    SynthArgs synth;
    auto* y = app.add_subcommand("synth", "write a synthetic det/gt/appearance triple");
    y->add_option("--preset", synth.preset, "unambiguous | crossing | occlusion-heavy | cluttered");
    y->add_option("--spec", synth.spec, "key=value scenario file")->check(CLI::ExistingFile);
    y->add_option("--seed", synth.seed, "scene seed (overrides the preset or spec seed)");
    y->add_option("--outdir", synth.outdir, "directory for det.txt, gt.txt, appearance.txt")->required();

    EnergyArgs energy;
    auto* g = app.add_subcommand("energy", "per-frame energy for several window lengths");
    g->add_option("--det", energy.det, "MOT det file")->required()->check(CLI::ExistingFile);
    g->add_option("--appearance", energy.appearance, "descriptor file: frame,det_index,v1..vK")->check(CLI::ExistingFile);
    g->add_option("--seqinfo", energy.seqinfo, "seqinfo.ini (frame rate sets the default window)")->check(CLI::ExistingFile);
    g->add_option("--windows", energy.windows, "comma-separated window lengths")->capture_default_str();
    g->add_option("--out", energy.out, "CSV")->required();
    add_tune_flags(g, energy.tune, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (t->parsed()) cmd_track(track);
        else if (s->parsed()) cmd_sweep(sweep);
        else if (e->parsed()) cmd_eval(eval);
        else if (y->parsed()) cmd_synth(synth);
        else if (g->parsed()) cmd_energy(energy);
    } catch (const CLI::Error& err) {
        return app.exit(err);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
