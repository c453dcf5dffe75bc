#pragma once

// Synthetic scenes: constant-velocity ground truth plus corrupted detections.
//
// Random numbers: std::mt19937_64 seeded with the scenario seed. Only its raw 64-bit
// output is used (that sequence is fixed by the C++ standard); the transforms below are
// spelled out so every platform produces the same scenes:
//   uniform  = (bits >> 11) * 2^-53                       in [0, 1)
//   normal   = Box-Muller, sqrt(-2 ln(1-u1)) cos(2 pi u2)  (one draw pair per value)
//   poisson  = Knuth's product-of-uniforms method
//   exponential(mean) = -mean * ln(1 - u)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "acmot/io_mot.hpp"
#include "acmot/optimizer.hpp"
#include "acmot/types.hpp"

namespace acmot {

class SceneRng {
public:
    explicit SceneRng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int n) { return std::min(n - 1, static_cast<int>(uniform() * n)); }
    bool bernoulli(double p) { return uniform() < p; }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    double exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double limit = std::exp(-lambda);
        int k = 0;
        double p = uniform();
        while (p > limit) {
            ++k;
            p *= uniform();
        }
        return k;
    }

private:
    std::mt19937_64 engine_;
};

struct OcclusionEvent {
    int target = 1;  // 1-based gt id
    FrameIndex start = 1;
    int length = 1;
};

struct ScenarioSpec {
    std::string name = "custom";
    int n_targets = 1;
    int n_frames = 100;
    double image_width = 1920.0;
    double image_height = 1080.0;
    double speed_min = 1.0;  // pixels/frame
    double speed_max = 4.0;
    double trajectory_noise = 0.05;  // sigma of per-frame velocity perturbation
    bool crossing = false;           // targets pairwise meet mid-sequence
    std::vector<OcclusionEvent> occlusions;
    double random_occlusions = 0.0;       // expected extra occlusion events per target
    double occlusion_mean_length = 13.6;  // frames; about 84% of events last <= 25 frames
    double miss_rate = 0.0;
    double clutter_rate = 0.0;  // expected false positives per frame
    double duplicate_rate = 0.0;
    double appearance_noise = 0.0;
    double center_jitter = 2.0;  // sigma, pixels
    double size_jitter = 1.0;
    int descriptor_bins = 16;
    std::uint64_t seed = 1;

    void validate() const {
        if (n_targets < 0) throw PreconditionError("n_targets must be >= 0");
        if (n_frames < 1) throw PreconditionError("n_frames must be >= 1");
        if (!(image_width > 0.0 && image_height > 0.0)) throw PreconditionError("image size must be positive");
        if (!(speed_min >= 0.0 && speed_max >= speed_min)) throw PreconditionError("bad speed range");
        if (!(miss_rate >= 0.0 && miss_rate < 1.0)) throw PreconditionError("miss_rate must be in [0,1)");
        if (!(duplicate_rate >= 0.0 && duplicate_rate < 1.0)) throw PreconditionError("duplicate_rate must be in [0,1)");
        if (!(clutter_rate >= 0.0 && clutter_rate < 50.0)) throw PreconditionError("clutter_rate must be in [0,50)");
        if (!(appearance_noise >= 0.0 && trajectory_noise >= 0.0 && center_jitter >= 0.0 && size_jitter >= 0.0))
            throw PreconditionError("noise levels must be >= 0");
        if (!(random_occlusions >= 0.0 && occlusion_mean_length > 0.0)) throw PreconditionError("bad occlusion knobs");
        if (descriptor_bins < 2) throw PreconditionError("descriptor_bins must be >= 2");
        for (const auto& o : occlusions) {
            if (o.target < 1 || o.target > n_targets) throw PreconditionError("occlusion target out of range");
            if (o.length < 1 || o.start < 1 || o.start + o.length - 1 > n_frames)
                throw PreconditionError("occlusion window outside the sequence");
        }
    }
};

struct Scene {
    LabeledTracks gt;
    DetectionsByFrame detections;  // descriptors attached
    std::vector<OcclusionEvent> occlusions;  // explicit and random events actually applied
    FrameIndex n_frames = 0;
};

namespace detail {

inline std::vector<double> normalized(std::vector<double> h) {
    double sum = 0.0;
    for (double v : h) sum += v;
    if (!(sum > 0.0)) return std::vector<double>(h.size(), 1.0 / static_cast<double>(h.size()));
    for (double& v : h) v /= sum;
    return h;
}

}  // namespace detail

inline Scene generate_scene(const ScenarioSpec& spec) {
    spec.validate();
    SceneRng rng(spec.seed);
    const int T = spec.n_frames;
    const int K = spec.descriptor_bins;

    struct Target {
        double x, y, vx, vy, w, h;
        std::vector<double> descriptor;
    };
    std::vector<Target> targets(static_cast<std::size_t>(spec.n_targets));
    for (int k = 0; k < spec.n_targets; ++k) {
        Target& tg = targets[static_cast<std::size_t>(k)];
        tg.w = rng.uniform(30.0, 60.0);
        tg.h = tg.w * rng.uniform(2.2, 2.8);
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double speed = rng.uniform(spec.speed_min, spec.speed_max);
        tg.vx = speed * std::cos(angle);
        tg.vy = speed * std::sin(angle);
        // Centers; crossing pairs are placed to meet at a shared point mid-sequence.
        if (spec.crossing && (k % 2 == 1)) {
            const Target& mate = targets[static_cast<std::size_t>(k - 1)];
            const double meet = 0.5 * (T + 1);
            const double mx = mate.x + mate.vx * (meet - 1);
            const double my = mate.y + mate.vy * (meet - 1);
            tg.x = mx - tg.vx * (meet - 1);
            tg.y = my - tg.vy * (meet - 1);
        } else if (spec.crossing) {
            const double meet = 0.5 * (T + 1);
            const double mx = rng.uniform(0.3, 0.7) * spec.image_width;
            const double my = rng.uniform(0.3, 0.7) * spec.image_height;
            tg.x = mx - tg.vx * (meet - 1);
            tg.y = my - tg.vy * (meet - 1);
        } else {
            tg.x = rng.uniform(0.1, 0.9) * spec.image_width;
            tg.y = rng.uniform(0.1, 0.9) * spec.image_height;
        }
        // Peaky descriptor: most of the mass on two target-specific bins.
        std::vector<double> d(static_cast<std::size_t>(K), 0.1 / (K - 2));
        const int b1 = (2 * k) % K;
        const int b2 = (2 * k + 1) % K;
        d[static_cast<std::size_t>(b1)] += 0.45;
        d[static_cast<std::size_t>(b2)] += 0.45;
        tg.descriptor = detail::normalized(std::move(d));
    }

    Scene scene;
    scene.n_frames = T;
    scene.occlusions = spec.occlusions;
    for (int k = 0; k < spec.n_targets; ++k) {
        const int events = rng.poisson(spec.random_occlusions);
        for (int e = 0; e < events; ++e) {
            const int length = std::min(T, 1 + static_cast<int>(rng.exponential(spec.occlusion_mean_length)));
            const int start = 1 + rng.uniform_int(std::max(1, T - length + 1));
            scene.occlusions.push_back({k + 1, start, length});
        }
    }
    auto occluded = [&](int target, FrameIndex f) {
        for (const auto& o : scene.occlusions)
            if (o.target == target && f >= o.start && f < o.start + o.length) return true;
        return false;
    };

    auto noisy_descriptor = [&](const std::vector<double>& base) {
        if (spec.appearance_noise == 0.0) return base;
        std::vector<double> h(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) h[i] = std::max(0.0, base[i] + rng.normal(0.0, spec.appearance_noise));
        return detail::normalized(std::move(h));
    };
    auto jittered = [&](const BBox& b) {
        const double cx = b.cx() + rng.normal(0.0, spec.center_jitter);
        const double cy = b.cy() + rng.normal(0.0, spec.center_jitter);
        const double w = std::max(1.0, b.width + rng.normal(0.0, spec.size_jitter));
        const double h = std::max(1.0, b.height + rng.normal(0.0, spec.size_jitter));
        return BBox{cx - 0.5 * w, cy - 0.5 * h, w, h};
    };

    for (FrameIndex f = 1; f <= T; ++f) {
        std::vector<Observation> dets;
        for (int k = 0; k < spec.n_targets; ++k) {
            Target& tg = targets[static_cast<std::size_t>(k)];
            if (f > 1) {
                tg.vx += rng.normal(0.0, spec.trajectory_noise);
                tg.vy += rng.normal(0.0, spec.trajectory_noise);
                tg.x += tg.vx;
                tg.y += tg.vy;
                // Targets bounce off the image border.
                if (tg.x < 0.0 || tg.x > spec.image_width) {
                    tg.vx = -tg.vx;
                    tg.x = std::clamp(tg.x, 0.0, spec.image_width);
                }
                if (tg.y < 0.0 || tg.y > spec.image_height) {
                    tg.vy = -tg.vy;
                    tg.y = std::clamp(tg.y, 0.0, spec.image_height);
                }
            }
            const BBox box{tg.x - 0.5 * tg.w, tg.y - 0.5 * tg.h, tg.w, tg.h};
            scene.gt.tracks[k + 1][f] = {box, 1.0, true};
            if (occluded(k + 1, f)) continue;
            if (rng.bernoulli(spec.miss_rate)) continue;
            Observation obs;
            obs.frame = f;
            obs.bbox = jittered(box);
            obs.confidence = 1.0;
            obs.appearance = noisy_descriptor(tg.descriptor);
            dets.push_back(obs);
            if (rng.bernoulli(spec.duplicate_rate)) {
                Observation dup;
                dup.frame = f;
                dup.bbox = jittered(jittered(box));
                dup.confidence = 0.5;
                dup.appearance = noisy_descriptor(tg.descriptor);
                dets.push_back(dup);
            }
        }
        const int clutter = rng.poisson(spec.clutter_rate);
        for (int c = 0; c < clutter; ++c) {
            Observation obs;
            obs.frame = f;
            const double w = rng.uniform(20.0, 80.0);
            const double h = w * rng.uniform(1.5, 3.0);
            obs.bbox = {rng.uniform(0.0, spec.image_width - w), rng.uniform(0.0, spec.image_height - h), w, h};
            obs.confidence = 0.3;
            std::vector<double> d(static_cast<std::size_t>(K));
            for (double& v : d) v = rng.uniform();
            obs.appearance = detail::normalized(std::move(d));
            dets.push_back(std::move(obs));
        }
        if (!dets.empty()) scene.detections[f] = std::move(dets);
    }
    return scene;
}

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"unambiguous", "crossing", "occlusion-heavy", "cluttered"};
    return names;
}

/// Named presets (version 1). The returned specs carry seed 1; callers override it.
inline std::vector<ScenarioSpec> scenario_suite(const std::string& name) {
    ScenarioSpec s;
    s.name = name;
    if (name == "unambiguous") {
        s.n_targets = 1;
        s.n_frames = 60;
        s.trajectory_noise = 0.0;
    } else if (name == "crossing") {
        s.n_targets = 2;
        s.n_frames = 80;
        s.crossing = true;
        s.appearance_noise = 0.02;
    } else if (name == "occlusion-heavy") {
        s.n_targets = 8;
        s.n_frames = 150;
        s.crossing = true;
        s.random_occlusions = 1.5;
        s.miss_rate = 0.1;
        s.clutter_rate = 0.2;
        s.appearance_noise = 0.05;
    } else if (name == "cluttered") {
        s.n_targets = 4;
        s.n_frames = 100;
        s.miss_rate = 0.05;
        s.clutter_rate = 3.0;
        s.duplicate_rate = 0.05;
        s.appearance_noise = 0.05;
    } else {
        std::string known;
        for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
        throw PreconditionError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return {s};
}

/// Flat key=value scenario file. "preset=NAME" (first) starts from a named preset;
/// "occlusion=target,start,length" may repeat. Blank lines and '#' comments are ignored.
inline ScenarioSpec parse_scenario_spec(std::istream& in, const std::string& source = "<spec>") {
    ScenarioSpec s;
    std::string line;
    int line_no = 0;
    bool any_field = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw detail::line_error(source, line_no, "expected key=value");
        const std::string key(detail::trim(body.substr(0, eq)));
        const std::string_view value = detail::trim(body.substr(eq + 1));
        auto real = [&] { return detail::parse_double(value, source, line_no); };
        auto integer = [&] { return detail::parse_int(value, source, line_no); };
        if (key == "preset") {
            if (any_field) throw detail::line_error(source, line_no, "preset must come before other keys");
            try {
                s = scenario_suite(std::string(value)).front();
            } catch (const PreconditionError& e) {
                throw detail::line_error(source, line_no, e.what());
            }
            continue;
        }
        any_field = true;
        if (key == "name") s.name = std::string(value);
        else if (key == "n_targets") s.n_targets = integer();
        else if (key == "n_frames") s.n_frames = integer();
        else if (key == "image_width") s.image_width = real();
        else if (key == "image_height") s.image_height = real();
        else if (key == "speed_min") s.speed_min = real();
        else if (key == "speed_max") s.speed_max = real();
        else if (key == "trajectory_noise") s.trajectory_noise = real();
        else if (key == "crossing") {
            if (value == "1" || value == "true") s.crossing = true;
            else if (value == "0" || value == "false") s.crossing = false;
            else throw detail::line_error(source, line_no, "crossing must be true/false/1/0");
        } else if (key == "occlusion") {
            const auto parts = detail::split_csv(value);
            if (parts.size() != 3) throw detail::line_error(source, line_no, "occlusion needs target,start,length");
            s.occlusions.push_back({detail::parse_int(parts[0], source, line_no), detail::parse_int(parts[1], source, line_no),
                                    detail::parse_int(parts[2], source, line_no)});
        } else if (key == "random_occlusions") s.random_occlusions = real();
        else if (key == "occlusion_mean_length") s.occlusion_mean_length = real();
        else if (key == "miss_rate") s.miss_rate = real();
        else if (key == "clutter_rate") s.clutter_rate = real();
        else if (key == "duplicate_rate") s.duplicate_rate = real();
        else if (key == "appearance_noise") s.appearance_noise = real();
        else if (key == "center_jitter") s.center_jitter = real();
        else if (key == "size_jitter") s.size_jitter = real();
        else if (key == "descriptor_bins") s.descriptor_bins = integer();
        else if (key == "seed") {
            const int v = integer();
            if (v < 0) throw detail::line_error(source, line_no, "seed must be >= 0");
            s.seed = static_cast<std::uint64_t>(v);
        } else throw detail::line_error(source, line_no, "unknown key " + key);
    }
    try {
        s.validate();
    } catch (const PreconditionError& e) {
        throw ParseError(source + ": " + e.what());
    }
    return s;
}

inline ScenarioSpec read_scenario_spec(const std::string& path) {
    auto in = detail::open_input(path);
    return parse_scenario_spec(in, path);
}

}  // namespace acmot
