#pragma once

// Pairwise affinity Aff = App * Mot * Shp between a candidate parent's tracklet and a
// child detection. App is the Bhattacharyya coefficient against the discounted
// tracklet histogram, Mot and Shp are unnormalized Gaussians on the Kalman-predicted
// center and the smoothed box size.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <unordered_map>
#include <vector>

#include "acmot/ac_graph.hpp"
#include "acmot/types.hpp"

namespace acmot {

struct AffinityConfig {
    double var_mot = 20.0 * 20.0;  // pixels^2
    double var_shp = 50.0 * 50.0;  // pixels^2
    double discount = 0.9;
    double process_noise = 1.0;
    double measurement_noise = 10.0;
    double initial_velocity_variance = 1e4;
    double shape_smoothing = 0.5;  // weight kept by the previous shape estimate
    double c_thre = 0.5;
    double a_thre = 0.1;

    void validate() const {
        if (!(var_mot > 0.0) || !(var_shp > 0.0)) throw PreconditionError("affinity variances must be > 0");
        if (!(discount > 0.0 && discount <= 1.0)) throw PreconditionError("discount must be in (0, 1]");
        if (!(process_noise >= 0.0) || !(measurement_noise > 0.0) || !(initial_velocity_variance > 0.0))
            throw PreconditionError("filter noises must be positive");
        if (!(shape_smoothing >= 0.0 && shape_smoothing < 1.0)) throw PreconditionError("shape smoothing must be in [0, 1)");
        if (!(a_thre >= 0.0 && a_thre < c_thre && c_thre <= 1.0))
            throw PreconditionError("thresholds must satisfy 0 <= a_thre < c_thre <= 1");
    }
};

struct AffinityScore {
    double app = 1.0;
    double mot = 1.0;
    double shp = 1.0;
    double total = 1.0;
};

/// Sum of sqrt(p_i q_i); 1 for identical histograms, 0 for disjoint support.
inline double bhattacharyya_coefficient(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw PreconditionError("bhattacharyya: histogram length mismatch");
    if (p.empty()) throw PreconditionError("bhattacharyya: empty histogram");
    require_normalized({p.begin(), p.end()}, "bhattacharyya");
    require_normalized({q.begin(), q.end()}, "bhattacharyya");
    double bc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
    return std::min(1.0, bc);
}

/// Running exponentially-discounted histogram sum; weights decay by discount^(frames elapsed).
class AppearanceAccumulator {
public:
    bool empty() const { return sum_.empty(); }

    void add(std::span<const double> hist, FrameIndex frame, double discount) {
        if (sum_.empty()) {
            sum_.assign(hist.begin(), hist.end());
            last_frame_ = frame;
            return;
        }
        if (hist.size() != sum_.size()) throw PreconditionError("appearance: histogram length mismatch");
        const double decay = std::pow(discount, frame - last_frame_);
        for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] = decay * sum_[i] + hist[i];
        last_frame_ = frame;
    }

    std::vector<double> mean() const {
        double total = 0.0;
        for (double v : sum_) total += v;
        std::vector<double> out(sum_.size());
        for (std::size_t i = 0; i < sum_.size(); ++i) out[i] = sum_[i] / total;
        return out;
    }

private:
    std::vector<double> sum_;
    FrameIndex last_frame_ = 0;
};

/// normalize(sum_k discount^age_k * h_k), age in frames back from the newest member.
/// `frames` must be strictly increasing and parallel to `members`.
inline std::vector<double> tracklet_appearance(std::span<const std::vector<double>> members,
                                               std::span<const FrameIndex> frames, double discount) {
    if (members.empty()) throw PreconditionError("tracklet_appearance: no members");
    if (members.size() != frames.size()) throw PreconditionError("tracklet_appearance: frames/members mismatch");
    AppearanceAccumulator acc;
    for (std::size_t k = 0; k < members.size(); ++k) {
        require_normalized(members[k], "tracklet_appearance");
        if (k > 0 && frames[k] <= frames[k - 1]) throw PreconditionError("tracklet_appearance: frames not increasing");
        acc.add(members[k], frames[k], discount);
    }
    return acc.mean();
}

/// Members on consecutive frames (newest last).
inline std::vector<double> tracklet_appearance(std::span<const std::vector<double>> members, double discount) {
    std::vector<FrameIndex> frames(members.size());
    for (std::size_t k = 0; k < frames.size(); ++k) frames[k] = static_cast<FrameIndex>(k);
    return tracklet_appearance(members, frames, discount);
}

// ---- Kalman ---------------------------------------------------------------------------

/// Constant-velocity filter on the box center; box size smoothed separately.
struct KalmanTrack {
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();  // x, y, vx, vy
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Identity();
    Eigen::Vector2d shape = Eigen::Vector2d::Zero();  // w, h
    FrameIndex last_frame = 0;

    static KalmanTrack start(const Observation& obs, const AffinityConfig& cfg) {
        KalmanTrack t;
        t.mean << obs.bbox.cx(), obs.bbox.cy(), 0.0, 0.0;
        t.covariance = Eigen::Vector4d(cfg.measurement_noise, cfg.measurement_noise, cfg.initial_velocity_variance,
                                       cfg.initial_velocity_variance)
                           .asDiagonal();
        t.shape << obs.bbox.width, obs.bbox.height;
        t.last_frame = obs.frame;
        return t;
    }
};

struct KalmanPrediction {
    Eigen::Vector4d mean;
    Eigen::Matrix4d covariance;
    Eigen::Vector2d center() const { return mean.head<2>(); }
    Eigen::Vector2d shape;
};

inline KalmanPrediction kalman_predict(const KalmanTrack& track, FrameIndex to_frame, const AffinityConfig& cfg) {
    if (to_frame <= track.last_frame) throw PreconditionError("kalman_predict: target frame is not after the track");
    Eigen::Matrix4d transition = Eigen::Matrix4d::Identity();
    transition(0, 2) = 1.0;
    transition(1, 3) = 1.0;
    const Eigen::Matrix4d noise = Eigen::Vector4d(0.0, 0.0, cfg.process_noise, cfg.process_noise).asDiagonal();
    KalmanPrediction pred{track.mean, track.covariance, track.shape};
    for (FrameIndex f = track.last_frame; f < to_frame; ++f) {
        pred.mean = transition * pred.mean;
        pred.covariance = transition * pred.covariance * transition.transpose() + noise;
    }
    return pred;
}

inline KalmanTrack kalman_update(const KalmanTrack& track, const Observation& obs, const AffinityConfig& cfg) {
    if (obs.frame <= track.last_frame) throw PreconditionError("kalman_update: stale observation");
    const KalmanPrediction pred = kalman_predict(track, obs.frame, cfg);
    Eigen::Matrix<double, 2, 4> measure = Eigen::Matrix<double, 2, 4>::Zero();
    measure(0, 0) = 1.0;
    measure(1, 1) = 1.0;
    const Eigen::Matrix2d innovation_cov =
        measure * pred.covariance * measure.transpose() + cfg.measurement_noise * Eigen::Matrix2d::Identity();
    const Eigen::Matrix<double, 4, 2> gain =
        pred.covariance * measure.transpose() * innovation_cov.ldlt().solve(Eigen::Matrix2d::Identity());
    const Eigen::Vector2d z(obs.bbox.cx(), obs.bbox.cy());

    KalmanTrack out;
    out.mean = pred.mean + gain * (z - measure * pred.mean);
    // Joseph form keeps the covariance symmetric PSD.
    const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - gain * measure;
    out.covariance = ikh * pred.covariance * ikh.transpose() +
                     gain * (cfg.measurement_noise * Eigen::Matrix2d::Identity()) * gain.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
    const Eigen::Vector2d observed_shape(obs.bbox.width, obs.bbox.height);
    out.shape = cfg.shape_smoothing * track.shape + (1.0 - cfg.shape_smoothing) * observed_shape;
    out.last_frame = obs.frame;
    return out;
}

inline double motion_affinity(const Eigen::Vector2d& predicted, const Eigen::Vector2d& observed, double var_mot) {
    if (!(var_mot > 0.0)) throw PreconditionError("motion_affinity: variance must be > 0");
    return std::exp(-(predicted - observed).squaredNorm() / (2.0 * var_mot));
}

inline double shape_affinity(const Eigen::Vector2d& predicted, const Eigen::Vector2d& observed, double var_shp) {
    if (!(var_shp > 0.0)) throw PreconditionError("shape_affinity: variance must be > 0");
    if (!(predicted.minCoeff() > 0.0) || !(observed.minCoeff() > 0.0))
        throw PreconditionError("shape_affinity: sizes must be positive");
    return std::exp(-(predicted - observed).squaredNorm() / (2.0 * var_shp));
}

inline AffinityScore make_score(double app, double mot, double shp) { return {app, mot, shp, app * mot * shp}; }

// ---- tracklet-aware model ------------------------------------------------------------

/// Motion, shape and appearance summary of the clear chain ending at one state.
struct TrackletFeatures {
    KalmanTrack kalman;
    AppearanceAccumulator appearance;
    int length = 0;
};

/// Scores (child, parent) pairs against the parent's clear-ancestor chain. Features of
/// finalized states are cached; window states are recomputed on every query since the
/// graph may have been restructured in between.
class AffinityModel {
public:
    explicit AffinityModel(AffinityConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

    const AffinityConfig& config() const { return cfg_; }

    TrackletFeatures features(const ACGraph& graph, StateId id) {
        std::vector<StateId> chain;  // newest first
        const TrackletFeatures* base = nullptr;
        StateId cur = id;
        while (true) {
            if (auto it = cache_.find(cur); it != cache_.end()) {
                base = &it->second;
                break;
            }
            chain.push_back(cur);
            auto f = graph.father(cur);
            if (!f) break;
            cur = *f;
        }
        TrackletFeatures feat;
        if (base) feat = *base;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const auto& n = graph.node(*it);
            if (feat.length == 0) feat.kalman = KalmanTrack::start(n.obs, cfg_);
            else feat.kalman = kalman_update(feat.kalman, n.obs, cfg_);
            if (n.obs.has_appearance()) feat.appearance.add(n.obs.appearance, n.frame, cfg_.discount);
            ++feat.length;
            if (graph.is_frozen(*it)) cache_.emplace(*it, feat);
        }
        return feat;
    }

    AffinityScore combined_affinity(const ACGraph& graph, StateId child, StateId parent) {
        const auto& c = graph.node(child);
        const auto& p = graph.node(parent);
        if (p.frame >= c.frame) throw PreconditionError("combined_affinity: parent must precede child");
        const TrackletFeatures feat = features(graph, parent);
        const KalmanPrediction pred = kalman_predict(feat.kalman, c.frame, cfg_);
        const double mot = motion_affinity(pred.center(), Eigen::Vector2d(c.obs.bbox.cx(), c.obs.bbox.cy()), cfg_.var_mot);
        const double shp = shape_affinity(pred.shape, Eigen::Vector2d(c.obs.bbox.width, c.obs.bbox.height), cfg_.var_shp);
        double app = 1.0;
        if (c.obs.has_appearance() && !feat.appearance.empty())
            app = bhattacharyya_coefficient(feat.appearance.mean(), c.obs.appearance);
        return make_score(app, mot, shp);
    }

    ACGraph::Scorer scorer() {
        return [this](const ACGraph& g, StateId child, StateId parent) { return combined_affinity(g, child, parent).total; };
    }

    void clear_cache() { cache_.clear(); }

private:
    AffinityConfig cfg_;
    std::unordered_map<StateId, TrackletFeatures> cache_;
};

}  // namespace acmot
