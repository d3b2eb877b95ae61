#pragma once

// Kinematic feature extraction and the acceleration-direction diagnostic.

#include <array>
#include <cmath>
#include <vector>

#include "dmtg/core.hpp"
#include "dmtg/generators.hpp"

namespace dmtg {

constexpr std::size_t kDirectionBins = 8;
// mean/std/max of speed, accel, jerk, curvature (12) + direction histogram (8)
// + pause count + complexity ratio + effective length
constexpr std::size_t kFeatureDim = 12 + kDirectionBins + 3;

using FeatureVec = std::array<double, kFeatureDim>;

namespace detail {

struct Stats {
    double mean{0.0}, sd{0.0}, max{0.0};
};

inline Stats summarize(const std::vector<double>& v) {
    if (v.empty()) return {};
    double mean = 0.0, mx = -1e308;
    for (double x : v) { mean += x; mx = std::max(mx, x); }
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    return {mean, std::sqrt(var), mx};
}

}  // namespace detail

/// Fixed-order kinematic statistics of one trajectory. Speed and acceleration
/// come from finite differences of positions over timestamps; trajectories
/// without timestamps are given uniform default-polling spacing first.
inline FeatureVec extract_features(const Trajectory& traj_in, double poll_ms = kDefaultPollMs) {
    if (traj_in.effective_len < 3)
        throw std::invalid_argument("extract_features: need >= 3 effective nodes");
    Trajectory traj = traj_in;
    if (!traj.has_timestamps()) attach_uniform_timestamps(traj, poll_ms);

    const std::size_t n = traj.effective_len;
    std::vector<double> speed, accel, jerk, curv;
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = (traj.t_ms[i] - traj.t_ms[i - 1]) / 1000.0;
        speed.push_back(dist(traj.points[i - 1], traj.points[i]) / std::max(dt, 1e-9));
    }
    for (std::size_t i = 1; i < speed.size(); ++i) {
        const double dt = (traj.t_ms[i + 1] - traj.t_ms[i - 1]) / 2000.0;
        accel.push_back((speed[i] - speed[i - 1]) / std::max(dt, 1e-9));
    }
    for (std::size_t i = 1; i < accel.size(); ++i) {
        const double dt = (traj.t_ms[i + 1] - traj.t_ms[i - 1]) / 2000.0;
        jerk.push_back((accel[i] - accel[i - 1]) / std::max(dt, 1e-9));
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Point a = traj.points[i] - traj.points[i - 1];
        const Point b = traj.points[i + 1] - traj.points[i];
        const double na = a.norm(), nb = b.norm();
        if (na < 1e-12 || nb < 1e-12) { curv.push_back(0.0); continue; }
        const double cross = a.x * b.y - a.y * b.x;
        const double dot = a.x * b.x + a.y * b.y;
        const double angle = std::atan2(std::abs(cross), dot);
        curv.push_back(angle / (0.5 * (na + nb)));
    }

    std::array<double, kDirectionBins> hist{};
    std::size_t n_seg = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const Point d = traj.points[i] - traj.points[i - 1];
        if (d.norm() < 1e-12) continue;
        double theta = std::atan2(d.y, d.x);           // (-pi, pi]
        if (theta < 0.0) theta += 2.0 * M_PI;          // [0, 2pi)
        auto bin = static_cast<std::size_t>(theta / (2.0 * M_PI) * kDirectionBins);
        if (bin >= kDirectionBins) bin = kDirectionBins - 1;
        hist[bin] += 1.0;
        ++n_seg;
    }
    if (n_seg > 0)
        for (auto& h : hist) h /= static_cast<double>(n_seg);

    double max_speed = 0.0;
    for (double s : speed) max_speed = std::max(max_speed, s);
    double pauses = 0.0;
    for (double s : speed)
        if (s < 0.01 * max_speed || max_speed == 0.0) pauses += 1.0;

    const auto s_sp = detail::summarize(speed);
    const auto s_ac = detail::summarize(accel);
    const auto s_jk = detail::summarize(jerk);
    const auto s_cv = detail::summarize(curv);

    FeatureVec f{};
    std::size_t k = 0;
    for (const auto& s : {s_sp, s_ac, s_jk, s_cv}) {
        f[k++] = s.mean;
        f[k++] = s.sd;
        f[k++] = s.max;
    }
    for (double h : hist) f[k++] = h;
    f[k++] = pauses;
    f[k++] = complexity_ratio(traj);
    f[k++] = static_cast<double>(n);
    return f;
}

struct AccelDirectionStats {
    std::vector<double> bin_edges;               // shared histogram edges
    std::vector<std::size_t> count_up, count_down;
    double mean_up{0.0}, mean_down{0.0};
    double asymmetry{0.0};                       // (mean_up - mean_down) / pooled sd
    std::size_t n_up{0}, n_down{0};
};

/// Classify per-step acceleration magnitudes by vertical movement direction
/// (up = toward smaller y) and score the asymmetry of the two distributions.
inline AccelDirectionStats accel_direction_stats(const std::vector<Trajectory>& corpus,
                                                 std::size_t n_bins = 32,
                                                 double poll_ms = kDefaultPollMs) {
    std::vector<double> up, down;
    for (const auto& traj_in : corpus) {
        if (traj_in.effective_len < 3) continue;
        Trajectory traj = traj_in;
        if (!traj.has_timestamps()) attach_uniform_timestamps(traj, poll_ms);
        for (std::size_t i = 1; i + 1 < traj.effective_len; ++i) {
            const double dt =
                (traj.t_ms[i + 1] - traj.t_ms[i - 1]) / 2000.0;  // seconds
            const Point acc2 = traj.points[i + 1] - 2.0 * traj.points[i] + traj.points[i - 1];
            // snap rounding residue on exactly-collinear spans to true zero so
            // constant-velocity corpora score 0 instead of amplified noise
            const double coord_scale =
                std::max({std::abs(traj.points[i].x), std::abs(traj.points[i].y), 1.0});
            const double a = acc2.norm() <= 1e-9 * coord_scale
                                 ? 0.0
                                 : acc2.norm() / std::max(dt * dt, 1e-12);
            const double dy = traj.points[i + 1].y - traj.points[i - 1].y;
            if (dy < 0.0) up.push_back(a);
            else if (dy > 0.0) down.push_back(a);
        }
    }
    if (up.size() + down.size() < 100)
        throw std::invalid_argument("accel_direction_stats: fewer than 100 movement segments");

    AccelDirectionStats out;
    out.n_up = up.size();
    out.n_down = down.size();
    const auto su = detail::summarize(up);
    const auto sd = detail::summarize(down);
    out.mean_up = su.mean;
    out.mean_down = sd.mean;
    const double pooled = std::sqrt(0.5 * (su.sd * su.sd + sd.sd * sd.sd));
    out.asymmetry = pooled > 1e-12 ? (su.mean - sd.mean) / pooled : 0.0;

    double hi = std::max(su.max, sd.max);
    if (!(hi > 0.0)) hi = 1.0;
    out.bin_edges.resize(n_bins + 1);
    for (std::size_t b = 0; b <= n_bins; ++b)
        out.bin_edges[b] = hi * static_cast<double>(b) / static_cast<double>(n_bins);
    out.count_up.assign(n_bins, 0);
    out.count_down.assign(n_bins, 0);
    auto binof = [&](double a) {
        auto b = static_cast<std::size_t>(a / hi * static_cast<double>(n_bins));
        return b >= n_bins ? n_bins - 1 : b;
    };
    for (double a : up) ++out.count_up[binof(a)];
    for (double a : down) ++out.count_down[binof(a)];
    return out;
}

}  // namespace dmtg
