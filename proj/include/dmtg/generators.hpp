#pragma once

// Baseline trajectory generators (Linear, Bezier, Fitts) and the randomized
// diffusion initialization. Every generator is a pure function of
// (task, seed, config) and emits a task-bound Trajectory.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dmtg/core.hpp"
#include "dmtg/rng.hpp"

namespace dmtg {

enum class GeneratorKind { Linear, Bezier, Fitts, NoiseInit, DMTG };

constexpr double kDefaultPollMs = 8.0;  // 125 Hz polling

inline void attach_uniform_timestamps(Trajectory& traj, double poll_ms = kDefaultPollMs) {
    traj.t_ms.resize(traj.effective_len);
    for (std::size_t i = 0; i < traj.effective_len; ++i)
        traj.t_ms[i] = poll_ms * static_cast<double>(i);
}

/// m+1 equidistant collinear nodes from start to end.
inline Trajectory gen_linear(const TaskSpec& task, double poll_ms = kDefaultPollMs) {
    task.validate();
    Trajectory out;
    out.effective_len = task.m + 1;
    out.points.resize(task.m + 1);
    for (std::size_t i = 0; i <= task.m; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(task.m);
        out.points[i] = task.start + u * task.delta();
    }
    out.points[task.m] = task.end;
    attach_uniform_timestamps(out, poll_ms);
    return out;
}

namespace detail {

/// Centripetal-free Catmull-Rom interpolation through anchor points,
/// equivalent to a composite cubic Bezier with tangents from neighbours.
inline Point catmull_rom(const std::vector<Point>& a, double s) {
    const std::size_t nseg = a.size() - 1;
    const double clamped = std::clamp(s, 0.0, 1.0 - 1e-12);
    const auto seg = static_cast<std::size_t>(clamped * static_cast<double>(nseg));
    const double u = clamped * static_cast<double>(nseg) - static_cast<double>(seg);
    const Point p1 = a[seg];
    const Point p2 = a[seg + 1];
    const Point p0 = seg > 0 ? a[seg - 1] : p1 + (p1 - p2);
    const Point p3 = seg + 2 < a.size() ? a[seg + 2] : p2 + (p2 - p1);
    const double u2 = u * u;
    const double u3 = u2 * u;
    return 0.5 * (2.0 * p1 + u * (p2 - p0) +
                  u2 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                  u3 * (3.0 * p1 - 3.0 * p2 + p3 - p0));
}

}  // namespace detail

/// Smooth composite cubic curve through start/end with n_ctrl random interior
/// anchors drawn from N(p_c, Sigma_eps), sampled at m+1 arc-length-uniform
/// parameters. n_ctrl = 0 degrades to gen_linear.
inline Trajectory gen_bezier(const TaskSpec& task, std::uint64_t seed, int n_ctrl = 2,
                             double k_c = kDefaultKc, double poll_ms = kDefaultPollMs) {
    task.validate();
    if (n_ctrl < 0 || n_ctrl > 4) throw std::invalid_argument("gen_bezier: n_ctrl out of [0,4]");
    if (n_ctrl == 0) return gen_linear(task, poll_ms);

    Rng rng(seed);
    const Point pc = midpoint(task);
    const Cov2 cov = noise_cov(task, k_c);
    std::vector<Point> anchors;
    anchors.push_back(task.start);
    std::vector<Point> ctrl(static_cast<std::size_t>(n_ctrl));
    for (auto& p : ctrl) p = pc + rng.gaussian2(cov);
    // Order interior anchors by projection onto the task direction so the
    // curve progresses toward the target.
    const Point d = task.delta();
    std::sort(ctrl.begin(), ctrl.end(), [&](Point a, Point b) {
        return a.x * d.x + a.y * d.y < b.x * d.x + b.y * d.y;
    });
    anchors.insert(anchors.end(), ctrl.begin(), ctrl.end());
    anchors.push_back(task.end);

    // Dense sample, then arc-length resample to m+1 nodes.
    const std::size_t dense = std::max<std::size_t>(64, 32 * anchors.size());
    Trajectory densified;
    densified.effective_len = dense + 1;
    densified.points.resize(dense + 1);
    for (std::size_t i = 0; i <= dense; ++i)
        densified.points[i] = detail::catmull_rom(anchors, static_cast<double>(i) / dense);
    densified.points[0] = task.start;
    densified.points[dense] = task.end;

    Trajectory out = resample(densified, task.m);
    out.points[0] = task.start;
    out.points[task.m] = task.end;
    attach_uniform_timestamps(out, poll_ms);
    return out;
}

struct FittsParams {
    double a_ms{100.0};       // intercept
    double b_ms_per_bit{150.0};
    double target_w{30.0};    // target width, screen-units
};

inline double fitts_duration_ms(double distance, const FittsParams& fp = {}) {
    return fp.a_ms + fp.b_ms_per_bit * std::log2(distance / fp.target_w + 1.0);
}

/// Minimum-jerk position profile: s(0)=0, s(1)=1, zero velocity/acceleration
/// at both ends.
inline double min_jerk(double tau) {
    const double t2 = tau * tau;
    const double t3 = t2 * tau;
    return t3 * (10.0 - 15.0 * tau + 6.0 * t2);
}

/// Fitts-law pointing movement: bell-shaped speed profile along a mildly
/// perturbed path, duration from the Fitts formula, timestamps populated.
inline Trajectory gen_fitts(const TaskSpec& task, std::uint64_t seed, const FittsParams& fp = {}) {
    task.validate();
    Rng rng(seed);
    const Point d = task.delta();
    const double dist_total = d.norm();
    const double duration = fitts_duration_ms(dist_total, fp);
    const Point perp{-d.y / dist_total, d.x / dist_total};

    // Smooth lateral wander: two low-frequency sinusoids, zero at endpoints.
    const double amp1 = 0.04 * dist_total * rng.gaussian();
    const double amp2 = 0.02 * dist_total * rng.gaussian();

    Trajectory out;
    out.effective_len = task.m + 1;
    out.points.resize(task.m + 1);
    out.t_ms.resize(task.m + 1);
    for (std::size_t i = 0; i <= task.m; ++i) {
        const double tau = static_cast<double>(i) / static_cast<double>(task.m);
        const double s = min_jerk(tau);
        const double lateral = amp1 * std::sin(M_PI * tau) + amp2 * std::sin(2.0 * M_PI * tau);
        out.points[i] = task.start + s * d + lateral * std::sin(M_PI * tau) * perp;
        out.t_ms[i] = duration * tau;
    }
    out.points[0] = task.start;
    out.points[task.m] = task.end;
    return out;
}

/// Diffusion initialization per the masked-input scheme:
/// start || {p_c + eps_i} (m-1 interior draws, eps ~ N(0, Sigma_eps)) || end
/// || <0,0> masks up to the n_max+1 buffer. effective_len = m+1.
inline Trajectory gen_noise_init(const TaskSpec& task, std::uint64_t seed,
                                 double k_c = kDefaultKc) {
    task.validate();
    Rng rng(seed);
    const Point pc = midpoint(task);
    const Cov2 cov = noise_cov(task, k_c);
    Trajectory out;
    out.effective_len = task.m + 1;
    out.points.assign(task.n_max + 1, Point{0.0, 0.0});
    out.points[0] = task.start;
    for (std::size_t i = 1; i < task.m; ++i) out.points[i] = pc + rng.gaussian2(cov);
    out.points[task.m] = task.end;
    return out;
}

}  // namespace dmtg
