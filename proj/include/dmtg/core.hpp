#pragma once

// Geometry, probability, and complexity primitives shared by the rest of the
// library. Everything here is a pure function over immutable value types.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmtg {

struct Point {
    double x{0.0};
    double y{0.0};

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
    friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }

    [[nodiscard]] double norm() const { return std::hypot(x, y); }
    [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double dist(Point a, Point b) { return (a - b).norm(); }

/// 2x2 symmetric covariance, screen-units^2. Stored as the three free entries.
struct Cov2 {
    double xx{0.0};
    double xy{0.0};
    double yy{0.0};

    [[nodiscard]] double det() const { return xx * yy - xy * xy; }
    [[nodiscard]] double trace() const { return xx + yy; }

    // Eigenvalues of a symmetric 2x2; used for PSD checks and sampling.
    [[nodiscard]] std::pair<double, double> eigenvalues() const {
        const double mean = 0.5 * trace();
        const double d = std::sqrt(std::max(0.0, mean * mean - det()));
        return {mean - d, mean + d};
    }
    [[nodiscard]] bool psd(double slack = 1e-9) const {
        return eigenvalues().first >= -slack;
    }

    friend Cov2 operator+(Cov2 a, Cov2 b) { return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }
    friend Cov2 operator*(double s, Cov2 c) { return {s * c.xx, s * c.xy, s * c.yy}; }
};

/// A generation request: endpoints, node budget, complexity target, screen.
struct TaskSpec {
    Point start;
    Point end;
    std::size_t m{1};          // node moves; trajectory has m+1 effective nodes
    double alpha_bar{1.0};     // complexity target in (0,1]; 1 = straight line
    double screen_w{1920.0};
    double screen_h{1080.0};
    std::size_t n_max{95};     // max node budget; buffer length is n_max+1

    void validate() const {
        if (!start.finite() || !end.finite())
            throw std::invalid_argument("TaskSpec: non-finite endpoint");
        if (start == end)
            throw std::invalid_argument("TaskSpec: start == end (degenerate task)");
        if (m < 1 || m > n_max)
            throw std::invalid_argument("TaskSpec: m out of [1, n_max]");
        if (!(alpha_bar > 0.0) || alpha_bar > 1.0)
            throw std::invalid_argument("TaskSpec: alpha_bar out of (0,1]");
        if (!(screen_w > 0.0) || !(screen_h > 0.0))
            throw std::invalid_argument("TaskSpec: non-positive screen size");
    }

    [[nodiscard]] Point delta() const { return end - start; }
};

/// Ordered 2D point sequence with an effective-length mask. Entries past
/// effective_len are the mask value <0,0>; real nodes that happen to sit at
/// the origin are disambiguated solely by effective_len.
struct Trajectory {
    std::vector<Point> points;
    std::size_t effective_len{0};
    std::vector<double> t_ms;  // empty = timestamps absent; else size == effective_len

    [[nodiscard]] bool has_timestamps() const { return !t_ms.empty(); }
    [[nodiscard]] Point front() const { return points.at(0); }
    [[nodiscard]] Point back_effective() const { return points.at(effective_len - 1); }

    void validate() const {
        if (effective_len < 1 || effective_len > points.size())
            throw std::invalid_argument("Trajectory: effective_len out of range");
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!points[i].finite())
                throw std::invalid_argument("Trajectory: non-finite point at " + std::to_string(i));
            if (i >= effective_len && !(points[i] == Point{0.0, 0.0}))
                throw std::invalid_argument("Trajectory: mask slot not <0,0> at " + std::to_string(i));
        }
        if (!t_ms.empty()) {
            if (t_ms.size() != effective_len)
                throw std::invalid_argument("Trajectory: timestamp count != effective_len");
            for (std::size_t i = 1; i < t_ms.size(); ++i)
                if (!(t_ms[i] > t_ms[i - 1]))
                    throw std::invalid_argument("Trajectory: timestamps not strictly increasing");
        }
    }
};

constexpr double kDefaultKc = 1.0 / 6.0;

inline Point midpoint(const TaskSpec& task) {
    return {0.5 * (task.start.x + task.end.x), 0.5 * (task.start.y + task.end.y)};
}

/// Isotropic initialization covariance: ((kc*dx)^2 + (kc*dy)^2) * I.
inline Cov2 noise_cov(const TaskSpec& task, double k_c = kDefaultKc) {
    if (!(k_c > 0.0)) throw std::invalid_argument("noise_cov: k_c must be positive");
    const Point d = task.delta();
    if (d.x == 0.0 && d.y == 0.0) throw std::invalid_argument("noise_cov: degenerate task");
    const double s = (k_c * d.x) * (k_c * d.x) + (k_c * d.y) * (k_c * d.y);
    return {s, 0.0, s};
}

/// Rank-1 covariance aligned with the straight start->end path: kc^2 * d d^T.
inline Cov2 direction_cov(const TaskSpec& task, double k_c = kDefaultKc) {
    if (!(k_c > 0.0)) throw std::invalid_argument("direction_cov: k_c must be positive");
    const Point d = task.delta();
    if (d.x == 0.0 && d.y == 0.0) throw std::invalid_argument("direction_cov: degenerate task");
    const double k2 = k_c * k_c;
    return {k2 * d.x * d.x, k2 * d.x * d.y, k2 * d.y * d.y};
}

/// a * Sigma_eps + (1-a) * Sigma_dir; PSD for every a in [0,1].
inline Cov2 mixture_cov(const TaskSpec& task, double a, double k_c = kDefaultKc) {
    if (!(a >= 0.0) || !(a <= 1.0)) throw std::invalid_argument("mixture_cov: a outside [0,1]");
    return a * noise_cov(task, k_c) + (1.0 - a) * direction_cov(task, k_c);
}

/// Differential entropy of a bivariate Gaussian, in nats.
inline double gaussian_entropy(const Cov2& cov) {
    const double d = cov.det();
    if (!(d > 0.0))
        throw std::invalid_argument("gaussian_entropy: singular covariance (rank-deficient)");
    return std::log(2.0 * M_PI * M_E) + 0.5 * std::log(d);
}

/// Sum of consecutive Euclidean segment lengths over effective nodes.
inline double path_length(const Trajectory& traj) {
    if (traj.effective_len < 1) throw std::invalid_argument("path_length: empty trajectory");
    double total = 0.0;
    for (std::size_t i = 1; i < traj.effective_len; ++i)
        total += dist(traj.points[i - 1], traj.points[i]);
    return total;
}

/// Total edge weight of the Euclidean minimum spanning tree (Prim, O(n^2)).
inline double mst_length(const std::vector<Point>& points) {
    const std::size_t n = points.size();
    if (n < 2) throw std::invalid_argument("mst_length: need at least 2 points");
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<bool> used(n, false);
    best[0] = 0.0;
    double total = 0.0;
    for (std::size_t iter = 0; iter < n; ++iter) {
        std::size_t u = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!used[i] && (u == n || best[i] < best[u])) u = i;
        used[u] = true;
        total += best[u];
        for (std::size_t v = 0; v < n; ++v)
            if (!used[v]) best[v] = std::min(best[v], dist(points[u], points[v]));
    }
    return total;
}

/// Normalized complexity alpha_bar = D / L in (0,1]; 1 = straight line.
/// Equivalently 1/(alpha+1) with alpha = L/D - 1 the excess path ratio.
inline double complexity_ratio(const Trajectory& traj) {
    if (traj.effective_len < 2)
        throw std::invalid_argument("complexity_ratio: need >= 2 effective nodes");
    const double len = path_length(traj);
    if (!(len > 0.0)) throw std::invalid_argument("complexity_ratio: zero path length");
    const double direct = dist(traj.front(), traj.back_effective());
    if (!(direct > 0.0)) throw std::invalid_argument("complexity_ratio: coincident endpoints");
    return direct / len;
}

/// Excess path ratio alpha = L/D - 1 in [0, inf); 0 = straight line.
inline double excess_path_ratio(const Trajectory& traj) {
    return 1.0 / complexity_ratio(traj) - 1.0;
}

/// Arc-length-uniform linear resampling to m_new+1 nodes; endpoints exact.
/// Timestamps, when present, are interpolated along the same arc positions.
inline Trajectory resample(const Trajectory& traj, std::size_t m_new) {
    if (traj.effective_len < 2) throw std::invalid_argument("resample: need >= 2 effective nodes");
    if (m_new < 2) throw std::invalid_argument("resample: m_new must be >= 2");
    const std::size_t n = traj.effective_len;
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        cum[i] = cum[i - 1] + dist(traj.points[i - 1], traj.points[i]);
    const double total = cum.back();
    if (!(total > 0.0)) throw std::invalid_argument("resample: degenerate (zero-length) input");

    Trajectory out;
    out.effective_len = m_new + 1;
    out.points.resize(m_new + 1);
    if (traj.has_timestamps()) out.t_ms.resize(m_new + 1);
    std::size_t seg = 1;
    for (std::size_t j = 0; j <= m_new; ++j) {
        const double target = total * static_cast<double>(j) / static_cast<double>(m_new);
        while (seg + 1 < n && cum[seg] < target) ++seg;
        const double seg_len = cum[seg] - cum[seg - 1];
        const double u = seg_len > 0.0 ? (target - cum[seg - 1]) / seg_len : 0.0;
        out.points[j] = traj.points[seg - 1] + u * (traj.points[seg] - traj.points[seg - 1]);
        if (traj.has_timestamps())
            out.t_ms[j] = traj.t_ms[seg - 1] + u * (traj.t_ms[seg] - traj.t_ms[seg - 1]);
    }
    out.points[0] = traj.points[0];
    out.points[m_new] = traj.points[n - 1];
    if (!out.t_ms.empty()) {
        // Arc-length ties can produce equal interpolated stamps; nudge to keep
        // the strict-monotonicity invariant.
        for (std::size_t j = 1; j <= m_new; ++j)
            if (out.t_ms[j] <= out.t_ms[j - 1]) out.t_ms[j] = out.t_ms[j - 1] + 1e-6;
    }
    return out;
}

}  // namespace dmtg
