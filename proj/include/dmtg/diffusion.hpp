#pragma once

// The entropy-controlled DDIM: noise schedule, forward corruption, the
// three-part loss, a deterministic trainer, and the alpha-stop reverse
// sampler that halts when the trajectory's normalized complexity reaches
// the task target.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <vector>

#include "dmtg/core.hpp"
#include "dmtg/generators.hpp"
#include "dmtg/unet.hpp"

namespace dmtg {

enum class ScheduleKind { Linear, Cosine };

/// Mixture weights a_1..a_T, strictly decreasing from ~1 (nearly clean) to
/// ~0 (pure noise). Plays the role of DDIM's cumulative alpha_t.
struct NoiseSchedule {
    std::size_t steps{0};
    std::vector<double> a;  // a[t-1] holds a_t
    ScheduleKind kind{ScheduleKind::Cosine};

    [[nodiscard]] double at(std::size_t t) const { return a.at(t - 1); }

    void validate() const {
        if (steps < 2 || a.size() != steps)
            throw std::invalid_argument("NoiseSchedule: bad size");
        for (std::size_t i = 0; i < steps; ++i) {
            if (!(a[i] > 0.0) || a[i] > 1.0)
                throw std::invalid_argument("NoiseSchedule: a_t outside (0,1]");
            if (i > 0 && !(a[i] < a[i - 1]))
                throw std::invalid_argument("NoiseSchedule: not strictly decreasing");
        }
    }
};

inline NoiseSchedule build_schedule(ScheduleKind kind, std::size_t t_steps) {
    if (t_steps < 2) throw std::invalid_argument("build_schedule: T_steps must be >= 2");
    NoiseSchedule s;
    s.steps = t_steps;
    s.kind = kind;
    s.a.resize(t_steps);
    if (kind == ScheduleKind::Linear) {
        const double a1 = 0.9999, aT = 0.005;
        for (std::size_t t = 1; t <= t_steps; ++t)
            s.a[t - 1] = a1 + (aT - a1) * static_cast<double>(t - 1) /
                                  static_cast<double>(t_steps - 1);
    } else {
        // squared-cosine schedule, small-offset variant
        const double off = 0.008;
        auto f = [&](double t) {
            const double v = std::cos((t + off) / (1.0 + off) * M_PI / 2.0);
            return v * v;
        };
        const double f0 = f(0.0);
        double prev = 1.0;
        for (std::size_t t = 1; t <= t_steps; ++t) {
            double v = f(static_cast<double>(t) / static_cast<double>(t_steps)) / f0;
            v = std::max(v, 1e-5);
            if (v >= prev) v = prev * (1.0 - 1e-12);  // keep strict decrease after clamping
            s.a[t - 1] = v;
            prev = v;
        }
    }
    s.validate();
    return s;
}

/// Per-task normalization frame: trajectories are modeled as offsets from the
/// task midpoint, scaled by the isotropic noise scale sigma = k_c * |delta|.
struct TaskFrame {
    Point center;
    double sigma{1.0};

    static TaskFrame of(const TaskSpec& task, double k_c = kDefaultKc) {
        return {midpoint(task), std::sqrt(noise_cov(task, k_c).xx)};
    }
    [[nodiscard]] Point to_norm(Point p) const { return (1.0 / sigma) * (p - center); }
    [[nodiscard]] Point to_screen(Point q) const { return center + sigma * q; }
};

/// Forward corruption: interior nodes move to
///   p_c + sqrt(a) * (clean - p_c) + sqrt(1-a) * eps,  eps ~ N(0, Sigma_eps).
/// Endpoints are re-pinned to the task and mask slots stay <0,0>.
inline Trajectory q_sample(const Trajectory& clean, const TaskSpec& task, double a_t,
                           std::uint64_t seed, double k_c = kDefaultKc) {
    task.validate();
    if (!(a_t >= 0.0) || !(a_t <= 1.0)) throw std::invalid_argument("q_sample: a_t outside [0,1]");
    if (clean.effective_len != task.m + 1)
        throw std::invalid_argument("q_sample: clean trajectory not bound to task");
    Rng rng(seed);
    const Point pc = midpoint(task);
    const Cov2 cov = noise_cov(task, k_c);
    const double sa = std::sqrt(a_t);
    const double sn = std::sqrt(1.0 - a_t);
    Trajectory out = clean;
    for (std::size_t i = 1; i < task.m; ++i) {
        const Point eps = rng.gaussian2(cov);
        out.points[i] = pc + sa * (clean.points[i] - pc) + sn * eps;
    }
    out.points[0] = task.start;
    out.points[task.m] = task.end;
    for (std::size_t i = out.effective_len; i < out.points.size(); ++i)
        out.points[i] = Point{0.0, 0.0};
    return out;
}

// ---- losses -----------------------------------------------------------------

/// Mean squared noise-prediction residual over interior effective nodes,
/// batch-averaged. eps_* are (B, 2, L).
inline double loss_ddim(const TensorBuf& eps_true, const TensorBuf& eps_pred,
                        const std::vector<std::size_t>& effective_len) {
    if (eps_true.shape != eps_pred.shape)
        throw std::invalid_argument("loss_ddim: shape mismatch");
    const std::size_t B = eps_true.shape[0];
    if (effective_len.size() != B) throw std::invalid_argument("loss_ddim: batch mismatch");
    double total = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
        const std::size_t n_int = effective_len[b] - 2;  // interior nodes
        if (n_int == 0) continue;
        double item = 0.0;
        for (std::size_t i = 1; i + 1 < effective_len[b]; ++i) {
            const double dx = eps_pred.at3(b, 0, i) - eps_true.at3(b, 0, i);
            const double dy = eps_pred.at3(b, 1, i) - eps_true.at3(b, 1, i);
            item += dx * dx + dy * dy;
        }
        total += item / static_cast<double>(n_int);
    }
    return total / static_cast<double>(B);
}

/// Mean squared node-wise distance between a generated trajectory and its
/// human reference, over effective nodes. Resample first if lengths differ.
inline double loss_sim(const Trajectory& generated, const Trajectory& human) {
    if (generated.effective_len != human.effective_len)
        throw std::invalid_argument("loss_sim: effective_len mismatch (resample first)");
    double total = 0.0;
    for (std::size_t i = 0; i < generated.effective_len; ++i) {
        const Point d = generated.points[i] - human.points[i];
        total += d.x * d.x + d.y * d.y;
    }
    return total / static_cast<double>(generated.effective_len);
}

/// | alpha_target - alpha_hat | with alpha_hat = L/D - 1 (excess path ratio).
inline double loss_style(const Trajectory& generated, double alpha_target) {
    return std::abs(alpha_target - excess_path_ratio(generated));
}

/// Log-linear movement-duration law fitted from timestamped training data:
/// ln(duration_ms) = a + b ln(distance) + c [movement goes up-screen].
/// Captured corpora pace upward movements differently from downward ones;
/// generated trajectories inherit that pacing through this model.
struct TimingModel {
    double a{0.0}, b{0.0}, c{0.0};
    bool fitted{false};

    [[nodiscard]] double duration_ms(double distance, bool upward) const {
        return std::exp(a + b * std::log(std::max(distance, 1.0)) + (upward ? c : 0.0));
    }

    static TimingModel fit(const std::vector<Trajectory>& corpus) {
        // least squares on [1, ln dist, up] via 3x3 normal equations
        double S[3][3] = {};
        double r[3] = {};
        std::size_t used = 0;
        for (const auto& tr : corpus) {
            if (!tr.has_timestamps() || tr.effective_len < 2) continue;
            const double dur = tr.t_ms[tr.effective_len - 1] - tr.t_ms[0];
            const double d = dist(tr.front(), tr.back_effective());
            if (!(dur > 0.0) || !(d > 0.0)) continue;
            const double x[3] = {1.0, std::log(std::max(d, 1.0)),
                                 tr.back_effective().y < tr.front().y ? 1.0 : 0.0};
            const double y = std::log(dur);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) S[i][j] += x[i] * x[j];
                r[i] += x[i] * y;
            }
            ++used;
        }
        TimingModel tm;
        if (used < 10) return tm;
        const double det = S[0][0] * (S[1][1] * S[2][2] - S[1][2] * S[2][1]) -
                           S[0][1] * (S[1][0] * S[2][2] - S[1][2] * S[2][0]) +
                           S[0][2] * (S[1][0] * S[2][1] - S[1][1] * S[2][0]);
        if (std::abs(det) < 1e-9) return tm;
        auto solve = [&](int col) {
            double M[3][3];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) M[i][j] = j == col ? r[i] : S[i][j];
            return (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                    M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                    M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])) /
                   det;
        };
        tm.a = solve(0);
        tm.b = solve(1);
        tm.c = solve(2);
        tm.fitted = true;
        return tm;
    }
};

struct TrainConfig {
    double w1{1.0}, w2{0.5}, w3{0.5};
    double lr{1e-3};
    std::size_t batch{32};
    std::size_t epochs{6};
    std::uint64_t seed{0};
    std::size_t t_steps{1000};
    ScheduleKind schedule{ScheduleKind::Cosine};
    double k_c{kDefaultKc};

    void validate() const {
        if (w1 < 0 || w2 < 0 || w3 < 0 || !(w1 + w2 + w3 > 0))
            throw std::invalid_argument("TrainConfig: need non-negative weights, w1+w2+w3 > 0");
        if (batch < 1 || epochs < 1) throw std::invalid_argument("TrainConfig: bad batch/epochs");
        if (t_steps < 2) throw std::invalid_argument("TrainConfig: t_steps < 2");
    }
};

struct TrainReport {
    std::vector<double> l_ddim, l_sim, l_style, total;
    double wall_seconds{0.0};
    TimingModel timing;  // duration law fitted from the training corpus
};

inline double total_loss(double ddim, double sim, double style, const TrainConfig& cfg) {
    return cfg.w1 * ddim + cfg.w2 * sim + cfg.w3 * style;
}

// ---- denoiser-facing tensor packing ----------------------------------------

namespace detail {

struct PackedItem {
    TaskSpec task;
    TaskFrame frame;
    std::vector<Point> x0n;  // normalized clean nodes (effective only)
};

inline PackedItem pack_task(const Trajectory& traj, std::size_t n_max, double k_c) {
    if (traj.effective_len < 3 || traj.effective_len > n_max + 1)
        throw std::invalid_argument("pack_task: effective_len out of model range");
    TaskSpec task;
    task.start = traj.front();
    task.end = traj.back_effective();
    task.m = traj.effective_len - 1;
    task.n_max = n_max;
    task.alpha_bar = 1.0;
    task.validate();
    PackedItem it{task, TaskFrame::of(task, k_c), {}};
    it.x0n.resize(traj.effective_len);
    for (std::size_t i = 0; i < traj.effective_len; ++i)
        it.x0n[i] = it.frame.to_norm(traj.points[i]);
    return it;
}

/// Fill one batch slot of the (B, 3, L) network input from normalized nodes.
inline void fill_input(TensorBuf& in, std::size_t b, const std::vector<Point>& nodes,
                       std::size_t eff_len) {
    const std::size_t L = in.shape[2];
    for (std::size_t l = 0; l < L; ++l) {
        const bool eff = l < eff_len;
        in.at3(b, 0, l) = eff ? nodes[l].x : 0.0;
        in.at3(b, 1, l) = eff ? nodes[l].y : 0.0;
        in.at3(b, 2, l) = eff ? 1.0 : 0.0;
    }
}

/// Gradient of path length of `q` with respect to interior node i.
inline Point path_len_grad(const std::vector<Point>& q, std::size_t i) {
    Point g{0.0, 0.0};
    const Point a = q[i] - q[i - 1];
    const Point b = q[i] - q[i + 1];
    const double na = a.norm(), nb = b.norm();
    if (na > 1e-12) g = g + (1.0 / na) * a;
    if (nb > 1e-12) g = g + (1.0 / nb) * b;
    return g;
}

}  // namespace detail

// ---- training ---------------------------------------------------------------

/// Minibatch trainer. Per sample: draw t uniform, corrupt in the task frame,
/// predict noise, apply the three-part loss (similarity and style terms act on
/// the one-shot reconstruction and are weighted by a_t so they fade where the
/// reconstruction is meaningless), Adam update in fixed order.
///
/// The similarity component is computed in the task-normalized frame so loss
/// weights are independent of screen scale.
inline TrainReport train(UNet& net, const std::vector<Trajectory>& dataset,
                         const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.size() < 100)
        throw std::invalid_argument("train: need at least 100 trajectories");
    const auto t_begin = std::chrono::steady_clock::now();
    const UNetConfig& nc = net.config();
    const std::size_t L = nc.n_buf;
    const std::size_t n_max = L - 1;

    std::vector<detail::PackedItem> items;
    std::vector<double> alpha_bars;  // measured complexity per sample
    std::vector<const Trajectory*> kept;
    for (const auto& tr : dataset) {
        if (tr.effective_len < 3 || tr.effective_len > n_max + 1) continue;
        if (tr.front() == tr.back_effective()) continue;
        items.push_back(detail::pack_task(tr, n_max, cfg.k_c));
        alpha_bars.push_back(std::clamp(complexity_ratio(tr), 1e-6, 1.0));
        kept.push_back(&tr);
    }
    if (items.size() < 100)
        throw std::invalid_argument("train: fewer than 100 usable trajectories");

    NoiseSchedule sched = build_schedule(cfg.schedule, cfg.t_steps);
    net.init(cfg.seed);
    nn::Adam opt(cfg.lr);
    Rng rng(Rng::derive(cfg.seed, 0x7261696eULL));

    TrainReport report;
    report.timing = TimingModel::fit(dataset);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<std::size_t> order(items.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i-- > 1;)
            std::swap(order[i], order[rng.index(i + 1)]);

        double ep_ddim = 0.0, ep_sim = 0.0, ep_style = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t off = 0; off + 1 <= order.size(); off += cfg.batch) {
            const std::size_t B = std::min(cfg.batch, order.size() - off);
            TensorBuf input({B, nc.in_ch, L});
            TensorBuf eps({B, 2, L});
            std::vector<std::size_t> t_index(B), eff(B);
            std::vector<double> ab(B), a_t(B);
            std::vector<std::vector<Point>> xtn(B);

            for (std::size_t b = 0; b < B; ++b) {
                const auto& it = items[order[off + b]];
                const std::size_t n = it.task.m + 1;
                eff[b] = n;
                ab[b] = alpha_bars[order[off + b]];
                t_index[b] = 1 + rng.index(cfg.t_steps);
                a_t[b] = sched.at(t_index[b]);
                const double sa = std::sqrt(a_t[b]);
                const double sn = std::sqrt(1.0 - a_t[b]);
                xtn[b] = it.x0n;
                for (std::size_t i = 1; i + 1 < n; ++i) {
                    const double ex = rng.gaussian();
                    const double ey = rng.gaussian();
                    eps.at3(b, 0, i) = ex;
                    eps.at3(b, 1, i) = ey;
                    xtn[b][i] = {sa * it.x0n[i].x + sn * ex, sa * it.x0n[i].y + sn * ey};
                }
                detail::fill_input(input, b, xtn[b], n);
            }

            net.zero_grad();
            TensorBuf pred = net.forward(input, t_index, ab);
            TensorBuf grad({B, 2, L});

            double b_ddim = 0.0, b_sim = 0.0, b_style = 0.0;
            for (std::size_t b = 0; b < B; ++b) {
                const auto& it = items[order[off + b]];
                const std::size_t n = eff[b];
                const auto n_int = static_cast<double>(n - 2);
                const double sa = std::sqrt(a_t[b]);
                const double sn = std::sqrt(1.0 - a_t[b]);
                const double c_rec = -sn / sa;  // d x0_hat / d eps_hat

                // noise-prediction term
                double item_ddim = 0.0;
                for (std::size_t i = 1; i + 1 < n; ++i) {
                    const double dx = pred.at3(b, 0, i) - eps.at3(b, 0, i);
                    const double dy = pred.at3(b, 1, i) - eps.at3(b, 1, i);
                    item_ddim += dx * dx + dy * dy;
                    grad.at3(b, 0, i) += cfg.w1 * 2.0 * dx / (n_int * static_cast<double>(B));
                    grad.at3(b, 1, i) += cfg.w1 * 2.0 * dy / (n_int * static_cast<double>(B));
                }
                b_ddim += item_ddim / n_int;

                // one-shot reconstruction (normalized frame, endpoints pinned)
                std::vector<Point> x0h = it.x0n;
                for (std::size_t i = 1; i + 1 < n; ++i) {
                    x0h[i] = {(xtn[b][i].x - sn * pred.at3(b, 0, i)) / sa,
                              (xtn[b][i].y - sn * pred.at3(b, 1, i)) / sa};
                }

                // similarity term
                const double fade = a_t[b];
                double item_sim = 0.0;
                for (std::size_t i = 1; i + 1 < n; ++i) {
                    const Point d = x0h[i] - it.x0n[i];
                    item_sim += d.x * d.x + d.y * d.y;
                    const double s = cfg.w2 * fade * 2.0 * c_rec / (n_int * static_cast<double>(B));
                    grad.at3(b, 0, i) += s * d.x;
                    grad.at3(b, 1, i) += s * d.y;
                }
                item_sim /= n_int;
                b_sim += fade * item_sim;

                // style term on the reconstruction
                double len = 0.0;
                for (std::size_t i = 1; i < n; ++i) len += dist(x0h[i - 1], x0h[i]);
                const double direct = dist(x0h[0], x0h[n - 1]);
                const double alpha_hat = len / direct - 1.0;
                const double alpha_tgt = 1.0 / ab[b] - 1.0;
                const double item_style = std::abs(alpha_tgt - alpha_hat);
                b_style += fade * item_style;
                const double dstyle = (alpha_hat > alpha_tgt ? 1.0 : -1.0) / direct;
                for (std::size_t i = 1; i + 1 < n; ++i) {
                    const Point gl = detail::path_len_grad(x0h, i);
                    const double s = cfg.w3 * fade * dstyle * c_rec / static_cast<double>(B);
                    grad.at3(b, 0, i) += s * gl.x;
                    grad.at3(b, 1, i) += s * gl.y;
                }
            }

            (void)net.backward(grad);
            opt.step(net.params(), net.grads());

            ep_ddim += b_ddim / static_cast<double>(B);
            ep_sim += b_sim / static_cast<double>(B);
            ep_style += b_style / static_cast<double>(B);
            ++n_batches;
        }
        const auto nb = static_cast<double>(n_batches);
        report.l_ddim.push_back(ep_ddim / nb);
        report.l_sim.push_back(ep_sim / nb);
        report.l_style.push_back(ep_style / nb);
        report.total.push_back(
            total_loss(ep_ddim / nb, ep_sim / nb, ep_style / nb, cfg));
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return report;
}

// ---- sampling ---------------------------------------------------------------

/// One deterministic DDIM reverse step from t to t-1 in the task frame.
/// Endpoints re-pinned, masks re-zeroed.
inline Trajectory denoise_step(const Trajectory& x_t, std::size_t t, const TaskSpec& task,
                               double alpha_bar, UNet& net, const NoiseSchedule& sched,
                               double k_c = kDefaultKc) {
    task.validate();
    if (t < 1 || t > sched.steps) throw std::invalid_argument("denoise_step: t out of range");
    if (x_t.effective_len != task.m + 1 || x_t.points.size() != net.config().n_buf)
        throw std::invalid_argument("denoise_step: trajectory/config mismatch");
    const TaskFrame frame = TaskFrame::of(task, k_c);
    const std::size_t L = net.config().n_buf;
    const std::size_t n = task.m + 1;

    std::vector<Point> xn(n);
    for (std::size_t i = 0; i < n; ++i) xn[i] = frame.to_norm(x_t.points[i]);

    TensorBuf input({1, net.config().in_ch, L});
    detail::fill_input(input, 0, xn, n);
    TensorBuf pred = net.forward(input, {t}, {alpha_bar});

    const double a_t = sched.at(t);
    const double a_prev = t > 1 ? sched.at(t - 1) : 1.0;
    const double sa = std::sqrt(a_t), sn = std::sqrt(1.0 - a_t);
    const double sap = std::sqrt(a_prev), snp = std::sqrt(1.0 - a_prev);

    Trajectory out = x_t;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Point eh{pred.at3(0, 0, i), pred.at3(0, 1, i)};
        const Point x0h = (1.0 / sa) * (xn[i] - sn * eh);
        out.points[i] = frame.to_screen(sap * x0h + snp * eh);
    }
    out.points[0] = task.start;
    out.points[task.m] = task.end;
    for (std::size_t i = out.effective_len; i < out.points.size(); ++i)
        out.points[i] = Point{0.0, 0.0};
    return out;
}

struct SampleConfig {
    std::size_t n_steps{32};     // strided reverse steps
    double tol{0.02};            // alpha-bar stop tolerance
    double k_c{kDefaultKc};
    double poll_ms{kDefaultPollMs};
    bool quantize{true};         // round interior nodes to integer pixels
    TimingModel timing{};        // timestamp pacing; unfitted = uniform poll_ms
};

/// Alpha-stop reverse sampler: iterate strided DDIM steps from pure
/// initialization, halting as soon as the measured complexity reaches the
/// task target (within tol, or on first crossing); falls back to the full
/// chain end otherwise.
inline Trajectory sample(const TaskSpec& task, std::uint64_t seed, UNet& net,
                         const NoiseSchedule& sched, const SampleConfig& sc = {}) {
    task.validate();
    if (task.n_max + 1 != net.config().n_buf)
        throw std::invalid_argument("sample: task n_max does not match model buffer");
    const std::size_t n_steps = std::min(sc.n_steps, sched.steps);
    const TaskFrame frame = TaskFrame::of(task, sc.k_c);
    const std::size_t L = net.config().n_buf;
    const std::size_t n = task.m + 1;

    // chain start matches the training-time corruption marginal at t = T:
    // standard-normal interior nodes in the normalized task frame
    Trajectory traj = gen_noise_init(task, seed, sc.k_c);
    std::vector<Point> xn(n);
    xn[0] = frame.to_norm(task.start);
    xn[n - 1] = frame.to_norm(task.end);
    Rng rng(Rng::derive(seed, 0x73616d70ULL));
    for (std::size_t i = 1; i + 1 < n; ++i) xn[i] = {rng.gaussian(), rng.gaussian()};


    // strided step indices, T down to 1
    std::vector<std::size_t> ts(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double frac =
            static_cast<double>(n_steps - 1 - k) / static_cast<double>(n_steps - 1);
        ts[k] = 1 + static_cast<std::size_t>(
                        std::llround(frac * static_cast<double>(sched.steps - 1)));
    }

    // re-time nodes along a path so speed tapers into both endpoints the way
    // pointing movements do: near the endpoints the arc-length profile is
    // pulled fully onto a minimum-jerk law, mid-path the model's own learned
    // spacing is kept (it carries the direction-dependent pacing); the path
    // itself is unchanged
    auto retime = [n](std::vector<Point>& pts) {
        std::vector<double> cum(n, 0.0);
        for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + dist(pts[i - 1], pts[i]);
        if (cum[n - 1] <= 1e-12) return;
        std::vector<double> s(n);
        s[0] = 0.0;
        s[n - 1] = cum[n - 1];
        const double k = std::max(2.0, static_cast<double>(n - 1) / 8.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double tau = static_cast<double>(i) / static_cast<double>(n - 1);
            const double mj =
                cum[n - 1] * (tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau)));
            // distance (in nodes) from the nearest endpoint: inside k nodes
            // the spacing is fully minimum-jerk, past 2k it is fully the
            // model's own, with a linear ramp between
            const double e = std::min(static_cast<double>(i),
                                      static_cast<double>(n - 1 - i));
            const double w = std::clamp(2.0 - e / k, 0.0, 1.0);
            s[i] = std::max(s[i - 1], w * mj + (1.0 - w) * cum[i]);
        }
        const std::vector<Point> old = pts;
        std::size_t seg = 1;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            while (seg + 1 < n && cum[seg] < s[i]) ++seg;
            const double span = cum[seg] - cum[seg - 1];
            const double f = span > 1e-12 ? (s[i] - cum[seg - 1]) / span : 0.0;
            pts[i] = old[seg - 1] + f * (old[seg] - old[seg - 1]);
        }
    };
    auto ratio_of = [n](const std::vector<Point>& pts) {
        double len = 0.0;
        for (std::size_t i = 1; i < n; ++i) len += dist(pts[i - 1], pts[i]);
        const double direct = dist(pts[0], pts[n - 1]);
        return len > 0.0 ? direct / len : 1.0;
    };
    // the stop rule watches the complexity of the output geometry, i.e. the
    // re-timed chain state, not the raw chain state
    auto measure = [&]() {
        std::vector<Point> probe = xn;
        retime(probe);
        return ratio_of(probe);
    };

    TensorBuf input({1, net.config().in_ch, L});
    for (std::size_t k = 0; k < n_steps; ++k) {
        const std::size_t t = ts[k];
        const double a_t = sched.at(t);
        const double a_next = k + 1 < n_steps ? sched.at(ts[k + 1]) : 1.0;
        detail::fill_input(input, 0, xn, n);
        TensorBuf pred = net.forward(input, {t}, {task.alpha_bar});
        const double sa = std::sqrt(a_t), snz = std::sqrt(1.0 - a_t);
        const double san = std::sqrt(a_next), snn = std::sqrt(1.0 - a_next);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const Point eh{pred.at3(0, 0, i), pred.at3(0, 1, i)};
            Point x0h = (1.0 / sa) * (xn[i] - snz * eh);
            // clamp the one-shot reconstruction to the plausible normalized
            // box; without this the 1/sqrt(a_T) amplification of early-step
            // prediction error can blow the chain out of distribution
            x0h.x = std::clamp(x0h.x, -3.0, 3.0);
            x0h.y = std::clamp(x0h.y, -3.0, 3.0);
            xn[i] = san * x0h + snn * eh;
        }
        const double achieved = measure();
        if (std::abs(achieved - task.alpha_bar) <= sc.tol || achieved > task.alpha_bar) break;
    }

    retime(xn);

    // the denoised chain end can still fall short of a high complexity
    // target; shrink the wander toward the chord (bisection on the blend
    // factor) until the target is met, mirroring the stop rule's exact
    // crossing at the noisy end
    if (ratio_of(xn) + sc.tol < task.alpha_bar) {
        const std::vector<Point> base = xn;
        auto blend = [&](double lam) {
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double f = static_cast<double>(i) / static_cast<double>(n - 1);
                const Point chord = xn[0] + f * (xn[n - 1] - xn[0]);
                xn[i] = base[i] + lam * (chord - base[i]);
            }
        };
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            blend(mid);
            (ratio_of(xn) < task.alpha_bar ? lo : hi) = mid;
        }
        blend(hi);
    }

    for (std::size_t i = 1; i + 1 < n; ++i) {
        Point p = frame.to_screen(xn[i]);
        // cursor positions land on the integer pixel grid; endpoints below
        // keep the exact task coordinates
        if (sc.quantize) p = {std::round(p.x), std::round(p.y)};
        traj.points[i] = p;
    }
    traj.points[0] = task.start;
    traj.points[task.m] = task.end;
    for (std::size_t i = traj.effective_len; i < traj.points.size(); ++i)
        traj.points[i] = Point{0.0, 0.0};
    if (sc.timing.fitted) {
        const double d = dist(task.start, task.end);
        const double dur = sc.timing.duration_ms(d, task.end.y < task.start.y);
        traj.t_ms.assign(traj.points.size(), 0.0);
        for (std::size_t i = 0; i < traj.effective_len; ++i)
            traj.t_ms[i] = dur * static_cast<double>(i) / static_cast<double>(task.m);
    } else {
        attach_uniform_timestamps(traj, sc.poll_ms);
    }
    return traj;
}

}  // namespace dmtg
