#pragma once

// Distribution metrics (JSD, sliced EMD, MSE/RMSE, cosine similarity) and the
// 2D corpus embedding (deterministic PCA by default, seeded exact t-SNE as an
// optional slow path).

#include <algorithm>
#include <cmath>
#include <vector>

#include "dmtg/core.hpp"
#include "dmtg/features.hpp"
#include "dmtg/rng.hpp"

namespace dmtg {

struct Point2 {
    double x{0.0}, y{0.0};
};

/// Base-2 Jensen-Shannon divergence between two 2D sample sets, histogrammed
/// on a shared grid over the joint bounding box with add-one smoothing.
inline double jsd(const std::vector<Point2>& p_samples, const std::vector<Point2>& q_samples,
                  std::size_t bins = 32) {
    if (p_samples.empty() || q_samples.empty())
        throw std::invalid_argument("jsd: empty sample set");
    double lox = 1e308, loy = 1e308, hix = -1e308, hiy = -1e308;
    for (const auto* set : {&p_samples, &q_samples})
        for (const auto& s : *set) {
            lox = std::min(lox, s.x); hix = std::max(hix, s.x);
            loy = std::min(loy, s.y); hiy = std::max(hiy, s.y);
        }
    const double wx = std::max(hix - lox, 1e-12);
    const double wy = std::max(hiy - loy, 1e-12);
    auto binof = [&](const Point2& s) {
        auto bx = static_cast<std::size_t>((s.x - lox) / wx * static_cast<double>(bins));
        auto by = static_cast<std::size_t>((s.y - loy) / wy * static_cast<double>(bins));
        if (bx >= bins) bx = bins - 1;
        if (by >= bins) by = bins - 1;
        return by * bins + bx;
    };
    std::vector<double> hp(bins * bins, 1.0), hq(bins * bins, 1.0);  // add-one
    for (const auto& s : p_samples) hp[binof(s)] += 1.0;
    for (const auto& s : q_samples) hq[binof(s)] += 1.0;
    double sp = 0.0, sq = 0.0;
    for (double v : hp) sp += v;
    for (double v : hq) sq += v;
    double div = 0.0;
    for (std::size_t i = 0; i < hp.size(); ++i) {
        const double p = hp[i] / sp;
        const double q = hq[i] / sq;
        const double m = 0.5 * (p + q);
        if (p > 0.0) div += 0.5 * p * std::log2(p / m);
        if (q > 0.0) div += 0.5 * q * std::log2(q / m);
    }
    return std::max(0.0, div);
}

/// Exact 1D Wasserstein-1 between two empirical distributions.
inline double emd_1d(std::vector<double> p, std::vector<double> q) {
    if (p.empty() || q.empty()) throw std::invalid_argument("emd_1d: empty sample set");
    std::sort(p.begin(), p.end());
    std::sort(q.begin(), q.end());
    // integral of |F_p - F_q| over the merged support
    std::size_t i = 0, j = 0;
    double prev = std::min(p[0], q[0]);
    double total = 0.0;
    const double np = static_cast<double>(p.size()), nq = static_cast<double>(q.size());
    while (i < p.size() || j < q.size()) {
        const double x = (i < p.size() && (j >= q.size() || p[i] <= q[j])) ? p[i] : q[j];
        total += std::abs(static_cast<double>(i) / np - static_cast<double>(j) / nq) * (x - prev);
        prev = x;
        while (i < p.size() && p[i] == x) ++i;
        while (j < q.size() && q[j] == x) ++j;
    }
    return total;
}

/// Sliced Wasserstein-1: average over K seeded random projection directions
/// of the exact sorted-sample 1D distance.
inline double emd(const std::vector<Point2>& p_samples, const std::vector<Point2>& q_samples,
                  std::size_t k_dirs = 64, std::uint64_t seed = 1234) {
    if (p_samples.empty() || q_samples.empty())
        throw std::invalid_argument("emd: empty sample set");
    Rng rng(seed);
    double total = 0.0;
    for (std::size_t k = 0; k < k_dirs; ++k) {
        // stratified over [0, pi): one jittered direction per stratum keeps the
        // estimate seeded yet close to a dense direction grid
        const double theta =
            M_PI * (static_cast<double>(k) + rng.uniform(0.0, 1.0)) / static_cast<double>(k_dirs);
        const double cx = std::cos(theta), cy = std::sin(theta);
        std::vector<double> p1, q1;
        p1.reserve(p_samples.size());
        q1.reserve(q_samples.size());
        for (const auto& s : p_samples) p1.push_back(cx * s.x + cy * s.y);
        for (const auto& s : q_samples) q1.push_back(cx * s.x + cy * s.y);
        total += emd_1d(std::move(p1), std::move(q1));
    }
    return total / static_cast<double>(k_dirs);
}

/// Mean squared node-wise coordinate error across paired trajectories,
/// plus its square root. Corpora must be equal-sized and resampled to a
/// common node count.
inline std::pair<double, double> mse_rmse(const std::vector<Trajectory>& a,
                                          const std::vector<Trajectory>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("mse_rmse: corpora must be non-empty and equal-sized");
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].effective_len != b[k].effective_len)
            throw std::invalid_argument("mse_rmse: node-count mismatch at pair " +
                                        std::to_string(k));
        for (std::size_t i = 0; i < a[k].effective_len; ++i) {
            const Point d = a[k].points[i] - b[k].points[i];
            total += d.x * d.x + d.y * d.y;
            count += 2;
        }
    }
    const double mse = total / static_cast<double>(count);
    return {mse, std::sqrt(mse)};
}

/// Cosine of two feature vectors (typically corpus means).
inline double cos_sim(const FeatureVec& a, const FeatureVec& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (!(na > 0.0) || !(nb > 0.0)) throw std::invalid_argument("cos_sim: zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline FeatureVec mean_features(const std::vector<Trajectory>& corpus) {
    FeatureVec mean{};
    std::size_t n = 0;
    for (const auto& t : corpus) {
        if (t.effective_len < 3) continue;
        const FeatureVec f = extract_features(t);
        for (std::size_t i = 0; i < kFeatureDim; ++i) mean[i] += f[i];
        ++n;
    }
    if (n == 0) throw std::invalid_argument("mean_features: no usable trajectories");
    for (auto& v : mean) v /= static_cast<double>(n);
    return mean;
}

// ---- 2D embedding -----------------------------------------------------------

namespace detail {

/// Rows of flattened, resampled coordinates for embedding.
inline std::vector<std::vector<double>> flatten_resampled(const std::vector<Trajectory>& trajs,
                                                          std::size_t common_m) {
    std::vector<std::vector<double>> rows;
    rows.reserve(trajs.size());
    for (const auto& t : trajs) {
        const Trajectory r = resample(t, common_m);
        std::vector<double> row;
        row.reserve(2 * (common_m + 1));
        for (std::size_t i = 0; i <= common_m; ++i) {
            row.push_back(r.points[i].x);
            row.push_back(r.points[i].y);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Leading eigenvector of a symmetric matrix by deterministic power iteration.
inline std::vector<double> power_iterate(const std::vector<std::vector<double>>& m,
                                         std::size_t iters = 200) {
    const std::size_t d = m.size();
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = 1.0 / std::sqrt(static_cast<double>(d) + i);
    for (std::size_t it = 0; it < iters; ++it) {
        std::vector<double> w(d, 0.0);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) w[r] += m[r][c] * v[c];
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-300) return v;
        for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / norm;
    }
    return v;
}

}  // namespace detail

/// Deterministic PCA projection of flattened resampled coordinates to 2D.
inline std::vector<Point2> embed_pca(const std::vector<Trajectory>& trajs,
                                     std::size_t common_m = 32) {
    if (trajs.size() < 10) throw std::invalid_argument("embed_pca: corpus too small (< 10)");
    auto rows = detail::flatten_resampled(trajs, common_m);
    const std::size_t n = rows.size(), d = rows[0].size();
    std::vector<double> mean(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t i = 0; i < d; ++i) mean[i] += r[i];
    for (auto& v : mean) v /= static_cast<double>(n);
    for (auto& r : rows)
        for (std::size_t i = 0; i < d; ++i) r[i] -= mean[i];

    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (const auto& r : rows)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) cov[i][j] += r[i] * r[j];
    for (auto& row : cov)
        for (auto& v : row) v /= static_cast<double>(n);

    const auto v1 = detail::power_iterate(cov);
    // deflate and find the second component
    double lambda1 = 0.0;
    {
        std::vector<double> w(d, 0.0);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) w[r] += cov[r][c] * v1[c];
        for (std::size_t i = 0; i < d; ++i) lambda1 += v1[i] * w[i];
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) cov[i][j] -= lambda1 * v1[i] * v1[j];
    const auto v2 = detail::power_iterate(cov);

    std::vector<Point2> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double px = 0.0, py = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            px += rows[k][i] * v1[i];
            py += rows[k][i] * v2[i];
        }
        out[k] = {px, py};
    }
    return out;
}

struct TsneConfig {
    double perplexity{30.0};
    std::size_t iters{500};
    std::uint64_t seed{7};
    std::size_t max_points{5000};
};

/// Exact (O(n^2)) t-SNE with seeded initialization; the optional slow path.
inline std::vector<Point2> embed_tsne(const std::vector<Trajectory>& trajs,
                                      std::size_t common_m = 32, const TsneConfig& tc = {}) {
    if (trajs.size() < 10) throw std::invalid_argument("embed_tsne: corpus too small (< 10)");
    if (trajs.size() > tc.max_points)
        throw std::invalid_argument("embed_tsne: corpus exceeds max_points");
    const auto rows = detail::flatten_resampled(trajs, common_m);
    const std::size_t n = rows.size(), d = rows[0].size();

    std::vector<std::vector<double>> d2(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = rows[i][k] - rows[j][k];
                s += diff * diff;
            }
            d2[i][j] = d2[j][i] = s;
        }

    // conditional gaussians at target perplexity via bisection on beta
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    const double log_perp = std::log(std::max(2.0, tc.perplexity));
    for (std::size_t i = 0; i < n; ++i) {
        double beta = 1.0, blo = 0.0, bhi = 1e300;
        for (int it = 0; it < 60; ++it) {
            double sum = 0.0, hsum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double w = std::exp(-beta * d2[i][j]);
                sum += w;
                hsum += beta * d2[i][j] * w;
            }
            const double h = sum > 0.0 ? std::log(sum) + hsum / sum : 0.0;
            if (std::abs(h - log_perp) < 1e-5) break;
            if (h > log_perp) { blo = beta; beta = bhi > 1e299 ? beta * 2.0 : 0.5 * (beta + bhi); }
            else { bhi = beta; beta = 0.5 * (beta + blo); }
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) { p[i][j] = std::exp(-beta * d2[i][j]); sum += p[i][j]; }
        if (sum > 0.0)
            for (std::size_t j = 0; j < n; ++j) p[i][j] /= sum;
    }
    // symmetrize
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (p[i][j] + p[j][i]) / (2.0 * static_cast<double>(n));
            p[i][j] = p[j][i] = std::max(v, 1e-12);
        }

    Rng rng(tc.seed);
    std::vector<Point2> y(n), vel(n);
    for (auto& pt : y) pt = {rng.gaussian(0.0, 1e-4), rng.gaussian(0.0, 1e-4)};

    const double lr = 200.0;
    for (std::size_t it = 0; it < tc.iters; ++it) {
        const double momentum = it < 250 ? 0.5 : 0.8;
        const double exaggeration = it < 100 ? 4.0 : 1.0;
        std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
        double qsum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = y[i].x - y[j].x, dy = y[i].y - y[j].y;
                const double w = 1.0 / (1.0 + dx * dx + dy * dy);
                q[i][j] = q[j][i] = w;
                qsum += 2.0 * w;
            }
        for (std::size_t i = 0; i < n; ++i) {
            double gx = 0.0, gy = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double pij = (i < j ? p[i][j] : p[j][i]) * exaggeration;
                const double qij = q[i][j] / qsum;
                const double mult = 4.0 * (pij - qij) * q[i][j];
                gx += mult * (y[i].x - y[j].x);
                gy += mult * (y[i].y - y[j].y);
            }
            vel[i].x = momentum * vel[i].x - lr * gx;
            vel[i].y = momentum * vel[i].y - lr * gy;
        }
        for (std::size_t i = 0; i < n; ++i) {
            y[i].x += vel[i].x;
            y[i].y += vel[i].y;
        }
    }
    return y;
}

/// Default corpus embedding: deterministic PCA. Set use_tsne for the slow path.
inline std::vector<Point2> embed_2d(const std::vector<Trajectory>& trajs,
                                    std::size_t common_m = 32, bool use_tsne = false) {
    return use_tsne ? embed_tsne(trajs, common_m) : embed_pca(trajs, common_m);
}

}  // namespace dmtg
