#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "dmtg/core.hpp"
#include "dmtg/generators.hpp"
#include "dmtg/rng.hpp"

using namespace dmtg;

namespace {

TaskSpec make_task(Point s, Point e, std::size_t m = 8, double ab = 0.5) {
    TaskSpec t;
    t.start = s;
    t.end = e;
    t.m = m;
    t.alpha_bar = ab;
    return t;
}

Trajectory traj_of(std::vector<Point> pts) {
    Trajectory t;
    t.effective_len = pts.size();
    t.points = std::move(pts);
    return t;
}

/// Exhaustive Euclidean-MST oracle: minimum total weight over all labeled
/// spanning trees on n nodes, enumerated via Pruefer sequences (n^(n-2) trees).
double mst_oracle(const std::vector<Point>& pts) {
    const std::size_t n = pts.size();
    auto dist = [&](std::size_t i, std::size_t j) { return (pts[i] - pts[j]).norm(); };
    if (n == 2) return dist(0, 1);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n - 2; ++i) total *= n;
    double best = 1e308;
    std::vector<std::size_t> code(n - 2);
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t v = c;
        for (auto& d : code) {
            d = v % n;
            v /= n;
        }
        // decode the Pruefer sequence into tree edges
        std::vector<std::size_t> degree(n, 1);
        for (auto d : code) ++degree[d];
        double w = 0.0;
        std::vector<bool> used(n, false);
        for (auto d : code) {
            for (std::size_t leaf = 0; leaf < n; ++leaf) {
                if (degree[leaf] == 1 && !used[leaf]) {
                    w += dist(leaf, d);
                    used[leaf] = true;
                    --degree[d];
                    break;
                }
            }
        }
        std::size_t u = 0, x = 0;
        bool first = true;
        for (std::size_t i = 0; i < n; ++i)
            if (degree[i] == 1 && !used[i]) {
                if (first) { u = i; first = false; }
                else x = i;
            }
        w += dist(u, x);
        best = std::min(best, w);
    }
    return best;
}

}  // namespace

TEST_CASE("midpoint") {
    CHECK(midpoint(make_task({0, 0}, {600, 300})) == Point{300, 150});
    CHECK(midpoint(make_task({100, 100}, {100, 500})) == Point{100, 300});
    CHECK(midpoint(make_task({-50, 20}, {50, -20})) == Point{0, 0});
}

TEST_CASE("task validation") {
    CHECK_THROWS_AS(make_task({5, 5}, {5, 5}).validate(), std::invalid_argument);
    auto bad_m = make_task({0, 0}, {1, 1});
    bad_m.m = 0;
    CHECK_THROWS_AS(bad_m.validate(), std::invalid_argument);
    bad_m.m = bad_m.n_max + 1;
    CHECK_THROWS_AS(bad_m.validate(), std::invalid_argument);
    auto bad_a = make_task({0, 0}, {1, 1}, 4, 0.0);
    CHECK_THROWS_AS(bad_a.validate(), std::invalid_argument);
    bad_a.alpha_bar = 1.5;
    CHECK_THROWS_AS(bad_a.validate(), std::invalid_argument);
    CHECK_NOTHROW(make_task({0, 0}, {1, 1}, 4, 1.0).validate());
}

TEST_CASE("isotropic node covariance") {
    const Cov2 c1 = noise_cov(make_task({0, 0}, {600, 0}), 1.0 / 6.0);
    CHECK(c1.xx == Catch::Approx(10000.0));
    CHECK(c1.yy == Catch::Approx(10000.0));
    CHECK(c1.xy == 0.0);
    const Cov2 c2 = noise_cov(make_task({0, 0}, {6, 6}), 1.0 / 6.0);
    CHECK(c2.xx == Catch::Approx(2.0));
    CHECK(c2.yy == Catch::Approx(2.0));
    const Cov2 c3 = noise_cov(make_task({0, 0}, {3, 4}), 1.0 / 3.0);
    CHECK(c3.xx == Catch::Approx(25.0 / 9.0));
    CHECK(c3.yy == Catch::Approx(25.0 / 9.0));
}

TEST_CASE("directional covariance") {
    const Cov2 c1 = direction_cov(make_task({0, 0}, {1, 0}), 1.0);
    CHECK(c1.xx == Catch::Approx(1.0));
    CHECK(c1.xy == 0.0);
    CHECK(c1.yy == 0.0);
    const Cov2 c2 = direction_cov(make_task({0, 0}, {1, 1}), 1.0);
    CHECK(c2.xx == Catch::Approx(1.0));
    CHECK(c2.xy == Catch::Approx(1.0));
    CHECK(c2.yy == Catch::Approx(1.0));
    const Cov2 c3 = direction_cov(make_task({0, 0}, {600, 300}), 1.0 / 6.0);
    CHECK(c3.xx == Catch::Approx(10000.0));
    CHECK(c3.xy == Catch::Approx(5000.0));
    CHECK(c3.yy == Catch::Approx(2500.0));
    CHECK(c3.psd());
}

TEST_CASE("covariance mixture") {
    const auto task = make_task({0, 0}, {6, 0});
    const Cov2 at1 = mixture_cov(task, 1.0);
    const Cov2 ncov = noise_cov(task);
    CHECK(at1.xx == ncov.xx);
    CHECK(at1.yy == ncov.yy);
    const Cov2 at0 = mixture_cov(task, 0.0);
    const Cov2 dcov = direction_cov(task);
    CHECK(at0.xx == dcov.xx);
    CHECK(at0.yy == dcov.yy);
    const Cov2 mid = mixture_cov(task, 0.5, 1.0 / 6.0);
    CHECK(mid.xx == Catch::Approx(1.0));
    CHECK(mid.xy == 0.0);
    CHECK(mid.yy == Catch::Approx(0.5));
    CHECK_THROWS_AS(mixture_cov(task, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(mixture_cov(task, 1.1), std::invalid_argument);
}

TEST_CASE("mixture PSD over random tasks") {
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        const auto task = make_task({rng.uniform(0, 1000), rng.uniform(0, 1000)},
                                    {rng.uniform(0, 1000), rng.uniform(0, 1000)});
        if ((task.end - task.start).norm() < 1e-9) continue;
        for (int ai = 0; ai <= 10; ++ai) CHECK(mixture_cov(task, 0.1 * ai).psd());
    }
}

TEST_CASE("bivariate gaussian entropy") {
    CHECK(gaussian_entropy({1, 0, 1}) == Catch::Approx(std::log(2 * M_PI * M_E)).epsilon(1e-9));
    CHECK(gaussian_entropy({4, 0, 4}) ==
          Catch::Approx(std::log(2 * M_PI * M_E) + 0.5 * std::log(16.0)).epsilon(1e-9));
    CHECK_THROWS_AS(gaussian_entropy({1, 1, 1}), std::invalid_argument);  // singular
}

TEST_CASE("entropy matches sample-covariance estimate") {
    const auto task = make_task({0, 0}, {600, 300});
    const Cov2 cov = mixture_cov(task, 0.3);
    Rng rng(7);
    double sxx = 0, sxy = 0, syy = 0, mx = 0, my = 0;
    const std::size_t n = 1000000;
    std::vector<Point> draws(n);
    for (auto& p : draws) {
        p = rng.gaussian2(cov);
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    for (const auto& p : draws) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
        syy += (p.y - my) * (p.y - my);
    }
    const Cov2 est{sxx / n, sxy / n, syy / n};
    CHECK(gaussian_entropy(est) == Catch::Approx(gaussian_entropy(cov)).epsilon(0.01));
}

TEST_CASE("entropy monotone in mixture weight") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const auto task = make_task({rng.uniform(0, 1000), rng.uniform(0, 1000)},
                                    {rng.uniform(0, 1000), rng.uniform(0, 1000)});
        if ((task.end - task.start).norm() < 10.0) continue;
        double prev = -1e308;
        for (int ai = 1; ai <= 20; ++ai) {
            const double h = gaussian_entropy(mixture_cov(task, 0.05 * ai));
            CHECK(h >= prev - 1e-12);
            prev = h;
        }
    }
}

TEST_CASE("path length") {
    CHECK(path_length(traj_of({{0, 0}, {3, 4}})) == Catch::Approx(5.0));
    CHECK(path_length(traj_of({{7, 7}})) == 0.0);
    Rng rng(3);
    std::vector<Point> pts(10);
    for (auto& p : pts) p = {rng.uniform(0, 100), rng.uniform(0, 100)};
    double expected = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) expected += (pts[i + 1] - pts[i]).norm();
    CHECK(path_length(traj_of(pts)) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("minimum spanning tree length") {
    CHECK(mst_length({{0, 0}, {1, 0}, {2, 0}}) == Catch::Approx(2.0));
    CHECK(mst_length({{0, 0}, {1, 0}}) == Catch::Approx(1.0));
    CHECK_THROWS_AS(mst_length({{0, 0}}), std::invalid_argument);
}

TEST_CASE("mst matches exhaustive spanning-tree enumeration") {
    Rng rng(21);
    for (std::size_t n : {5u, 6u}) {
        for (int rep = 0; rep < 8; ++rep) {
            std::vector<Point> pts(n);
            for (auto& p : pts) p = {rng.uniform(0, 50), rng.uniform(0, 50)};
            CHECK(mst_length(pts) == Catch::Approx(mst_oracle(pts)).epsilon(1e-9));
        }
    }
}

TEST_CASE("mst lower-bounds the path") {
    Rng rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<Point> pts(12);
        for (auto& p : pts) p = {rng.uniform(0, 100), rng.uniform(0, 100)};
        CHECK(mst_length(pts) <= path_length(traj_of(pts)) + 1e-9);
    }
}

TEST_CASE("complexity ratio") {
    CHECK(complexity_ratio(traj_of({{0, 0}, {1, 1}, {2, 2}})) == Catch::Approx(1.0));
    CHECK(complexity_ratio(traj_of({{0, 0}, {0, 5}, {5, 5}})) ==
          Catch::Approx(std::sqrt(50.0) / 10.0));
    // overshoot-and-return detour with L = 2D
    CHECK(complexity_ratio(traj_of({{0, 0}, {15, 0}, {10, 0}})) ==
          Catch::Approx(0.5).margin(1e-12));
    CHECK_THROWS_AS(complexity_ratio(traj_of({{3, 3}})), std::invalid_argument);
}

TEST_CASE("excess path ratio consistent with complexity") {
    const auto t = traj_of({{0, 0}, {0, 5}, {5, 5}});
    CHECK(excess_path_ratio(t) == Catch::Approx(1.0 / complexity_ratio(t) - 1.0));
}

TEST_CASE("arc-length resampling") {
    // straight 2-point segment to 5 equidistant nodes
    const Trajectory r = resample(traj_of({{0, 0}, {4, 0}}), 4);
    REQUIRE(r.effective_len == 5);
    for (int i = 0; i <= 4; ++i) {
        CHECK(r.points[i].x == Catch::Approx(static_cast<double>(i)).margin(1e-9));
        CHECK(r.points[i].y == Catch::Approx(0.0).margin(1e-12));
    }

    // endpoint pinning at unchanged node count
    const auto zig = traj_of({{0, 0}, {3, 7}, {5, 2}, {9, 9}, {12, 1}});
    const Trajectory same = resample(zig, zig.effective_len - 1);
    CHECK(same.points.front() == zig.points.front());
    CHECK(same.points[same.effective_len - 1] == zig.points[zig.effective_len - 1]);

    // upsampling preserves path length within 2% (chords cut the sharp corners
    // slightly; the loss shrinks with the sample count)
    const Trajectory up = resample(zig, 50);
    CHECK(path_length(up) == Catch::Approx(path_length(zig)).epsilon(0.02));
    const Trajectory up2 = resample(zig, 200);
    CHECK(path_length(zig) - path_length(up2) < path_length(zig) - path_length(up));

    CHECK_THROWS_AS(resample(traj_of({{1, 1}}), 4), std::invalid_argument);
}

TEST_CASE("log mean spanning-tree length tracks entropy") {
    // Monte-Carlo reproduction of the complexity/entropy relationship: for each
    // node count, log of mean MST length is strongly linear in the entropy of
    // the mixture distribution. The measured slope sits near 1/2 (mean spacing
    // scales with |Sigma|^(1/4) = e^(H/2) up to constants); asserted band
    // [0.35, 0.65] plus correlation and monotonicity.
    const auto task = make_task({0, 0}, {600, 300});
    Rng rng(99);
    for (std::size_t m : {16u, 32u}) {
        std::vector<double> hs, ys;
        for (int ai = 1; ai <= 20; ++ai) {
            const Cov2 cov = mixture_cov(task, 0.05 * ai);
            const double h = gaussian_entropy(cov);
            double mean_mst = 0.0;
            for (int rep = 0; rep < 100; ++rep) {
                std::vector<Point> pts(m);
                for (auto& p : pts) p = rng.gaussian2(cov);
                mean_mst += mst_length(pts);
            }
            hs.push_back(h);
            ys.push_back(std::log(mean_mst / 100.0));
        }
        for (std::size_t i = 1; i < ys.size(); ++i) CHECK(ys[i] >= ys[i - 1] - 0.05);
        const double n = hs.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = 0; i < hs.size(); ++i) {
            sx += hs[i]; sy += ys[i];
            sxx += hs[i] * hs[i]; sxy += hs[i] * ys[i]; syy += ys[i] * ys[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
        CHECK(r >= 0.95);
        CHECK(slope > 0.35);
        CHECK(slope < 0.65);
    }
}

TEST_CASE("trajectory invariant validation") {
    Trajectory t = traj_of({{1, 1}, {2, 2}, {0, 0}, {0, 0}});
    t.effective_len = 2;
    CHECK_NOTHROW(t.validate());
    t.points[3] = {5, 5};  // mask slot must stay zero
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    t.points[3] = {0, 0};
    t.t_ms = {0.0, 1.0};
    CHECK_NOTHROW(t.validate());
    t.t_ms = {1.0, 1.0};
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}
