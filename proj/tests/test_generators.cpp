#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dmtg/core.hpp"
#include "dmtg/generators.hpp"

using namespace dmtg;

namespace {

TaskSpec make_task(Point s, Point e, std::size_t m = 16, double ab = 0.5) {
    TaskSpec t;
    t.start = s;
    t.end = e;
    t.m = m;
    t.alpha_bar = ab;
    return t;
}

bool same_points(const Trajectory& a, const Trajectory& b) {
    if (a.effective_len != b.effective_len || a.points.size() != b.points.size()) return false;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        if (!(a.points[i] == b.points[i])) return false;
    return true;
}

}  // namespace

TEST_CASE("linear generator") {
    const auto task = make_task({0, 0}, {4, 0}, 4);
    const Trajectory t = gen_linear(task);
    REQUIRE(t.effective_len == 5);
    for (int i = 0; i <= 4; ++i) {
        CHECK(t.points[i].x == Catch::Approx(static_cast<double>(i)));
        CHECK(t.points[i].y == 0.0);
    }
    CHECK(complexity_ratio(t) == Catch::Approx(1.0));
    CHECK(path_length(t) == Catch::Approx((task.end - task.start).norm()));
    CHECK(t.has_timestamps());
    t.validate();

    const auto task2 = make_task({37, -12}, {512, 400}, 23);
    CHECK(complexity_ratio(gen_linear(task2)) == Catch::Approx(1.0));
    CHECK(path_length(gen_linear(task2)) == Catch::Approx((task2.end - task2.start).norm()));
}

TEST_CASE("bezier generator") {
    const auto task = make_task({100, 100}, {800, 500}, 24);

    // no control points degenerates to the straight line
    CHECK(same_points(gen_bezier(task, 5, 0), gen_linear(task)));

    // seeded determinism
    CHECK(same_points(gen_bezier(task, 42, 2), gen_bezier(task, 42, 2)));

    // endpoints exact and invariants hold for all seeds
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Trajectory t = gen_bezier(task, s, 2);
        t.validate();
        CHECK(t.points.front() == task.start);
        CHECK(t.points[t.effective_len - 1] == task.end);
        REQUIRE(t.effective_len == task.m + 1);
    }

    // curvature: almost every seeded curve is strictly longer than the chord
    int curved = 0;
    for (std::uint64_t s = 0; s < 1000; ++s)
        if (complexity_ratio(gen_bezier(task, s, 2)) < 1.0 - 1e-12) ++curved;
    CHECK(curved >= 990);

    CHECK_THROWS_AS(gen_bezier(task, 1, 5), std::invalid_argument);
}

TEST_CASE("fitts-profile generator") {
    const auto task = make_task({0, 0}, {900, 0}, 48);
    const Trajectory t = gen_fitts(task, 7);
    t.validate();
    CHECK(t.points.front() == task.start);
    CHECK(t.points[t.effective_len - 1] == task.end);
    REQUIRE(t.has_timestamps());

    // bell-shaped speed profile: first/last segment speeds well below peak
    double peak = 0.0;
    std::vector<double> speeds;
    for (std::size_t i = 1; i < t.effective_len; ++i) {
        const double v = (t.points[i] - t.points[i - 1]).norm() / (t.t_ms[i] - t.t_ms[i - 1]);
        speeds.push_back(v);
        peak = std::max(peak, v);
    }
    CHECK(speeds.front() < 0.2 * peak);
    CHECK(speeds.back() < 0.2 * peak);

    CHECK(same_points(gen_fitts(task, 7), gen_fitts(task, 7)));
}

TEST_CASE("movement-time law") {
    const FittsParams fp;
    const double d = 400.0;
    const double delta = fitts_duration_ms(2 * d, fp) - fitts_duration_ms(d, fp);
    const double expected =
        fp.b_ms_per_bit * (std::log2(2 * d / fp.target_w + 1) - std::log2(d / fp.target_w + 1));
    CHECK(delta == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("noise initialization") {
    auto task = make_task({200, 200}, {800, 500}, 2);
    const Point pc = midpoint(task);
    const Cov2 expect = noise_cov(task);

    // single interior node per draw; law-of-large-numbers mean + covariance
    const std::size_t n = 100000;
    double mx = 0, my = 0;
    std::vector<Point> draws;
    draws.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        const Trajectory t = gen_noise_init(task, s);
        draws.push_back(t.points[1]);
        mx += t.points[1].x;
        my += t.points[1].y;
    }
    mx /= n;
    my /= n;
    const double sig = std::sqrt(expect.xx);
    CHECK(std::abs(mx - pc.x) < 3.0 * sig / std::sqrt(static_cast<double>(n)) * 1.5);
    CHECK(std::abs(my - pc.y) < 3.0 * sig / std::sqrt(static_cast<double>(n)) * 1.5);

    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : draws) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
        syy += (p.y - my) * (p.y - my);
    }
    const Cov2 est{sxx / n, sxy / n, syy / n};
    const double frob_err = std::sqrt((est.xx - expect.xx) * (est.xx - expect.xx) +
                                      2 * (est.xy - expect.xy) * (est.xy - expect.xy) +
                                      (est.yy - expect.yy) * (est.yy - expect.yy));
    const double frob = std::sqrt(expect.xx * expect.xx + 2 * expect.xy * expect.xy +
                                  expect.yy * expect.yy);
    CHECK(frob_err / frob < 0.05);

    // buffer layout: masks past effective_len, endpoints pinned
    task.m = 16;
    const Trajectory t = gen_noise_init(task, 3);
    REQUIRE(t.points.size() == task.n_max + 1);
    REQUIRE(t.effective_len == task.m + 1);
    CHECK(t.points.front() == task.start);
    CHECK(t.points[task.m] == task.end);
    for (std::size_t i = t.effective_len; i < t.points.size(); ++i)
        CHECK(t.points[i] == Point{0, 0});
    t.validate();
}

TEST_CASE("noise initialization is long-winded") {
    const auto task = make_task({100, 100}, {900, 600}, 24);
    int below = 0;
    for (std::uint64_t s = 0; s < 500; ++s)
        if (complexity_ratio(gen_noise_init(task, s)) < 0.5) ++below;
    CHECK(below >= 495);
}

TEST_CASE("generator determinism across kinds") {
    const auto task = make_task({10, 20}, {300, 700}, 20);
    CHECK(same_points(gen_noise_init(task, 9), gen_noise_init(task, 9)));
    CHECK(same_points(gen_linear(task), gen_linear(task)));
}
