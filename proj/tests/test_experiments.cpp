#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fwlab/experiments.hpp"

using fwlab::Series;
using fwlab::Vec;

TEST_CASE("fit_rate recovers an exact power law") {
  Series s;
  for (std::int64_t t = 1; t <= 1000; ++t) s.emplace_back(t, 3.0 * std::pow(static_cast<double>(t), -1.5));
  const auto fit = fwlab::fit_rate(s, 0.1);
  CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-10));
  CHECK(fit.intercept == doctest::Approx(std::log10(3.0)).epsilon(1e-10));
  CHECK(fit.t_lo == 100);
  CHECK(fit.t_hi == 1000);
  CHECK(fit.points == 901);
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit_rate needs enough points") {
  Series s;
  for (std::int64_t t = 1; t <= 40; ++t) s.emplace_back(t, 1.0 / static_cast<double>(t));
  CHECK_THROWS_AS(fwlab::fit_rate(s, 0.1), fwlab::InsufficientDataError);
  CHECK_THROWS_AS(fwlab::fit_rate(Series{}, 0.1), fwlab::InsufficientDataError);
  Series z;
  for (std::int64_t t = 1; t <= 100; ++t) z.emplace_back(t, 0.0);
  CHECK_THROWS_AS(fwlab::fit_rate(z, 0.1), fwlab::InsufficientDataError);
}

TEST_CASE("tail_mean and percentile") {
  Series s;
  for (std::int64_t t = 1; t <= 100; ++t) s.emplace_back(t, static_cast<double>(t));
  CHECK(fwlab::tail_mean(s, 0.1) == doctest::Approx(95.0));
  CHECK(fwlab::percentile({1, 2, 3, 4, 5}, 50) == 3.0);
  CHECK(fwlab::percentile({1, 2, 3, 4, 5}, 90) == doctest::Approx(4.6));
  CHECK(fwlab::percentile({7}, 90) == 7.0);
  CHECK_THROWS_AS(fwlab::percentile({}, 50), fwlab::InsufficientDataError);
}

TEST_CASE("slow start run: rate and constant at moderate T") {
  const auto tr = fwlab::slow_start_run(3.0, 0.5, 20000);
  const auto fit = fwlab::fit_rate(tr, 0.1);
  CHECK(fit.slope == doctest::Approx(-1.5).epsilon(0.02));
  const double c = fwlab::tail_mean(fwlab::constant_convergence(tr, 3.0), 0.1);
  CHECK(c == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(0.02));
}

TEST_CASE("contraction law series tends to a_p") {
  const auto tr = fwlab::slow_start_run(4.0, 0.5, 20000);
  const auto s = fwlab::contraction_law_series(tr, 4.0);
  CHECK(s.size() == tr.records.size() - 1);
  CHECK(fwlab::tail_mean(s, 0.1) == doctest::Approx(fwlab::slow_constants(4.0).a_p).epsilon(0.03));
  const auto thin = fwlab::slow_start_run(4.0, 0.5, 1000, 10);
  CHECK_THROWS_AS(fwlab::contraction_law_series(thin, 4.0), fwlab::InsufficientDataError);
}

TEST_CASE("tracking profile stays bounded") {
  const auto tr = fwlab::slow_start_run(3.0, 0.5, 2000);
  const auto prof = fwlab::tracking_profile(tr, 3.0);
  REQUIRE(prof.size() == tr.records.size());
  const std::size_t n = prof.size();
  double first = 0, last = 0;
  for (std::size_t i = 0; i < n / 4; ++i) first = std::max(first, prof[i].ratio);
  for (std::size_t i = n - n / 4; i < n; ++i) last = std::max(last, prof[i].ratio);
  CHECK(last <= first);
  CHECK(first < 3.0);
}

TEST_CASE("slow curve grid") {
  const auto pts = fwlab::slow_curve(3.0, 1e-6, 1e-1, 20, 1e-12, 2);
  REQUIRE(pts.size() == 20);
  CHECK(pts.front().u == 1e-6);
  CHECK(pts.back().u == 1e-1);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].u > pts[i - 1].u);
    CHECK(pts[i].y_star > pts[i - 1].y_star);
    CHECK(pts[i].residual <= 1e-12);
  }
  CHECK_THROWS_AS(fwlab::slow_curve(3.0, 0.0, 0.1, 5), fwlab::DomainError);
}

TEST_CASE("iterations to target: edge starts") {
  const double e1[2] = {1.0, 0.0};
  CHECK(fwlab::iterations_to_target(3.0, e1, 1e-4, 100) == 0);
  const double axis[2] = {0.2, 0.0};
  CHECK(fwlab::iterations_to_target(3.0, axis, 1e-4, 100) == 1);
  const auto slow = fwlab::slow_start(0.5, 3.0);
  CHECK(fwlab::iterations_to_target(3.0, slow, 1e-12, 10) == -1);
  const double outside[2] = {1.0, 0.5};
  CHECK_THROWS_AS(fwlab::iterations_to_target(3.0, outside, 1e-4, 10), fwlab::InfeasibleStartError);
}

TEST_CASE("heatmap layout and determinism") {
  fwlab::HeatmapConfig cfg;
  cfg.grid_n = 20;
  cfg.cap = 20000;
  const auto serial = fwlab::heatmap(cfg);
  cfg.jobs = 3;
  const auto par = fwlab::heatmap(cfg);
  REQUIRE(serial.size() == par.size());
  for (std::size_t k = 0; k < serial.size(); ++k) {
    CHECK(serial[k].x1 == par[k].x1);
    CHECK(serial[k].x2 == par[k].x2);
    CHECK(serial[k].iters == par[k].iters);
  }
  const fwlab::BallSpec<double> ball(3.0);
  for (const auto& c : serial) {
    CHECK(fwlab::lp_norm<double>(Vec<double>{c.x1, c.x2}, 3.0) < 1.0);
    CHECK(std::abs(std::fmod(c.x1 + 1.0, 0.1) - 0.05) < 1e-12);
  }
  // cells on the x1-axis do not exist for even n; rows are ordered by x2
  for (std::size_t k = 1; k < serial.size(); ++k) CHECK(serial[k].x2 >= serial[k - 1].x2);
  cfg.grid_n = 8;
  CHECK_THROWS_AS(fwlab::heatmap(cfg), fwlab::DomainError);
}

TEST_CASE("heatmap band statistics") {
  std::vector<fwlab::HeatmapCell> cells{{0.9, 0.0, 10}, {0.5, 0.0, 1}, {0.0, 0.5, 2}, {0.5, -0.9, -1}};
  const double u = 0.1;
  const double w = fwlab::fixed_point_y(u, 3.0, 1e-12).y_star * std::pow(u, 5.0 / 3.0);
  cells.push_back({1 - u, -w, 500});
  const auto st = fwlab::heatmap_band_stats(cells, 3.0, 1000, 0.01);
  CHECK(st.grid_cells == 5);
  // (0.9, 0) has the same u but sits 0.018 off the curve
  CHECK(st.band_cells == 1);
  CHECK(st.band_mean == 500.0);
  CHECK(st.grid_median == 10.0);
}

TEST_CASE("HEB with theta = 1/2 reproduces the quadratic") {
  const auto heb = fwlab::heb_experiment(3.0, 0.5, 1.0, 0.5, 2000);
  const auto quad = fwlab::slow_start_run(3.0, 0.5, 2000);
  REQUIRE(heb.trajectory.records.size() == quad.records.size());
  for (std::size_t i = 0; i < quad.records.size(); ++i) {
    CHECK(heb.trajectory.records[i].x == quad.records[i].x);
    CHECK(heb.trajectory.records[i].h == doctest::Approx(quad.records[i].h).epsilon(1e-14));
  }
  CHECK_THROWS_AS(fwlab::heb_experiment(2.0, 0.25, 1.0, 0.5, 100), fwlab::UnsupportedExponentError);
}

TEST_CASE("HEB gap is the transformed quadratic gap") {
  const double mu = 2.0, theta = 1.0 / 3.0;
  const auto heb = fwlab::heb_experiment(3.0, theta, mu, 0.5, 1000);
  const auto quad = fwlab::slow_start_run(3.0, 0.5, 1000);
  for (std::size_t i = 0; i < quad.records.size(); ++i) {
    const double want = std::pow(mu, -1 / theta) * std::pow(quad.records[i].h, 1 / (2 * theta));
    CHECK(heb.trajectory.records[i].h == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(heb.lower_bound_slope == doctest::Approx(-2.25));
  CHECK(heb.upper_bound_slope == doctest::Approx(-3.0 / (3.0 - 2.0 / 3.0)));
  CHECK(fwlab::heb_constant(3.0, 0.5, 1.0) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));
  CHECK(fwlab::heb_constant(3.0, theta, mu) ==
        doctest::Approx(std::pow(mu, -3.0) * std::pow(1.0 / std::sqrt(6.0), 1.5)).epsilon(1e-13));
}

TEST_CASE("HEB constant tail oscillation is small") {
  const auto heb = fwlab::heb_experiment(3.0, 1.0 / 3.0, 1.0, 0.5, 20000);
  const auto s = fwlab::scaled_gap_series(heb.trajectory, -heb.lower_bound_slope);
  double lo = 1e300, hi = 0;
  for (const auto& [t, v] : s) {
    if (t < 18000) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK((hi - lo) / lo < 0.01);
}

TEST_CASE("coincidence of quadratic and HEB runs") {
  const auto x0 = fwlab::slow_start(0.5, 3.0);
  CHECK(fwlab::coincidence_check(3.0, 1.0 / 3.0, 1.0, x0, 1000) == 0.0);
  CHECK(fwlab::coincidence_check(5.0, 0.25, 3.0, fwlab::slow_start(0.5, 5.0), 1000) == 0.0);
  CHECK(fwlab::coincidence_check(3.0, 1.0 / 3.0, 1.0, x0, 1000, true) < 1e-8);
}

TEST_CASE("confinement to the first two coordinates") {
  const double x5[5] = {0.3, 0.4, 0.0, 0.0, 0.0};
  CHECK(fwlab::confinement_check(x5, 3.0, 2000) == 0.0);
  const double x3[3] = {-0.2, 0.6, 0.0};
  CHECK(fwlab::confinement_check(x3, 4.0, 2000) == 0.0);
  // any mass off the plane is visible
  const double leak[3] = {0.3, 0.4, 1e-300};
  CHECK(fwlab::confinement_check(leak, 3.0, 10) > 0.0);
  const double x2[2] = {0.3, 0.4};
  CHECK_THROWS_AS(fwlab::confinement_check(x2, 3.0, 10), fwlab::DomainError);
}

TEST_CASE("random feasible points are seeded") {
  const auto a = fwlab::random_feasible_points(3.0, 100, 7);
  const auto b = fwlab::random_feasible_points(3.0, 100, 7);
  const auto c = fwlab::random_feasible_points(3.0, 100, 8);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& x : a) CHECK(fwlab::lp_norm<double>(x, 3.0) <= 1.0 - 1e-9);
}

TEST_CASE("slowness study bookkeeping") {
  const auto st = fwlab::slowness_study(3.0, 0.5, 1e-3, 100000, 20, 1, 2);
  CHECK(st.random_iters.size() == 20);
  CHECK(st.slow_iters > 0);
  std::vector<double> v(st.random_iters.begin(), st.random_iters.end());
  CHECK(st.random_p90 == fwlab::percentile(v, 90));
  const auto again = fwlab::slowness_study(3.0, 0.5, 1e-3, 100000, 20, 1, 1);
  CHECK(again.random_iters == st.random_iters);
}
