#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fwlab/fw_solver.hpp"
#include "fwlab/slow_dynamics.hpp"

using fwlab::CenteredState;
using fwlab::Vec;

namespace {

double central_diff(auto f, double y, double h) { return (f(y + h) - f(y - h)) / (2 * h); }

}  // namespace

TEST_CASE("constants at p = 3") {
  const auto c = fwlab::slow_constants(3.0);
  // independent closed forms: C_3 = (3/4)^(2/3), a_3 = 2 (3/4)^(4/3)
  CHECK(c.C_p == doctest::Approx(std::cbrt(0.75 * 0.75)).epsilon(1e-15));
  CHECK(c.a_p == doctest::Approx(2 * std::cbrt(0.75 * 0.75 * 0.75 * 0.75)).epsilon(1e-15));
  CHECK(c.D_p == doctest::Approx(c.C_p * 2 * 10 / (6 * 16)).epsilon(1e-15));
  CHECK(c.C_p == doctest::Approx(0.8254818).epsilon(1e-7));
  CHECK(c.D_p == doctest::Approx(0.1719754).epsilon(1e-6));
  CHECK(c.a_p == doctest::Approx(1.362840).epsilon(1e-6));
  CHECK(c.thm_constant == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));
  CHECK(c.z_drift == 0.234375);
  CHECK(c.rate_exponent == 1.5);
  CHECK_FALSE(c.outside_theorem_scope);
}

TEST_CASE("p below 3 needs force") {
  CHECK_THROWS_AS(fwlab::slow_constants(2.5), fwlab::UnsupportedExponentError);
  const auto c = fwlab::slow_constants(2.5, true);
  CHECK(c.outside_theorem_scope);
  CHECK_THROWS_AS(fwlab::slow_constants(1.0, true), fwlab::DomainError);
}

TEST_CASE("C_p is the fixed point of F") {
  for (double p : {3.0, 4.0, 5.0, 8.0}) {
    const double c = fwlab::slow_constants(p).C_p;
    CHECK(fwlab::slow_F(c, p) == doctest::Approx(c).epsilon(1e-14));
  }
}

TEST_CASE("F and G derivatives at C_3") {
  const double p = 3.0;
  const double c = fwlab::slow_constants(p).C_p;
  const double dF = central_diff([p](double y) { return fwlab::slow_F(y, p); }, c, 1e-6);
  const double dG = central_diff([p](double y) { return fwlab::slow_G(y, p); }, c, 1e-6);
  CHECK(dF == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(dG == doctest::Approx(13.0 / 24.0).epsilon(1e-8));
}

TEST_CASE("Phi at y = C_p approaches C_p linearly in u") {
  const double p = 3.0;
  const double c = fwlab::slow_constants(p).C_p;
  for (double u = 1e-2; u >= 1e-7; u /= 10) {
    CHECK(std::abs(fwlab::phi(u, c, p) - c) <= u);
  }
}

TEST_CASE("Phi agrees with F + u G to higher order") {
  for (double p : {3.0, 4.0, 5.0}) {
    const double kappa = 2 * (p - 1) / p;
    for (double y : {0.8, fwlab::slow_constants(p).C_p, 0.9}) {
      for (double u : {1e-4, 1e-5, 1e-6}) {
        const double lin = fwlab::slow_F(y, p) + u * fwlab::slow_G(y, p);
        CAPTURE(p);
        CAPTURE(y);
        CAPTURE(u);
        CHECK(std::abs(fwlab::phi(u, y, p) - lin) <= std::pow(u, kappa));
      }
    }
  }
}

TEST_CASE("fixed point residuals on a wide u-range") {
  for (double p : {3.0, 4.0, 5.0}) {
    for (double u = 1e-8; u <= 0.1; u *= 3) {
      const auto fp = fwlab::fixed_point_y(u, p, 1e-12);
      CHECK(fp.residual <= 1e-12);
      CHECK(std::abs(fwlab::phi(u, fp.y_star, p) - fp.y_star) <= 1e-12);
    }
  }
}

TEST_CASE("slow curve limit and slope") {
  const double p = 3.0;
  const auto c = fwlab::slow_constants(p);
  CHECK(std::abs(fwlab::fixed_point_y(1e-6, p, 1e-12).y_star - c.C_p) < 1e-5);
  const double h = 1e-6, u = 1e-4;
  const double slope =
      (fwlab::fixed_point_y(u + h, p, 1e-12).y_star - fwlab::fixed_point_y(u - h, p, 1e-12).y_star) / (2 * h);
  CHECK(slope == doctest::Approx(c.D_p).epsilon(0.05));
  // z* = y*^q, z*(0) = p/(p+1)
  const double z = std::pow(fwlab::fixed_point_y(u, p, 1e-12).y_star, c.q);
  CHECK((z - 0.75) / u == doctest::Approx(c.z_drift).epsilon(0.05));
}

TEST_CASE("fixed point rejects bad input") {
  CHECK_THROWS_AS(fwlab::fixed_point_y(0.0, 3.0, 1e-12), fwlab::DomainError);
  CHECK_THROWS_AS(fwlab::fixed_point_y(0.6, 3.0, 1e-12), fwlab::DomainError);
  CHECK_THROWS_AS(fwlab::fixed_point_y(1e-3, 3.0, 0.0), fwlab::DomainError);
  // far from the asymptotic regime H keeps one sign on the bracket
  CHECK_THROWS_AS(fwlab::fixed_point_y(0.8, 200.0, 1e-12, 1.0), fwlab::BracketFailureError);
}

TEST_CASE("slow start points") {
  const auto x = fwlab::slow_start(0.75, 3.0);
  const auto c = fwlab::slow_constants(3.0);
  CHECK(x[0] == 0.25);
  CHECK(x[1] == doctest::Approx((c.C_p + 0.75 * c.D_p) * std::pow(0.75, 5.0 / 3.0)).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(0.59095).epsilon(1e-4));
  CHECK(fwlab::is_strictly_feasible<double>(x, fwlab::BallSpec<double>(3.0), 0.0));
  CHECK(fwlab::is_strictly_feasible<double>(fwlab::slow_start(0.5, 5.0), fwlab::BallSpec<double>(5.0), 0.0));
  CHECK_THROWS_AS(fwlab::slow_start(0.0, 3.0), fwlab::DomainError);
  CHECK_THROWS_AS(fwlab::slow_start(1.0, 3.0), fwlab::DomainError);
}

TEST_CASE("dPhi/dy near the slow curve") {
  for (double u : {1e-3, 1e-4, 1e-6}) {
    const double y = fwlab::fixed_point_y(u, 4.0, 1e-12).y_star;
    const double d = fwlab::phi_dy(u, y, 4.0);
    CHECK(std::abs(d) <= 0.75);
    CHECK(d == doctest::Approx(-2.0 / 3.0).epsilon(1e-3));
  }
  // p = 3: |dPhi/dy| -> 1 with 1 - |dPhi/dy| ~ 0.75 u as u -> 0
  double prev = 0;
  for (double u : {1e-3, 1e-4, 1e-5, 1e-6}) {
    const double y = fwlab::fixed_point_y(u, 3.0, 1e-12).y_star;
    const double ratio = (1 - std::abs(fwlab::phi_dy(u, y, 3.0))) / (0.75 * u);
    CHECK(ratio > prev);
    CHECK(ratio < 1.0);
    prev = ratio;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("uw step agrees with a solver step") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (double p : {3.0, 4.0, 6.0}) {
    const fwlab::BallSpec<double> ball(p);
    int checked = 0;
    while (checked < 1000) {
      const Vec<double> x{coord(rng), coord(rng)};
      if (!fwlab::is_strictly_feasible<double>(x, ball, 0.0) || x[1] == 0.0) continue;
      fwlab::SolverConfig cfg;
      cfg.max_iters = 1;
      const auto tr = fwlab::run<double>(ball, fwlab::Objective<double>::Quadratic(), x, cfg);
      const auto next = fwlab::one_step_uw<double>({1 - x[0], x[1]}, p);
      CHECK(std::abs(tr.final_x[0] - (1 - next.u)) <= 1e-12);
      CHECK(std::abs(tr.final_x[1] - next.w) <= 1e-12);
      ++checked;
    }
  }
}

TEST_CASE("uw dynamics: w flips sign and u decreases") {
  for (double p : {3.0, 5.0}) {
    const auto x0 = fwlab::slow_start(0.5, p);
    CenteredState<double> s{1 - x0[0], x0[1]};
    for (int t = 0; t < 20000; ++t) {
      const auto n = fwlab::one_step_uw(s, p);
      CHECK(n.u < s.u);
      CHECK(n.u > 0);
      CHECK(std::signbit(n.w) != std::signbit(s.w));
      s = n;
    }
  }
}

TEST_CASE("uw step on the axis lands on the optimum") {
  const auto st = fwlab::uw_step<double>({0.3, 0.0}, 3.0);
  CHECK(st.gamma == 1.0);
  CHECK(st.next.u == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(st.next.w == 0.0);
  CHECK_THROWS_AS(fwlab::uw_step<double>({0.0, 0.1}, 3.0), fwlab::DomainError);
}
