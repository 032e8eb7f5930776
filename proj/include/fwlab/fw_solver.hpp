#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fwlab/errors.hpp"
#include "fwlab/lp_geometry.hpp"
#include "fwlab/numeric.hpp"
#include "fwlab/objectives.hpp"

namespace fwlab {

enum class StepRule { kExactLineSearch, kShortStep };

std::string to_string(StepRule rule);

struct SolverConfig {
  StepRule rule = StepRule::kExactLineSearch;
  std::int64_t max_iters = 1000;
  double gap_tol = 0.0;
  std::int64_t record_every = 1;
  // Replace the closed-form line search by a golden-section search on the
  // objective itself. Debug/cross-validation only.
  bool golden_section_debug = false;
};

/// One row of a recorded run. gamma is the step taken *from* x_t (0 on the
/// terminal row); s = r_t / r_{t-1} is the contraction that produced this row
/// (NaN on row 0).
template <Scalar T>
struct TrajectoryRecord {
  std::int64_t t = 0;
  Vec<T> x;
  T gamma{0};
  T h{0};
  T u{0};
  T w{0};
  T y{0};
  T s{0};
  bool on_axis = false;  // w == 0 at a non-optimal iterate
};

enum class Termination { kGapReached, kZeroGradient, kMaxIters };

std::string to_string(Termination reason);

template <Scalar T>
struct Trajectory {
  std::vector<TrajectoryRecord<T>> records;
  Termination termination = Termination::kMaxIters;
  std::int64_t iterations = 0;  // index t of the final iterate
  Vec<T> final_x;
  T final_h{0};
  std::int64_t monotonicity_violations = 0;
  std::int64_t axis_events = 0;
};

namespace detail {

template <Scalar T>
Vec<T> difference(std::span<const T> a, std::span<const T> b) {
  Vec<T> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

template <Scalar T>
T clamp01(const T& g) {
  if (g < T(0)) return T(0);
  if (g > T(1)) return T(1);
  return g;
}

// FW gap <grad f(x), x - v> and ||x - v||^2 for the quadratic model.
template <Scalar T>
std::pair<T, T> fw_gap_and_length(std::span<const T> x, std::span<const T> v) {
  const Vec<T> grad = Objective<T>::quadratic_gradient(x);
  const Vec<T> xv = difference<T>(x, v);
  const T len2 = dot<T>(xv, xv);
  if (len2 == T(0)) throw DegenerateDirectionError("line search along a zero-length segment");
  return {dot<T>(grad, xv), len2};
}

}  // namespace detail

/// Exact line search on [0, 1]. For the quadratic the minimiser of the 1-D
/// quadratic is closed form; the HEB objective is an increasing function of
/// the quadratic, so it shares the same minimiser and the same value is
/// returned without any numerical search.
template <Scalar T>
T exact_linesearch_gamma(const Objective<T>& /*obj*/, std::span<const T> x, std::span<const T> v) {
  const auto [gap, len2] = detail::fw_gap_and_length(x, v);
  return detail::clamp01(T(gap / (T(2) * len2)));
}

/// min{1, <grad f(x), x - v> / (L ||x - v||^2)}; quadratic only.
template <Scalar T>
T short_step_gamma(const Objective<T>& obj, std::span<const T> x, std::span<const T> v, const T& L) {
  (void)obj.smoothness();  // throws for HEB
  const auto [gap, len2] = detail::fw_gap_and_length(x, v);
  return detail::clamp01(T(gap / (L * len2)));
}

/// Golden-section minimisation of fn on [lo, hi] down to width tol.
template <Scalar T>
T golden_section_minimize(const std::function<T(const T&)>& fn, T lo, T hi, const T& tol) {
  using std::sqrt;
  const T inv_phi = (sqrt(T(5)) - T(1)) / T(2);
  T a = hi - inv_phi * (hi - lo);
  T b = lo + inv_phi * (hi - lo);
  T fa = fn(a);
  T fb = fn(b);
  while (hi - lo > tol) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = fn(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = fn(b);
    }
  }
  const T mid = (lo + hi) / T(2);
  // The search never evaluates the endpoints; check them explicitly so a
  // boundary optimum (gamma = 1) is returned exactly.
  const T f_mid = fn(mid);
  const T f_one = fn(T(1));
  return f_one <= f_mid ? T(1) : mid;
}

/// Exact line search by golden section on the objective value itself. Double
/// runs are searched in 256-bit arithmetic: the search resolves the minimiser
/// only to about the square root of the working epsilon.
template <Scalar T>
T golden_section_gamma(const Objective<T>& obj, std::span<const T> x, std::span<const T> v) {
  if constexpr (std::same_as<T, double>) {
    ExtendedPrecisionScope scope(256);
    const Vec<Extended> xe(x.begin(), x.end());
    const Vec<Extended> ve(v.begin(), v.end());
    const Objective<Extended> oe = obj.is_quadratic()
                                       ? Objective<Extended>::Quadratic()
                                       : Objective<Extended>::HebPower(Extended(obj.mu()), Extended(obj.theta()));
    return to_double(golden_section_gamma<Extended>(oe, xe, ve));
  } else {
    const Vec<T> d = detail::difference<T>(v, x);
    if (dot<T>(d, d) == T(0)) throw DegenerateDirectionError("line search along a zero-length segment");
    auto along = [&](const T& g) {
      Vec<T> p(x.begin(), x.end());
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += g * d[i];
      return obj.value(p);
    };
    using std::pow;
    const T tol = pow(T(10), T(-(static_cast<int>(Extended::default_precision()) / 2) - 4));
    return golden_section_minimize<T>(along, T(0), T(1), tol);
  }
}

/// Frank-Wolfe on B_p (exact line search or short step) from x0.
///
/// Stops when x_t = e_1 exactly (zero gradient), when h_t <= gap_tol, or after
/// max_iters steps. Records every record_every-th iterate plus the final one.
/// Monotonicity of h is checked on every step, recorded or not.
///
/// The LMO is fed 2 (x - e_1) for both objectives: the HEB gradient is a
/// positive multiple of it and the oracle is invariant under positive
/// scaling, so quadratic and HEB runs see bit-identical oracle outputs.
template <Scalar T>
Trajectory<T> run(const BallSpec<T>& ball, const Objective<T>& obj, std::span<const T> x0,
                  const SolverConfig& cfg) {
  using std::pow;
  using std::sqrt;
  using std::abs;
  if (x0.size() < 2) throw DomainError("FW runs need dimension d >= 2");
  if (cfg.max_iters < 0) throw DomainError("max_iters must be non-negative");
  if (cfg.record_every < 1) throw DomainError("record_every must be >= 1");
  if (cfg.rule == StepRule::kShortStep) (void)obj.smoothness();
  if (lp_norm(x0, ball.p) > T(1) + T(1e-12)) {
    throw InfeasibleStartError("starting point lies outside the unit l_p ball");
  }

  Trajectory<T> out;
  Vec<T> x(x0.begin(), x0.end());
  const T gap_tol(cfg.gap_tol);
  const T nan = std::numeric_limits<T>::quiet_NaN();
  T prev_r = nan;
  T prev_h = nan;

  for (std::int64_t t = 0;; ++t) {
    const T f = Objective<T>::squared_distance(x);
    const T h = obj.from_quadratic(f);
    const T r = sqrt(f);
    if (t > 0 && h > prev_h) ++out.monotonicity_violations;

    const Vec<T> direction = Objective<T>::quadratic_gradient(x);
    const bool at_optimum = max_abs<T>(direction) == T(0);
    Termination reason{};
    bool stop = true;
    if (at_optimum) {
      reason = Termination::kZeroGradient;
    } else if (h <= gap_tol) {
      reason = Termination::kGapReached;
    } else if (t >= cfg.max_iters) {
      reason = Termination::kMaxIters;
    } else {
      stop = false;
    }

    T gamma(0);
    Vec<T> v;
    if (!stop) {
      v = lmo<T>(direction, ball);
      if (cfg.golden_section_debug) {
        gamma = golden_section_gamma<T>(obj, x, v);
      } else if (cfg.rule == StepRule::kExactLineSearch) {
        gamma = exact_linesearch_gamma<T>(obj, x, v);
      } else {
        gamma = short_step_gamma<T>(obj, x, v, obj.smoothness());
      }
    }

    const T u = T(1) - x[0];
    const T w = x[1];
    const bool on_axis = w == T(0) && !at_optimum;
    if (on_axis) ++out.axis_events;

    if (stop || t % cfg.record_every == 0) {
      TrajectoryRecord<T> rec;
      rec.t = t;
      rec.x = x;
      rec.gamma = gamma;
      rec.h = h;
      rec.u = u;
      rec.w = w;
      rec.y = u > T(0) ? T(abs(w) / pow(u, T(1) + ball.alpha)) : nan;
      rec.s = t == 0 ? nan : T(r / prev_r);
      rec.on_axis = on_axis;
      out.records.push_back(std::move(rec));
    }

    if (stop) {
      out.termination = reason;
      out.iterations = t;
      out.final_h = h;
      out.final_x = x;
      return out;
    }

    for (std::size_t i = 0; i < x.size(); ++i) x[i] += gamma * (v[i] - x[i]);
    prev_r = r;
    prev_h = h;
  }
}

template <Scalar T>
Trajectory<T> run(const BallSpec<T>& ball, const Objective<T>& obj, const Vec<T>& x0,
                  const SolverConfig& cfg) {
  return run<T>(ball, obj, std::span<const T>(x0), cfg);
}

}  // namespace fwlab
