#pragma once

#include <limits>

#include "fwlab/errors.hpp"
#include "fwlab/lp_geometry.hpp"
#include "fwlab/numeric.hpp"

// Executable form of the slow-curve analysis of FW on the l_p ball with
// objective ||x - e_1||^2, in centred coordinates u = 1 - x_1, w = x_2 and
// the scaled transverse variable y = |w| / u^(1 + alpha), alpha = (p - 1)/p.

namespace fwlab {

template <Scalar T>
struct CenteredState {
  T u;
  T w;
};

/// Everything one exact-line-search FW step computes in (u, w) coordinates.
template <Scalar T>
struct UwStep {
  T v1, v2;  // oracle vertex
  T d1, d2;  // v - x
  T M;       // (u^q + |w|^q)^(1/q)
  T gamma;
  CenteredState<T> next;
};

template <Scalar T>
struct SlowConstants {
  T p, q, alpha, kappa;
  T C_p;             // (p/(p+1))^(1/q), the limit of the slow curve
  T D_p;             // slope of the slow curve at u = 0
  T a_p;             // 2 C_p^2, contraction-law coefficient
  T rate_exponent;   // p / (p - 1)
  T thm_constant;    // ((p+1)/p)^2 (p/(4(p-1)))^(p/(p-1))
  T z_drift;         // p(3p+1) / (2(p+1)^3), slope of z* = y*^q at u = 0
  bool outside_theorem_scope = false;  // p < 3
};

/// Slow-curve constants. p < 3 is outside the range of the lower-bound
/// theory: rejected unless `force` is set, in which case the result is
/// labelled via outside_theorem_scope.
template <Scalar T>
SlowConstants<T> slow_constants(const T& p, bool force = false) {
  using std::pow;
  if (!(p > T(1))) throw DomainError("slow constants need p > 1");
  if (p < T(3) && !force) {
    throw UnsupportedExponentError("p < 3 is outside the lower-bound theorem's scope (use force)");
  }
  SlowConstants<T> c;
  c.p = p;
  c.q = p / (p - T(1));
  c.alpha = (p - T(1)) / p;
  c.kappa = T(2) * c.alpha;
  c.C_p = pow(p / (p + T(1)), T(1) / c.q);
  c.D_p = c.C_p * (p - T(1)) * (T(3) * p + T(1)) / (T(2) * p * (p + T(1)) * (p + T(1)));
  c.a_p = T(2) * c.C_p * c.C_p;
  c.rate_exponent = p / (p - T(1));
  const T ratio = (p + T(1)) / p;
  c.thm_constant = ratio * ratio * pow(p / (T(4) * (p - T(1))), c.rate_exponent);
  c.z_drift = p * (T(3) * p + T(1)) / (T(2) * pow(p + T(1), T(3)));
  c.outside_theorem_scope = p < T(3);
  return c;
}

/// One exact-line-search FW step in (u, w) coordinates. The cancellation-prone
/// pieces d1 = u + v1 - 1 and M - u are formed via log1p/expm1 of
/// r = (|w|/u)^q, so the step keeps full relative accuracy as u -> 0.
template <Scalar T>
UwStep<T> uw_step(const CenteredState<T>& s, const T& p) {
  using std::abs;
  using std::exp;
  using std::expm1;
  using std::log1p;
  using std::pow;
  if (!(s.u > T(0))) throw DomainError("uw step needs u > 0");
  const T q = p / (p - T(1));
  const T rho = abs(s.w) / s.u;
  const T r = pow(rho, q);
  const T log_a = log1p(r) / p;  // log A, A = (1 + r)^(1/p) = 1 / v1
  UwStep<T> st;
  st.v1 = exp(-log_a);
  st.d1 = s.u + expm1(-log_a);
  st.v2 = s.w == T(0) ? T(0) : T(-sign_of(s.w) * pow(rho, q - T(1)) * st.v1);
  st.d2 = st.v2 - s.w;
  const T m_minus_u = s.u * expm1(log1p(r) / q);
  st.M = s.u + m_minus_u;
  const T numer = m_minus_u + s.u * s.u + s.w * s.w;
  const T denom = st.d1 * st.d1 + st.d2 * st.d2;
  if (denom == T(0)) throw DegenerateDirectionError("uw step: oracle vertex equals the iterate");
  st.gamma = numer / denom;
  if (st.gamma > T(1)) st.gamma = T(1);
  st.next = {s.u - st.gamma * st.d1, s.w + st.gamma * st.d2};
  return st;
}

template <Scalar T>
CenteredState<T> one_step_uw(const CenteredState<T>& s, const T& p) {
  return uw_step(s, p).next;
}

/// y' = Phi(u, y) = |w'| / (u')^(1 + alpha) with w = y u^(1 + alpha).
template <Scalar T>
T phi(const T& u, const T& y, const T& p) {
  using std::abs;
  using std::pow;
  if (!(u > T(0))) throw DomainError("phi needs u > 0");
  if (!(y > T(0))) throw DomainError("phi needs y > 0");
  const T expo = T(1) + (p - T(1)) / p;
  const CenteredState<T> next = one_step_uw<T>({u, y * pow(u, expo)}, p);
  if (!(next.u > T(0))) throw DegenerateDirectionError("phi: step reached u' <= 0");
  return abs(next.w) / pow(next.u, expo);
}

/// Leading term of Phi as u -> 0: F(y) = y^(-(q-1)) - y/p.
template <Scalar T>
T slow_F(const T& y, const T& p) {
  using std::pow;
  if (!(y > T(0))) throw DomainError("F needs y > 0");
  const T q = p / (p - T(1));
  return pow(y, -(q - T(1))) - y / p;
}

/// First-order coefficient: G(y) = y/p + (p-1)/(2p^2) y^(q+1).
template <Scalar T>
T slow_G(const T& y, const T& p) {
  using std::pow;
  if (!(y > T(0))) throw DomainError("G needs y > 0");
  const T q = p / (p - T(1));
  return y / p + (p - T(1)) / (T(2) * p * p) * pow(y, q + T(1));
}

template <Scalar T>
struct SlowCurvePoint {
  T u;
  T y_star;
  T residual;  // |Phi(u, y*) - y*|
};

/// Default upper end of the u-range on which the slow curve is solved.
inline constexpr double kDefaultUMax = 0.5;

/// Fixed point of y -> Phi(u, y) by bisection on H(u, y) = Phi(u, y) - y over
/// [0.8 C_p, 1.2 C_p]. H is decreasing there for small u, so a sign change
/// (H(lo) > 0 > H(hi)) is required. The bracket is halved to the working
/// precision; the best midpoint must satisfy |H| <= tol.
template <Scalar T>
SlowCurvePoint<T> fixed_point_y(const T& u, const T& p, const T& tol, const T& u_max = T(kDefaultUMax)) {
  using std::abs;
  if (!(u > T(0)) || u > u_max) throw DomainError("fixed_point_y needs 0 < u <= u_max");
  if (!(tol > T(0))) throw DomainError("fixed_point_y needs tol > 0");
  const T c = slow_constants<T>(p, true).C_p;
  T lo = T(0.8) * c;
  T hi = T(1.2) * c;
  auto H = [&](const T& y) { return phi<T>(u, y, p) - y; };
  const T h_lo = H(lo);
  const T h_hi = H(hi);
  if (!(h_lo > T(0) && h_hi < T(0))) {
    throw BracketFailureError("fixed_point_y: H(u, .) does not change sign on [0.8 C_p, 1.2 C_p]",
                              to_double(h_lo), to_double(h_hi));
  }
  T best = lo;
  T best_res = abs(h_lo);
  for (int i = 0; i < 4096; ++i) {
    const T mid = (lo + hi) / T(2);
    if (mid <= lo || mid >= hi) break;
    const T h_mid = H(mid);
    if (abs(h_mid) < best_res) {
      best = mid;
      best_res = abs(h_mid);
    }
    if (h_mid == T(0)) break;
    if (h_mid > T(0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (best_res > tol) {
    throw ConvergenceError("fixed_point_y: residual " + format_scalar(best_res) +
                           " above tolerance at the working precision");
  }
  return {u, best, best_res};
}

/// x_0 = (1 - u0) e_1 + (C_p + D_p u0) u0^(1 + alpha) e_2. Feasibility is the
/// caller's to check (it holds for small u0, and numerically at u0 = 3/4).
template <Scalar T>
Vec<T> slow_start(const T& u0, const T& p) {
  using std::pow;
  if (!(u0 > T(0) && u0 < T(1))) throw DomainError("slow_start needs 0 < u0 < 1");
  const SlowConstants<T> c = slow_constants<T>(p, true);
  const T y0 = c.C_p + c.D_p * u0;
  return {T(1) - u0, y0 * pow(u0, T(1) + c.alpha)};
}

/// Central-difference step used by phi_dy: max(1e-6, 1e-2 u^kappa) in double,
/// 1e-20 in extended precision.
template <Scalar T>
T default_dy_step(const T& u, const T& p) {
  using std::pow;
  if constexpr (std::same_as<T, double>) {
    const T kappa = T(2) * (p - T(1)) / p;
    return std::max(T(1e-6), T(1e-2) * pow(u, kappa));
  } else {
    return T(1e-20);
  }
}

/// Central finite-difference estimate of dPhi/dy at (u, y).
template <Scalar T>
T phi_dy(const T& u, const T& y, const T& p, const T& step) {
  if (!(step > T(0)) || !(y - step > T(0))) throw DomainError("phi_dy: invalid difference step");
  return (phi<T>(u, y + step, p) - phi<T>(u, y - step, p)) / (T(2) * step);
}

template <Scalar T>
T phi_dy(const T& u, const T& y, const T& p) {
  return phi_dy<T>(u, y, p, default_dy_step<T>(u, p));
}

}  // namespace fwlab
