#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "fwlab/errors.hpp"
#include "fwlab/numeric.hpp"

namespace fwlab {

template <Scalar T>
using Vec = std::vector<T>;

/// The unit l_p ball B_p together with the exponents derived from p.
template <Scalar T>
struct BallSpec {
  T p;
  T q;      // Hoelder conjugate p / (p - 1)
  T alpha;  // (p - 1) / p = 1 / q
  T kappa;  // 2 * alpha

  explicit BallSpec(const T& p_in) : p(p_in), q(p_in / (p_in - T(1))), alpha((p_in - T(1)) / p_in) {
    if (!(p > T(1))) throw DomainError("l_p ball needs p > 1");
    kappa = T(2) * alpha;
  }
};

template <Scalar T>
T max_abs(std::span<const T> x) {
  using std::abs;
  T m(0);
  for (const T& xi : x) m = std::max(m, T(abs(xi)));
  return m;
}

/// (sum |x_i|^p)^(1/p), computed after dividing by the largest magnitude so
/// that extreme exponents neither overflow nor underflow.
template <Scalar T>
T lp_norm(std::span<const T> x, const T& p) {
  using std::pow;
  if (p < T(1)) throw DomainError("lp_norm needs p >= 1");
  const T m = max_abs(x);
  if (m == T(0)) return T(0);
  T sum(0);
  for (const T& xi : x) {
    using std::abs;
    sum += pow(T(abs(xi) / m), p);
  }
  return m * pow(sum, T(1) / p);
}

template <Scalar T>
T lp_norm(const Vec<T>& x, const T& p) {
  return lp_norm(std::span<const T>(x), p);
}

template <Scalar T>
T dot(std::span<const T> a, std::span<const T> b) {
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Linear minimization oracle on B_p:
///   v_i = -sign(g_i) |g_i|^(q-1) / ||g||_q^(q-1).
/// The oracle is invariant under positive rescaling of g and preserves the
/// support of g exactly (sign(0) = 0).
template <Scalar T>
Vec<T> lmo(std::span<const T> g, const BallSpec<T>& ball) {
  using std::abs;
  using std::pow;
  const T m = max_abs(g);
  if (m == T(0)) throw ZeroGradientError("lmo: zero gradient, iterate is optimal");
  const T qm1 = ball.q - T(1);
  Vec<T> scaled(g.size());
  T norm_q(0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    scaled[i] = abs(g[i]) / m;
    if (scaled[i] != T(0)) norm_q += pow(scaled[i], ball.q);
  }
  // ||g/m||_q^(q-1) = (sum a_i^q)^((q-1)/q)
  const T denom = pow(norm_q, qm1 / ball.q);
  Vec<T> v(g.size(), T(0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (scaled[i] == T(0)) continue;
    v[i] = -sign_of(g[i]) * pow(scaled[i], qm1) / denom;
  }
  return v;
}

template <Scalar T>
Vec<T> lmo(const Vec<T>& g, const BallSpec<T>& ball) {
  return lmo(std::span<const T>(g), ball);
}

template <Scalar T>
bool is_strictly_feasible(std::span<const T> x, const BallSpec<T>& ball, const T& margin) {
  if (margin < T(0)) throw DomainError("feasibility margin must be non-negative");
  return lp_norm(x, ball.p) <= T(1) - margin;
}

template <Scalar T>
bool is_strictly_feasible(const Vec<T>& x, const BallSpec<T>& ball, const T& margin) {
  return is_strictly_feasible(std::span<const T>(x), ball, margin);
}

}  // namespace fwlab
