#pragma once

#include <span>

#include "fwlab/errors.hpp"
#include "fwlab/lp_geometry.hpp"
#include "fwlab/numeric.hpp"

namespace fwlab {

enum class ObjectiveKind { kQuadratic, kHebPower };

/// The model objectives, both minimised at x* = e_1:
///   Quadratic: f(x) = ||x - e_1||^2
///   HebPower:  g(x) = mu^(-1/theta) ||x - e_1||^(1/theta) = mu^(-1/theta) f(x)^(1/(2 theta))
/// g satisfies the (mu, theta) Hoelderian error bound with equality.
template <Scalar T>
class Objective {
 public:
  static Objective Quadratic() { return Objective(ObjectiveKind::kQuadratic, T(1), T(1) / T(2)); }

  static Objective HebPower(const T& mu, const T& theta) {
    if (!(mu > T(0))) throw DomainError("HEB objective needs mu > 0");
    if (!(theta > T(0) && theta <= T(1) / T(2))) {
      throw DomainError("HEB objective needs theta in (0, 1/2]");
    }
    return Objective(ObjectiveKind::kHebPower, mu, theta);
  }

  ObjectiveKind kind() const { return kind_; }
  const T& mu() const { return mu_; }
  const T& theta() const { return theta_; }
  bool is_quadratic() const { return kind_ == ObjectiveKind::kQuadratic; }

  /// ||x - e_1||_2^2
  static T squared_distance(std::span<const T> x) {
    T s(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const T di = i == 0 ? x[0] - T(1) : x[i];
      s += di * di;
    }
    return s;
  }

  /// Maps the quadratic value f onto this objective's value.
  T from_quadratic(const T& f) const {
    using std::pow;
    if (is_quadratic()) return f;
    return pow(mu_, T(-1) / theta_) * pow(f, T(1) / (T(2) * theta_));
  }

  T value(std::span<const T> x) const { return from_quadratic(squared_distance(x)); }

  /// Both objectives vanish at e_1, so the gap is the value itself.
  T primal_gap(std::span<const T> x) const { return value(x); }

  /// 2 (x - e_1): the quadratic's gradient, and a positive multiple of the
  /// HEB gradient at every x != e_1.
  static Vec<T> quadratic_gradient(std::span<const T> x) {
    Vec<T> g(x.begin(), x.end());
    g[0] -= T(1);
    for (T& gi : g) gi *= T(2);
    return g;
  }

  /// Exact gradient. Zero vector at e_1 by convention for every theta.
  Vec<T> gradient(std::span<const T> x) const {
    using std::pow;
    Vec<T> g = quadratic_gradient(x);
    if (is_quadratic()) return g;
    const T f = squared_distance(x);
    if (f == T(0)) return Vec<T>(x.size(), T(0));
    const T e = T(1) / (T(2) * theta_);
    const T scale = e * pow(mu_, T(-1) / theta_) * pow(f, e - T(1));
    for (T& gi : g) gi *= scale;
    return g;
  }

  /// Smoothness constant used by the short-step rule; quadratic only.
  T smoothness() const {
    if (!is_quadratic()) {
      throw UnsupportedObjectiveError(
          "short step is only offered for the quadratic objective; the HEB transform "
          "changes the step size");
    }
    return T(2);
  }

 private:
  Objective(ObjectiveKind kind, T mu, T theta) : kind_(kind), mu_(std::move(mu)), theta_(std::move(theta)) {}

  ObjectiveKind kind_;
  T mu_;
  T theta_;
};

}  // namespace fwlab
