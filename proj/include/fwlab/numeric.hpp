#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include <boost/multiprecision/mpfr.hpp>

#include "fwlab/errors.hpp"

namespace fwlab {

/// Extended-precision scalar. The significand width is a runtime setting, see
/// ExtendedPrecisionScope. Expression templates are off so `auto` is safe.
using Extended = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

template <typename T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Extended>;

/// Precision selected for one run. Mixing modes inside a trajectory is not
/// supported; every routine is instantiated for exactly one Scalar type.
struct PrecisionMode {
  enum class Kind { kDouble, kExtended };
  Kind kind = Kind::kDouble;
  unsigned bits = 53;

  static constexpr unsigned kDefaultExtendedBits = 256;
  static constexpr unsigned kMinExtendedBits = 128;

  static PrecisionMode Double() { return {}; }
  static PrecisionMode ExtendedBits(unsigned bits = kDefaultExtendedBits);

  /// Parses "double" or "extended:<bits>" (bits >= 128). Throws DomainError.
  static PrecisionMode Parse(std::string_view text);
  std::string ToString() const;
  bool is_extended() const { return kind == Kind::kExtended; }
};

/// Sets the default significand width for Extended values created on this
/// thread and restores the previous width on destruction.
class ExtendedPrecisionScope {
 public:
  explicit ExtendedPrecisionScope(unsigned bits);
  ~ExtendedPrecisionScope();
  ExtendedPrecisionScope(const ExtendedPrecisionScope&) = delete;
  ExtendedPrecisionScope& operator=(const ExtendedPrecisionScope&) = delete;

 private:
  unsigned saved_digits10_;
};

inline double to_double(double x) { return x; }
inline double to_double(const Extended& x) { return x.convert_to<double>(); }

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Extended& x) { return boost::multiprecision::isfinite(x); }

/// Significant decimal digits needed to round-trip a value of type T
/// (17 for double).
template <Scalar T>
int round_trip_digits() {
  if constexpr (std::same_as<T, double>) {
    return std::numeric_limits<double>::max_digits10;
  } else {
    return static_cast<int>(Extended::default_precision()) + 3;
  }
}

/// Full-precision decimal text for CSV output.
template <Scalar T>
std::string format_scalar(const T& x) {
  if (!is_finite(x)) {
    if (x != x) return "nan";
    return x > 0 ? "inf" : "-inf";
  }
  std::ostringstream os;
  os.precision(round_trip_digits<T>());
  os << x;
  return os.str();
}

template <Scalar T>
T sign_of(const T& x) {
  if (x > 0) return T(1);
  if (x < 0) return T(-1);
  return T(0);
}

/// (1 + z*u)^e via log1p/expm1, keeping full relative accuracy as z*u -> 0.
template <Scalar T>
T stable_pow1p(const T& z, const T& u, const T& e) {
  using std::exp;
  using std::log1p;
  const T zu = z * u;
  if (!(zu > T(-1))) throw DomainError("stable_pow1p: 1 + z*u must be positive");
  return exp(e * log1p(zu));
}

/// (1 + z*u)^e - 1 without cancellation.
template <Scalar T>
T stable_pow1p_minus_one(const T& z, const T& u, const T& e) {
  using std::expm1;
  using std::log1p;
  const T zu = z * u;
  if (!(zu > T(-1))) throw DomainError("stable_pow1p_minus_one: 1 + z*u must be positive");
  return expm1(e * log1p(zu));
}

/// d1 = u + (1 + z*u)^(-1/p) - 1, the first component of the FW direction in
/// centred coordinates. The two O(u) terms are formed separately so that the
/// cancellation at small u only costs the genuine loss in u*(1 - z/p).
template <Scalar T>
T stable_d1(const T& u, const T& z, const T& p) {
  if (!(u > T(0))) throw DomainError("stable_d1: u must be positive");
  if (z < T(0)) throw DomainError("stable_d1: z must be non-negative");
  return u + stable_pow1p_minus_one(z, u, T(-1) / p);
}

}  // namespace fwlab
