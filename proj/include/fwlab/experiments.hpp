#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fwlab/fw_solver.hpp"
#include "fwlab/slow_dynamics.hpp"

// Experiment drivers and plot data, all in double precision.

namespace fwlab {

using Series = std::vector<std::pair<std::int64_t, double>>;

/// Least-squares line through (log10 t, log10 value).
struct RateFit {
  double slope = 0;
  double intercept = 0;
  std::int64_t t_lo = 0;
  std::int64_t t_hi = 0;
  double r_squared = 0;
  std::size_t points = 0;
};

inline constexpr double kDefaultWindowFraction = 0.1;
inline constexpr std::size_t kMinFitPoints = 50;

/// Fit over t in [window_fraction * T, T], T the last t in the series.
/// Needs >= 50 points in the window, all with t > 0 and value > 0.
RateFit fit_rate(const Series& series, double window_fraction = kDefaultWindowFraction);
RateFit fit_rate(const Trajectory<double>& traj, double window_fraction = kDefaultWindowFraction);

/// (t, h_t * t^exponent) for every recorded t > 0.
Series scaled_gap_series(const Trajectory<double>& traj, double exponent);

/// (t, h_t * t^(p/(p-1))); tends to the lower-bound constant on slow starts.
Series constant_convergence(const Trajectory<double>& traj, double p);

/// Mean of the series over its last `fraction` of t (by t, not by count).
double tail_mean(const Series& series, double fraction = kDefaultWindowFraction);

/// Exact-line-search FW on the quadratic from the slow start.
Trajectory<double> slow_start_run(double p, double u0, std::int64_t T, std::int64_t record_every = 1);

/// (t, (1 - s_t) / r_t^kappa) with s_t = r_{t+1}/r_t. Needs record_every = 1.
Series contraction_law_series(const Trajectory<double>& traj, double p);

struct TrackingPoint {
  std::int64_t t;
  double u;
  double ratio;  // |y_t - y*(u_t)| / u_t^kappa
};

/// Distance of the recorded y_t from the slow curve, scaled by u_t^kappa.
/// Rows with u_t > u_max are skipped.
std::vector<TrackingPoint> tracking_profile(const Trajectory<double>& traj, double p,
                                            double tol = 1e-12, double u_max = kDefaultUMax);

/// Slow curve on a geometric u-grid [u_min, u_max] with `points` nodes.
std::vector<SlowCurvePoint<double>> slow_curve(double p, double u_min, double u_max, std::size_t points,
                                               double tol = 1e-12, unsigned jobs = 1);

/// Iterations of exact-line-search FW (quadratic) until h <= target; -1 when
/// `cap` iterations are not enough. Infeasible starts throw.
std::int64_t iterations_to_target(double p, std::span<const double> x0, double target, std::int64_t cap);

struct HeatmapCell {
  double x1;
  double x2;
  std::int64_t iters;  // -1: cap reached
};

struct HeatmapConfig {
  double p = 3;
  int grid_n = 200;
  double target = 1e-4;
  std::int64_t cap = 1'000'000;
  unsigned jobs = 1;
  double interior_margin = 1e-9;
};

/// Cell-centred uniform grid over [-1, 1]^2 (centres -1 + (i + 1/2) 2/n),
/// cells with ||x||_p > 1 - margin omitted. Ordered row-major by (x2, x1)
/// index regardless of worker scheduling.
std::vector<HeatmapCell> heatmap(const HeatmapConfig& cfg);

struct HeatmapBandStats {
  std::size_t band_cells = 0;
  double band_mean = 0;      // capped cells counted at the cap
  double grid_median = 0;
  std::size_t grid_cells = 0;
};

/// Compares cells within `band` (in |w|) of the slow curve |w| = y*(u) u^(1+alpha),
/// 0 < u <= u_max, with the whole grid.
HeatmapBandStats heatmap_band_stats(const std::vector<HeatmapCell>& cells, double p, std::int64_t cap,
                                    double band = 0.01, double u_max = kDefaultUMax);

struct HebResult {
  Trajectory<double> trajectory;  // h column holds the g-gap
  double lower_bound_slope;       // -p / (2 theta (p - 1))
  double upper_bound_slope;       // -p / (p - 2 theta)
  double expected_constant;       // asymptotic constant of the g-gap
  RateFit fit;
  double constant_tail;
};

HebResult heb_experiment(double p, double theta, double mu, double u0, std::int64_t T,
                         double window_fraction = kDefaultWindowFraction);

/// Asymptotic constant of the HEB gap:
///   mu^(-1/theta) ((p+1)/p)^(1/theta) (p/(4(p-1)))^(p/(2 theta (p-1))).
double heb_constant(double p, double theta, double mu);

/// max_t ||x_t^(f) - x_t^(g)||_inf between the quadratic run and the HEB run
/// from x0. With golden_section the HEB run uses an independent golden-section
/// line search on g instead of the shared closed-form step.
double coincidence_check(double p, double theta, double mu, std::span<const double> x0, std::int64_t T,
                         bool golden_section = false);

/// max |x_{t,i}| over t and i >= 3 (1-based) for a run from x0 in R^d.
double confinement_check(std::span<const double> x0, double p, std::int64_t T);

/// Uniform samples on [-1, 1]^2 kept when ||x||_p <= 1 - margin.
std::vector<Vec<double>> random_feasible_points(double p, std::size_t count, std::uint64_t seed,
                                                double margin = 1e-9);

struct SlownessStudy {
  std::int64_t slow_iters;
  std::vector<std::int64_t> random_iters;  // -1 entries mean the cap was hit
  double random_p90;                       // capped runs counted at cap
  double fraction_not_slower;              // share of random runs with iters <= slow_iters
};

SlownessStudy slowness_study(double p, double u0, double target, std::int64_t cap, std::size_t n_random,
                             std::uint64_t seed, unsigned jobs = 1);

/// 90th percentile by linear interpolation between order statistics.
double percentile(std::vector<double> values, double pct);

}  // namespace fwlab
