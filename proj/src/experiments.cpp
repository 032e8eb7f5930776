#include "fwlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fwlab/parallel.hpp"

namespace fwlab {

RateFit fit_rate(const Series& series, double window_fraction) {
  if (series.empty()) throw InsufficientDataError("fit_rate: empty series");
  if (!(window_fraction >= 0.0 && window_fraction < 1.0)) {
    throw DomainError("fit_rate: window fraction must lie in [0, 1)");
  }
  const std::int64_t T = series.back().first;
  const double t_lo = window_fraction * static_cast<double>(T);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t n = 0;
  RateFit fit;
  fit.t_lo = T;
  fit.t_hi = T;
  for (const auto& [t, v] : series) {
    if (t <= 0 || static_cast<double>(t) < t_lo) continue;
    if (!(v > 0.0)) throw InsufficientDataError("fit_rate: non-positive value inside the window");
    const double lx = std::log10(static_cast<double>(t));
    const double ly = std::log10(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
    fit.t_lo = std::min(fit.t_lo, t);
    ++n;
  }
  if (n < kMinFitPoints) {
    throw InsufficientDataError("fit_rate: window holds " + std::to_string(n) + " points, need " +
                                std::to_string(kMinFitPoints));
  }
  const double dn = static_cast<double>(n);
  const double cxx = sxx - sx * sx / dn;
  const double cxy = sxy - sx * sy / dn;
  const double cyy = syy - sy * sy / dn;
  fit.slope = cxy / cxx;
  fit.intercept = (sy - fit.slope * sx) / dn;
  fit.r_squared = cyy > 0 ? std::clamp(cxy * cxy / (cxx * cyy), 0.0, 1.0) : 1.0;
  fit.points = n;
  return fit;
}

RateFit fit_rate(const Trajectory<double>& traj, double window_fraction) {
  Series s;
  s.reserve(traj.records.size());
  for (const auto& r : traj.records) s.emplace_back(r.t, r.h);
  return fit_rate(s, window_fraction);
}

Series scaled_gap_series(const Trajectory<double>& traj, double exponent) {
  Series s;
  s.reserve(traj.records.size());
  for (const auto& r : traj.records) {
    if (r.t <= 0) continue;
    s.emplace_back(r.t, r.h * std::pow(static_cast<double>(r.t), exponent));
  }
  return s;
}

Series constant_convergence(const Trajectory<double>& traj, double p) {
  return scaled_gap_series(traj, p / (p - 1.0));
}

double tail_mean(const Series& series, double fraction) {
  if (series.empty()) throw InsufficientDataError("tail_mean: empty series");
  const double t_lo = (1.0 - fraction) * static_cast<double>(series.back().first);
  double sum = 0;
  std::size_t n = 0;
  for (const auto& [t, v] : series) {
    if (static_cast<double>(t) < t_lo) continue;
    sum += v;
    ++n;
  }
  return sum / static_cast<double>(n);
}

Trajectory<double> slow_start_run(double p, double u0, std::int64_t T, std::int64_t record_every) {
  const BallSpec<double> ball(p);
  SolverConfig cfg;
  cfg.max_iters = T;
  cfg.record_every = record_every;
  return run<double>(ball, Objective<double>::Quadratic(), slow_start<double>(u0, p), cfg);
}

Series contraction_law_series(const Trajectory<double>& traj, double p) {
  const double kappa = 2.0 * (p - 1.0) / p;
  Series s;
  const auto& rec = traj.records;
  for (std::size_t i = 0; i + 1 < rec.size(); ++i) {
    if (rec[i + 1].t != rec[i].t + 1) {
      throw InsufficientDataError("contraction_law_series needs every iterate recorded");
    }
    const double r = std::sqrt(rec[i].h);
    s.emplace_back(rec[i].t, (1.0 - rec[i + 1].s) / std::pow(r, kappa));
  }
  return s;
}

std::vector<TrackingPoint> tracking_profile(const Trajectory<double>& traj, double p, double tol,
                                            double u_max) {
  const double kappa = 2.0 * (p - 1.0) / p;
  std::vector<TrackingPoint> out;
  out.reserve(traj.records.size());
  for (const auto& r : traj.records) {
    if (!(r.u > 0.0) || r.u > u_max || std::isnan(r.y)) continue;
    const double ys = fixed_point_y<double>(r.u, p, tol, u_max).y_star;
    out.push_back({r.t, r.u, std::abs(r.y - ys) / std::pow(r.u, kappa)});
  }
  return out;
}

std::vector<SlowCurvePoint<double>> slow_curve(double p, double u_min, double u_max, std::size_t points,
                                               double tol, unsigned jobs) {
  if (!(u_min > 0.0 && u_max >= u_min)) throw DomainError("slow_curve needs 0 < u_min <= u_max");
  if (points == 0) throw DomainError("slow_curve needs at least one point");
  std::vector<SlowCurvePoint<double>> out(points);
  const double log_lo = std::log(u_min);
  const double log_hi = std::log(u_max);
  parallel_for(points, jobs, [&](std::size_t i) {
    double u = points == 1 ? u_min
                           : std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                                   static_cast<double>(points - 1));
    if (i == 0) u = u_min;
    if (i + 1 == points) u = u_max;
    out[i] = fixed_point_y<double>(u, p, tol, std::max(u_max, kDefaultUMax));
  });
  return out;
}

std::int64_t iterations_to_target(double p, std::span<const double> x0, double target, std::int64_t cap) {
  const BallSpec<double> ball(p);
  SolverConfig cfg;
  cfg.max_iters = cap;
  cfg.gap_tol = target;
  cfg.record_every = cap + 1;  // only the first and last rows are kept
  const Trajectory<double> tr = run<double>(ball, Objective<double>::Quadratic(), x0, cfg);
  return tr.termination == Termination::kMaxIters ? -1 : tr.iterations;
}

std::vector<HeatmapCell> heatmap(const HeatmapConfig& cfg) {
  if (cfg.grid_n < 16) throw DomainError("heatmap needs grid_n >= 16");
  if (!(cfg.target > 0.0)) throw DomainError("heatmap needs target > 0");
  if (cfg.cap < 1) throw DomainError("heatmap needs cap >= 1");
  const BallSpec<double> ball(cfg.p);
  const int n = cfg.grid_n;
  auto centre = [n](int i) { return -1.0 + (2.0 * i + 1.0) / n; };
  std::vector<HeatmapCell> cells;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec<double> x{centre(i), centre(j)};
      if (is_strictly_feasible<double>(x, ball, cfg.interior_margin)) cells.push_back({x[0], x[1], 0});
    }
  }
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t k) {
    const double x[2] = {cells[k].x1, cells[k].x2};
    cells[k].iters = iterations_to_target(cfg.p, x, cfg.target, cfg.cap);
  });
  return cells;
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw InsufficientDataError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

HeatmapBandStats heatmap_band_stats(const std::vector<HeatmapCell>& cells, double p, std::int64_t cap,
                                    double band, double u_max) {
  const double expo = 1.0 + (p - 1.0) / p;
  auto count = [cap](const HeatmapCell& c) { return static_cast<double>(c.iters < 0 ? cap : c.iters); };
  HeatmapBandStats st;
  std::vector<double> all;
  all.reserve(cells.size());
  double band_sum = 0;
  for (const auto& c : cells) {
    all.push_back(count(c));
    const double u = 1.0 - c.x1;
    if (!(u > 0.0) || u > u_max) continue;
    const double w_curve = fixed_point_y<double>(u, p, 1e-12, u_max).y_star * std::pow(u, expo);
    if (std::abs(std::abs(c.x2) - w_curve) <= band) {
      band_sum += count(c);
      ++st.band_cells;
    }
  }
  st.grid_cells = all.size();
  st.grid_median = percentile(all, 50.0);
  st.band_mean = st.band_cells ? band_sum / static_cast<double>(st.band_cells) : 0.0;
  return st;
}

double heb_constant(double p, double theta, double mu) {
  return std::pow(mu, -1.0 / theta) * std::pow((p + 1.0) / p, 1.0 / theta) *
         std::pow(p / (4.0 * (p - 1.0)), p / (2.0 * theta * (p - 1.0)));
}

HebResult heb_experiment(double p, double theta, double mu, double u0, std::int64_t T, double window_fraction) {
  if (p < 3.0) throw UnsupportedExponentError("heb_experiment needs p >= 3");
  const BallSpec<double> ball(p);
  const auto obj = Objective<double>::HebPower(mu, theta);
  SolverConfig cfg;
  cfg.max_iters = T;
  HebResult res{run<double>(ball, obj, slow_start<double>(u0, p), cfg),
                -p / (2.0 * theta * (p - 1.0)),
                -p / (p - 2.0 * theta),
                heb_constant(p, theta, mu),
                {},
                0.0};
  res.fit = fit_rate(res.trajectory, window_fraction);
  res.constant_tail = tail_mean(scaled_gap_series(res.trajectory, -res.lower_bound_slope), window_fraction);
  return res;
}

double coincidence_check(double p, double theta, double mu, std::span<const double> x0, std::int64_t T,
                         bool golden_section) {
  const BallSpec<double> ball(p);
  SolverConfig cfg;
  cfg.max_iters = T;
  const auto quad = run<double>(ball, Objective<double>::Quadratic(), x0, cfg);
  cfg.golden_section_debug = golden_section;
  const auto heb = run<double>(ball, Objective<double>::HebPower(mu, theta), x0, cfg);
  double dev = 0;
  const std::size_t n = std::min(quad.records.size(), heb.records.size());
  if (quad.records.size() != heb.records.size()) dev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = quad.records[k].x;
    const auto& b = heb.records[k].x;
    for (std::size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] - b[i]));
  }
  return dev;
}

double confinement_check(std::span<const double> x0, double p, std::int64_t T) {
  if (x0.size() < 3) throw DomainError("confinement_check needs d >= 3");
  const BallSpec<double> ball(p);
  SolverConfig cfg;
  cfg.max_iters = T;
  const auto tr = run<double>(ball, Objective<double>::Quadratic(), x0, cfg);
  double m = 0;
  for (const auto& r : tr.records) {
    for (std::size_t i = 2; i < r.x.size(); ++i) m = std::max(m, std::abs(r.x[i]));
  }
  return m;
}

std::vector<Vec<double>> random_feasible_points(double p, std::size_t count, std::uint64_t seed, double margin) {
  const BallSpec<double> ball(p);
  std::mt19937_64 rng(seed);
  // 53 random bits -> [0, 1); fixed mapping keeps samples identical across
  // standard libraries.
  auto uniform = [&rng] { return -1.0 + 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Vec<double>> pts;
  pts.reserve(count);
  while (pts.size() < count) {
    Vec<double> x{uniform(), uniform()};
    if (is_strictly_feasible<double>(x, ball, margin)) pts.push_back(std::move(x));
  }
  return pts;
}

SlownessStudy slowness_study(double p, double u0, double target, std::int64_t cap, std::size_t n_random,
                             std::uint64_t seed, unsigned jobs) {
  SlownessStudy st;
  st.slow_iters = iterations_to_target(p, slow_start<double>(u0, p), target, cap);
  const auto pts = random_feasible_points(p, n_random, seed);
  st.random_iters.assign(pts.size(), 0);
  parallel_for(pts.size(), jobs,
               [&](std::size_t i) { st.random_iters[i] = iterations_to_target(p, pts[i], target, cap); });
  auto capped = [cap](std::int64_t it) { return static_cast<double>(it < 0 ? cap : it); };
  std::vector<double> vals;
  std::size_t not_slower = 0;
  const double slow = capped(st.slow_iters);
  for (auto it : st.random_iters) {
    vals.push_back(capped(it));
    if (capped(it) <= slow) ++not_slower;
  }
  st.random_p90 = percentile(vals, 90.0);
  st.fraction_not_slower = static_cast<double>(not_slower) / static_cast<double>(vals.size());
  return st;
}

}  // namespace fwlab
