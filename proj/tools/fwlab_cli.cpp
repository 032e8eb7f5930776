// fwlab: command-line front end for Frank-Wolfe runs on l_p balls and the
// slow-curve experiments.
//
// Exit codes: 0 success, 2 invalid flags, 3 infeasible start, 4 numeric failure.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fwlab/experiments.hpp"
#include "fwlab/io.hpp"

namespace {

using fwlab::Extended;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumeric = 4;

class InvalidFlag : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_double(std::string_view s, const std::string& what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidFlag("invalid number in " + what);
  return v;
}

// --x0 slow:<u0> | point:<x1>,<x2> | random:<seed>
struct StartSpec {
  enum class Kind { kSlow, kPoint, kRandom } kind = Kind::kSlow;
  double u0 = 0.5;
  double x1 = 0;
  double x2 = 0;
  std::uint64_t seed = 0;

  static StartSpec Parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidFlag("--x0 expects slow:<u0>, point:<x1>,<x2> or random:<seed>");
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    StartSpec s;
    if (kind == "slow") {
      s.kind = Kind::kSlow;
      s.u0 = parse_double(arg, "--x0 slow:<u0>");
    } else if (kind == "point") {
      s.kind = Kind::kPoint;
      const auto comma = arg.find(',');
      if (comma == std::string::npos) throw InvalidFlag("--x0 point:<x1>,<x2> needs two coordinates");
      s.x1 = parse_double(std::string_view(arg).substr(0, comma), "--x0 point");
      s.x2 = parse_double(std::string_view(arg).substr(comma + 1), "--x0 point");
    } else if (kind == "random") {
      s.kind = Kind::kRandom;
      auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), s.seed);
      if (arg.empty() || ec != std::errc() || ptr != arg.data() + arg.size()) {
        throw InvalidFlag("--x0 random:<seed> needs a non-negative integer seed");
      }
    } else {
      throw InvalidFlag("unknown --x0 kind '" + kind + "'");
    }
    return s;
  }
};

template <fwlab::Scalar T>
fwlab::Vec<T> make_start(const StartSpec& s, double p) {
  switch (s.kind) {
    case StartSpec::Kind::kSlow:
      if (!(s.u0 > 0.0 && s.u0 < 1.0)) throw InvalidFlag("slow start needs 0 < u0 < 1");
      return fwlab::slow_start<T>(T(s.u0), T(p));
    case StartSpec::Kind::kPoint:
      return {T(s.x1), T(s.x2)};
    case StartSpec::Kind::kRandom: {
      const auto pts = fwlab::random_feasible_points(p, 1, s.seed);
      return {T(pts[0][0]), T(pts[0][1])};
    }
  }
  return {};
}

struct SolveOptions {
  double p = 3;
  std::string rule = "exact";
  std::int64_t iters = 1000;
  double tol = 0;
  std::string x0 = "slow:0.5";
  std::optional<double> theta;
  std::optional<double> mu;
  std::string precision = "double";
  std::string out = "trajectory.csv";
  std::int64_t record_every = 1;
  bool golden = false;
};

template <fwlab::Scalar T>
fwlab::Trajectory<T> solve_in(const SolveOptions& o, const StartSpec& start, const fwlab::SolverConfig& cfg) {
  const fwlab::BallSpec<T> ball{T(o.p)};
  const auto obj = o.theta ? fwlab::Objective<T>::HebPower(T(o.mu.value_or(1.0)), T(*o.theta))
                           : fwlab::Objective<T>::Quadratic();
  return fwlab::run<T>(ball, obj, make_start<T>(start, o.p), cfg);
}

int cmd_solve(const SolveOptions& o) {
  if (o.rule != "exact" && o.rule != "short") throw InvalidFlag("--rule must be exact or short");
  if (o.mu && !o.theta) throw InvalidFlag("--mu only applies together with --theta");
  if (o.rule == "short" && o.theta) {
    throw InvalidFlag("short step is not offered for the HEB objective (exact line search only)");
  }
  if (!(o.p > 1.0)) throw InvalidFlag("--p must exceed 1");
  const StartSpec start = StartSpec::Parse(o.x0);
  fwlab::PrecisionMode mode;
  try {
    mode = fwlab::PrecisionMode::Parse(o.precision);
  } catch (const fwlab::DomainError& e) {
    throw InvalidFlag(e.what());
  }

  fwlab::SolverConfig cfg;
  cfg.rule = o.rule == "exact" ? fwlab::StepRule::kExactLineSearch : fwlab::StepRule::kShortStep;
  cfg.max_iters = o.iters;
  cfg.gap_tol = o.tol;
  cfg.record_every = o.record_every;
  cfg.golden_section_debug = o.golden;

  std::ostringstream csv;
  ordered_json summary;
  auto summarize = [&](const auto& tr) {
    fwlab::write_trajectory_csv(csv, tr);
    summary["termination"] = fwlab::to_string(tr.termination);
    summary["iterations"] = tr.iterations;
    summary["final_gap"] = fwlab::format_scalar(tr.final_h);
    summary["monotonicity_violations"] = tr.monotonicity_violations;
    summary["axis_events"] = tr.axis_events;
  };
  if (mode.is_extended()) {
    fwlab::ExtendedPrecisionScope scope(mode.bits);
    summarize(solve_in<Extended>(o, start, cfg));
  } else {
    summarize(solve_in<double>(o, start, cfg));
  }
  fwlab::write_text_file(o.out, csv.str());

  fwlab::RunManifest m;
  m.command = "solve";
  m.config = {{"p", o.p},
              {"theta", o.theta ? ordered_json(*o.theta) : ordered_json(nullptr)},
              {"mu", o.theta ? ordered_json(o.mu.value_or(1.0)) : ordered_json(nullptr)},
              {"x0", o.x0},
              {"u0", start.kind == StartSpec::Kind::kSlow ? ordered_json(start.u0) : ordered_json(nullptr)},
              {"rule", o.rule},
              {"T", o.iters},
              {"tol", o.tol},
              {"precision", mode.ToString()},
              {"seed", start.kind == StartSpec::Kind::kRandom ? ordered_json(start.seed) : ordered_json(nullptr)},
              {"record_every", o.record_every},
              {"golden_section_debug", o.golden}};
  m.outputs = {o.out};
  m.metadata = summary;
  fwlab::write_manifest(m);
  std::cout << "wrote " << o.out << " (" << summary["iterations"] << " iterations, "
            << summary["termination"].get<std::string>() << ")\n";
  return kExitOk;
}

struct HeatmapOptions {
  fwlab::HeatmapConfig cfg;
  std::string out = "heatmap.csv";
};

int cmd_heatmap(const HeatmapOptions& o) {
  if (o.cfg.grid_n < 16) throw InvalidFlag("--grid must be at least 16");
  if (!(o.cfg.target > 0.0)) throw InvalidFlag("--target must be positive");
  if (o.cfg.cap < 1) throw InvalidFlag("--cap must be at least 1");
  if (!(o.cfg.p > 1.0)) throw InvalidFlag("--p must exceed 1");
  const auto cells = fwlab::heatmap(o.cfg);
  std::ostringstream csv;
  fwlab::write_heatmap_csv(csv, cells);
  fwlab::write_text_file(o.out, csv.str());

  fwlab::RunManifest m;
  m.command = "heatmap";
  m.config = {{"p", o.cfg.p},         {"grid", o.cfg.grid_n},         {"target", o.cfg.target},
              {"cap", o.cfg.cap},     {"rule", "exact"},              {"precision", "double"},
              {"jobs", o.cfg.jobs}};
  m.outputs = {o.out};
  m.metadata = {{"grid_layout", "cell centres -1 + (i + 1/2) * 2/grid over [-1,1]^2"},
                {"interior_filter", "||x||_p <= 1 - 1e-9"},
                {"cap_sentinel", -1},
                {"cells", cells.size()},
                {"outside_theorem_scope", o.cfg.p < 3.0}};
  fwlab::write_manifest(m);
  std::cout << "wrote " << o.out << " (" << cells.size() << " cells)\n";
  return kExitOk;
}

struct FixedPointOptions {
  double p = 3;
  double u_min = 1e-6;
  double u_max = 0.1;
  std::size_t points = 50;
  double tol = 1e-12;
  std::string precision = "double";
  unsigned jobs = 1;
  std::string out = "slow_curve.csv";
};

int cmd_fixedpoint(const FixedPointOptions& o) {
  if (!(o.u_min > 0.0 && o.u_max >= o.u_min)) throw InvalidFlag("need 0 < --u-min <= --u-max");
  if (o.points < 1) throw InvalidFlag("--points must be at least 1");
  if (!(o.tol > 0.0)) throw InvalidFlag("--tol must be positive");
  fwlab::PrecisionMode mode;
  try {
    mode = fwlab::PrecisionMode::Parse(o.precision);
  } catch (const fwlab::DomainError& e) {
    throw InvalidFlag(e.what());
  }
  std::ostringstream csv;
  if (mode.is_extended()) {
    fwlab::ExtendedPrecisionScope scope(mode.bits);
    std::vector<fwlab::SlowCurvePoint<Extended>> pts;
    const Extended lo(o.u_min), hi(o.u_max);
    using std::exp;
    using std::log;
    for (std::size_t i = 0; i < o.points; ++i) {
      Extended u = o.points == 1 ? lo : Extended(exp(log(lo) + (log(hi) - log(lo)) * Extended(i) / Extended(o.points - 1)));
      if (i + 1 == o.points) u = hi;
      pts.push_back(fwlab::fixed_point_y<Extended>(u, Extended(o.p), Extended(o.tol),
                                                   Extended(std::max(o.u_max, fwlab::kDefaultUMax))));
    }
    fwlab::write_slow_curve_csv(csv, pts);
  } else {
    fwlab::write_slow_curve_csv(csv, fwlab::slow_curve(o.p, o.u_min, o.u_max, o.points, o.tol, o.jobs));
  }
  fwlab::write_text_file(o.out, csv.str());

  fwlab::RunManifest m;
  m.command = "fixedpoint";
  m.config = {{"p", o.p},          {"u_min", o.u_min}, {"u_max", o.u_max},
              {"points", o.points}, {"tol", o.tol},     {"precision", mode.ToString()}};
  m.outputs = {o.out};
  m.metadata = {{"grid", "geometric"},
                {"bracket", "[0.8 C_p, 1.2 C_p], bisection"},
                {"outside_theorem_scope", o.p < 3.0}};
  fwlab::write_manifest(m);
  std::cout << "wrote " << o.out << " (" << o.points << " points)\n";
  return kExitOk;
}

struct RatesOptions {
  double p = 3;
  double theta = 0.5;
  double mu = 1;
  double u0 = 0.5;
  std::int64_t iters = 100000;
  double window = fwlab::kDefaultWindowFraction;
  std::string out = "rates.json";
  std::string trajectory;
};

int cmd_rates(const RatesOptions& o) {
  if (o.p < 3.0) throw InvalidFlag("rates needs --p >= 3");
  if (!(o.theta > 0.0 && o.theta <= 0.5)) throw InvalidFlag("--theta must lie in (0, 1/2]");
  if (!(o.mu > 0.0)) throw InvalidFlag("--mu must be positive");
  if (!(o.u0 > 0.0 && o.u0 < 1.0)) throw InvalidFlag("--u0 must lie in (0, 1)");
  if (!(o.window > 0.0 && o.window < 1.0)) throw InvalidFlag("--window must lie in (0, 1)");
  const auto res = fwlab::heb_experiment(o.p, o.theta, o.mu, o.u0, o.iters, o.window);
  fwlab::RateReport r;
  r.p = o.p;
  r.theta = o.theta;
  r.mu = o.mu;
  r.u0 = o.u0;
  r.T = o.iters;
  r.slope = res.fit.slope;
  r.expected_slope = res.lower_bound_slope;
  r.constant_tail = res.constant_tail;
  r.expected_constant = res.expected_constant;
  r.window_fraction = o.window;
  r.r_squared = res.fit.r_squared;
  r.upper_bound_slope = res.upper_bound_slope;
  r.anchor_t = res.fit.t_lo;
  for (const auto& rec : res.trajectory.records) {
    if (rec.t == r.anchor_t) r.anchor_h = rec.h;
  }
  fwlab::write_text_file(o.out, fwlab::rate_report_json(r).dump(2) + "\n");

  fwlab::RunManifest m;
  m.command = "rates";
  m.config = {{"p", o.p},   {"theta", o.theta},   {"mu", o.mu},         {"u0", o.u0},
              {"rule", "exact"}, {"T", o.iters}, {"window", o.window}, {"precision", "double"}};
  m.outputs = {o.out};
  if (!o.trajectory.empty()) {
    std::ostringstream csv;
    fwlab::write_trajectory_csv(csv, res.trajectory);
    fwlab::write_text_file(o.trajectory, csv.str());
    m.outputs.push_back(o.trajectory);
  }
  fwlab::write_manifest(m);
  std::cout << "slope " << r.slope << " (expected " << r.expected_slope << "), constant tail " << r.constant_tail
            << " (expected " << r.expected_constant << ")\n";
  return kExitOk;
}

struct ConstantsOptions {
  double p = 3;
  bool force = false;
  std::string out;
};

int cmd_constants(const ConstantsOptions& o) {
  if (!(o.p > 1.0)) throw InvalidFlag("--p must exceed 1");
  fwlab::SlowConstants<double> c;
  try {
    c = fwlab::slow_constants<double>(o.p, o.force);
  } catch (const fwlab::UnsupportedExponentError& e) {
    throw InvalidFlag(e.what());
  }
  if (c.outside_theorem_scope) std::cerr << "warning: p = " << o.p << " is outside the lower-bound theorem's scope\n";
  const std::string text = fwlab::constants_json(c).dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return kExitOk;
  }
  fwlab::write_text_file(o.out, text);
  fwlab::RunManifest m;
  m.command = "constants";
  m.config = {{"p", o.p}, {"force", o.force}, {"precision", "double"}};
  m.outputs = {o.out};
  fwlab::write_manifest(m);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fwlab: Frank-Wolfe dynamics on l_p balls"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fwlab::kVersion);

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Run FW and write the trajectory CSV");
  s->add_option("--p", solve.p, "Ball exponent p")->capture_default_str();
  s->add_option("--rule", solve.rule, "exact | short")->capture_default_str();
  s->add_option("--iters", solve.iters, "Iteration budget")->capture_default_str()->check(CLI::NonNegativeNumber);
  s->add_option("--tol", solve.tol, "Stop once the primal gap is <= tol")->capture_default_str();
  s->add_option("--x0", solve.x0, "slow:<u0> | point:<x1>,<x2> | random:<seed>")->capture_default_str();
  s->add_option("--theta", solve.theta, "HEB exponent theta in (0, 1/2]");
  s->add_option("--mu", solve.mu, "HEB constant mu > 0");
  s->add_option("--precision", solve.precision, "double | extended:<bits>")->capture_default_str();
  s->add_option("--record-every", solve.record_every, "Record every n-th iterate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  s->add_flag("--golden", solve.golden, "Golden-section line search on the objective (debug)");
  s->add_option("--out", solve.out, "Trajectory CSV path")->capture_default_str();

  HeatmapOptions hm;
  auto* h = app.add_subcommand("heatmap", "Iterations-to-target over a grid of starting points");
  h->add_option("--p", hm.cfg.p)->capture_default_str();
  h->add_option("--grid", hm.cfg.grid_n, "Grid points per axis")->capture_default_str();
  h->add_option("--target", hm.cfg.target, "Target primal gap")->capture_default_str();
  h->add_option("--cap", hm.cfg.cap, "Iteration cap (written as -1)")->capture_default_str();
  h->add_option("--jobs", hm.cfg.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  h->add_option("--out", hm.out)->capture_default_str();

  FixedPointOptions fp;
  auto* f = app.add_subcommand("fixedpoint", "Solve the slow curve y*(u) on a geometric grid");
  f->add_option("--p", fp.p)->capture_default_str();
  f->add_option("--u-min", fp.u_min)->capture_default_str();
  f->add_option("--u-max", fp.u_max)->capture_default_str();
  f->add_option("--points", fp.points)->capture_default_str();
  f->add_option("--tol", fp.tol, "Residual tolerance |Phi(u,y) - y|")->capture_default_str();
  f->add_option("--precision", fp.precision, "double | extended:<bits>")->capture_default_str();
  f->add_option("--jobs", fp.jobs)->capture_default_str();
  f->add_option("--out", fp.out)->capture_default_str();

  RatesOptions rt;
  auto* r = app.add_subcommand("rates", "Slow-start run with rate fit and constant report (JSON)");
  r->add_option("--p", rt.p)->capture_default_str();
  r->add_option("--theta", rt.theta)->capture_default_str();
  r->add_option("--mu", rt.mu)->capture_default_str();
  r->add_option("--u0", rt.u0)->capture_default_str();
  r->add_option("--iters", rt.iters)->capture_default_str()->check(CLI::PositiveNumber);
  r->add_option("--window", rt.window, "Fit over t >= window * T")->capture_default_str();
  r->add_option("--out", rt.out)->capture_default_str();
  r->add_option("--trajectory", rt.trajectory, "Also write the trajectory CSV here");

  ConstantsOptions co;
  auto* c = app.add_subcommand("constants", "Print or write the slow-curve constants (JSON)");
  c->add_option("--p", co.p)->capture_default_str();
  c->add_flag("--force", co.force, "Allow p < 3 (outside theorem scope)");
  c->add_option("--out", co.out, "JSON path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*s) return cmd_solve(solve);
    if (*h) return cmd_heatmap(hm);
    if (*f) return cmd_fixedpoint(fp);
    if (*r) return cmd_rates(rt);
    if (*c) return cmd_constants(co);
  } catch (const InvalidFlag& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const fwlab::InfeasibleStartError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const fwlab::UnsupportedObjectiveError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const fwlab::UnsupportedExponentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const fwlab::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const fwlab::Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitInvalid;
}
