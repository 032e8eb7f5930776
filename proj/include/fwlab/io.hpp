#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fwlab/experiments.hpp"
#include "fwlab/fw_solver.hpp"
#include "fwlab/slow_dynamics.hpp"

namespace fwlab {

inline constexpr const char* kVersion = "0.3.0";

inline constexpr const char* kTrajectoryHeader = "t,x1,x2,gamma,h,u,w,y,s";

/// One row per recorded iterate, every value at round-trip precision.
template <Scalar T>
void write_trajectory_csv(std::ostream& os, const Trajectory<T>& traj) {
  os << kTrajectoryHeader << '\n';
  for (const auto& r : traj.records) {
    os << r.t << ',' << format_scalar(r.x[0]) << ',' << format_scalar(r.x[1]) << ','
       << format_scalar(r.gamma) << ',' << format_scalar(r.h) << ',' << format_scalar(r.u) << ','
       << format_scalar(r.w) << ',' << format_scalar(r.y) << ',' << format_scalar(r.s) << '\n';
  }
}

template <Scalar T>
void write_slow_curve_csv(std::ostream& os, const std::vector<SlowCurvePoint<T>>& pts) {
  os << "u,y_star,residual\n";
  for (const auto& pt : pts) {
    os << format_scalar(pt.u) << ',' << format_scalar(pt.y_star) << ',' << format_scalar(pt.residual) << '\n';
  }
}

/// Long format; capped cells are written as -1.
void write_heatmap_csv(std::ostream& os, const std::vector<HeatmapCell>& cells);

nlohmann::ordered_json constants_json(const SlowConstants<double>& c);

struct RateReport {
  double p = 3;
  double theta = 0.5;
  double mu = 1;
  double u0 = 0.5;
  std::int64_t T = 100000;
  double slope = 0;
  double expected_slope = 0;
  double constant_tail = 0;
  double expected_constant = 0;
  double window_fraction = kDefaultWindowFraction;
  double r_squared = 0;
  double upper_bound_slope = 0;  // only meaningful for theta < 1/2
  std::int64_t anchor_t = 0;     // first t of the fit window
  double anchor_h = 0;           // gap recorded at anchor_t
};

/// {p, theta, mu, u0, T, slope, expected_slope, constant_tail,
/// expected_constant} plus window and reference-line metadata. Reference
/// lines are scale * t^exponent, scaled to meet the run at the anchor.
nlohmann::ordered_json rate_report_json(const RateReport& r);

/// Configuration echo written next to every output file.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<std::string> outputs;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

/// "<output>.manifest.json"
std::filesystem::path manifest_path_for(const std::filesystem::path& output);

nlohmann::ordered_json manifest_json(const RunManifest& m, const std::string& timestamp);

/// Writes one manifest per output file, stamped with the current UTC time.
void write_manifest(const RunManifest& m);

/// Writes text to path, creating parent directories; throws Error on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fwlab
