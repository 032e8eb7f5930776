#include "fwlab/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

namespace fwlab {

void write_heatmap_csv(std::ostream& os, const std::vector<HeatmapCell>& cells) {
  os << "x1,x2,iters\n";
  for (const auto& c : cells) {
    os << format_scalar(c.x1) << ',' << format_scalar(c.x2) << ',' << c.iters << '\n';
  }
}

nlohmann::ordered_json constants_json(const SlowConstants<double>& c) {
  nlohmann::ordered_json j;
  j["p"] = c.p;
  j["q"] = c.q;
  j["alpha"] = c.alpha;
  j["kappa"] = c.kappa;
  j["C_p"] = c.C_p;
  j["D_p"] = c.D_p;
  j["a_p"] = c.a_p;
  j["rate_exponent"] = c.rate_exponent;
  j["thm_constant"] = c.thm_constant;
  j["z_drift"] = c.z_drift;
  j["outside_theorem_scope"] = c.outside_theorem_scope;
  return j;
}

nlohmann::ordered_json rate_report_json(const RateReport& r) {
  nlohmann::ordered_json j;
  j["p"] = r.p;
  j["theta"] = r.theta;
  j["mu"] = r.mu;
  j["u0"] = r.u0;
  j["T"] = r.T;
  j["slope"] = r.slope;
  j["expected_slope"] = r.expected_slope;
  j["constant_tail"] = r.constant_tail;
  j["expected_constant"] = r.expected_constant;
  j["window_fraction"] = r.window_fraction;
  j["r_squared"] = r.r_squared;
  j["anchor"] = {{"t", r.anchor_t}, {"h", r.anchor_h}};
  auto scale = [&r](double exponent) -> nlohmann::ordered_json {
    if (r.anchor_t <= 0 || !(r.anchor_h > 0.0)) return nullptr;
    return r.anchor_h / std::pow(static_cast<double>(r.anchor_t), exponent);
  };
  nlohmann::ordered_json refs = nlohmann::ordered_json::array();
  refs.push_back({{"name", "lower_bound"}, {"exponent", r.expected_slope}, {"scale", scale(r.expected_slope)}});
  if (r.theta < 0.5) {
    refs.push_back({{"name", "upper_bound"}, {"exponent", r.upper_bound_slope}, {"scale", scale(r.upper_bound_slope)}});
  }
  j["reference_slopes"] = refs;
  return j;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

nlohmann::ordered_json manifest_json(const RunManifest& m, const std::string& timestamp) {
  nlohmann::ordered_json j;
  j["tool"] = "fwlab";
  j["version"] = kVersion;
  j["command"] = m.command;
  j["config"] = m.config;
  j["outputs"] = m.outputs;
  if (!m.metadata.empty()) j["metadata"] = m.metadata;
  j["timestamp"] = timestamp;
  return j;
}

void write_manifest(const RunManifest& m) {
  if (m.outputs.empty()) throw Error("manifest without outputs");
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  const std::string text = manifest_json(m, buf).dump(2) + "\n";
  for (const auto& out : m.outputs) write_text_file(manifest_path_for(out), text);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace fwlab
