#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fwlab/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("fwlab_io_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("trajectory CSV round-trips every column") {
  fwlab::SolverConfig cfg;
  cfg.max_iters = 50;
  const auto tr = fwlab::run<double>(fwlab::BallSpec<double>(3.0), fwlab::Objective<double>::Quadratic(),
                                     fwlab::slow_start(0.5, 3.0), cfg);
  std::ostringstream os;
  fwlab::write_trajectory_csv(os, tr);
  const auto rows = parse_csv(os.str());
  REQUIRE(rows.size() == tr.records.size() + 1);
  CHECK(rows[0] == std::vector<std::string>{"t", "x1", "x2", "gamma", "h", "u", "w", "y", "s"});
  CHECK(rows[1][8] == "nan");
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    const auto& r = tr.records[i];
    const auto& c = rows[i + 1];
    REQUIRE(c.size() == 9);
    CHECK(std::stoll(c[0]) == r.t);
    CHECK(std::stod(c[1]) == r.x[0]);
    CHECK(std::stod(c[2]) == r.x[1]);
    CHECK(std::stod(c[3]) == r.gamma);
    CHECK(std::stod(c[4]) == r.h);
    CHECK(std::stod(c[5]) == r.u);
    CHECK(std::stod(c[6]) == r.w);
    CHECK(std::stod(c[7]) == r.y);
    if (i > 0) CHECK(std::stod(c[8]) == r.s);
  }
}

TEST_CASE("slow curve and heatmap CSV") {
  std::ostringstream a;
  fwlab::write_slow_curve_csv(a, fwlab::slow_curve(3.0, 1e-4, 1e-2, 3));
  const auto rows = parse_csv(a.str());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"u", "y_star", "residual"});
  CHECK(std::stod(rows[1][0]) == 1e-4);

  std::ostringstream b;
  fwlab::write_heatmap_csv(b, {{0.25, -0.5, 12}, {0.5, 0.5, -1}});
  CHECK(b.str() == "x1,x2,iters\n0.25,-0.5,12\n0.5,0.5,-1\n");
}

TEST_CASE("constants JSON") {
  const json j = fwlab::constants_json(fwlab::slow_constants(3.0));
  for (const char* key : {"p", "q", "alpha", "kappa", "C_p", "D_p", "a_p", "rate_exponent", "thm_constant",
                          "z_drift", "outside_theorem_scope"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["z_drift"].get<double>() == 0.234375);
  CHECK(j["outside_theorem_scope"].get<bool>() == false);
}

TEST_CASE("rate report JSON") {
  fwlab::RateReport r;
  r.theta = 1.0 / 3.0;
  r.slope = -2.2;
  r.expected_slope = -2.25;
  r.upper_bound_slope = -9.0 / 7.0;
  r.anchor_t = 1000;
  r.anchor_h = 2e-5;
  const json j = json::parse(fwlab::rate_report_json(r).dump());
  for (const char* key : {"p", "theta", "mu", "u0", "T", "slope", "expected_slope", "constant_tail",
                          "expected_constant"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["T"].get<std::int64_t>() == 100000);
  REQUIRE(j["reference_slopes"].size() == 2);
  CHECK(j["reference_slopes"][1]["exponent"].get<double>() == doctest::Approx(-9.0 / 7.0));
  // each reference line passes through the anchor point
  for (const auto& ref : j["reference_slopes"]) {
    const double at = ref["scale"].get<double>() * std::pow(1000.0, ref["exponent"].get<double>());
    CHECK(at == doctest::Approx(2e-5).epsilon(1e-12));
  }
  CHECK(j["anchor"]["t"].get<int>() == 1000);

  r.theta = 0.5;
  CHECK(json::parse(fwlab::rate_report_json(r).dump())["reference_slopes"].size() == 1);
  r.anchor_t = 0;
  CHECK(json::parse(fwlab::rate_report_json(r).dump())["reference_slopes"][0]["scale"].is_null());
}

TEST_CASE("manifest next to each output") {
  const fs::path dir = scratch_dir("manifest");
  fwlab::RunManifest m;
  m.command = "rates";
  m.config = {{"p", 3.0}};
  m.outputs = {(dir / "a.json").string(), (dir / "sub" / "b.csv").string()};
  fwlab::write_manifest(m);
  for (const auto& out : m.outputs) {
    const fs::path mp = fwlab::manifest_path_for(out);
    REQUIRE(fs::exists(mp));
    const json j = json::parse(slurp(mp));
    CHECK(j["command"] == "rates");
    CHECK(j["version"] == fwlab::kVersion);
    CHECK(j["config"]["p"].get<double>() == 3.0);
    CHECK(j["outputs"].size() == 2);
    CHECK(j["timestamp"].get<std::string>().size() == 20);
  }
  CHECK(fwlab::manifest_path_for("x/y.csv") == fs::path("x/y.csv.manifest.json"));
  CHECK_THROWS_AS(fwlab::write_manifest(fwlab::RunManifest{}), fwlab::Error);
  fs::remove_all(dir);
}

TEST_CASE("write_text_file creates directories") {
  const fs::path dir = scratch_dir("text");
  fwlab::write_text_file(dir / "deep" / "er" / "f.txt", "hello\n");
  CHECK(slurp(dir / "deep" / "er" / "f.txt") == "hello\n");
  fs::remove_all(dir);
}
