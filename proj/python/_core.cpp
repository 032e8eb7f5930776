#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fwlab/experiments.hpp"
#include "fwlab/io.hpp"

namespace py = pybind11;

namespace {

py::dict trajectory_dict(const fwlab::Trajectory<double>& tr) {
  const auto n = static_cast<py::ssize_t>(tr.records.size());
  const std::vector<py::ssize_t> shape{n};
  py::array_t<std::int64_t> t(shape);
  py::array_t<double> x({n, static_cast<py::ssize_t>(tr.final_x.size())});
  py::array_t<double> gamma(shape), h(shape), u(shape), w(shape), y(shape), s(shape);
  auto tv = t.mutable_unchecked<1>();
  auto xv = x.mutable_unchecked<2>();
  auto gv = gamma.mutable_unchecked<1>();
  auto hv = h.mutable_unchecked<1>();
  auto uv = u.mutable_unchecked<1>();
  auto wv = w.mutable_unchecked<1>();
  auto yv = y.mutable_unchecked<1>();
  auto sv = s.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < n; ++i) {
    const auto& r = tr.records[static_cast<std::size_t>(i)];
    tv(i) = r.t;
    for (std::size_t j = 0; j < r.x.size(); ++j) xv(i, static_cast<py::ssize_t>(j)) = r.x[j];
    gv(i) = r.gamma;
    hv(i) = r.h;
    uv(i) = r.u;
    wv(i) = r.w;
    yv(i) = r.y;
    sv(i) = r.s;
  }
  py::dict d;
  d["t"] = t;
  d["x"] = x;
  d["gamma"] = gamma;
  d["h"] = h;
  d["u"] = u;
  d["w"] = w;
  d["y"] = y;
  d["s"] = s;
  d["termination"] = fwlab::to_string(tr.termination);
  d["iterations"] = tr.iterations;
  d["final_gap"] = tr.final_h;
  d["monotonicity_violations"] = tr.monotonicity_violations;
  d["axis_events"] = tr.axis_events;
  return d;
}

fwlab::Objective<double> make_objective(std::optional<double> theta, double mu) {
  return theta ? fwlab::Objective<double>::HebPower(mu, *theta) : fwlab::Objective<double>::Quadratic();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Frank-Wolfe on l_p balls: solver, slow-curve dynamics and experiments.";
  m.attr("__version__") = fwlab::kVersion;

  auto base = py::register_exception<fwlab::Error>(m, "FwlabError", PyExc_RuntimeError);
  py::register_exception<fwlab::DomainError>(m, "DomainError", base.ptr());
  py::register_exception<fwlab::InfeasibleStartError>(m, "InfeasibleStartError", base.ptr());
  py::register_exception<fwlab::UnsupportedObjectiveError>(m, "UnsupportedObjectiveError", base.ptr());
  py::register_exception<fwlab::UnsupportedExponentError>(m, "UnsupportedExponentError", base.ptr());
  py::register_exception<fwlab::InsufficientDataError>(m, "InsufficientDataError", base.ptr());

  m.def("lp_norm", [](const std::vector<double>& x, double p) { return fwlab::lp_norm<double>(x, p); },
        py::arg("x"), py::arg("p"));
  m.def("lmo", [](const std::vector<double>& g, double p) { return fwlab::lmo<double>(g, fwlab::BallSpec<double>(p)); },
        py::arg("g"), py::arg("p"), "Minimiser of <g, v> over the unit l_p ball.");

  m.def("slow_constants",
        [](double p, bool force) { return py::module_::import("json").attr("loads")(
                                       fwlab::constants_json(fwlab::slow_constants(p, force)).dump()); },
        py::arg("p"), py::arg("force") = false);
  m.def("slow_start", &fwlab::slow_start<double>, py::arg("u0"), py::arg("p"));
  m.def("phi", &fwlab::phi<double>, py::arg("u"), py::arg("y"), py::arg("p"));
  m.def("phi_dy", py::overload_cast<const double&, const double&, const double&>(&fwlab::phi_dy<double>),
        py::arg("u"), py::arg("y"), py::arg("p"));
  m.def("one_step_uw",
        [](double u, double w, double p) {
          const auto n = fwlab::one_step_uw<double>({u, w}, p);
          return py::make_tuple(n.u, n.w);
        },
        py::arg("u"), py::arg("w"), py::arg("p"));
  m.def("fixed_point_y",
        [](double u, double p, double tol) {
          const auto pt = fwlab::fixed_point_y<double>(u, p, tol);
          return py::make_tuple(pt.y_star, pt.residual);
        },
        py::arg("u"), py::arg("p"), py::arg("tol") = 1e-12, "Returns (y_star, residual).");
  m.def("slow_curve",
        [](double p, double u_min, double u_max, std::size_t points, double tol) {
          py::list out;
          for (const auto& pt : fwlab::slow_curve(p, u_min, u_max, points, tol)) {
            out.append(py::make_tuple(pt.u, pt.y_star, pt.residual));
          }
          return out;
        },
        py::arg("p"), py::arg("u_min"), py::arg("u_max"), py::arg("points"), py::arg("tol") = 1e-12);

  m.def("solve",
        [](double p, const std::vector<double>& x0, std::int64_t iters, double tol, const std::string& rule,
           std::optional<double> theta, double mu, std::int64_t record_every) {
          if (rule != "exact" && rule != "short") throw fwlab::DomainError("rule must be 'exact' or 'short'");
          fwlab::SolverConfig cfg;
          cfg.rule = rule == "exact" ? fwlab::StepRule::kExactLineSearch : fwlab::StepRule::kShortStep;
          cfg.max_iters = iters;
          cfg.gap_tol = tol;
          cfg.record_every = record_every;
          py::gil_scoped_release release;
          auto tr = fwlab::run<double>(fwlab::BallSpec<double>(p), make_objective(theta, mu), x0, cfg);
          py::gil_scoped_acquire acquire;
          return trajectory_dict(tr);
        },
        py::arg("p"), py::arg("x0"), py::arg("iters") = 1000, py::arg("tol") = 0.0, py::arg("rule") = "exact",
        py::arg("theta") = py::none(), py::arg("mu") = 1.0, py::arg("record_every") = 1);

  m.def("fit_rate",
        [](const std::vector<std::int64_t>& t, const std::vector<double>& values, double window) {
          if (t.size() != values.size()) throw fwlab::DomainError("t and values differ in length");
          fwlab::Series s;
          for (std::size_t i = 0; i < t.size(); ++i) s.emplace_back(t[i], values[i]);
          const auto f = fwlab::fit_rate(s, window);
          py::dict d;
          d["slope"] = f.slope;
          d["intercept"] = f.intercept;
          d["t_lo"] = f.t_lo;
          d["t_hi"] = f.t_hi;
          d["r_squared"] = f.r_squared;
          d["points"] = f.points;
          return d;
        },
        py::arg("t"), py::arg("values"), py::arg("window") = fwlab::kDefaultWindowFraction);

  m.def("iterations_to_target",
        [](double p, const std::vector<double>& x0, double target, std::int64_t cap) {
          return fwlab::iterations_to_target(p, x0, target, cap);
        },
        py::arg("p"), py::arg("x0"), py::arg("target"), py::arg("cap"));
  m.def("heatmap",
        [](double p, int grid, double target, std::int64_t cap, unsigned jobs) {
          fwlab::HeatmapConfig cfg{p, grid, target, cap, jobs};
          std::vector<fwlab::HeatmapCell> cells;
          {
            py::gil_scoped_release release;
            cells = fwlab::heatmap(cfg);
          }
          py::array_t<double> out({static_cast<py::ssize_t>(cells.size()), py::ssize_t{3}});
          auto v = out.mutable_unchecked<2>();
          for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto k = static_cast<py::ssize_t>(i);
            v(k, 0) = cells[i].x1;
            v(k, 1) = cells[i].x2;
            v(k, 2) = static_cast<double>(cells[i].iters);
          }
          return out;
        },
        py::arg("p") = 3.0, py::arg("grid") = 200, py::arg("target") = 1e-4, py::arg("cap") = 1'000'000,
        py::arg("jobs") = 1u, "Rows (x1, x2, iters); capped cells carry -1.");
  m.def("coincidence_check",
        [](double p, double theta, double mu, const std::vector<double>& x0, std::int64_t T, bool golden) {
          return fwlab::coincidence_check(p, theta, mu, x0, T, golden);
        },
        py::arg("p"), py::arg("theta"), py::arg("mu"), py::arg("x0"), py::arg("T"), py::arg("golden") = false);
  m.def("confinement_check",
        [](const std::vector<double>& x0, double p, std::int64_t T) { return fwlab::confinement_check(x0, p, T); },
        py::arg("x0"), py::arg("p"), py::arg("T"));
}
