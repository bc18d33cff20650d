#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eddy/errors.hpp"
#include "eddy/experiment.hpp"
#include "eddy/march.hpp"

namespace py = pybind11;
using namespace eddy;

namespace {

Discretization make_discretization(int degree, int divs, std::array<int, 3> patches, const std::string& tree_order,
                                   const std::string& region) {
  DiscretizationConfig c;
  c.degree = degree;
  c.divs = divs;
  c.patches = patches;
  c.tree_order = parse_tree_order(tree_order);
  if (region == "conductor")
    c.material.region = [](const Box&) { return Region::Conductor; };
  else if (region == "insulator")
    c.material.region = [](const Box&) { return Region::Insulator; };
  else if (region != "default")
    throw InputError("region must be default, conductor or insulator");
  return build_discretization(c);
}

// rhs and eliminated values of the first step of the manufactured case
py::tuple first_step(const Discretization& d, double dt) {
  const auto fields = manufactured_fields(d.material);
  const auto a0 = initial_coefficients(d, fields, InitialValue::Energy);
  std::vector<Vector> rhs, elim;
  for (std::size_t s = 0; s < d.spaces.size(); ++s) {
    Vector f = dt * assemble_load(d.spaces[s], fields.source(d.grid.regions[s]), dt);
    if (d.mass[s].rows()) f += d.mass[s] * a0[s];
    rhs.push_back(f);
    elim.push_back(dirichlet_values(d.spaces[s], d.grid.domain, fields.a, dt));
  }
  return py::make_tuple(rhs, elim);
}

py::dict march_py(const Discretization& d, int steps, double tol, int max_iter, const std::string& mode, int workers,
                  bool zero) {
  MarchOptions opt;
  opt.steps = steps;
  opt.tol = tol;
  opt.max_iter = max_iter;
  opt.mode = parse_solver_mode(mode);
  opt.workers = workers;
  MarchResult r;
  {
    py::gil_scoped_release release;
    r = march(d, zero ? zero_fields() : manufactured_fields(d.material), opt);
  }
  py::dict out;
  out["errBa"] = r.report.errBa;
  out["errEa"] = r.report.errEa;
  out["iter"] = r.report.iter;
  out["pri"] = r.report.pri;
  out["iterations"] = r.state.iterations;
  out["coefficients"] = r.state.coefficients;
  out["max_euler_residual"] = r.diagnostics.max_euler_residual;
  out["max_relative_jump"] = r.diagnostics.max_relative_jump;
  out["min_pivot"] = r.diagnostics.min_pivot;
  return out;
}

py::dict record_dict(const ExperimentRecord& r) {
  py::dict d;
  d["deg"] = r.deg;
  d["divs"] = r.divs;
  d["steps"] = r.steps;
  d["errBa"] = r.errBa;
  d["errEa"] = r.errEa;
  d["iter"] = r.iter;
  d["pri"] = r.pri;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tree-cotree gauged IETI-DP eddy current solver";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<NonsingularityError>(m, "NonsingularityError", PyExc_ArithmeticError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<SolveStats>(m, "SolveStats")
      .def_readonly("iterations", &SolveStats::iterations)
      .def_readonly("residual", &SolveStats::residual)
      .def_readonly("recovery_residual", &SolveStats::recovery_residual)
      .def_readonly("jump", &SolveStats::jump);

  py::class_<Discretization>(m, "Discretization")
      .def(py::init(&make_discretization), py::arg("degree") = 1, py::arg("divs") = 2,
           py::arg("patches") = std::array<int, 3>{2, 1, 1}, py::arg("tree_order") = "lex",
           py::arg("region") = "default")
      .def_readonly("degree", &Discretization::degree)
      .def_property_readonly("subdomains", [](const Discretization& d) { return d.spaces.size(); })
      .def_property_readonly("primal_count", [](const Discretization& d) { return d.partition.primal_count(); })
      .def_property_readonly("dual_count", [](const Discretization& d) { return d.coupling.dual_count(); })
      .def_property_readonly("stiffness", [](const Discretization& d) { return d.stiffness; })
      .def_property_readonly("mass", [](const Discretization& d) { return d.mass; })
      .def("gradient",
           [](const Discretization& d, int s) {
             return discrete_gradient(d.spaces.at(s), d.spaces.at(s).scalar_dims());
           })
      .def("counts",
           [](const Discretization& d) {
             const auto rep = gauge_fixed_dimension_report(d.partition, d.coupling);
             py::list out;
             for (const auto& c : rep.subdomains) {
               py::dict e;
               e["total"] = c.total;
               e["eliminated"] = c.eliminated;
               e["primal"] = c.primal;
               e["remaining"] = c.remaining;
               out.append(e);
             }
             return out;
           })
      .def("first_step", &first_step, py::arg("dt"))
      .def("interface_jump",
           [](const Discretization& d, const std::vector<Vector>& a) { return interface_jump(d.coupling, a); });

  py::class_<StepSolution>(m, "StepSolution")
      .def_readonly("coefficients", &StepSolution::coefficients)
      .def_readonly("primal", &StepSolution::primal)
      .def_readonly("multipliers", &StepSolution::multipliers)
      .def_readonly("stats", &StepSolution::stats);

  py::class_<StepSystem>(m, "StepSystem")
      .def(py::init([](const Discretization& d, double dt, int workers) {
             return StepSystem(d.stiffness, d.mass, d.partition, d.coupling, dt, workers);
           }),
           py::arg("disc"), py::arg("dt"), py::arg("workers") = 1, py::keep_alive<1, 2>())
      .def_property_readonly("dual_size", &StepSystem::dual_size)
      .def_property_readonly("primal_size", &StepSystem::primal_size)
      .def_property_readonly("min_pivot", &StepSystem::min_pivot)
      .def("solve_step", &StepSystem::solve_step, py::arg("rhs"), py::arg("eliminated"), py::arg("tol") = 1e-6,
           py::arg("max_iter") = 500, py::arg("precondition") = true, py::call_guard<py::gil_scoped_release>());

  m.def(
      "monolithic_solve",
      [](const Discretization& d, double dt, const std::vector<Vector>& rhs, const std::vector<Vector>& elim) {
        return monolithic_solve(d.stiffness, d.mass, d.partition, d.coupling, dt, rhs, elim).coefficients;
      },
      py::arg("disc"), py::arg("dt"), py::arg("rhs"), py::arg("eliminated"));

  m.def("march", &march_py, py::arg("disc"), py::arg("steps") = 1, py::arg("tol") = 1e-6, py::arg("max_iter") = 500,
        py::arg("mode") = "ieti", py::arg("workers") = 1, py::arg("zero_data") = false);

  m.def("observed_order", &observed_order, py::arg("errors"), py::arg("params"));

  m.def(
      "run_sweep",
      [](const std::vector<int>& deg, const std::vector<int>& divs, const std::vector<int>& steps, double tol,
         const std::string& mode, int workers) {
        ExperimentConfig c;
        c.degrees = deg;
        c.divs = divs;
        c.steps = steps;
        c.tol = tol;
        c.mode = parse_solver_mode(mode);
        c.workers = workers;
        std::vector<ExperimentRecord> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(c);
        }
        py::list out;
        for (const auto& r : rows) out.append(record_dict(r));
        return out;
      },
      py::arg("deg"), py::arg("divs"), py::arg("steps"), py::arg("tol") = 1e-6, py::arg("mode") = "ieti",
      py::arg("workers") = 1);

  m.def(
      "format_csv",
      [](const std::vector<py::dict>& rows) {
        std::vector<ExperimentRecord> recs;
        for (const auto& d : rows)
          recs.push_back({d["deg"].cast<int>(), d["divs"].cast<int>(), d["steps"].cast<int>(),
                          d["errBa"].cast<double>(), d["errEa"].cast<double>(), d["iter"].cast<double>(),
                          d["pri"].cast<int>()});
        return format_csv(recs);
      },
      py::arg("rows"));
  m.def(
      "parse_csv",
      [](const std::string& text) {
        py::list out;
        for (const auto& r : parse_csv(text)) out.append(record_dict(r));
        return out;
      },
      py::arg("text"));
  m.def(
      "parse_config",
      [](const std::vector<std::string>& args) {
        const auto c = parse_config(args);
        py::dict d;
        d["deg"] = c.degrees;
        d["divs"] = c.divs;
        d["steps"] = c.steps;
        d["patches"] = c.patches;
        d["tol"] = c.tol;
        d["max_iter"] = c.max_iter;
        d["mode"] = std::string(to_string(c.mode));
        d["tree_order"] = std::string(to_string(c.tree_order));
        return d;
      },
      py::arg("args"));
}
