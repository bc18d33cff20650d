#include "eddy/march.hpp"

#include <cmath>
#include <ostream>

#include "eddy/errors.hpp"

namespace eddy {

std::vector<char> Discretization::conductor_mask() const {
  std::vector<char> mask(grid.patch_count());
  for (int s = 0; s < grid.patch_count(); ++s) mask[s] = grid.is_conductor(s) ? 1 : 0;
  return mask;
}

Discretization build_discretization(const DiscretizationConfig& config) {
  config.material.validate();
  if (config.degree < 1) throw InputError("degree must be at least 1");
  Discretization d;
  d.degree = config.degree;
  d.material = config.material;
  d.grid = build_patch_grid(config.material.domain, config.patches, config.material.region,
                            {config.divs, config.divs, config.divs});
  d.spaces = build_patch_spaces(d.grid, config.degree);
  d.classes = classify_dofs(d.grid, d.spaces);
  d.graph = build_control_graph(d.grid, d.spaces, d.classes);
  const int ns = d.grid.patch_count();
  d.stiffness.resize(ns);
  d.mass.resize(ns);
  for (int s = 0; s < ns; ++s) {
    d.stiffness[s] = assemble_stiffness(d.spaces[s], config.material.nu);
    if (d.grid.is_conductor(s)) d.mass[s] = assemble_mass(d.spaces[s], config.material.sigma);
  }
  d.tree = build_tree(d.graph, config.tree_order);
  d.partition = partition_dofs(d.tree, d.graph, d.classes, d.grid.regions);
  d.coupling = build_coupling(d.partition, d.graph);
  return d;
}

CaseFields manufactured_fields(const CaseConfig& config) {
  CaseFields f;
  f.a = exact_A;
  f.b = exact_B;
  f.dadt = [](const Point& x, double t) {
    Vec3 v = exact_E_C(x, t, Region::Conductor);
    for (double& c : v) c = -c;
    return v;
  };
  f.source = [config](Region r) { return source_sampler(r, config); };
  return f;
}

CaseFields zero_fields() {
  const FieldSampler zero = [](const Point&, double) { return Vec3{0.0, 0.0, 0.0}; };
  return {zero, zero, zero, [zero](Region) { return zero; }};
}

void ErrorAccumulator::add_step(const Discretization& disc, const CaseFields& fields,
                                const std::vector<Vector>& previous, const std::vector<Vector>& current, double t,
                                double dt) {
  const auto conductor = disc.conductor_mask();
  std::vector<Vector> quotient(current.size());
  for (std::size_t s = 0; s < current.size(); ++s) quotient[s] = (current[s] - previous[s]) / dt;
  const double e = l2_error(disc.spaces, quotient, fields.dadt, t, conductor);
  const double b = l2_error_curl(disc.spaces, current, fields.b, t);
  sum_e += dt * e * e;
  max_b = std::max(max_b, b * b);
  sum_b += dt * b * b;
}

double ErrorAccumulator::eps_e() const { return std::sqrt(sum_e); }
double ErrorAccumulator::eps_b() const { return std::sqrt(max_b + sum_b); }

const char* to_string(SolverMode mode) { return mode == SolverMode::Ieti ? "ieti" : "monolithic"; }

SolverMode parse_solver_mode(const std::string& text) {
  if (text == "ieti") return SolverMode::Ieti;
  if (text == "monolithic") return SolverMode::Monolithic;
  throw InputError("unknown solver mode '" + text + "'");
}

std::vector<Vector> initial_coefficients(const Discretization& disc, const CaseFields& fields, InitialValue kind) {
  if (kind == InitialValue::L2) return project_initial(disc.spaces, disc.graph, fields.a, 0.0);
  // nu curl curl A0 = J(0) - sigma dA/dt(0); the boundary term drops for test functions with zero trace
  const int ns = disc.grid.patch_count();
  const double sigma = disc.material.sigma;
  std::vector<Vector> rhs(ns), eliminated(ns);
  for (int s = 0; s < ns; ++s) {
    const FieldSampler source = fields.source(disc.grid.regions[s]);
    FieldSampler load = source;
    if (disc.grid.is_conductor(s))
      load = [&fields, source, sigma](const Point& x, double t) {
        const Vec3 j = source(x, t), a = fields.a(x, t), da = fields.dadt(x, t);
        return Vec3{j[0] + sigma * (a[0] - da[0]), j[1] + sigma * (a[1] - da[1]), j[2] + sigma * (a[2] - da[2])};
      };
    rhs[s] = assemble_load(disc.spaces[s], load, 0.0);
    eliminated[s] = dirichlet_values(disc.spaces[s], disc.grid.domain, fields.a, 0.0);
  }
  return monolithic_solve(disc.stiffness, disc.mass, disc.partition, disc.coupling, 1.0, rhs, eliminated).coefficients;
}

MarchResult march(const Discretization& disc, const CaseFields& fields, const MarchOptions& options,
                  const StepHook& hook) {
  if (options.steps < 1) throw InputError("at least one time step required");
  if (!(options.tol > 0.0)) throw InputError("tolerance must be positive");
  const int ns = disc.grid.patch_count();
  const double dt = disc.material.final_time / options.steps;

  std::vector<SparseMatrix> w(ns);
  for (int s = 0; s < ns; ++s) {
    w[s] = dt * disc.stiffness[s];
    if (disc.mass[s].rows() != 0) w[s] += disc.mass[s];
  }
  std::optional<StepSystem> system;
  if (options.mode == SolverMode::Ieti)
    system.emplace(disc.stiffness, disc.mass, disc.partition, disc.coupling, dt, options.workers);

  MarchResult result;
  MarchState& state = result.state;
  MarchDiagnostics& diag = result.diagnostics;
  diag.min_pivot = system ? system->min_pivot() : 0.0;
  state.coefficients = initial_coefficients(disc, fields, options.initial);
  std::vector<FieldSampler> sources(ns);
  for (int s = 0; s < ns; ++s) sources[s] = fields.source(disc.grid.regions[s]);

  std::vector<Vector> rhs(ns), eliminated(ns);
  for (int l = 0; l < options.steps; ++l) {
    const double t1 = (l + 1) * dt;
    for (int s = 0; s < ns; ++s) {
      rhs[s] = dt * assemble_load(disc.spaces[s], sources[s], t1);
      if (disc.mass[s].rows() != 0) rhs[s] += disc.mass[s] * state.coefficients[s];
      eliminated[s] = dirichlet_values(disc.spaces[s], disc.grid.domain, fields.a, t1);
    }
    SolveStats stats;
    std::vector<Vector> next;
    if (system) {
      try {
        StepSolution sol = system->solve_step(rhs, eliminated, options.tol, options.max_iter);
        next = std::move(sol.coefficients);
        stats = sol.stats;
      } catch (const ConvergenceError& e) {
        throw ConvergenceError("step " + std::to_string(l + 1) + ": " + e.what(), e.stats());
      }
    } else {
      MonolithicSolution sol =
          monolithic_solve(disc.stiffness, disc.mass, disc.partition, disc.coupling, dt, rhs, eliminated);
      next = std::move(sol.coefficients);
      stats.jump = sol.constraint_residual;
    }

    double norm_inf = 0.0;
    for (const auto& a : next) norm_inf = std::max(norm_inf, a.size() ? a.cwiseAbs().maxCoeff() : 0.0);
    const double jump = interface_jump(disc.coupling, next);
    diag.max_relative_jump = std::max(diag.max_relative_jump, norm_inf > 0.0 ? jump / norm_inf : jump);
    diag.max_euler_residual =
        std::max(diag.max_euler_residual, euler_residual(w, disc.partition, disc.graph, next, rhs));

    state.errors.add_step(disc, fields, state.coefficients, next, t1, dt);
    state.coefficients = std::move(next);
    state.step = l + 1;
    state.t = t1;
    state.iterations.push_back(stats.iterations);
    diag.total_iterations += stats.iterations;
    if (options.log)
      *options.log << "step " << state.step << '/' << options.steps << " t=" << t1 << " iter=" << stats.iterations
                   << " residual=" << stats.residual << '\n';
    if (hook) hook(state, stats);
  }
  diag.steps = options.steps;
  result.report.errBa = state.errors.eps_b();
  result.report.errEa = state.errors.eps_e();
  result.report.iter = static_cast<double>(diag.total_iterations) / options.steps;
  result.report.pri = disc.partition.primal_count();
  return result;
}

double loglog_slope(const std::vector<double>& errors, const std::vector<double>& params) {
  if (errors.size() != params.size()) throw InputError("errors and parameters differ in length");
  if (errors.size() < 2) throw InputError("at least two samples required");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(params[i] > 0.0)) throw InputError("log-log slope needs positive values");
    mx += std::log(params[i]) / n;
    my += std::log(errors[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double dx = std::log(params[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw InputError("parameters must not all be equal");
  return sxy / sxx;
}

double observed_order(const std::vector<double>& errors, const std::vector<double>& params) {
  return std::abs(loglog_slope(errors, params));
}

}  // namespace eddy
