#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "eddy/ieti.hpp"
#include "eddy/manufactured.hpp"

namespace eddy {

/// Everything that depends on the mesh but not on the time step.
struct Discretization {
  int degree = 1;
  PatchGrid grid;
  std::vector<CurlSpace> spaces;
  DofClass classes;
  ControlGraph graph;
  std::vector<SparseMatrix> stiffness;
  std::vector<SparseMatrix> mass;  ///< 0x0 on insulator patches
  SpanningTree tree;
  DofPartition partition;
  CouplingMatrices coupling;
  CaseConfig material;

  std::vector<char> conductor_mask() const;
};

struct DiscretizationConfig {
  int degree = 1;
  int divs = 2;
  std::array<int, 3> patches{2, 1, 1};
  TreeOrder tree_order = TreeOrder::Lexicographic;
  CaseConfig material{};
};

Discretization build_discretization(const DiscretizationConfig& config);

/// Data of one transient problem. `source(region)` gives J on patches of that region.
struct CaseFields {
  FieldSampler a;     ///< initial value and boundary trace
  FieldSampler b;     ///< exact curl A, for the error
  FieldSampler dadt;  ///< exact dA/dt = -E on the conductor, for the error
  std::function<FieldSampler(Region)> source;
};

CaseFields manufactured_fields(const CaseConfig& config);
CaseFields zero_fields();

/// eps_E^2 and eps_B^2 accumulated one step at a time.
struct ErrorAccumulator {
  double sum_e = 0.0;  ///< dt * sum ||E_C + (A_h(t_l) - A_h(t_l-1))/dt||^2 over the conductor
  double max_b = 0.0;  ///< max ||B - B_h||^2
  double sum_b = 0.0;  ///< dt * sum ||B - B_h||^2

  void add_step(const Discretization& disc, const CaseFields& fields, const std::vector<Vector>& previous,
                const std::vector<Vector>& current, double t, double dt);
  double eps_e() const;
  double eps_b() const;
};

struct ErrorReport {
  double errBa = 0.0;
  double errEa = 0.0;
  double iter = 0.0;  ///< mean PCG iterations per step
  int pri = 0;
};

struct MarchDiagnostics {
  int steps = 0;
  long total_iterations = 0;
  double max_euler_residual = 0.0;
  double max_relative_jump = 0.0;  ///< max over steps of jump / ||a||_inf
  double min_pivot = 0.0;
};

enum class SolverMode { Ieti, Monolithic };

/// Start value a^(0). `Energy` solves (sigma u, v)_C + (nu curl u, curl v) = (sigma A0, v)_C + (nu curl A0, curl v)
/// on the gauged space with the boundary trace of A0; `L2` is the global L2 projection.
enum class InitialValue { Energy, L2 };

std::vector<Vector> initial_coefficients(const Discretization& disc, const CaseFields& fields, InitialValue kind);

const char* to_string(SolverMode mode);
SolverMode parse_solver_mode(const std::string& text);

struct MarchOptions {
  int steps = 1;
  double tol = 1e-6;
  int max_iter = 500;
  SolverMode mode = SolverMode::Ieti;
  int workers = 1;
  InitialValue initial = InitialValue::Energy;
  std::ostream* log = nullptr;  ///< one progress line per step when set
};

struct MarchState {
  int step = 0;
  double t = 0.0;
  std::vector<Vector> coefficients;
  ErrorAccumulator errors;
  std::vector<int> iterations;
};

using StepHook = std::function<void(const MarchState&, const SolveStats&)>;

struct MarchResult {
  ErrorReport report;
  MarchDiagnostics diagnostics;
  MarchState state;
};

/// Implicit Euler over (0, T] with n_t = options.steps.
/// A ConvergenceError from a step is rethrown with the step number added.
MarchResult march(const Discretization& disc, const CaseFields& fields, const MarchOptions& options,
                  const StepHook& hook = {});

/// Signed least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& y, const std::vector<double>& x);

/// |least-squares slope| of log(errors) against log(params).
double observed_order(const std::vector<double>& errors, const std::vector<double>& params);

}  // namespace eddy
