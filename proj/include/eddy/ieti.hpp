#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "eddy/gauge.hpp"

namespace eddy {

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;           ///< final relative preconditioned residual of PCG
  double recovery_residual = 0.0;  ///< relative residual of the momentum rows of the block system
  double jump = 0.0;               ///< max |B_rr a_r|, the constraint residual
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, SolveStats stats) : std::runtime_error(what), stats_(stats) {}
  const SolveStats& stats() const { return stats_; }

 private:
  SolveStats stats_;
};

using LinearOperator = std::function<Vector(const Vector&)>;

struct PcgResult {
  Vector solution;
  SolveStats stats;
};

/// Preconditioned CG; stops when sqrt(r.z / r0.z0) <= tol.
/// Throws ConvergenceError after max_iter iterations.
PcgResult pcg(const LinearOperator& op, const LinearOperator& preconditioner, const Vector& rhs, double tol,
              int max_iter);

/// Number of sparse or dense factorizations performed by StepSystem objects.
long factorization_counter();

struct StepSolution {
  std::vector<Vector> coefficients;  ///< full local coefficient vector per subdomain
  Vector primal;                     ///< p
  Vector multipliers;                ///< m_r
  SolveStats stats;
};

/// Per-step dual-primal system for W = M + dt K.
///
/// Local blocks of W_rr are factorized once; the primal level is the dense
/// Schur complement S_pp = sum_s N_s^T (W_pp - W_pr W_rr^{-1} W_rp) N_s.
class StepSystem {
 public:
  /// `mass[s]` may be an empty (0x0) matrix for insulator subdomains.
  StepSystem(const std::vector<SparseMatrix>& stiffness, const std::vector<SparseMatrix>& mass,
             const DofPartition& partition, const CouplingMatrices& coupling, double dt, int workers = 1);
  ~StepSystem();
  StepSystem(StepSystem&&) noexcept;
  StepSystem& operator=(StepSystem&&) noexcept;

  double dt() const;
  int subdomain_count() const;
  int dual_size() const;
  int primal_size() const;
  const SparseMatrix& w(int s) const;
  const SparseMatrix& w_rr(int s) const;
  const Eigen::MatrixXd& coarse() const;
  /// Smallest LDLT pivot over all W_rr factorizations.
  double min_pivot() const;

  /// Block solve of [W_rr, W_rp N; N^T W_pr, N^T W_pp N] (x_r, p) = (rhs_r, rhs_p).
  void apply_wtilde_inverse(const std::vector<Vector>& rhs_r, const Vector& rhs_p, std::vector<Vector>& x_r,
                            Vector& p) const;
  /// F m = dt^2 B_rr x_r, (x_r, .) = Wtilde^{-1}(B_rr^T m, 0).
  Vector dual_apply(const Vector& m) const;
  /// Unscaled Dirichlet preconditioner: sum_s B_s S_s B_s^T r with the local
  /// Schur complement onto the coupled remaining DOFs.
  Vector dirichlet_preconditioner(const Vector& r) const;

  /// One implicit Euler step. `rhs[s]` is the full local f^(l+1); the
  /// eliminated entries of `eliminated[s]` carry a_e (other entries ignored).
  StepSolution solve_step(const std::vector<Vector>& rhs, const std::vector<Vector>& eliminated, double tol,
                          int max_iter, bool precondition = true) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct MonolithicSolution {
  std::vector<Vector> coefficients;
  Vector multipliers;  ///< one per interface constraint (dual rows, then primal rows)
  double constraint_residual = 0.0;
  Eigen::SparseMatrix<double> matrix;  ///< saddle matrix, kept for inspection
};

/// Direct sparse LU of the full saddle system [W, dt B^T; dt B, 0] with the
/// same eliminated DOFs as the dual-primal path and every interface coupling
/// (primal ones included) kept as a multiplier.
MonolithicSolution monolithic_solve(const std::vector<SparseMatrix>& stiffness, const std::vector<SparseMatrix>& mass,
                                    const DofPartition& partition, const CouplingMatrices& coupling, double dt,
                                    const std::vector<Vector>& rhs, const std::vector<Vector>& eliminated);

/// Relative residual of the subdomain-assembled Euler system for full local
/// coefficient vectors: the interface rows are summed over coincident DOFs,
/// eliminated rows are skipped.
double euler_residual(const std::vector<SparseMatrix>& w, const DofPartition& partition, const ControlGraph& graph,
                      const std::vector<Vector>& coefficients, const std::vector<Vector>& rhs);

/// max over coupled pairs of |a_plus - a_minus| for every interface constraint.
double interface_jump(const CouplingMatrices& coupling, const std::vector<Vector>& coefficients);

}  // namespace eddy
