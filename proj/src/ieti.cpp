#include "eddy/ieti.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <thread>

#include "eddy/errors.hpp"

namespace eddy {

namespace {

std::atomic<long> g_factorizations{0};

using LocalSolver = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>>;

SparseMatrix extract(const SparseMatrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> col_pos(a.cols(), -1), row_pos(a.rows(), -1);
  for (std::size_t j = 0; j < cols.size(); ++j) col_pos[cols[j]] = static_cast<int>(j);
  for (std::size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      const int r = row_pos[it.row()], c = col_pos[it.col()];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  SparseMatrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

Vector gather(const Vector& v, const std::vector<int>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = v[idx[k]];
  return out;
}

double factorize(LocalSolver& solver, const SparseMatrix& a, const char* what) {
  ++g_factorizations;
  if (a.rows() == 0) return std::numeric_limits<double>::infinity();
  solver.compute(a);
  if (solver.info() != Eigen::Success) throw NonsingularityError(std::string(what) + " factorization failed");
  const double pivot = solver.vectorD().minCoeff();
  // a singular PSD block shows up as a roundoff-sized pivot rather than an exact zero
  if (!(pivot > 1e-12 * solver.vectorD().cwiseAbs().maxCoeff()))
    throw NonsingularityError(std::string(what) + " is singular or indefinite (pivot " + std::to_string(pivot) + ")");
  return pivot;
}

/// Runs body(s) for s in [0, n) on up to `workers` threads; each s is handled by one thread.
template <class F>
void for_subdomains(int n, int workers, F&& body) {
  if (workers <= 1 || n <= 1) {
    for (int s = 0; s < n; ++s) body(s);
    return;
  }
  const int nt = std::min(workers, n);
  std::vector<std::jthread> threads;
  threads.reserve(nt);
  for (int t = 0; t < nt; ++t)
    threads.emplace_back([&, t] {
      for (int s = t; s < n; s += nt) body(s);
    });
}

}  // namespace

long factorization_counter() { return g_factorizations.load(); }

PcgResult pcg(const LinearOperator& op, const LinearOperator& preconditioner, const Vector& rhs, double tol,
              int max_iter) {
  PcgResult res;
  res.solution = Vector::Zero(rhs.size());
  if (rhs.size() == 0 || rhs.squaredNorm() == 0.0) return res;
  Vector r = rhs;
  Vector z = preconditioner(r);
  double rz = r.dot(z);
  const double rz0 = rz;
  if (!(rz0 > 0.0)) throw ConvergenceError("preconditioner is not positive definite", res.stats);
  Vector d = z;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector q = op(d);
    const double dq = d.dot(q);
    if (!(dq > 0.0)) {
      res.stats.iterations = it;
      throw ConvergenceError("operator is not positive definite on the search direction", res.stats);
    }
    const double alpha = rz / dq;
    res.solution += alpha * d;
    r -= alpha * q;
    z = preconditioner(r);
    const double rz_new = r.dot(z);
    res.stats.iterations = it;
    res.stats.residual = std::sqrt(std::abs(rz_new) / rz0);
    if (res.stats.residual <= tol) return res;
    d = z + (rz_new / rz) * d;
    rz = rz_new;
  }
  throw ConvergenceError("PCG did not converge in " + std::to_string(max_iter) + " iterations", res.stats);
}

struct StepSystem::Impl {
  double dt = 0.0;
  int workers = 1;
  const DofPartition* partition = nullptr;
  CouplingMatrices coupling;
  int pri = 0;

  struct Local {
    SparseMatrix w, w_rr, w_rp, w_pp, w_re, w_pe;
    LocalSolver rr;
    double pivot = 0.0;
    Eigen::MatrixXd phi;  // W_rr^{-1} W_rp
    SparseMatrix n;
    SparseMatrix b;       // B_rr restricted to this subdomain
    // Dirichlet preconditioner
    std::vector<int> bdry, inner;  // positions inside R
    SparseMatrix b_b;              // B restricted to bdry columns
    SparseMatrix w_bb, w_bi;
    LocalSolver ii;
  };
  std::vector<std::unique_ptr<Local>> locals;
  Eigen::MatrixXd coarse;
  Eigen::LLT<Eigen::MatrixXd> coarse_llt;
};

StepSystem::StepSystem(const std::vector<SparseMatrix>& stiffness, const std::vector<SparseMatrix>& mass,
                       const DofPartition& partition, const CouplingMatrices& coupling, double dt, int workers)
    : impl_(std::make_unique<Impl>()) {
  if (!(dt > 0.0)) throw InputError("time step must be positive");
  const int ns = partition.subdomain_count();
  if (static_cast<int>(stiffness.size()) != ns || static_cast<int>(mass.size()) != ns)
    throw InputError("one stiffness and one mass matrix per subdomain required");
  auto& im = *impl_;
  im.dt = dt;
  im.workers = std::max(1, workers);
  im.partition = &partition;
  im.coupling = coupling;
  im.pri = partition.primal_count();
  im.locals.resize(ns);
  for (auto& l : im.locals) l = std::make_unique<Impl::Local>();

  for_subdomains(ns, im.workers, [&](int s) {
    auto& L = *im.locals[s];
    const auto& sp = partition.subdomains[s];
    L.w = dt * stiffness[s];
    if (mass[s].rows() != 0) L.w += mass[s];
    L.w.makeCompressed();
    L.w_rr = extract(L.w, sp.remaining, sp.remaining);
    L.w_rp = extract(L.w, sp.remaining, sp.primal);
    L.w_pp = extract(L.w, sp.primal, sp.primal);
    L.w_re = extract(L.w, sp.remaining, sp.eliminated);
    L.w_pe = extract(L.w, sp.primal, sp.eliminated);
    L.pivot = factorize(L.rr, L.w_rr, ("W_rr of subdomain " + std::to_string(s)).c_str());
    L.phi = Eigen::MatrixXd(L.w_rp);
    if (L.w_rr.rows() > 0 && L.phi.cols() > 0) L.phi = L.rr.solve(L.phi);
    L.n = coupling.n[s];
    L.b = coupling.b_rr[s];

    std::vector<char> coupled(sp.remaining.size(), 0);
    for (int k = 0; k < L.b.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(L.b, k); it; ++it) coupled[it.col()] = 1;
    for (int k = 0; k < static_cast<int>(coupled.size()); ++k) (coupled[k] ? L.bdry : L.inner).push_back(k);
    std::vector<int> all_rows(L.b.rows());
    for (int r = 0; r < L.b.rows(); ++r) all_rows[r] = r;
    L.b_b = extract(L.b, all_rows, L.bdry);
    L.w_bb = extract(L.w_rr, L.bdry, L.bdry);
    L.w_bi = extract(L.w_rr, L.bdry, L.inner);
    factorize(L.ii, extract(L.w_rr, L.inner, L.inner), ("W_ii of subdomain " + std::to_string(s)).c_str());
  });

  im.coarse = Eigen::MatrixXd::Zero(im.pri, im.pri);
  for (int s = 0; s < ns; ++s) {
    auto& L = *im.locals[s];
    if (L.n.rows() == 0) continue;
    const Eigen::MatrixXd local = Eigen::MatrixXd(L.w_pp) - Eigen::MatrixXd(L.w_rp.transpose()) * L.phi;
    const Eigen::MatrixXd nd(L.n);
    im.coarse += nd.transpose() * local * nd;
  }
  if (im.pri > 0) {
    ++g_factorizations;
    im.coarse_llt.compute(im.coarse);
    if (im.coarse_llt.info() != Eigen::Success) throw NonsingularityError("coarse primal matrix is not SPD");
  }
}

StepSystem::~StepSystem() = default;
StepSystem::StepSystem(StepSystem&&) noexcept = default;
StepSystem& StepSystem::operator=(StepSystem&&) noexcept = default;

double StepSystem::dt() const { return impl_->dt; }
int StepSystem::subdomain_count() const { return static_cast<int>(impl_->locals.size()); }
int StepSystem::dual_size() const { return impl_->coupling.dual_count(); }
int StepSystem::primal_size() const { return impl_->pri; }
const SparseMatrix& StepSystem::w(int s) const { return impl_->locals.at(s)->w; }
const SparseMatrix& StepSystem::w_rr(int s) const { return impl_->locals.at(s)->w_rr; }
const Eigen::MatrixXd& StepSystem::coarse() const { return impl_->coarse; }

double StepSystem::min_pivot() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& L : impl_->locals) m = std::min(m, L->pivot);
  return m;
}

void StepSystem::apply_wtilde_inverse(const std::vector<Vector>& rhs_r, const Vector& rhs_p, std::vector<Vector>& x_r,
                                      Vector& p) const {
  const auto& im = *impl_;
  const int ns = subdomain_count();
  x_r.resize(ns);
  std::vector<Vector> coarse_part(ns);
  for_subdomains(ns, im.workers, [&](int s) {
    const auto& L = *im.locals[s];
    x_r[s] = L.w_rr.rows() > 0 ? Vector(L.rr.solve(rhs_r[s])) : Vector();
    coarse_part[s] = L.n.transpose() * (L.w_rp.transpose() * x_r[s]);
  });
  Vector g = rhs_p.size() == im.pri ? rhs_p : Vector::Zero(im.pri);
  for (int s = 0; s < ns; ++s) g -= coarse_part[s];  // fixed order
  p = im.pri > 0 ? Vector(im.coarse_llt.solve(g)) : Vector();
  if (im.pri == 0) return;
  for_subdomains(ns, im.workers, [&](int s) {
    const auto& L = *im.locals[s];
    if (L.n.rows() > 0) x_r[s] -= L.phi * (L.n * p);
  });
}

Vector StepSystem::dual_apply(const Vector& m) const {
  const auto& im = *impl_;
  const int ns = subdomain_count();
  std::vector<Vector> rhs(ns), x;
  for (int s = 0; s < ns; ++s) rhs[s] = im.locals[s]->b.transpose() * m;
  Vector p;
  apply_wtilde_inverse(rhs, Vector::Zero(im.pri), x, p);
  Vector out = Vector::Zero(dual_size());
  for (int s = 0; s < ns; ++s) out += im.locals[s]->b * x[s];
  return (im.dt * im.dt) * out;
}

Vector StepSystem::dirichlet_preconditioner(const Vector& r) const {
  const auto& im = *impl_;
  const int ns = subdomain_count();
  std::vector<Vector> parts(ns);
  for_subdomains(ns, im.workers, [&](int s) {
    const auto& L = *im.locals[s];
    const Vector rb = L.b_b.transpose() * r;
    Vector sb = L.w_bb * rb;
    if (!L.inner.empty()) {
      const Vector wi = L.w_bi.transpose() * rb;
      sb -= L.w_bi * Vector(L.ii.solve(wi));
    }
    parts[s] = L.b_b * sb;
  });
  Vector out = Vector::Zero(dual_size());
  for (int s = 0; s < ns; ++s) out += parts[s];
  return out;
}

StepSolution StepSystem::solve_step(const std::vector<Vector>& rhs, const std::vector<Vector>& eliminated, double tol,
                                    int max_iter, bool precondition) const {
  const auto& im = *impl_;
  const auto& part = *im.partition;
  const int ns = subdomain_count();
  std::vector<Vector> f_r(ns), a_e(ns);
  Vector f_p = Vector::Zero(im.pri);
  for (int s = 0; s < ns; ++s) {
    const auto& sp = part.subdomains[s];
    const auto& L = *im.locals[s];
    a_e[s] = gather(eliminated[s], sp.eliminated);
    f_r[s] = gather(rhs[s], sp.remaining) - L.w_re * a_e[s];
    if (L.n.rows() > 0) f_p += L.n.transpose() * (gather(rhs[s], sp.primal) - L.w_pe * a_e[s]);
  }

  std::vector<Vector> y;
  Vector yp;
  apply_wtilde_inverse(f_r, f_p, y, yp);
  Vector d = Vector::Zero(dual_size());
  for (int s = 0; s < ns; ++s) d += im.locals[s]->b * y[s];
  d *= im.dt;

  const LinearOperator op = [this](const Vector& v) { return dual_apply(v); };
  const LinearOperator pre = precondition ? LinearOperator([this](const Vector& v) { return dirichlet_preconditioner(v); })
                                          : LinearOperator([](const Vector& v) { return v; });
  PcgResult dual = pcg(op, pre, d, tol, max_iter);

  std::vector<Vector> rhs_r(ns), a_r;
  for (int s = 0; s < ns; ++s) rhs_r[s] = f_r[s] - im.dt * (im.locals[s]->b.transpose() * dual.solution);
  Vector p;
  apply_wtilde_inverse(rhs_r, f_p, a_r, p);

  StepSolution out;
  out.stats = dual.stats;
  out.multipliers = std::move(dual.solution);
  out.primal = p;
  out.coefficients.resize(ns);
  double res2 = 0.0, ref2 = 0.0, jump = 0.0;
  Vector res_p = Vector::Zero(im.pri);
  Vector bar = Vector::Zero(dual_size());
  for (int s = 0; s < ns; ++s) {
    const auto& sp = part.subdomains[s];
    const auto& L = *im.locals[s];
    Vector& a = out.coefficients[s];
    a = Vector::Zero(sp.size());
    const Vector a_p = L.n * p;
    for (std::size_t k = 0; k < sp.eliminated.size(); ++k) a[sp.eliminated[k]] = a_e[s][k];
    for (std::size_t k = 0; k < sp.primal.size(); ++k) a[sp.primal[k]] = a_p[k];
    for (std::size_t k = 0; k < sp.remaining.size(); ++k) a[sp.remaining[k]] = a_r[s][k];
    const Vector rr = L.w_rr * a_r[s] + L.w_rp * a_p + im.dt * (L.b.transpose() * out.multipliers) - f_r[s];
    res2 += rr.squaredNorm();
    ref2 += f_r[s].squaredNorm();
    if (L.n.rows() > 0) res_p += L.n.transpose() * (L.w_rp.transpose() * a_r[s] + L.w_pp * a_p);
    bar += L.b * a_r[s];
  }
  res_p -= f_p;
  res2 += res_p.squaredNorm();
  ref2 += f_p.squaredNorm();
  if (bar.size() > 0) jump = bar.cwiseAbs().maxCoeff();
  out.stats.recovery_residual = ref2 > 0.0 ? std::sqrt(res2 / ref2) : std::sqrt(res2);
  out.stats.jump = jump;
  return out;
}

MonolithicSolution monolithic_solve(const std::vector<SparseMatrix>& stiffness, const std::vector<SparseMatrix>& mass,
                                    const DofPartition& partition, const CouplingMatrices& coupling, double dt,
                                    const std::vector<Vector>& rhs, const std::vector<Vector>& eliminated) {
  const int ns = partition.subdomain_count();
  // unknown numbering: per subdomain its primal then remaining DOFs; multipliers last
  std::vector<std::vector<int>> free(ns), pos(ns);
  std::vector<int> offset(ns + 1, 0);
  for (int s = 0; s < ns; ++s) {
    const auto& sp = partition.subdomains[s];
    free[s] = sp.primal;
    free[s].insert(free[s].end(), sp.remaining.begin(), sp.remaining.end());
    pos[s].assign(sp.size(), -1);
    for (std::size_t k = 0; k < free[s].size(); ++k) pos[s][free[s][k]] = static_cast<int>(k);
    offset[s + 1] = offset[s] + static_cast<int>(free[s].size());
  }
  std::vector<Constraint> rows = coupling.dual_rows;
  rows.insert(rows.end(), coupling.primal_rows.begin(), coupling.primal_rows.end());
  const int nu = offset[ns];
  const int nm = static_cast<int>(rows.size());

  std::vector<Eigen::Triplet<double>> trip;
  Vector b = Vector::Zero(nu + nm);
  std::vector<SparseMatrix> w(ns);
  for (int s = 0; s < ns; ++s) {
    w[s] = dt * stiffness[s];
    if (mass[s].rows() != 0) w[s] += mass[s];
    const auto& sp = partition.subdomains[s];
    Vector ae = Vector::Zero(sp.size());
    for (int i : sp.eliminated) ae[i] = eliminated[s][i];
    const Vector wae = w[s] * ae;
    for (int k = 0; k < w[s].outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(w[s], k); it; ++it) {
        const int r = pos[s][it.row()], c = pos[s][it.col()];
        if (r >= 0 && c >= 0) trip.emplace_back(offset[s] + r, offset[s] + c, it.value());
      }
    for (std::size_t k = 0; k < free[s].size(); ++k) b[offset[s] + k] = rhs[s][free[s][k]] - wae[free[s][k]];
  }
  for (int r = 0; r < nm; ++r) {
    const int ip = offset[rows[r].plus.subdomain] + pos[rows[r].plus.subdomain][rows[r].plus.local];
    const int im = offset[rows[r].minus.subdomain] + pos[rows[r].minus.subdomain][rows[r].minus.local];
    trip.emplace_back(nu + r, ip, dt);
    trip.emplace_back(nu + r, im, -dt);
    trip.emplace_back(ip, nu + r, dt);
    trip.emplace_back(im, nu + r, -dt);
  }
  MonolithicSolution out;
  out.matrix.resize(nu + nm, nu + nm);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  out.matrix.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(out.matrix);
  if (lu.info() != Eigen::Success) throw NonsingularityError("monolithic saddle system is singular");
  const Vector x = lu.solve(b);
  out.multipliers = x.tail(nm);
  out.coefficients.resize(ns);
  for (int s = 0; s < ns; ++s) {
    const auto& sp = partition.subdomains[s];
    Vector a = Vector::Zero(sp.size());
    for (int i : sp.eliminated) a[i] = eliminated[s][i];
    for (std::size_t k = 0; k < free[s].size(); ++k) a[free[s][k]] = x[offset[s] + k];
    out.coefficients[s] = std::move(a);
  }
  for (const auto& r : rows)
    out.constraint_residual =
        std::max(out.constraint_residual,
                 std::abs(out.coefficients[r.plus.subdomain][r.plus.local] - out.coefficients[r.minus.subdomain][r.minus.local]));
  return out;
}

double euler_residual(const std::vector<SparseMatrix>& w, const DofPartition& partition, const ControlGraph& graph,
                      const std::vector<Vector>& coefficients, const std::vector<Vector>& rhs) {
  Vector res = Vector::Zero(graph.edge_count());
  Vector ref = Vector::Zero(graph.edge_count());
  Vector wa_ref = Vector::Zero(graph.edge_count());
  for (int s = 0; s < partition.subdomain_count(); ++s) {
    const Vector wa = w[s] * coefficients[s];
    const auto& sp = partition.subdomains[s];
    for (int i = 0; i < sp.size(); ++i) {
      if (sp.role[i] == DofRole::Dirichlet || sp.role[i] == DofRole::Gauge) continue;
      const int e = graph.dof_edge[s][i];
      res[e] += wa[i] - rhs[s][i];
      ref[e] += rhs[s][i];
      wa_ref[e] += wa[i];
    }
  }
  const double scale = std::max({ref.norm(), wa_ref.norm(), std::numeric_limits<double>::min()});
  return res.norm() / scale;
}

double interface_jump(const CouplingMatrices& coupling, const std::vector<Vector>& coefficients) {
  double jump = 0.0;
  for (const auto* rows : {&coupling.dual_rows, &coupling.primal_rows})
    for (const auto& r : *rows)
      jump = std::max(jump, std::abs(coefficients[r.plus.subdomain][r.plus.local] -
                                     coefficients[r.minus.subdomain][r.minus.local]));
  return jump;
}

}  // namespace eddy
