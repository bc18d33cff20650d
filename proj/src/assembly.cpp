#include "eddy/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

#include "eddy/errors.hpp"

namespace eddy {

void for_each_element(const CurlSpace& space, int points, const std::function<void(const ElementBasis&)>& visit) {
  const int p = space.degree();
  if (points <= 0) points = p + 1;
  const std::array<DirectionTables, 3> tab{tabulate_direction(space, 0, points), tabulate_direction(space, 1, points),
                                           tabulate_direction(space, 2, points)};
  const auto ne = space.divisions();
  const int nq = points * points * points;
  int nloc = 0;
  for (int c = 0; c < 3; ++c) nloc += p * (p + 1) * (p + 1);

  ElementBasis eb;
  eb.dofs.resize(nloc);
  eb.component.resize(nloc);
  eb.points.resize(nq);
  eb.weights.resize(nq);
  eb.values.resize(nq, nloc);
  for (auto& m : eb.curl) m.resize(nq, nloc);

  for (int ez = 0; ez < ne[2]; ++ez)
    for (int ey = 0; ey < ne[1]; ++ey)
      for (int ex = 0; ex < ne[0]; ++ex) {
        const std::array<int, 3> el{ex, ey, ez};
        eb.element = el;
        for (int qz = 0, q = 0; qz < points; ++qz)
          for (int qy = 0; qy < points; ++qy)
            for (int qx = 0; qx < points; ++qx, ++q) {
              eb.points[q] = {tab[0].x[ex][qx], tab[1].x[ey][qy], tab[2].x[ez][qz]};
              eb.weights[q] = tab[0].weight[ex][qx] * tab[1].weight[ey][qy] * tab[2].weight[ez][qz];
            }
        eb.values.setZero();
        for (auto& m : eb.curl) m.setZero();
        int a = 0;
        for (int c = 0; c < 3; ++c) {
          const int ca = (c + 1) % 3;
          const int cb = (c + 2) % 3;
          std::array<int, 3> n{};
          for (int d = 0; d < 3; ++d) n[d] = (d == c) ? p : p + 1;
          for (int kz = 0; kz < n[2]; ++kz)
            for (int ky = 0; ky < n[1]; ++ky)
              for (int kx = 0; kx < n[0]; ++kx, ++a) {
                const std::array<int, 3> k{kx, ky, kz};
                eb.dofs[a] = space.index(c, ex + kx, ey + ky, ez + kz);
                eb.component[a] = c;
                for (int qz = 0, q = 0; qz < points; ++qz)
                  for (int qy = 0; qy < points; ++qy)
                    for (int qx = 0; qx < points; ++qx, ++q) {
                      const std::array<int, 3> qq{qx, qy, qz};
                      std::array<double, 3> v{}, dv{};
                      for (int d = 0; d < 3; ++d) {
                        if (d == c) {
                          v[d] = tab[d].reduced[el[d]][qq[d]][k[d]];
                          dv[d] = 0.0;
                        } else {
                          v[d] = tab[d].full[el[d]][qq[d]][0][k[d]];
                          dv[d] = tab[d].full[el[d]][qq[d]][1][k[d]];
                        }
                      }
                      eb.values(q, a) = v[0] * v[1] * v[2];
                      // curl(u e_c) = (d_cb u) e_ca - (d_ca u) e_cb
                      double d_ca = dv[ca], d_cb = dv[cb];
                      for (int d = 0; d < 3; ++d) {
                        if (d != ca) d_ca *= v[d];
                        if (d != cb) d_cb *= v[d];
                      }
                      eb.curl[ca](q, a) = d_cb;
                      eb.curl[cb](q, a) = -d_ca;
                    }
              }
        }
        visit(eb);
      }
}

namespace {

void scatter(std::vector<Eigen::Triplet<double>>& trip, const std::vector<int>& dofs, const Eigen::MatrixXd& local) {
  for (Eigen::Index j = 0; j < local.cols(); ++j)
    for (Eigen::Index i = 0; i < local.rows(); ++i)
      if (local(i, j) != 0.0) trip.emplace_back(dofs[i], dofs[j], local(i, j));
}

SparseMatrix finish(int n, std::vector<Eigen::Triplet<double>>& trip) {
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.prune(0.0);
  m.makeCompressed();
  return m;
}

SparseMatrix vector_mass(const CurlSpace& space, double weight) {
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd local;
  for_each_element(space, 0, [&](const ElementBasis& eb) {
    const Eigen::MatrixXd wv = eb.weights.asDiagonal() * eb.values;
    local.noalias() = eb.values.transpose() * wv;
    // functions of different components are orthogonal pointwise
    for (Eigen::Index j = 0; j < local.cols(); ++j)
      for (Eigen::Index i = 0; i < local.rows(); ++i)
        if (eb.component[i] != eb.component[j]) local(i, j) = 0.0;
    local *= weight;
    local.triangularView<Eigen::StrictlyLower>() = local.transpose();
    scatter(trip, eb.dofs, local);
  });
  return finish(space.size(), trip);
}

}  // namespace

SparseMatrix assemble_stiffness(const CurlSpace& space, double nu) {
  if (!(nu > 0.0)) throw InputError("reluctivity must be positive");
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd local;
  for_each_element(space, 0, [&](const ElementBasis& eb) {
    local.setZero(eb.values.cols(), eb.values.cols());
    for (int k = 0; k < 3; ++k) {
      const Eigen::MatrixXd wc = eb.weights.asDiagonal() * eb.curl[k];
      local.noalias() += eb.curl[k].transpose() * wc;
    }
    local *= nu;
    local.triangularView<Eigen::StrictlyLower>() = local.transpose();
    scatter(trip, eb.dofs, local);
  });
  return finish(space.size(), trip);
}

SparseMatrix assemble_mass(const CurlSpace& space, double sigma, Region region) {
  if (region != Region::Conductor) throw UsageError("mass matrix requested on an insulator subdomain");
  if (!(sigma > 0.0)) throw InputError("conductivity must be positive on conductor patches");
  return vector_mass(space, sigma);
}

Vector assemble_load(const CurlSpace& space, const FieldSampler& field, double t, int points) {
  Vector load = Vector::Zero(space.size());
  if (points <= 0) points = space.degree() + 3;
  for_each_element(space, points, [&](const ElementBasis& eb) {
    const auto nq = eb.weights.size();
    Eigen::MatrixXd jv(nq, 3);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const Vec3 j = field(eb.points[q], t);
      for (int c = 0; c < 3; ++c) jv(q, c) = j[c] * eb.weights[q];
    }
    for (Eigen::Index a = 0; a < eb.values.cols(); ++a)
      load[eb.dofs[a]] += eb.values.col(a).dot(jv.col(eb.component[a]));
  });
  return load;
}

namespace {

/// Integral of f over [lo, hi], split at the breakpoints of kv.
template <class F>
double integrate_piecewise(const KnotVector& kv, double lo, double hi, int points, F&& f) {
  const auto rule = gauss_rule(points);
  double total = 0.0;
  double a = lo;
  while (a < hi) {
    const int e = kv.find_element(std::min(a + 1e-14 * (kv.upper() - kv.lower()), kv.upper()));
    const double b = std::min(hi, kv.breakpoint(e + 1));
    if (b <= a) break;
    const double half = 0.5 * (b - a);
    for (std::size_t q = 0; q < rule.points.size(); ++q) total += half * rule.weights[q] * f(a + half * (rule.points[q] + 1.0));
    a = b;
  }
  return total;
}

double reduced_value(const CurlSpace& space, int d, int j, double x) {
  const auto r = eval_basis(space.reduced(d), x, 0);
  const int k = j - r.first;
  if (k < 0 || k >= static_cast<int>(r.values[0].size())) return 0.0;
  return r.values[0][k] * space.reduced_scale(d, j);
}

double full_value(const CurlSpace& space, int d, int j, double x) {
  const auto r = eval_basis(space.primal(d), x, 0);
  const int k = j - r.first;
  if (k < 0 || k >= static_cast<int>(r.values[0].size())) return 0.0;
  return r.values[0][k];
}

}  // namespace

Vector dirichlet_values(const CurlSpace& space, const Box& domain, const FieldSampler& g, double t) {
  Vector out = Vector::Zero(space.size());
  const int p = space.degree();
  const int qpts = p + 3;
  const auto& box = space.box();
  for (int d = 0; d < 3; ++d) {
    for (int side = 0; side < 2; ++side) {
      const double pos = side == 0 ? box.lower[d] : box.upper[d];
      const double wall = side == 0 ? domain.lower[d] : domain.upper[d];
      if (pos != wall) continue;
      for (int c : {(d + 1) % 3, (d + 2) % 3}) {
        const int tdir = 3 - d - c;  // the other tangential direction
        const auto gc = space.primal(c).greville();
        const auto gt = space.primal(tdir).greville();
        const int nr = space.reduced(c).dimension();
        const int nt = space.primal(tdir).dimension();
        // histopolation matrix in c, collocation matrix in tdir
        Eigen::MatrixXd h(nr, nr), col(nt, nt), data(nr, nt);
        for (int m = 0; m < nr; ++m)
          for (int j = 0; j < nr; ++j)
            h(m, j) = integrate_piecewise(space.primal(c), gc[m], gc[m + 1], qpts,
                                          [&](double x) { return reduced_value(space, c, j, x); });
        for (int k = 0; k < nt; ++k)
          for (int l = 0; l < nt; ++l) col(k, l) = full_value(space, tdir, l, gt[k]);
        for (int m = 0; m < nr; ++m)
          for (int k = 0; k < nt; ++k)
            data(m, k) = integrate_piecewise(space.primal(c), gc[m], gc[m + 1], qpts, [&](double x) {
              Point pt{};
              pt[d] = pos;
              pt[c] = x;
              pt[tdir] = gt[k];
              return g(pt, t)[c];
            });
        // coefficients C (nr x nt):  H C col^T = data
        const Eigen::MatrixXd hc = h.partialPivLu().solve(data);
        const Eigen::MatrixXd coef = col.partialPivLu().solve(hc.transpose()).transpose();
        const auto dims = space.component_dims(c);
        for (int j = 0; j < nr; ++j)
          for (int l = 0; l < nt; ++l) {
            std::array<int, 3> ijk{};
            ijk[d] = side == 0 ? 0 : dims[d] - 1;
            ijk[c] = j;
            ijk[tdir] = l;
            out[space.index(c, ijk[0], ijk[1], ijk[2])] = coef(j, l);
          }
      }
    }
  }
  return out;
}

std::vector<Vector> project_initial(const std::vector<CurlSpace>& spaces, const ControlGraph& graph,
                                    const FieldSampler& initial, double t) {
  const int n = graph.edge_count();
  std::vector<Eigen::Triplet<double>> trip;
  Vector rhs = Vector::Zero(n);
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    const SparseMatrix m = vector_mass(spaces[s], 1.0);
    const auto& map = graph.dof_edge[s];
    for (int r = 0; r < m.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(m, r); it; ++it) trip.emplace_back(map[it.row()], map[it.col()], it.value());
    const Vector load = assemble_load(spaces[s], initial, t);
    for (int i = 0; i < load.size(); ++i) rhs[map[i]] += load[i];
  }
  Eigen::SparseMatrix<double> mass(n, n);
  mass.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(mass);
  if (solver.info() != Eigen::Success) throw InternalError("global mass matrix factorization failed");
  const Vector glued = solver.solve(rhs);
  std::vector<Vector> out(spaces.size());
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    out[s].resize(spaces[s].size());
    for (int i = 0; i < spaces[s].size(); ++i) out[s][i] = glued[graph.dof_edge[s][i]];
  }
  return out;
}

double l2_error_squared(const CurlSpace& space, std::span<const double> coeffs, const FieldSampler& exact,
                        double t) {
  if (static_cast<int>(coeffs.size()) != space.size()) throw InputError("coefficient vector has wrong size");
  double total = 0.0;
  for_each_element(space, 0, [&](const ElementBasis& eb) {
    Eigen::VectorXd loc(eb.dofs.size());
    for (std::size_t a = 0; a < eb.dofs.size(); ++a) loc[a] = coeffs[eb.dofs[a]];
    Eigen::MatrixXd uh = Eigen::MatrixXd::Zero(eb.weights.size(), 3);
    for (Eigen::Index a = 0; a < loc.size(); ++a)
      if (loc[a] != 0.0) uh.col(eb.component[a]) += loc[a] * eb.values.col(a);
    for (Eigen::Index q = 0; q < eb.weights.size(); ++q) {
      const Vec3 u = exact(eb.points[q], t);
      double e2 = 0.0;
      for (int c = 0; c < 3; ++c) e2 += (uh(q, c) - u[c]) * (uh(q, c) - u[c]);
      total += eb.weights[q] * e2;
    }
  });
  return total;
}

double l2_error_curl_squared(const CurlSpace& space, std::span<const double> coeffs, const FieldSampler& exact,
                             double t) {
  if (static_cast<int>(coeffs.size()) != space.size()) throw InputError("coefficient vector has wrong size");
  double total = 0.0;
  for_each_element(space, 0, [&](const ElementBasis& eb) {
    Eigen::VectorXd loc(eb.dofs.size());
    for (std::size_t a = 0; a < eb.dofs.size(); ++a) loc[a] = coeffs[eb.dofs[a]];
    for (Eigen::Index q = 0; q < eb.weights.size(); ++q) {
      const Vec3 b = exact(eb.points[q], t);
      double e2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double bh = eb.curl[k].row(q).dot(loc);
        e2 += (bh - b[k]) * (bh - b[k]);
      }
      total += eb.weights[q] * e2;
    }
  });
  return total;
}

namespace {

template <class F>
double multipatch(const std::vector<CurlSpace>& spaces, const std::vector<Vector>& coeffs,
                  const std::vector<char>& include, F&& per_patch) {
  if (coeffs.size() != spaces.size()) throw InputError("one coefficient vector per patch required");
  double total = 0.0;
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    if (!include.empty() && !include[s]) continue;
    total += per_patch(spaces[s], std::span<const double>(coeffs[s].data(), coeffs[s].size()));
  }
  return std::sqrt(total);
}

}  // namespace

double l2_error(const std::vector<CurlSpace>& spaces, const std::vector<Vector>& coeffs, const FieldSampler& exact,
                double t, const std::vector<char>& include) {
  return multipatch(spaces, coeffs, include,
                    [&](const CurlSpace& sp, std::span<const double> c) { return l2_error_squared(sp, c, exact, t); });
}

double l2_error_curl(const std::vector<CurlSpace>& spaces, const std::vector<Vector>& coeffs,
                     const FieldSampler& exact, double t, const std::vector<char>& include) {
  return multipatch(spaces, coeffs, include, [&](const CurlSpace& sp, std::span<const double> c) {
    return l2_error_curl_squared(sp, c, exact, t);
  });
}

}  // namespace eddy
