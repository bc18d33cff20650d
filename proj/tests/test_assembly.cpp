#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "eddy/assembly.hpp"
#include "eddy/errors.hpp"
#include "eddy/gauge.hpp"
#include "eddy/manufactured.hpp"

using namespace eddy;

namespace {

double max_abs(const SparseMatrix& m) {
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

// Integral of f over [a,b], split at the breakpoints of kv, with a 10-point rule per piece.
template <class F>
double integrate(const KnotVector& kv, double a, double b, F f) {
  const auto g = gauss_rule(10);
  std::vector<double> cuts{a};
  for (int e = 1; e < kv.elements(); ++e)
    if (kv.breakpoint(e) > a && kv.breakpoint(e) < b) cuts.push_back(kv.breakpoint(e));
  cuts.push_back(b);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = cuts[i], r = cuts[i + 1];
    for (std::size_t q = 0; q < g.points.size(); ++q) s += 0.5 * (r - l) * g.weights[q] * f(0.5 * (l + r) + 0.5 * (r - l) * g.points[q]);
  }
  return s;
}

const FieldSampler zero_field = [](const Point&, double) { return Vec3{0, 0, 0}; };

}  // namespace

TEST_CASE("stiffness is symmetric, linear in nu and annihilates gradients") {
  for (int p = 1; p <= 3; ++p) {
    const auto s = build_curl_space(p, {2, 1, 3}, Box{{0, 0, 0}, {1, 0.5, 1.5}});
    const auto k1 = assemble_stiffness(s, 1.0);
    const auto k2 = assemble_stiffness(s, 2.0);
    CHECK(max_abs(SparseMatrix(k1 - SparseMatrix(k1.transpose()))) == 0.0);
    CHECK(max_abs(SparseMatrix(k2 - 2.0 * k1)) <= 1e-15 * max_abs(k1));
    const SparseMatrix kg = k1 * discrete_gradient(s, s.scalar_dims());
    CHECK(max_abs(kg) <= 1e-12 * max_abs(k1));
  }
}

TEST_CASE("lowest-order hexahedron stiffness has rank 5") {
  const auto s = build_curl_space(1, {1, 1, 1}, Box{});
  const Eigen::MatrixXd k(assemble_stiffness(s, 1.0));
  REQUIRE(k.rows() == 12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  const auto ev = es.eigenvalues();
  int rank = 0;
  for (int i = 0; i < 12; ++i) {
    CHECK(ev[i] > -1e-12);
    if (ev[i] > 1e-10 * ev.maxCoeff()) ++rank;
  }
  CHECK(rank == 5);
}

TEST_CASE("mass matrix") {
  const auto s = build_curl_space(1, {1, 1, 1}, Box{});
  const auto m1 = assemble_mass(s, 1.0);
  const Eigen::MatrixXd md(m1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(md);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  const auto m3 = assemble_mass(s, 3.0);
  CHECK(max_abs(SparseMatrix(m3 - 3.0 * m1)) <= 1e-15 * max_abs(m3));
  CHECK_THROWS_AS(assemble_mass(s, 1.0, Region::Insulator), UsageError);

  // constant e_x: coefficients 1/scale on the x-component, zero elsewhere
  for (int p = 1; p <= 3; ++p) {
    const Box box{{0, 0, 0}, {0.5, 1, 1}};
    const auto sp = build_curl_space(p, {1, 2, 2}, box);
    Vector ex = Vector::Zero(sp.size());
    const auto dims = sp.component_dims(0);
    for (int k = 0; k < dims[2]; ++k)
      for (int j = 0; j < dims[1]; ++j)
        for (int i = 0; i < dims[0]; ++i) ex[sp.index(0, i, j, k)] = 1.0 / sp.reduced_scale(0, i);
    const Vec3 v = sp.evaluate(std::span<const double>(ex.data(), ex.size()), {0.3, 0.7, 0.1});
    CHECK(v[0] == doctest::Approx(1.0));
    const double sigma = 2.5;
    const double q = ex.dot(assemble_mass(sp, sigma) * ex);
    CHECK(q == doctest::Approx(sigma * box.volume()).epsilon(1e-13));
    CHECK((assemble_stiffness(sp, 1.0) * ex).norm() <= 1e-12);
  }
}

TEST_CASE("load vectors") {
  const auto s = build_curl_space(1, {2, 2, 2}, Box{});
  CHECK(assemble_load(s, zero_field, 0.0).norm() == 0.0);
  const auto lx = assemble_load(s, [](const Point&, double) { return Vec3{1.5, 0, 0}; }, 0.0);
  for (int i = s.component_offset(1); i < s.size(); ++i) CHECK(lx[i] == 0.0);
  // each x-function integrates to 1 in x; the degree-p factors sum to 1 in y and z
  CHECK(lx.head(s.component_size(0)).sum() == doctest::Approx(1.5 * s.reduced(0).dimension()).epsilon(1e-14));

  const CaseConfig cfg;
  const auto src = source_sampler(Region::Conductor, cfg);
  for (int p = 1; p <= 3; ++p) {
    const auto sp = build_curl_space(p, {2, 4, 4}, Box{{0, 0, 0}, {0.5, 1, 1}});
    const Vector a = assemble_load(sp, src, 0.3);
    const Vector b = assemble_load(sp, src, 0.3, p + 5);
    INFO("p = " << p << " max change " << (a - b).cwiseAbs().maxCoeff());
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("Dirichlet values") {
  const Box domain;
  const auto s = build_curl_space(1, {2, 2, 2}, domain);
  CHECK(dirichlet_values(s, domain, zero_field, 0.0).norm() == 0.0);

  // p = 1: coefficient of a boundary edge = line integral of the tangential component
  const auto a = dirichlet_values(s, domain, exact_A, 0.4);
  int checked = 0;
  for (int dof = 0; dof < s.size(); ++dof) {
    const auto ci = s.unpack(dof);
    const int c = ci.component;
    bool on_boundary = false;
    for (int d = 0; d < 3; ++d)
      if (d != c && (ci.ijk[d] == 0 || ci.ijk[d] == s.component_dims(c)[d] - 1)) on_boundary = true;
    if (!on_boundary) {
      CHECK(a[dof] == 0.0);
      continue;
    }
    Point base{};
    for (int d = 0; d < 3; ++d) base[d] = d == c ? 0.0 : 0.5 * ci.ijk[d];
    const double lo = 0.5 * ci.ijk[c], hi = lo + 0.5;
    const double line = integrate(s.primal(c), lo, hi, [&](double x) {
      Point pt = base;
      pt[c] = x;
      return exact_A(pt, 0.4)[c];
    });
    CHECK(a[dof] == doctest::Approx(line).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked == 54 - 6);  // 6 interior edges meet at the center vertex
}

TEST_CASE("Dirichlet trace reproduces the data on its own nodes") {
  // degree-p direction: interpolation at Greville points; unit-integral direction:
  // equal integrals over consecutive Greville intervals
  const Box domain;
  for (int p = 1; p <= 3; ++p) {
    const auto s = build_curl_space(p, {2, 3, 2}, domain);
    const auto a = dirichlet_values(s, domain, exact_A, 0.0);
    const std::span<const double> c(a.data(), a.size());
    // face y = 0, tangential components x (c = 0) and z (c = 2)
    for (int comp : {0, 2}) {
      const int other = comp == 0 ? 2 : 0;
      const auto gc = s.primal(comp).greville();
      const auto go = s.primal(other).greville();
      for (std::size_t m = 0; m + 1 < gc.size(); ++m)
        for (double xo : go) {
          auto field = [&](double x, bool discrete) {
            Point pt{};
            pt[comp] = x;
            pt[other] = xo;
            pt[1] = 0.0;
            return discrete ? s.evaluate(c, pt)[comp] : exact_A(pt, 0.0)[comp];
          };
          const double ih = integrate(s.primal(comp), gc[m], gc[m + 1], [&](double x) { return field(x, true); });
          const double ie = integrate(s.primal(comp), gc[m], gc[m + 1], [&](double x) { return field(x, false); });
          CHECK(std::abs(ih - ie) <= 1e-12);
        }
    }
  }
}

TEST_CASE("initial projection") {
  const auto grid = build_patch_grid(Box{}, {2, 1, 1}, default_region, {2, 2, 2});
  for (int p = 1; p <= 2; ++p) {
    const auto spaces = build_patch_spaces(grid, p);
    const auto classes = classify_dofs(grid, spaces);
    const auto graph = build_control_graph(grid, spaces, classes);
    const auto zero = project_initial(spaces, graph, zero_field);
    for (const auto& z : zero) CHECK(z.norm() == 0.0);

    // a field of the glued space is reproduced
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    Vector glued(graph.edge_count());
    for (auto& v : glued) v = u(rng);
    std::vector<Vector> coeffs(2);
    for (int s = 0; s < 2; ++s) {
      coeffs[s].resize(spaces[s].size());
      for (int i = 0; i < spaces[s].size(); ++i) coeffs[s][i] = glued[graph.dof_edge[s][i]];
    }
    const FieldSampler field = [&](const Point& x, double) {
      const int s = x[0] < 0.5 ? 0 : 1;
      return spaces[s].evaluate(std::span<const double>(coeffs[s].data(), coeffs[s].size()), x);
    };
    const auto proj = project_initial(spaces, graph, field);
    for (int s = 0; s < 2; ++s) CHECK((proj[s] - coeffs[s]).cwiseAbs().maxCoeff() <= 1e-10);
  }
  // convergence of the projection error
  for (int p = 1; p <= 2; ++p) {
    std::vector<double> err;
    for (int divs : {2, 4, 8}) {
      const auto g = build_patch_grid(Box{}, {2, 1, 1}, default_region, {divs, divs, divs});
      const auto spaces = build_patch_spaces(g, p);
      const auto graph = build_control_graph(g, spaces, classify_dofs(g, spaces));
      err.push_back(l2_error(spaces, project_initial(spaces, graph, exact_A), exact_A, 0.0));
    }
    CHECK(std::log2(err[1] / err[2]) >= p - 0.05);
  }
}

TEST_CASE("L2 errors") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto s = build_curl_space(2, {2, 2, 2}, Box{});
  Vector c(s.size());
  for (auto& v : c) v = u(rng);
  const std::span<const double> cs(c.data(), c.size());
  const FieldSampler self = [&](const Point& x, double) { return s.evaluate(cs, x); };
  const FieldSampler self_curl = [&](const Point& x, double) { return s.evaluate_curl(cs, x); };
  CHECK(std::sqrt(l2_error_squared(s, cs, self, 0.0)) <= 1e-12);
  CHECK(std::sqrt(l2_error_curl_squared(s, cs, self_curl, 0.0)) <= 1e-12);

  // |B(.,0)|^2 = 9 (cos^2x sin^2y sin^2z + sin^2x sin^2y cos^2z), separable
  const auto i1 = [](auto f) {
    const auto g = gauss_rule(20);
    double v = 0.0;
    for (std::size_t q = 0; q < g.points.size(); ++q) v += 0.5 * g.weights[q] * f(0.5 + 0.5 * g.points[q]);
    return v;
  };
  const double cc = i1([](double x) { return std::cos(x) * std::cos(x); });
  const double ss = i1([](double x) { return std::sin(x) * std::sin(x); });
  const double expect = std::sqrt(9.0 * (cc * ss * ss + ss * ss * cc));
  const auto grid = build_patch_grid(Box{}, {2, 1, 1}, default_region, {8, 8, 8});
  const auto spaces = build_patch_spaces(grid, 3);
  std::vector<Vector> zeros{Vector::Zero(spaces[0].size()), Vector::Zero(spaces[1].size())};
  CHECK(l2_error_curl(spaces, zeros, exact_B, 0.0) == doctest::Approx(expect).epsilon(1e-9));

  const FieldSampler zero = [](const Point&, double) { return Vec3{0, 0, 0}; };
  const Vector c2 = 2.0 * c;
  CHECK(std::sqrt(l2_error_squared(s, std::span<const double>(c2.data(), c2.size()), zero, 0.0)) ==
        doctest::Approx(2.0 * std::sqrt(l2_error_squared(s, cs, zero, 0.0))).epsilon(1e-14));
}

TEST_CASE("gauged magnetostatic solve on a single insulator patch") {
  const auto insulator = [](const Box&) { return Region::Insulator; };
  for (int p = 1; p <= 2; ++p) {
    const auto grid = build_patch_grid(Box{}, {1, 1, 1}, insulator, {3, 3, 3});
    const auto spaces = build_patch_spaces(grid, p);
    const auto classes = classify_dofs(grid, spaces);
    const auto graph = build_control_graph(grid, spaces, classes);
    const auto tree = build_tree(graph);
    const auto part = partition_dofs(tree, graph, classes, grid.regions);
    const auto& sp = part.subdomains[0];
    const auto k = assemble_stiffness(spaces[0], 1.0);
    const Vector f = assemble_load(spaces[0], source_sampler(Region::Insulator, CaseConfig{}), 0.0);
    const int n = static_cast<int>(sp.remaining.size());
    Eigen::MatrixXd krr(n, n);
    Vector fr(n);
    const Eigen::MatrixXd kd(k);
    for (int i = 0; i < n; ++i) {
      fr[i] = f[sp.remaining[i]];
      for (int j = 0; j < n; ++j) krr(i, j) = kd(sp.remaining[i], sp.remaining[j]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(krr);
    REQUIRE(llt.info() == Eigen::Success);
    const Vector ar = llt.solve(fr);
    CHECK((krr * ar - fr).norm() <= 1e-10 * fr.norm());
  }
}
