#include "eddy/curl_space.hpp"

#include <string>

#include "eddy/errors.hpp"

namespace eddy {

bool Box::contains(const Point& x, double slack) const {
  for (int d = 0; d < 3; ++d)
    if (x[d] < lower[d] - slack || x[d] > upper[d] + slack) return false;
  return true;
}

CurlSpace::CurlSpace(int degree, std::array<int, 3> divisions, const Box& box)
    : degree_(degree), divisions_(divisions), box_(box) {
  if (degree < 1) throw InputError("curl space degree must be at least 1");
  for (int d = 0; d < 3; ++d) {
    if (divisions[d] < 1) throw InputError("curl space needs at least one element per direction");
    if (!(box.lower[d] < box.upper[d])) throw InputError("degenerate patch box in direction " + std::to_string(d));
    primal_[d] = make_spline_space(degree, divisions[d], box.lower[d], box.upper[d]);
    reduced_[d] = derivative_space(primal_[d]);
    const auto s = reduced_[d].knots();
    const int p = degree;
    scales_[d].resize(static_cast<std::size_t>(reduced_[d].dimension()));
    for (int j = 0; j < reduced_[d].dimension(); ++j) scales_[d][j] = p / (s[j + p] - s[j]);
  }
  int offset = 0;
  for (int c = 0; c < 3; ++c) {
    for (int d = 0; d < 3; ++d) dims_[c][d] = (c == d) ? reduced_[d].dimension() : primal_[d].dimension();
    offsets_[c] = offset;
    offset += component_size(c);
  }
  size_ = offset;
}

std::array<int, 3> CurlSpace::scalar_dims() const {
  return {primal_[0].dimension(), primal_[1].dimension(), primal_[2].dimension()};
}

CurlIndex CurlSpace::unpack(int dof) const {
  if (dof < 0 || dof >= size_) throw InputError("DOF index out of range");
  int c = 2;
  while (dof < offsets_[c]) --c;
  int r = dof - offsets_[c];
  const auto& n = dims_[c];
  CurlIndex ci;
  ci.component = c;
  ci.ijk[0] = r % n[0];
  r /= n[0];
  ci.ijk[1] = r % n[1];
  ci.ijk[2] = r / n[1];
  return ci;
}

namespace {

struct PointBasis {
  int element = 0;
  BasisValues full;     // degree p, values and first derivative
  std::vector<double> reduced;  // scaled degree p-1 values
};

PointBasis basis_at(const CurlSpace& space, int d, double x) {
  PointBasis pb;
  pb.element = space.primal(d).find_element(x);
  pb.full = eval_basis_on_element(space.primal(d), pb.element, x, 1);
  const auto red = eval_basis_on_element(space.reduced(d), pb.element, x, 0);
  pb.reduced = red.values[0];
  for (std::size_t j = 0; j < pb.reduced.size(); ++j)
    pb.reduced[j] *= space.reduced_scale(d, red.first + static_cast<int>(j));
  return pb;
}

}  // namespace

Vec3 CurlSpace::evaluate(std::span<const double> coeffs, const Point& x) const {
  if (static_cast<int>(coeffs.size()) != size_) throw InputError("coefficient vector has wrong size");
  std::array<PointBasis, 3> b{basis_at(*this, 0, x[0]), basis_at(*this, 1, x[1]), basis_at(*this, 2, x[2])};
  Vec3 out{0.0, 0.0, 0.0};
  const int p = degree_;
  for (int c = 0; c < 3; ++c) {
    std::array<const std::vector<double>*, 3> f{};
    std::array<int, 3> n{};
    for (int d = 0; d < 3; ++d) {
      f[d] = (d == c) ? &b[d].reduced : &b[d].full.values[0];
      n[d] = (d == c) ? p : p + 1;
    }
    double s = 0.0;
    for (int kz = 0; kz < n[2]; ++kz)
      for (int ky = 0; ky < n[1]; ++ky)
        for (int kx = 0; kx < n[0]; ++kx)
          s += coeffs[index(c, b[0].element + kx, b[1].element + ky, b[2].element + kz)] * (*f[0])[kx] *
               (*f[1])[ky] * (*f[2])[kz];
    out[c] = s;
  }
  return out;
}

Vec3 CurlSpace::evaluate_curl(std::span<const double> coeffs, const Point& x) const {
  if (static_cast<int>(coeffs.size()) != size_) throw InputError("coefficient vector has wrong size");
  std::array<PointBasis, 3> b{basis_at(*this, 0, x[0]), basis_at(*this, 1, x[1]), basis_at(*this, 2, x[2])};
  Vec3 out{0.0, 0.0, 0.0};
  const int p = degree_;
  for (int c = 0; c < 3; ++c) {
    // derivative of component c along the two other directions a, b_
    const int a = (c + 1) % 3;
    const int bb = (c + 2) % 3;
    double da = 0.0, db = 0.0;
    std::array<int, 3> n{};
    for (int d = 0; d < 3; ++d) n[d] = (d == c) ? p : p + 1;
    for (int kz = 0; kz < n[2]; ++kz)
      for (int ky = 0; ky < n[1]; ++ky)
        for (int kx = 0; kx < n[0]; ++kx) {
          const std::array<int, 3> k{kx, ky, kz};
          const double coef = coeffs[index(c, b[0].element + kx, b[1].element + ky, b[2].element + kz)];
          if (coef == 0.0) continue;
          double va = 1.0, vb = 1.0;
          for (int d = 0; d < 3; ++d) {
            const double v = (d == c) ? b[d].reduced[k[d]] : b[d].full.values[0][k[d]];
            const double dv = (d == c) ? 0.0 : b[d].full.values[1][k[d]];
            va *= (d == a) ? dv : v;
            vb *= (d == bb) ? dv : v;
          }
          da += coef * va;
          db += coef * vb;
        }
    // curl(u e_c) = (d_b u) e_a - (d_a u) e_b  for cyclic (c, a, b)
    out[a] += db;
    out[bb] -= da;
  }
  return out;
}

CurlSpace build_curl_space(int degree, std::array<int, 3> divisions, const Box& box) {
  return CurlSpace(degree, divisions, box);
}

SparseMatrix discrete_gradient(const CurlSpace& space, std::array<int, 3> scalar_dims) {
  if (scalar_dims != space.scalar_dims()) throw InputError("scalar space dimensions do not match the curl space");
  const auto& n = scalar_dims;
  auto sidx = [&](int i, int j, int k) { return i + n[0] * (j + n[1] * k); };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(2 * space.size()));
  for (int dof = 0; dof < space.size(); ++dof) {
    const auto ci = space.unpack(dof);
    auto hi = ci.ijk;
    hi[ci.component] += 1;
    trip.emplace_back(dof, sidx(ci.ijk[0], ci.ijk[1], ci.ijk[2]), -1.0);
    trip.emplace_back(dof, sidx(hi[0], hi[1], hi[2]), 1.0);
  }
  SparseMatrix g(space.size(), n[0] * n[1] * n[2]);
  g.setFromTriplets(trip.begin(), trip.end());
  return g;
}

DirectionTables tabulate_direction(const CurlSpace& space, int d, int points) {
  const auto rule = gauss_rule(points);
  const auto& kv = space.primal(d);
  DirectionTables t;
  t.points = points;
  const int ne = kv.elements();
  t.x.resize(ne);
  t.weight.resize(ne);
  t.full.resize(ne);
  t.reduced.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const double lo = kv.breakpoint(e), hi = kv.breakpoint(e + 1);
    const double half = 0.5 * (hi - lo);
    t.x[e].resize(points);
    t.weight[e].resize(points);
    t.full[e].resize(points);
    t.reduced[e].resize(points);
    for (int q = 0; q < points; ++q) {
      const double x = lo + half * (rule.points[q] + 1.0);
      t.x[e][q] = x;
      t.weight[e][q] = half * rule.weights[q];
      const auto f = eval_basis_on_element(kv, e, x, 1);
      t.full[e][q][0] = f.values[0];
      t.full[e][q][1] = f.values[1];
      const auto r = eval_basis_on_element(space.reduced(d), e, x, 0);
      t.reduced[e][q] = r.values[0];
      for (std::size_t j = 0; j < r.values[0].size(); ++j)
        t.reduced[e][q][j] *= space.reduced_scale(d, r.first + static_cast<int>(j));
    }
  }
  return t;
}

}  // namespace eddy
