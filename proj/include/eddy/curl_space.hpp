#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "eddy/spline.hpp"

namespace eddy {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;
using Point = std::array<double, 3>;
using Vec3 = std::array<double, 3>;

struct Box {
  Point lower{0.0, 0.0, 0.0};
  Point upper{1.0, 1.0, 1.0};

  double volume() const {
    return (upper[0] - lower[0]) * (upper[1] - lower[1]) * (upper[2] - lower[2]);
  }
  bool contains(const Point& x, double slack = 0.0) const;
  friend bool operator==(const Box&, const Box&) = default;
};

/// Index of a vector DOF: component plus tensor index inside that component.
struct CurlIndex {
  int component = 0;
  std::array<int, 3> ijk{};
  friend bool operator==(const CurlIndex&, const CurlIndex&) = default;
};

/// Curl-conforming tensor-product spline space on an axis-aligned box.
///
/// Component c uses degree p-1 in direction c and degree p in the other two.
/// The degree p-1 factors are scaled to unit integral, so that the gradient of
/// a degree-p scalar spline has coefficients given by plain differences and
/// every vector DOF is an edge of the scalar control lattice.
///
/// Numbering is component-major; inside a component x runs fastest, then y,
/// then z.
class CurlSpace {
 public:
  CurlSpace() = default;
  CurlSpace(int degree, std::array<int, 3> divisions, const Box& box);

  int degree() const { return degree_; }
  const Box& box() const { return box_; }
  std::array<int, 3> divisions() const { return divisions_; }
  int size() const { return size_; }
  bool unit_integral() const { return true; }

  /// Degree-p knot vector in direction d.
  const KnotVector& primal(int d) const { return primal_[d]; }
  /// Degree-(p-1) knot vector in direction d.
  const KnotVector& reduced(int d) const { return reduced_[d]; }
  /// Unit-integral scale of reduced function j in direction d.
  double reduced_scale(int d, int j) const { return scales_[d][j]; }

  std::array<int, 3> component_dims(int c) const { return dims_[c]; }
  int component_size(int c) const { return dims_[c][0] * dims_[c][1] * dims_[c][2]; }
  int component_offset(int c) const { return offsets_[c]; }
  /// Dimensions of the matching degree-(p,p,p) scalar space.
  std::array<int, 3> scalar_dims() const;

  int index(int component, int i, int j, int k) const {
    const auto& n = dims_[component];
    return offsets_[component] + i + n[0] * (j + n[1] * k);
  }
  int index(const CurlIndex& ci) const { return index(ci.component, ci.ijk[0], ci.ijk[1], ci.ijk[2]); }
  CurlIndex unpack(int dof) const;

  /// Field value at x for the given coefficients.
  Vec3 evaluate(std::span<const double> coeffs, const Point& x) const;
  /// Curl of the represented field at x.
  Vec3 evaluate_curl(std::span<const double> coeffs, const Point& x) const;

  friend bool operator==(const CurlSpace& a, const CurlSpace& b) {
    return a.degree_ == b.degree_ && a.divisions_ == b.divisions_ && a.box_ == b.box_;
  }

 private:
  int degree_ = 0;
  std::array<int, 3> divisions_{};
  Box box_;
  std::array<KnotVector, 3> primal_;
  std::array<KnotVector, 3> reduced_;
  std::array<std::vector<double>, 3> scales_;
  std::array<std::array<int, 3>, 3> dims_{};
  std::array<int, 3> offsets_{};
  int size_ = 0;
};

CurlSpace build_curl_space(int degree, std::array<int, 3> divisions, const Box& box);

/// Signed incidence matrix mapping degree-(p,p,p) scalar coefficients (x
/// fastest) to curl-space coefficients of their gradient.
SparseMatrix discrete_gradient(const CurlSpace& space, std::array<int, 3> scalar_dims);

/// One-dimensional basis tables at the Gauss points of every element.
///
/// full[e][q][k][j]: k-th derivative (k = 0,1) of degree-p function e+j at
/// point q of element e. reduced[e][q][j]: scaled degree-(p-1) function e+j.
struct DirectionTables {
  int points = 0;
  std::vector<std::vector<double>> x;        // [e][q] physical coordinate
  std::vector<std::vector<double>> weight;   // [e][q] physical weight
  std::vector<std::vector<std::array<std::vector<double>, 2>>> full;
  std::vector<std::vector<std::vector<double>>> reduced;
};

DirectionTables tabulate_direction(const CurlSpace& space, int direction, int points);

}  // namespace eddy
