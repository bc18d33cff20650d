#pragma once

#include <array>
#include <span>
#include <vector>

namespace eddy {

/// Open, uniform knot vector on [a,b]: end knots repeated degree+1 times,
/// interior breakpoints simple.
class KnotVector {
 public:
  KnotVector() = default;
  KnotVector(int degree, int elements, double a, double b);

  int degree() const { return degree_; }
  int elements() const { return elements_; }
  int dimension() const { return elements_ + degree_; }
  double lower() const { return a_; }
  double upper() const { return b_; }
  double spacing() const { return (b_ - a_) / elements_; }
  double breakpoint(int e) const;
  std::span<const double> knots() const { return knots_; }

  /// Element containing x; the right end belongs to the last element.
  int find_element(double x) const;
  /// Greville abscissae, one per basis function.
  std::vector<double> greville() const;

  friend bool operator==(const KnotVector&, const KnotVector&) = default;

 private:
  int degree_ = 0;
  int elements_ = 0;
  double a_ = 0.0;
  double b_ = 1.0;
  std::vector<double> knots_;
};

KnotVector make_spline_space(int degree, int elements, double a, double b);

/// Degree p-1 space on the same breakpoints (maximal smoothness).
KnotVector derivative_space(const KnotVector& kv);

struct BasisValues {
  int first = 0;  ///< global index of the first active function
  /// values[k][j] = k-th derivative of function first+j
  std::vector<std::vector<double>> values;
};

BasisValues eval_basis(const KnotVector& kv, double x, int max_deriv);

/// Same as eval_basis with an explicit element (avoids ambiguity at breakpoints).
BasisValues eval_basis_on_element(const KnotVector& kv, int element, double x, int max_deriv);

struct Quadrature1D {
  std::vector<double> points;   ///< on [-1,1]
  std::vector<double> weights;
};

Quadrature1D gauss_rule(int q);

}  // namespace eddy
