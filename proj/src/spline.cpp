#include "eddy/spline.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "eddy/errors.hpp"

namespace eddy {

KnotVector::KnotVector(int degree, int elements, double a, double b)
    : degree_(degree), elements_(elements), a_(a), b_(b) {
  if (degree < 0) throw InputError("knot vector degree must be nonnegative");
  if (elements < 1) throw InputError("knot vector needs at least one element");
  if (!(a < b)) throw InputError("knot vector interval must satisfy a < b");
  knots_.reserve(static_cast<std::size_t>(elements + 2 * degree + 1));
  for (int i = 0; i < degree; ++i) knots_.push_back(a);
  for (int e = 0; e <= elements; ++e) knots_.push_back(breakpoint(e));
  for (int i = 0; i < degree; ++i) knots_.push_back(b);
}

double KnotVector::breakpoint(int e) const {
  if (e == elements_) return b_;
  return a_ + (b_ - a_) * static_cast<double>(e) / elements_;
}

int KnotVector::find_element(double x) const {
  if (x < a_ || x > b_) throw InputError("evaluation point " + std::to_string(x) + " outside knot interval");
  int e = static_cast<int>(std::floor((x - a_) / spacing()));
  if (e >= elements_) e = elements_ - 1;
  if (e < 0) e = 0;
  // floor can land one element off near breakpoints
  while (e + 1 < elements_ && x >= breakpoint(e + 1)) ++e;
  while (e > 0 && x < breakpoint(e)) --e;
  return e;
}

std::vector<double> KnotVector::greville() const {
  std::vector<double> g(static_cast<std::size_t>(dimension()));
  if (degree_ == 0) {
    for (int i = 0; i < dimension(); ++i) g[i] = 0.5 * (knots_[i] + knots_[i + 1]);
    return g;
  }
  for (int i = 0; i < dimension(); ++i) {
    double s = 0.0;
    for (int k = 1; k <= degree_; ++k) s += knots_[i + k];
    g[i] = s / degree_;
  }
  return g;
}

KnotVector make_spline_space(int degree, int elements, double a, double b) {
  if (degree < 1) throw InputError("spline degree must be at least 1");
  return KnotVector(degree, elements, a, b);
}

KnotVector derivative_space(const KnotVector& kv) {
  if (kv.degree() < 1) throw InputError("derivative space needs degree >= 1");
  return KnotVector(kv.degree() - 1, kv.elements(), kv.lower(), kv.upper());
}

BasisValues eval_basis_on_element(const KnotVector& kv, int element, double x, int max_deriv) {
  const int p = kv.degree();
  if (max_deriv < 0 || max_deriv > p) throw InputError("derivative order must lie in [0, degree]");
  if (element < 0 || element >= kv.elements()) throw InputError("element index out of range");
  auto t = kv.knots();
  const int span = element + p;

  // Piegl & Tiller, algorithm A2.3
  std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1));
  std::vector<double> left(p + 1), right(p + 1);
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[span + 1 - j];
    right[j] = t[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double tmp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    ndu[j][j] = saved;
  }

  BasisValues out;
  out.first = span - p;
  out.values.assign(max_deriv + 1, std::vector<double>(p + 1));
  for (int j = 0; j <= p; ++j) out.values[0][j] = ndu[j][p];

  std::vector<std::vector<double>> a(2, std::vector<double>(p + 1));
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= max_deriv; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      out.values[k][r] = d;
      std::swap(s1, s2);
    }
  }
  int factor = p;
  for (int k = 1; k <= max_deriv; ++k) {
    for (int j = 0; j <= p; ++j) out.values[k][j] *= factor;
    factor *= (p - k);
  }
  return out;
}

BasisValues eval_basis(const KnotVector& kv, double x, int max_deriv) {
  return eval_basis_on_element(kv, kv.find_element(x), x, max_deriv);
}

Quadrature1D gauss_rule(int q) {
  if (q < 1) throw InputError("Gauss rule needs at least one point");
  Quadrature1D rule;
  rule.points.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    // Newton iteration on P_q from the Chebyshev-like initial guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (q == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= q; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = q * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[q - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) rule.points[q / 2] = 0.0;
  return rule;
}

}  // namespace eddy
