#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "eddy/curl_space.hpp"
#include "eddy/topology.hpp"

namespace eddy {

/// Time-dependent vector field on the domain.
using FieldSampler = std::function<Vec3(const Point&, double)>;

/// Basis data of one element at its tensor Gauss points.
///
/// Column a of `values` holds the nonzero component (component[a]) of local
/// function a; `curl[k]` holds component k of its curl.
struct ElementBasis {
  std::array<int, 3> element{};
  std::vector<int> dofs;
  std::vector<int> component;
  std::vector<Point> points;
  Eigen::VectorXd weights;
  Eigen::MatrixXd values;
  std::array<Eigen::MatrixXd, 3> curl;
};

/// Calls `visit` for every element of the space, in lexicographic order.
void for_each_element(const CurlSpace& space, int points, const std::function<void(const ElementBasis&)>& visit);

/// K_jk = integral of nu curl w_k . curl w_j
SparseMatrix assemble_stiffness(const CurlSpace& space, double nu);

/// M_jk = integral of sigma w_k . w_j on a conductor patch.
SparseMatrix assemble_mass(const CurlSpace& space, double sigma, Region region = Region::Conductor);

/// (j)_k = integral of J(., t) . w_k, with `points` Gauss points per direction (0 selects p+3).
Vector assemble_load(const CurlSpace& space, const FieldSampler& field, double t, int points = 0);

/// Coefficients of the tangential trace of g on the patch faces lying on the
/// domain boundary. Entries of DOFs without a boundary trace are left zero.
///
/// Degree-p factors interpolate at Greville points, unit-integral factors
/// histopolate over the Greville intervals; this is exact on the trace space.
Vector dirichlet_values(const CurlSpace& space, const Box& domain, const FieldSampler& g, double t);

/// Global L2 projection of A0 onto the glued multipatch space; returns one
/// coefficient vector per subdomain (interface copies agree exactly).
std::vector<Vector> project_initial(const std::vector<CurlSpace>& spaces, const ControlGraph& graph,
                                    const FieldSampler& initial, double t = 0.0);

/// Squared L2 norm of (field_h - exact) on one patch.
double l2_error_squared(const CurlSpace& space, std::span<const double> coeffs, const FieldSampler& exact, double t);
/// Squared L2 norm of (curl field_h - exact) on one patch.
double l2_error_curl_squared(const CurlSpace& space, std::span<const double> coeffs, const FieldSampler& exact,
                             double t);

/// Multipatch L2 errors; `include` selects which subdomains contribute (empty = all).
double l2_error(const std::vector<CurlSpace>& spaces, const std::vector<Vector>& coeffs, const FieldSampler& exact,
                double t, const std::vector<char>& include = {});
double l2_error_curl(const std::vector<CurlSpace>& spaces, const std::vector<Vector>& coeffs,
                     const FieldSampler& exact, double t, const std::vector<char>& include = {});

}  // namespace eddy
