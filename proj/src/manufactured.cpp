#include "eddy/manufactured.hpp"

#include <cmath>

#include "eddy/errors.hpp"

namespace eddy {

void CaseConfig::validate() const {
  if (!(nu > 0.0) || !(sigma > 0.0)) throw InputError("materials must be positive");
  if (!(final_time > 0.0)) throw InputError("final time must be positive");
}

Vec3 exact_A(const Point& x, double t) {
  const double et = std::exp(-t);
  const double sx = std::sin(x[0]), cx = std::cos(x[0]);
  const double sy = std::sin(x[1]), cy = std::cos(x[1]);
  const double sz = std::sin(x[2]), cz = std::cos(x[2]);
  return {et * sx * cy * cz, -2.0 * et * cx * sy * cz, et * cx * cy * sz};
}

Vec3 exact_B(const Point& x, double t) {
  const double et = 3.0 * std::exp(-t);
  const double sx = std::sin(x[0]), cx = std::cos(x[0]);
  const double sy = std::sin(x[1]);
  const double sz = std::sin(x[2]), cz = std::cos(x[2]);
  return {-et * cx * sy * sz, 0.0, et * sx * sy * cz};
}

Vec3 exact_E_C(const Point& x, double t, Region region) {
  if (region != Region::Conductor) throw UsageError("E is only defined in the conductor");
  return exact_A(x, t);
}

Vec3 source_J(const Point& x, double t, Region region, const CaseConfig& config) {
  const double factor = region == Region::Conductor ? 3.0 * config.nu - config.sigma : 3.0 * config.nu;
  auto a = exact_A(x, t);
  for (double& v : a) v *= factor;
  return a;
}

FieldSampler source_sampler(Region region, const CaseConfig& config) {
  const double nu = config.nu, sigma = config.sigma;
  return [region, nu, sigma](const Point& x, double t) {
    CaseConfig c;
    c.nu = nu;
    c.sigma = sigma;
    return source_J(x, t, region, c);
  };
}

}  // namespace eddy
