#pragma once

#include "eddy/assembly.hpp"

namespace eddy {

/// Material and time-interval data of the cube benchmark.
struct CaseConfig {
  double nu = 1.0;     ///< reluctivity, equal in conductor and insulator
  double sigma = 1.0;  ///< conductivity on the conductor
  double final_time = 1.0;
  Box domain{};
  RegionPredicate region = default_region;

  void validate() const;
};

// A = e^{-t} (sin x cos y cos z, -2 cos x sin y cos z, cos x cos y sin z)
Vec3 exact_A(const Point& x, double t);
/// curl A
Vec3 exact_B(const Point& x, double t);
/// -dA/dt on the conductor; throws UsageError for insulator points.
Vec3 exact_E_C(const Point& x, double t, Region region);
/// nu curl curl A + sigma dA/dt. With div A = 0, curl curl A = 3A.
Vec3 source_J(const Point& x, double t, Region region, const CaseConfig& config = {});

/// Source sampler for one patch.
FieldSampler source_sampler(Region region, const CaseConfig& config);

}  // namespace eddy
