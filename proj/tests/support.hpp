#pragma once

#include "eddy/march.hpp"

namespace eddy::test {

inline Discretization two_patch(int degree, int divs, TreeOrder order = TreeOrder::Lexicographic) {
  DiscretizationConfig c;
  c.degree = degree;
  c.divs = divs;
  c.tree_order = order;
  return build_discretization(c);
}

inline Discretization custom(int degree, int divs, std::array<int, 3> patches, RegionPredicate region) {
  DiscretizationConfig c;
  c.degree = degree;
  c.divs = divs;
  c.patches = patches;
  c.material.region = std::move(region);
  return build_discretization(c);
}

inline Region all_insulator(const Box&) { return Region::Insulator; }
inline Region all_conductor(const Box&) { return Region::Conductor; }

}  // namespace eddy::test
