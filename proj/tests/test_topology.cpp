#include <doctest.h>

#include <map>
#include <queue>
#include <set>

#include "eddy/errors.hpp"
#include "eddy/topology.hpp"

using namespace eddy;

namespace {

struct Instance {
  PatchGrid grid;
  std::vector<CurlSpace> spaces;
  DofClass classes;
  ControlGraph graph;
};

Instance make(std::array<int, 3> counts, int degree, int divs, const RegionPredicate& region = default_region) {
  Instance in;
  in.grid = build_patch_grid(Box{}, counts, region, {divs, divs, divs});
  in.spaces = build_patch_spaces(in.grid, degree);
  in.classes = classify_dofs(in.grid, in.spaces);
  in.graph = build_control_graph(in.grid, in.spaces, in.classes);
  return in;
}

// Oracle: glue by physical Greville-type lattice coordinates of the scalar control points.
std::set<std::array<long, 3>> glued_vertices(const Instance& in) {
  std::set<std::array<long, 3>> v;
  for (std::size_t s = 0; s < in.spaces.size(); ++s) {
    const auto& sp = in.spaces[s];
    const auto dims = sp.scalar_dims();
    std::array<std::vector<double>, 3> g;
    for (int d = 0; d < 3; ++d) g[d] = sp.primal(d).greville();
    for (int k = 0; k < dims[2]; ++k)
      for (int j = 0; j < dims[1]; ++j)
        for (int i = 0; i < dims[0]; ++i)
          v.insert({std::lround(g[0][i] * 1e9), std::lround(g[1][j] * 1e9), std::lround(g[2][k] * 1e9)});
  }
  return v;
}

}  // namespace

TEST_CASE("default two-patch grid") {
  const auto grid = build_patch_grid(Box{}, {2, 1, 1}, default_region, {2, 2, 2});
  REQUIRE(grid.patch_count() == 2);
  CHECK(grid.patch_elements() == std::array<int, 3>{1, 2, 2});
  CHECK(grid.regions[0] == Region::Conductor);
  CHECK(grid.regions[1] == Region::Insulator);
  CHECK(grid.boxes[0].upper[0] == 0.5);
  CHECK(grid.boxes[1].lower[0] == 0.5);
  REQUIRE(grid.faces.size() == 1);
  CHECK(grid.faces[0].direction == 0);
  CHECK(grid.faces[0].lower == 0);
  CHECK(grid.faces[0].upper == 1);
}

TEST_CASE("single patch, no interfaces") {
  const auto all_c = [](const Box&) { return Region::Conductor; };
  const auto in = make({1, 1, 1}, 1, 2, all_c);
  CHECK(in.grid.faces.empty());
  for (auto k : in.classes.kind[0]) CHECK((k == DofKind::Interior || k == DofKind::Dirichlet));
  CHECK(in.graph.vertex_count() == 27);
  CHECK(in.graph.edge_count() == 54);
  CHECK(in.graph.connected());
  const auto in2 = make({1, 1, 1}, 2, 2, all_c);
  CHECK(in2.graph.vertex_count() == 64);
  CHECK(in2.graph.edge_count() == 144);
}

TEST_CASE("four patches touching along a line") {
  const auto grid = build_patch_grid(Box{}, {2, 2, 1}, default_region, {2, 2, 2});
  CHECK(grid.patch_count() == 4);
  CHECK(grid.faces.size() == 4);
  for (const auto& f : grid.faces) {
    const auto a = grid.patch_coords(f.lower), b = grid.patch_coords(f.upper);
    int differ = 0;
    for (int d = 0; d < 3; ++d) differ += std::abs(a[d] - b[d]);
    CHECK(differ == 1);
  }
  // patches 0 (x<.5,y<.5) and 3 (x>.5,y>.5) only share the line x=y=0.5
  for (const auto& f : grid.faces) CHECK_FALSE(((f.lower == 0 && f.upper == 3) || (f.lower == 1 && f.upper == 2)));
}

TEST_CASE("tiling volume and invalid layouts") {
  const auto grid = build_patch_grid(Box{{0, 0, 0}, {2, 1, 3}}, {2, 1, 3}, default_region, {4, 2, 6});
  double vol = 0.0;
  for (const auto& b : grid.boxes) vol += b.volume();
  CHECK(vol == doctest::Approx(6.0).epsilon(1e-15));
  CHECK_THROWS_AS(build_patch_grid(Box{}, {2, 1, 1}, default_region, {3, 2, 2}), InputError);
  // conductor split in two by an insulator slab
  const auto striped = [](const Box& b) {
    const double c = 0.5 * (b.lower[0] + b.upper[0]);
    return (c < 0.34 || c > 0.67) ? Region::Conductor : Region::Insulator;
  };
  CHECK_THROWS_AS(build_patch_grid(Box{}, {3, 1, 1}, striped, {3, 3, 3}), ConfigurationError);
}

TEST_CASE("two-patch classification, p=1, divs=2") {
  const auto in = make({2, 1, 1}, 1, 2);
  // interface x = 0.5: tangential DOFs are the y and z components at x-index 1 in patch 0
  const auto& sp = in.spaces[0];
  int dirichlet = 0, face = 0, total = 0;
  for (int dof = 0; dof < sp.size(); ++dof) {
    const auto ci = sp.unpack(dof);
    if (ci.component == 0 || ci.ijk[0] != sp.component_dims(ci.component)[0] - 1) continue;
    ++total;
    const auto k = in.classes.kind[0][dof];
    if (k == DofKind::Dirichlet) ++dirichlet;
    if (k == DofKind::Face) ++face;
  }
  CHECK(total == 12);
  CHECK(dirichlet == 8);
  CHECK(face == 4);
  for (int s = 0; s < 2; ++s)
    for (auto k : in.classes.kind[s]) CHECK(k != DofKind::Wirebasket);
  // glued graph: 18 + 18 - 9 vertices, 33 + 33 - 12 edges
  CHECK(in.graph.vertex_count() == 27);
  CHECK(in.graph.edge_count() == 54);
  CHECK(static_cast<int>(glued_vertices(in).size()) == in.graph.vertex_count());
}

TEST_CASE("partner symmetry and edge bijection") {
  for (auto counts : {std::array<int, 3>{2, 1, 1}, std::array<int, 3>{2, 2, 1}, std::array<int, 3>{2, 2, 2}})
    for (int p = 1; p <= 2; ++p) {
      const auto in = make(counts, p, 4);
      CHECK(in.graph.connected());
      CHECK(static_cast<int>(glued_vertices(in).size()) == in.graph.vertex_count());
      std::set<DofRef> seen;
      for (int e = 0; e < in.graph.edge_count(); ++e)
        for (const auto& r : in.graph.edges[e].dofs) {
          CHECK(in.graph.dof_edge[r.subdomain][r.local] == e);
          CHECK(seen.insert(r).second);
        }
      int total = 0;
      for (const auto& sp : in.spaces) total += sp.size();
      CHECK(static_cast<int>(seen.size()) == total);
      for (int s = 0; s < in.grid.patch_count(); ++s)
        for (int i = 0; i < in.spaces[s].size(); ++i)
          for (const auto& q : in.classes.partners[s][i]) {
            const auto& back = in.classes.partners[q.subdomain][q.local];
            CHECK(std::find(back.begin(), back.end(), DofRef{s, i}) != back.end());
            CHECK(in.classes.kind[q.subdomain][q.local] == in.classes.kind[s][i]);
          }
    }
}

TEST_CASE("wirebasket along the shared line of 2x2x1 patches") {
  const auto in = make({2, 2, 1}, 1, 4);
  int wb = 0;
  for (int s = 0; s < 4; ++s) {
    const auto& sp = in.spaces[s];
    const auto pc = in.grid.patch_coords(s);
    for (int dof = 0; dof < sp.size(); ++dof) {
      const auto ci = sp.unpack(dof);
      if (ci.component != 2) continue;
      const auto dims = sp.component_dims(2);
      const bool on_x = ci.ijk[0] == (pc[0] == 0 ? dims[0] - 1 : 0);
      const bool on_y = ci.ijk[1] == (pc[1] == 0 ? dims[1] - 1 : 0);
      if (on_x && on_y) {
        // z-edges are normal to z = 0 and z = 1, so none of them is Dirichlet
        CHECK(in.classes.kind[s][dof] == DofKind::Wirebasket);
        CHECK(in.classes.partners[s][dof].size() == 3);
        ++wb;
      }
    }
  }
  CHECK(wb == 4 * 4);
}

TEST_CASE("classification is idempotent and deterministic") {
  const auto a = make({2, 1, 1}, 2, 4);
  const auto c2 = classify_dofs(a.grid, a.spaces);
  CHECK(a.classes.kind == c2.kind);
  CHECK(a.classes.face == c2.face);
}

TEST_CASE("non-conforming spaces are rejected") {
  const auto grid = build_patch_grid(Box{}, {2, 1, 1}, default_region, {2, 2, 2});
  auto spaces = build_patch_spaces(grid, 1);
  spaces[1] = build_curl_space(2, grid.patch_elements(), grid.boxes[1]);
  CHECK_THROWS_AS(classify_dofs(grid, spaces), ConfigurationError);
}
