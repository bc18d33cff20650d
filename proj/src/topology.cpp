#include "eddy/topology.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <string>

#include "eddy/errors.hpp"

namespace eddy {

std::array<int, 3> PatchGrid::patch_coords(int id) const {
  return {id % counts[0], (id / counts[0]) % counts[1], id / (counts[0] * counts[1])};
}

std::array<int, 3> PatchGrid::patch_elements() const {
  return {divisions[0] / counts[0], divisions[1] / counts[1], divisions[2] / counts[2]};
}

Region default_region(const Box& patch) {
  const double cx = 0.5 * (patch.lower[0] + patch.upper[0]);
  return cx < 0.5 ? Region::Conductor : Region::Insulator;
}

namespace {

void check_region_connected(const PatchGrid& grid, Region region) {
  std::vector<int> members;
  for (int s = 0; s < grid.patch_count(); ++s)
    if (grid.regions[s] == region) members.push_back(s);
  if (members.empty()) return;
  std::vector<std::vector<int>> adj(grid.patch_count());
  for (const auto& f : grid.faces) {
    if (grid.regions[f.lower] == region && grid.regions[f.upper] == region) {
      adj[f.lower].push_back(f.upper);
      adj[f.upper].push_back(f.lower);
    }
  }
  std::vector<char> seen(grid.patch_count(), 0);
  std::queue<int> q;
  q.push(members.front());
  seen[members.front()] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int s = q.front();
    q.pop();
    for (int t : adj[s])
      if (!seen[t]) {
        seen[t] = 1;
        ++reached;
        q.push(t);
      }
  }
  if (reached != static_cast<int>(members.size()))
    throw ConfigurationError(std::string(region == Region::Conductor ? "conductor" : "insulator") +
                             " patches are not face-connected");
}

}  // namespace

PatchGrid build_patch_grid(const Box& domain, std::array<int, 3> counts, const RegionPredicate& region,
                           std::array<int, 3> divisions) {
  PatchGrid grid;
  grid.domain = domain;
  grid.counts = counts;
  grid.divisions = divisions;
  for (int d = 0; d < 3; ++d) {
    if (counts[d] < 1) throw InputError("patch counts must be at least 1");
    if (divisions[d] < 1) throw InputError("divisions must be at least 1");
    if (divisions[d] % counts[d] != 0)
      throw InputError("divisions " + std::to_string(divisions[d]) + " not divisible by patch count " +
                       std::to_string(counts[d]) + " in direction " + std::to_string(d));
    if (!(domain.lower[d] < domain.upper[d])) throw InputError("degenerate domain box");
  }
  const auto ne = grid.patch_elements();
  for (int s = 0; s < grid.patch_count(); ++s) {
    const auto pc = grid.patch_coords(s);
    Box b;
    for (int d = 0; d < 3; ++d) {
      // breakpoint positions of the global uniform mesh, so patch boxes tile exactly
      const double h = (domain.upper[d] - domain.lower[d]) / divisions[d];
      b.lower[d] = domain.lower[d] + h * (pc[d] * ne[d]);
      b.upper[d] = (pc[d] + 1 == counts[d]) ? domain.upper[d] : domain.lower[d] + h * ((pc[d] + 1) * ne[d]);
    }
    grid.boxes.push_back(b);
    grid.regions.push_back(region(b));
  }
  for (int s = 0; s < grid.patch_count(); ++s) {
    const auto pc = grid.patch_coords(s);
    for (int d = 0; d < 3; ++d) {
      if (pc[d] + 1 >= counts[d]) continue;
      auto nc = pc;
      nc[d] += 1;
      InterfaceFace f;
      f.id = static_cast<int>(grid.faces.size());
      f.direction = d;
      f.lower = s;
      f.upper = grid.patch_id(nc[0], nc[1], nc[2]);
      grid.faces.push_back(f);
    }
  }
  check_region_connected(grid, Region::Conductor);
  check_region_connected(grid, Region::Insulator);
  return grid;
}

std::vector<CurlSpace> build_patch_spaces(const PatchGrid& grid, int degree) {
  std::vector<CurlSpace> spaces;
  spaces.reserve(grid.patch_count());
  for (int s = 0; s < grid.patch_count(); ++s)
    spaces.push_back(build_curl_space(degree, grid.patch_elements(), grid.boxes[s]));
  return spaces;
}

namespace {

/// Glued scalar lattice of a conforming patch grid.
struct Lattice {
  int degree = 0;
  std::array<int, 3> counts{};
  std::array<int, 3> stride{};  // vertex offset between neighboring patches
  std::array<int, 3> n{};       // glued vertex counts

  Lattice(const PatchGrid& grid, const std::vector<CurlSpace>& spaces) {
    if (static_cast<int>(spaces.size()) != grid.patch_count())
      throw ConfigurationError("one curl space per patch required");
    degree = spaces.front().degree();
    counts = grid.counts;
    const auto ne = grid.patch_elements();
    for (int s = 0; s < grid.patch_count(); ++s) {
      const auto& sp = spaces[s];
      if (sp.degree() != degree) throw ConfigurationError("non-conforming traces: patch degrees differ");
      if (sp.divisions() != ne) throw ConfigurationError("non-conforming traces: element counts differ");
      if (!(sp.box() == grid.boxes[s])) throw ConfigurationError("curl space box does not match its patch");
    }
    for (int d = 0; d < 3; ++d) {
      stride[d] = ne[d] + degree - 1;
      n[d] = counts[d] * stride[d] + 1;
    }
  }

  int vertex_id(const std::array<int, 3>& g) const { return g[0] + n[0] * (g[1] + n[1] * g[2]); }

  /// Patch coordinate range (inclusive) containing vertex coordinate g along d.
  std::pair<int, int> vertex_patches(int d, int g) const {
    int hi = std::min(g / stride[d], counts[d] - 1);
    int lo = (g % stride[d] == 0 && g > 0) ? g / stride[d] - 1 : hi;
    lo = std::max(lo, 0);
    return {lo, hi};
  }

  int edge_patch(int c, int g) const { return std::min(g / stride[c], counts[c] - 1); }

  bool is_plane(int d, int g) const { return g > 0 && g < n[d] - 1 && g % stride[d] == 0; }
};

struct GluedEdge {
  int component;
  std::array<int, 3> g;
  DofKind kind;
  int face;
  std::vector<DofRef> dofs;
};

std::vector<GluedEdge> glue(const PatchGrid& grid, const std::vector<CurlSpace>& spaces, const Lattice& lat) {
  std::map<std::pair<int, int>, int> face_of;  // (direction, lower patch) -> face id
  for (const auto& f : grid.faces) face_of[{f.direction, f.lower}] = f.id;

  std::vector<GluedEdge> edges;
  for (int c = 0; c < 3; ++c) {
    std::array<int, 3> m = lat.n;
    m[c] -= 1;
    for (int gz = 0; gz < m[2]; ++gz)
      for (int gy = 0; gy < m[1]; ++gy)
        for (int gx = 0; gx < m[0]; ++gx) {
          GluedEdge e{c, {gx, gy, gz}, DofKind::Interior, -1, {}};
          std::array<std::pair<int, int>, 3> range;
          for (int d = 0; d < 3; ++d) {
            if (d == c) {
              const int pc = lat.edge_patch(c, e.g[d]);
              range[d] = {pc, pc};
            } else {
              range[d] = lat.vertex_patches(d, e.g[d]);
            }
          }
          for (int pz = range[2].first; pz <= range[2].second; ++pz)
            for (int py = range[1].first; py <= range[1].second; ++py)
              for (int px = range[0].first; px <= range[0].second; ++px) {
                const std::array<int, 3> pc{px, py, pz};
                const int s = grid.patch_id(px, py, pz);
                std::array<int, 3> loc{};
                for (int d = 0; d < 3; ++d) loc[d] = e.g[d] - pc[d] * lat.stride[d];
                e.dofs.push_back({s, spaces[s].index(c, loc[0], loc[1], loc[2])});
              }
          std::sort(e.dofs.begin(), e.dofs.end());

          bool dirichlet = false;
          for (int d = 0; d < 3; ++d)
            if (d != c && (e.g[d] == 0 || e.g[d] == lat.n[d] - 1)) dirichlet = true;

          if (dirichlet) {
            e.kind = DofKind::Dirichlet;
          } else if (e.dofs.size() >= 2) {
            // interface faces whose closure contains the whole edge
            std::vector<int> faces;
            for (int d = 0; d < 3; ++d) {
              if (d == c || !lat.is_plane(d, e.g[d])) continue;
              const int upper = e.g[d] / lat.stride[d];
              std::array<std::pair<int, int>, 3> tr = range;
              tr[d] = {upper - 1, upper - 1};
              for (int pz = tr[2].first; pz <= tr[2].second; ++pz)
                for (int py = tr[1].first; py <= tr[1].second; ++py)
                  for (int px = tr[0].first; px <= tr[0].second; ++px)
                    faces.push_back(face_of.at({d, grid.patch_id(px, py, pz)}));
            }
            if (faces.size() >= 2) {
              e.kind = DofKind::Wirebasket;
            } else {
              e.kind = DofKind::Face;
              e.face = faces.at(0);
            }
          }
          edges.push_back(std::move(e));
        }
  }
  return edges;
}

}  // namespace

DofClass classify_dofs(const PatchGrid& grid, const std::vector<CurlSpace>& spaces) {
  const Lattice lat(grid, spaces);
  const auto edges = glue(grid, spaces, lat);
  DofClass cls;
  const int ns = grid.patch_count();
  cls.kind.resize(ns);
  cls.face.resize(ns);
  cls.partners.resize(ns);
  for (int s = 0; s < ns; ++s) {
    cls.kind[s].assign(spaces[s].size(), DofKind::Interior);
    cls.face[s].assign(spaces[s].size(), -1);
    cls.partners[s].assign(spaces[s].size(), {});
  }
  std::vector<std::vector<char>> seen(ns);
  for (int s = 0; s < ns; ++s) seen[s].assign(spaces[s].size(), 0);
  for (const auto& e : edges) {
    for (const auto& r : e.dofs) {
      if (seen[r.subdomain][r.local]) throw InternalError("DOF glued to two control edges");
      seen[r.subdomain][r.local] = 1;
      cls.kind[r.subdomain][r.local] = e.kind;
      cls.face[r.subdomain][r.local] = e.face;
      for (const auto& o : e.dofs)
        if (!(o == r)) cls.partners[r.subdomain][r.local].push_back(o);
    }
  }
  for (int s = 0; s < ns; ++s)
    for (char v : seen[s])
      if (!v) throw InternalError("DOF not covered by the glued lattice");
  return cls;
}

ControlGraph build_control_graph(const PatchGrid& grid, const std::vector<CurlSpace>& spaces,
                                 const DofClass& classes) {
  const Lattice lat(grid, spaces);
  auto glued = glue(grid, spaces, lat);
  ControlGraph g;
  g.vertex_dims = lat.n;
  const int ns = grid.patch_count();
  g.dof_edge.resize(ns);
  for (int s = 0; s < ns; ++s) g.dof_edge[s].assign(spaces[s].size(), -1);
  g.incidence.resize(g.vertex_count());
  g.edges.reserve(glued.size());
  for (auto& e : glued) {
    GraphEdge ge;
    ge.component = e.component;
    auto hi = e.g;
    hi[e.component] += 1;
    ge.v0 = lat.vertex_id(e.g);
    ge.v1 = lat.vertex_id(hi);
    ge.kind = classes.kind[e.dofs.front().subdomain][e.dofs.front().local];
    ge.face = classes.face[e.dofs.front().subdomain][e.dofs.front().local];
    ge.dofs = std::move(e.dofs);
    const int id = static_cast<int>(g.edges.size());
    for (const auto& r : ge.dofs) g.dof_edge[r.subdomain][r.local] = id;
    g.incidence[ge.v0].push_back(id);
    g.incidence[ge.v1].push_back(id);
    g.edges.push_back(std::move(ge));
  }
  for (auto& inc : g.incidence) std::sort(inc.begin(), inc.end());
  return g;
}

bool ControlGraph::connected() const {
  if (vertex_count() == 0) return true;
  std::vector<char> seen(vertex_count(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int e : incidence[v]) {
      const int u = edges[e].v0 == v ? edges[e].v1 : edges[e].v0;
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        q.push(u);
      }
    }
  }
  return reached == vertex_count();
}

}  // namespace eddy
