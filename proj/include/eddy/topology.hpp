#pragma once

#include <array>
#include <functional>
#include <vector>

#include "eddy/curl_space.hpp"

namespace eddy {

enum class Region { Conductor, Insulator };

/// Two face-adjacent patches; `lower` has the smaller coordinate along `direction`.
struct InterfaceFace {
  int id = 0;
  int direction = 0;
  int lower = 0;
  int upper = 0;
};

/// Box domain tiled by a regular grid of patches, one subdomain per patch.
struct PatchGrid {
  Box domain;
  std::array<int, 3> counts{1, 1, 1};
  std::array<int, 3> divisions{1, 1, 1};  ///< global elements per direction
  std::vector<Box> boxes;
  std::vector<Region> regions;
  std::vector<InterfaceFace> faces;

  int patch_count() const { return counts[0] * counts[1] * counts[2]; }
  int patch_id(int px, int py, int pz) const { return px + counts[0] * (py + counts[1] * pz); }
  std::array<int, 3> patch_coords(int id) const;
  std::array<int, 3> patch_elements() const;
  bool is_conductor(int patch) const { return regions[patch] == Region::Conductor; }
};

/// Decides the region of a patch from its box.
using RegionPredicate = std::function<Region(const Box&)>;

/// Conductor where the patch center has x < 0.5.
Region default_region(const Box& patch);

PatchGrid build_patch_grid(const Box& domain, std::array<int, 3> counts, const RegionPredicate& region,
                           std::array<int, 3> divisions);

std::vector<CurlSpace> build_patch_spaces(const PatchGrid& grid, int degree);

enum class DofKind { Interior, Face, Wirebasket, Dirichlet };

struct DofRef {
  int subdomain = 0;
  int local = 0;
  friend auto operator<=>(const DofRef&, const DofRef&) = default;
};

/// Per-subdomain classification of local DOFs.
struct DofClass {
  std::vector<std::vector<DofKind>> kind;             ///< [subdomain][local]
  std::vector<std::vector<int>> face;                 ///< interface face id for Face DOFs, else -1
  std::vector<std::vector<std::vector<DofRef>>> partners;  ///< coincident DOFs on other subdomains
};

DofClass classify_dofs(const PatchGrid& grid, const std::vector<CurlSpace>& spaces);

/// Glued scalar control lattice; edges are in bijection with glued vector DOFs.
struct GraphEdge {
  int v0 = 0;
  int v1 = 0;
  int component = 0;
  DofKind kind = DofKind::Interior;
  int face = -1;
  std::vector<DofRef> dofs;  ///< subdomain-local DOFs carried by this edge, sorted by subdomain
};

struct ControlGraph {
  std::array<int, 3> vertex_dims{};
  std::vector<GraphEdge> edges;
  std::vector<std::vector<int>> dof_edge;   ///< [subdomain][local] -> edge id
  std::vector<std::vector<int>> incidence;  ///< vertex -> incident edge ids, ascending

  int vertex_count() const { return vertex_dims[0] * vertex_dims[1] * vertex_dims[2]; }
  int edge_count() const { return static_cast<int>(edges.size()); }
  bool connected() const;
};

ControlGraph build_control_graph(const PatchGrid& grid, const std::vector<CurlSpace>& spaces,
                                 const DofClass& classes);

}  // namespace eddy
