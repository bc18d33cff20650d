#include "eddy/gauge.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <tuple>
#include <numeric>
#include <queue>
#include <sstream>

#include "eddy/errors.hpp"

namespace eddy {

const char* to_string(TreePhase phase) {
  switch (phase) {
    case TreePhase::Wirebasket: return "wirebasket";
    case TreePhase::Face: return "face";
    case TreePhase::Dirichlet: return "dirichlet";
    case TreePhase::Interior: return "interior";
  }
  return "?";
}

const char* to_string(TreeOrder order) { return order == TreeOrder::Lexicographic ? "lex" : "reversed"; }

TreeOrder parse_tree_order(const std::string& text) {
  if (text == "lex" || text == "lexicographic") return TreeOrder::Lexicographic;
  if (text == "reversed" || text == "rev") return TreeOrder::Reversed;
  throw InputError("unknown tree order '" + text + "' (expected lex or reversed)");
}

TreePhase phase_of(DofKind kind) {
  switch (kind) {
    case DofKind::Wirebasket: return TreePhase::Wirebasket;
    case DofKind::Face: return TreePhase::Face;
    case DofKind::Dirichlet: return TreePhase::Dirichlet;
    case DofKind::Interior: return TreePhase::Interior;
  }
  return TreePhase::Interior;
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<int> parent_;
};

constexpr TreePhase kPhases[] = {TreePhase::Wirebasket, TreePhase::Face, TreePhase::Dirichlet,
                                 TreePhase::Interior};

}  // namespace

SpanningTree build_tree(const ControlGraph& graph, TreeOrder order) {
  const int nv = graph.vertex_count();
  const bool reversed = order == TreeOrder::Reversed;
  SpanningTree tree;
  tree.order = order;
  tree.in_tree.assign(graph.edge_count(), 0);
  UnionFind uf(nv);
  std::vector<char> attached(nv, 0);

  for (TreePhase phase : kPhases) {
    std::vector<char> touched(nv, 0);
    bool any = false;
    for (const auto& e : graph.edges)
      if (phase_of(e.kind) == phase) {
        touched[e.v0] = touched[e.v1] = 1;
        any = true;
      }
    if (!any) continue;

    // grow from the existing forest first, then from fresh vertices
    std::vector<int> seeds;
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < nv; ++k) {
        const int v = reversed ? nv - 1 - k : k;
        if (touched[v] && (attached[v] != 0) == (pass == 0)) seeds.push_back(v);
      }

    std::vector<char> visited(nv, 0);
    std::queue<int> queue;
    for (int seed : seeds) {
      if (visited[seed]) continue;
      visited[seed] = 1;
      queue.push(seed);
      while (!queue.empty()) {
        const int v = queue.front();
        queue.pop();
        const auto& inc = graph.incidence[v];
        for (std::size_t k = 0; k < inc.size(); ++k) {
          const int id = reversed ? inc[inc.size() - 1 - k] : inc[k];
          const auto& e = graph.edges[id];
          if (phase_of(e.kind) != phase) continue;
          const int u = e.v0 == v ? e.v1 : e.v0;
          if (uf.unite(u, v)) {
            tree.in_tree[id] = 1;
            tree.edges.push_back(id);
            tree.log.push_back({id, phase});
            attached[u] = attached[v] = 1;
          }
          if (!visited[u]) {
            visited[u] = 1;
            queue.push(u);
          }
        }
      }
    }
  }

  if (tree.size() != nv - 1) throw ConfigurationError("control graph is disconnected; no spanning tree exists");

  tree.parent_edge.assign(nv, -1);
  std::vector<char> seen(nv, 0);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    for (int id : graph.incidence[v]) {
      if (!tree.in_tree[id]) continue;
      const auto& e = graph.edges[id];
      const int u = e.v0 == v ? e.v1 : e.v0;
      if (seen[u]) continue;
      seen[u] = 1;
      tree.parent_edge[u] = id;
      queue.push(u);
    }
  }
  return tree;
}

std::string SpanningTree::log_text(const ControlGraph& graph) const {
  std::ostringstream os;
  os << "# tree order=" << to_string(order) << " vertices=" << graph.vertex_count() << " edges=" << size() << '\n';
  for (const auto& entry : log) {
    const auto& e = graph.edges[entry.edge];
    os << to_string(entry.phase) << ' ' << entry.edge << ' ' << e.v0 << ' ' << e.v1 << '\n';
  }
  return os.str();
}

bool is_spanning_tree(const ControlGraph& graph, const SpanningTree& tree) {
  if (tree.size() != graph.vertex_count() - 1) return false;
  UnionFind uf(graph.vertex_count());
  for (int id : tree.edges)
    if (!uf.unite(graph.edges[id].v0, graph.edges[id].v1)) return false;
  return true;
}

bool satisfies_phase_property(const ControlGraph& graph, const SpanningTree& tree) {
  UnionFind uf(graph.vertex_count());
  std::size_t next = 0;
  for (TreePhase phase : kPhases) {
    while (next < tree.log.size() && tree.log[next].phase == phase) {
      const auto& entry = tree.log[next];
      if (phase_of(graph.edges[entry.edge].kind) != phase) return false;
      uf.unite(graph.edges[entry.edge].v0, graph.edges[entry.edge].v1);
      ++next;
    }
    // maximality: no edge of this class joins two components once the phase ends
    for (const auto& e : graph.edges)
      if (phase_of(e.kind) == phase && uf.find(e.v0) != uf.find(e.v1)) return false;
  }
  return next == tree.log.size();
}

DofPartition partition_dofs(const SpanningTree& tree, const ControlGraph& graph, const DofClass& classes,
                            const std::vector<Region>& regions) {
  const int ns = static_cast<int>(classes.kind.size());
  if (static_cast<int>(regions.size()) != ns) throw InputError("one region per subdomain required");
  DofPartition part;
  part.subdomains.resize(ns);

  // groups in control-edge order
  std::vector<int> group_of_edge(graph.edge_count(), -1);
  for (int id = 0; id < graph.edge_count(); ++id) {
    const auto& e = graph.edges[id];
    if (!tree.in_tree[id] || (e.kind != DofKind::Face && e.kind != DofKind::Wirebasket)) continue;
    if (e.dofs.size() < 2) throw InternalError("primal group with members in only one subdomain");
    group_of_edge[id] = part.primal_count();
    part.primal_groups.push_back(e.dofs);
  }

  for (int s = 0; s < ns; ++s) {
    auto& sp = part.subdomains[s];
    const int n = static_cast<int>(classes.kind[s].size());
    sp.role.resize(n);
    sp.position.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      const int id = graph.dof_edge[s][i];
      const DofKind kind = classes.kind[s][i];
      DofRole role = DofRole::Remaining;
      if (kind == DofKind::Dirichlet) {
        role = DofRole::Dirichlet;
      } else if (tree.in_tree[id] && (kind == DofKind::Face || kind == DofKind::Wirebasket)) {
        role = DofRole::Primal;
      } else if (tree.in_tree[id] && kind == DofKind::Interior && regions[s] == Region::Insulator) {
        role = DofRole::Gauge;
      }
      sp.role[i] = role;
      switch (role) {
        case DofRole::Dirichlet:
        case DofRole::Gauge:
          sp.position[i] = static_cast<int>(sp.eliminated.size());
          sp.eliminated.push_back(i);
          break;
        case DofRole::Primal:
          sp.position[i] = static_cast<int>(sp.primal.size());
          sp.primal.push_back(i);
          sp.primal_group.push_back(group_of_edge[id]);
          break;
        case DofRole::Remaining:
          sp.position[i] = static_cast<int>(sp.remaining.size());
          sp.remaining.push_back(i);
          break;
      }
    }
    for (int i = 0; i < n; ++i)
      if (sp.position[i] < 0) throw InternalError("DOF left unassigned by the partition");
  }
  return part;
}

namespace {

SparseMatrix signed_rows(const std::vector<Constraint>& rows, int subdomain, int cols,
                         const DofPartition& part) {
  std::vector<Eigen::Triplet<double>> trip;
  const auto& sp = part.subdomains[subdomain];
  for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
    if (rows[r].plus.subdomain == subdomain) trip.emplace_back(r, sp.position[rows[r].plus.local], 1.0);
    if (rows[r].minus.subdomain == subdomain) trip.emplace_back(r, sp.position[rows[r].minus.local], -1.0);
  }
  SparseMatrix m(static_cast<int>(rows.size()), cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

}  // namespace

CouplingMatrices build_coupling(const DofPartition& partition, const ControlGraph& graph) {
  CouplingMatrices cm;
  for (const auto& g : partition.primal_groups) {
    std::set<int> owners;
    for (const auto& r : g) owners.insert(r.subdomain);
    if (owners.size() < 2) throw InternalError("primal group with members in a single subdomain");
  }
  struct Keyed {
    int face;
    int edge;
  };
  std::vector<Keyed> dual_edges, primal_edges;
  for (int id = 0; id < graph.edge_count(); ++id) {
    const auto& e = graph.edges[id];
    if (e.dofs.size() < 2 || e.kind == DofKind::Dirichlet) continue;
    const auto& first = e.dofs.front();
    const DofRole role = partition.subdomains[first.subdomain].role[first.local];
    for (const auto& r : e.dofs)
      if (partition.subdomains[r.subdomain].role[r.local] != role)
        throw InternalError("coincident interface DOFs received different roles");
    const int face = e.kind == DofKind::Wirebasket ? INT_MAX : e.face;
    if (role == DofRole::Remaining) dual_edges.push_back({face, id});
    else if (role == DofRole::Primal) primal_edges.push_back({face, id});
  }
  auto by_key = [](const Keyed& a, const Keyed& b) { return std::tie(a.face, a.edge) < std::tie(b.face, b.edge); };
  std::sort(dual_edges.begin(), dual_edges.end(), by_key);
  std::sort(primal_edges.begin(), primal_edges.end(), by_key);
  auto chain = [&](const std::vector<Keyed>& edges, std::vector<Constraint>& rows) {
    for (const auto& k : edges) {
      const auto& dofs = graph.edges[k.edge].dofs;
      for (std::size_t m = 0; m + 1 < dofs.size(); ++m) rows.push_back({dofs[m], dofs[m + 1]});
    }
  };
  chain(dual_edges, cm.dual_rows);
  chain(primal_edges, cm.primal_rows);

  const int ns = partition.subdomain_count();
  for (int s = 0; s < ns; ++s) {
    const auto& sp = partition.subdomains[s];
    cm.b_rr.push_back(signed_rows(cm.dual_rows, s, static_cast<int>(sp.remaining.size()), partition));
    cm.b_pp.push_back(signed_rows(cm.primal_rows, s, static_cast<int>(sp.primal.size()), partition));
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < static_cast<int>(sp.primal.size()); ++k) trip.emplace_back(k, sp.primal_group[k], 1.0);
    SparseMatrix n(static_cast<int>(sp.primal.size()), partition.primal_count());
    n.setFromTriplets(trip.begin(), trip.end());
    n.makeCompressed();
    cm.n.push_back(std::move(n));
  }
  return cm;
}

DimensionReport gauge_fixed_dimension_report(const DofPartition& partition, const CouplingMatrices& coupling) {
  DimensionReport rep;
  for (const auto& sp : partition.subdomains) {
    DimensionReport::Counts c;
    c.total = sp.size();
    c.eliminated = static_cast<int>(sp.eliminated.size());
    c.primal = static_cast<int>(sp.primal.size());
    c.remaining = static_cast<int>(sp.remaining.size());
    if (c.eliminated + c.primal + c.remaining != c.total) throw InternalError("partition does not cover all DOFs");
    rep.subdomains.push_back(c);
  }
  rep.dual = coupling.dual_count();
  rep.pri = partition.primal_count();
  return rep;
}

}  // namespace eddy
