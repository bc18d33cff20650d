#pragma once

#include <string>
#include <vector>

#include "eddy/topology.hpp"

namespace eddy {

enum class TreeOrder { Lexicographic, Reversed };

/// Construction phases, in the order edges are admitted.
enum class TreePhase { Wirebasket, Face, Dirichlet, Interior };

const char* to_string(TreePhase phase);
const char* to_string(TreeOrder order);
TreeOrder parse_tree_order(const std::string& text);

struct TreeLogEntry {
  int edge = 0;
  TreePhase phase = TreePhase::Interior;
};

struct SpanningTree {
  TreeOrder order = TreeOrder::Lexicographic;
  std::vector<int> edges;           ///< admitted edges, in admission order
  std::vector<char> in_tree;        ///< per graph edge
  std::vector<int> parent_edge;     ///< per vertex, tree edge towards vertex 0 (-1 at the root)
  std::vector<TreeLogEntry> log;

  int size() const { return static_cast<int>(edges.size()); }
  std::string log_text(const ControlGraph& graph) const;
};

/// Spanning tree grown breadth-first, one DOF class at a time: wirebasket,
/// face, Dirichlet, then interior edges.
SpanningTree build_tree(const ControlGraph& graph, TreeOrder order = TreeOrder::Lexicographic);

/// Acyclic and spanning (union-find replay).
bool is_spanning_tree(const ControlGraph& graph, const SpanningTree& tree);
/// Every phase leaves no edge of its class that could still join two components.
bool satisfies_phase_property(const ControlGraph& graph, const SpanningTree& tree);

TreePhase phase_of(DofKind kind);

enum class DofRole { Dirichlet, Gauge, Primal, Remaining };

struct SubdomainPartition {
  std::vector<DofRole> role;    ///< per local DOF
  std::vector<int> eliminated;  ///< sorted local indices (Dirichlet and gauge)
  std::vector<int> primal;
  std::vector<int> remaining;
  std::vector<int> position;    ///< local DOF -> index inside its set
  std::vector<int> primal_group;  ///< per primal position -> global group

  int size() const { return static_cast<int>(role.size()); }
};

struct DofPartition {
  std::vector<SubdomainPartition> subdomains;
  std::vector<std::vector<DofRef>> primal_groups;  ///< coincident primal DOFs sharing one unknown

  int subdomain_count() const { return static_cast<int>(subdomains.size()); }
  int primal_count() const { return static_cast<int>(primal_groups.size()); }
};

DofPartition partition_dofs(const SpanningTree& tree, const ControlGraph& graph, const DofClass& classes,
                            const std::vector<Region>& regions);

/// One constraint row: +1 on `plus`, -1 on `minus`; indices are local DOFs.
struct Constraint {
  DofRef plus;
  DofRef minus;
};

struct CouplingMatrices {
  std::vector<Constraint> dual_rows;      ///< rows of B_rr
  std::vector<Constraint> primal_rows;    ///< rows of B_pp
  std::vector<SparseMatrix> b_rr;         ///< per subdomain, m_r x |R_s|
  std::vector<SparseMatrix> b_pp;         ///< per subdomain, m_p x |P_s|
  std::vector<SparseMatrix> n;            ///< per subdomain, |P_s| x pri

  int dual_count() const { return static_cast<int>(dual_rows.size()); }
};

/// B_rr rows are ordered by (interface face, control edge); wirebasket rows
/// come after all face rows. DOFs shared by k subdomains give k-1 chained rows.
CouplingMatrices build_coupling(const DofPartition& partition, const ControlGraph& graph);

struct DimensionReport {
  struct Counts {
    int total = 0, eliminated = 0, primal = 0, remaining = 0;
  };
  std::vector<Counts> subdomains;
  int dual = 0;  ///< m_r
  int pri = 0;   ///< number of primal groups
};

DimensionReport gauge_fixed_dimension_report(const DofPartition& partition, const CouplingMatrices& coupling);

}  // namespace eddy
