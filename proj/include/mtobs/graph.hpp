#ifndef MTOBS_GRAPH_HPP
#define MTOBS_GRAPH_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace mtobs {

using Link = std::pair<int, int>;  // (source, target): source sends to target

/// Directed graph over nodes 0..node_count-1. Self-loops allowed, duplicate
/// links rejected. A link carries an optional real weight.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(int node_count);

  int node_count() const { return node_count_; }
  int link_count() const { return static_cast<int>(links_.size()); }

  void add_link(int src, int dst);
  void add_link(int src, int dst, double weight);
  bool has_link(int src, int dst) const;
  std::optional<double> weight(int src, int dst) const;

  /// Links in lexicographic order; iteration order is deterministic.
  std::vector<Link> links() const;

  /// In-neighbors of node i: all j with a link j -> i. Includes i when a
  /// self-loop is present.
  std::vector<int> in_neighbors(int node) const;
  std::vector<int> out_neighbors(int node) const;

  bool has_self_loop(int node) const { return has_link(node, node); }
  bool all_self_loops() const;

  /// Copy with both directions present for every link (weights dropped).
  DirectedGraph symmetrized() const;

  /// Copy with every missing self-loop added (unweighted).
  DirectedGraph with_self_loops() const;

  bool operator==(const DirectedGraph& other) const = default;

  // named topologies (all bidirectional, no self-loops)
  static DirectedGraph complete(int n);
  static DirectedGraph cycle(int n);
  static DirectedGraph star(int n);
  static DirectedGraph path(int n);
  /// m-nearest neighbour ring: each node linked to its m nearest on each side.
  static DirectedGraph ring(int n, int m);

  // text format: header "nodes N", then one "i j [w]" line per link
  static DirectedGraph parse(std::istream& in);
  static DirectedGraph parse_string(const std::string& text);
  std::string serialize() const;

 private:
  void check_node(int node) const;

  int node_count_ = 0;
  std::map<Link, std::optional<double>> links_;
};

/// Strongly connected components with their condensation DAG.
struct SccDecomposition {
  std::vector<std::vector<int>> components;  // each sorted; disjoint cover
  std::vector<int> component_of;             // node -> component index
  DirectedGraph condensation;                // acyclic, no self-loops
  std::vector<bool> parent_flags;  // true iff no outgoing condensation link

  std::vector<int> parent_components() const;
};

SccDecomposition scc_decompose(const DirectedGraph& g);

bool is_strongly_connected(const DirectedGraph& g);

/// Max number of link-disjoint s -> t paths (unit-capacity max-flow).
int link_disjoint_path_count(const DirectedGraph& g, int s, int t);

/// Max number of internally node-disjoint s -> t paths (node-split max-flow;
/// a direct s -> t link counts as one path).
int node_disjoint_path_count(const DirectedGraph& g, int s, int t);

/// Minimum over ordered node pairs of the max number of link-disjoint paths
/// (unit capacity max-flow). Self-loops are ignored. Throws on n < 2.
int link_connectivity(const DirectedGraph& g);

/// Minimum over non-adjacent ordered pairs of the max number of internally
/// node-disjoint paths (node-split max-flow). Graphs where every ordered pair
/// is adjacent (e.g. complete) yield n - 1.
int node_connectivity(const DirectedGraph& g);

/// Induced subgraph after deleting the given nodes and links. Surviving nodes
/// are renumbered 0..k-1 preserving relative order. Throws if a removed
/// entity does not exist.
DirectedGraph survives_removal(const DirectedGraph& g,
                               const std::set<int>& removed_nodes,
                               const std::set<Link>& removed_links);

}  // namespace mtobs

#endif
