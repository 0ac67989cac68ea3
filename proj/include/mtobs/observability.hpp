#ifndef MTOBS_OBSERVABILITY_HPP
#define MTOBS_OBSERVABILITY_HPP

#include <Eigen/Dense>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mtobs/graph.hpp"
#include "mtobs/placement.hpp"

namespace mtobs {

/// Zero/nonzero sparsity pattern of a matrix, decoupled from numeric values.
struct StructuredMatrix {
  int rows = 0;
  int cols = 0;
  std::set<std::pair<int, int>> nonzeros;  // (row, col)

  StructuredMatrix() = default;
  StructuredMatrix(int r, int c) : rows(r), cols(c) {}

  void set(int r, int c);
  bool is_square() const { return rows == cols; }
  bool diagonal_full() const;

  /// Pattern of a dense matrix (exact zero test).
  static StructuredMatrix from_dense(const Eigen::MatrixXd& m);
};

struct ObservabilityVerdict {
  bool observable = false;
  std::vector<std::vector<int>> uncovered_parent_components;
  int redundancy_level = 0;
  std::vector<std::pair<std::string, bool>> diagnostics;  // condition -> pass

  /// Machine-readable key-value block (observable=..., redundancy_level=...,
  /// uncovered=[...], one diagnostic per line).
  std::string to_key_values() const;
};

/// System digraph of a square pattern: one node per state, link j -> i for
/// every nonzero (i, j) entry. Diagonal nonzeros become self-loops.
DirectedGraph system_digraph(const StructuredMatrix& a);

/// Theorem-level structural test: observable iff every parent SCC of the
/// system digraph contains a measured state. Requires a fully nonzero
/// diagonal (self-damped dynamics, cyclic system graph).
ObservabilityVerdict centralized_structural_observability(const StructuredMatrix& a,
                                                          const SensorPlacement& placement);

/// Sufficient distributed test: centralized observability plus a strongly
/// connected CAV graph with self-loops everywhere.
ObservabilityVerdict distributed_structural_observability(const StructuredMatrix& a,
                                                          const DirectedGraph& w_graph,
                                                          const SensorPlacement& placement);

/// Largest q such that every parent SCC is measured by at least q distinct
/// CAVs and the CAV graph is q-node/link-connected. 0 when not observable.
int redundant_observability_level(const StructuredMatrix& a, const DirectedGraph& w_graph,
                                  const SensorPlacement& placement);

/// Numeric full-rank test of the observability matrix of (W (x) A, D_C).
/// rank_tol_factor <= 0 selects the default dim * machine-epsilon threshold
/// (relative to the largest singular value).
bool numeric_observability_check(const Eigen::MatrixXd& a_matrix,
                                 const Eigen::MatrixXd& w_matrix,
                                 const SensorPlacement& placement,
                                 double rank_tol_factor = 0.0);

}  // namespace mtobs

#endif
