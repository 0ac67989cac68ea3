#include "mtobs/observability.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mtobs/matrix_ops.hpp"

namespace mtobs {

void StructuredMatrix::set(int r, int c) {
  if (r < 0 || r >= rows || c < 0 || c >= cols)
    throw std::out_of_range("pattern index (" + std::to_string(r) + ", " +
                            std::to_string(c) + ") out of range");
  nonzeros.insert({r, c});
}

bool StructuredMatrix::diagonal_full() const {
  for (int i = 0; i < std::min(rows, cols); ++i)
    if (!nonzeros.count({i, i})) return false;
  return true;
}

StructuredMatrix StructuredMatrix::from_dense(const Eigen::MatrixXd& m) {
  StructuredMatrix s(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < s.rows; ++i)
    for (int j = 0; j < s.cols; ++j)
      if (m(i, j) != 0.0) s.nonzeros.insert({i, j});
  return s;
}

std::string ObservabilityVerdict::to_key_values() const {
  std::ostringstream out;
  out << "observable=" << (observable ? "true" : "false") << "\n";
  out << "redundancy_level=" << redundancy_level << "\n";
  out << "uncovered=[";
  for (size_t c = 0; c < uncovered_parent_components.size(); ++c) {
    if (c) out << ",";
    out << "{";
    for (size_t i = 0; i < uncovered_parent_components[c].size(); ++i) {
      if (i) out << ",";
      out << uncovered_parent_components[c][i];
    }
    out << "}";
  }
  out << "]\n";
  for (const auto& [name, pass] : diagnostics)
    out << name << "=" << (pass ? "pass" : "fail") << "\n";
  return out.str();
}

DirectedGraph system_digraph(const StructuredMatrix& a) {
  if (!a.is_square()) throw std::invalid_argument("system digraph needs a square pattern");
  DirectedGraph g(a.rows);
  for (const auto& [i, j] : a.nonzeros) g.add_link(j, i);  // state j feeds state i
  return g;
}

namespace {

void require_self_damped(const StructuredMatrix& a) {
  if (!a.is_square()) throw std::invalid_argument("system pattern must be square");
  if (!a.diagonal_full())
    throw std::invalid_argument(
        "non-self-damped system; cyclic-graph precondition violated");
}

/// Distinct CAVs measuring at least one state of each parent SCC; empty
/// optional when some parent SCC has no measurement at all.
std::vector<int> parent_multiplicities(const SccDecomposition& scc,
                                       const SensorPlacement& placement,
                                       std::vector<std::vector<int>>* uncovered) {
  std::vector<int> mult;
  for (int c : scc.parent_components()) {
    const auto& comp = scc.components[c];
    int count = 0;
    for (const auto& list : placement.measured) {
      bool hits = false;
      for (int idx : list)
        if (std::binary_search(comp.begin(), comp.end(), idx)) hits = true;
      if (hits) ++count;
    }
    if (count == 0 && uncovered) uncovered->push_back(comp);
    mult.push_back(count);
  }
  return mult;
}

}  // namespace

ObservabilityVerdict centralized_structural_observability(const StructuredMatrix& a,
                                                          const SensorPlacement& placement) {
  require_self_damped(a);
  placement.validate(a.rows);
  const auto scc = scc_decompose(system_digraph(a));

  ObservabilityVerdict v;
  v.diagnostics.emplace_back("self_damped", true);
  const auto mult = parent_multiplicities(scc, placement, &v.uncovered_parent_components);
  v.observable = v.uncovered_parent_components.empty();
  v.diagnostics.emplace_back("parent_coverage", v.observable);
  v.redundancy_level =
      v.observable ? *std::min_element(mult.begin(), mult.end()) : 0;
  return v;
}

ObservabilityVerdict distributed_structural_observability(const StructuredMatrix& a,
                                                          const DirectedGraph& w_graph,
                                                          const SensorPlacement& placement) {
  if (w_graph.node_count() != placement.cav_count)
    throw std::invalid_argument("w_graph size does not match placement.cav_count");
  for (int i = 0; i < w_graph.node_count(); ++i)
    if (!w_graph.has_self_loop(i))
      throw std::invalid_argument("CAV " + std::to_string(i) +
                                  " has no self-loop; each CAV must use its own estimate");

  ObservabilityVerdict v = centralized_structural_observability(a, placement);
  const bool sc = is_strongly_connected(w_graph);
  v.diagnostics.emplace_back("strong_connectivity", sc);
  // Strong connectivity is sufficient, not necessary, once parent coverage
  // holds; the verdict reports the sufficiency-based answer.
  const bool cent = v.observable;
  v.observable = cent && sc;
  if (!v.observable) {
    v.redundancy_level = 0;
    return v;
  }

  int network_level = std::numeric_limits<int>::max();  // n = 1: nothing to remove
  if (w_graph.node_count() >= 2)
    network_level = std::min(node_connectivity(w_graph), link_connectivity(w_graph));
  v.redundancy_level = std::min(v.redundancy_level, network_level);
  return v;
}

int redundant_observability_level(const StructuredMatrix& a, const DirectedGraph& w_graph,
                                  const SensorPlacement& placement) {
  return distributed_structural_observability(a, w_graph, placement).redundancy_level;
}

bool numeric_observability_check(const Eigen::MatrixXd& a_matrix,
                                 const Eigen::MatrixXd& w_matrix,
                                 const SensorPlacement& placement,
                                 double rank_tol_factor) {
  if (a_matrix.rows() != a_matrix.cols())
    throw std::invalid_argument("A must be square");
  if (!is_row_stochastic(w_matrix))
    throw std::invalid_argument("W is not row-stochastic within 1e-9");
  const int n = static_cast<int>(w_matrix.rows());
  const int da = static_cast<int>(a_matrix.rows());
  placement.validate(da);
  if (placement.cav_count != n)
    throw std::invalid_argument("W size does not match placement.cav_count");

  // neighborhoods from the support of W: w_ij != 0 means j sends to i
  DirectedGraph support(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (w_matrix(i, j) != 0.0) support.add_link(j, i);
  const Eigen::MatrixXd dc = build_dc(placement, support.with_self_loops(), da);

  const int d = n * da;
  if (d > 128)
    throw std::invalid_argument(
        "numeric observability check is sized for desk-scale problems (dim <= 128)");
  const Eigen::MatrixXd q = kronecker(w_matrix, a_matrix);
  Eigen::MatrixXd obs(d * d, d);
  Eigen::MatrixXd block = dc;
  for (int k = 0; k < d; ++k) {
    obs.middleRows(k * d, d) = block;
    if (k + 1 < d) block = block * q;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(obs);
  const auto& sv = svd.singularValues();
  const double factor = rank_tol_factor > 0.0
                            ? rank_tol_factor
                            : d * std::numeric_limits<double>::epsilon();
  const double thresh = factor * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  return rank == d;
}

}  // namespace mtobs
