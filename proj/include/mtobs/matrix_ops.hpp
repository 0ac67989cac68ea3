#ifndef MTOBS_MATRIX_OPS_HPP
#define MTOBS_MATRIX_OPS_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "mtobs/gain.hpp"
#include "mtobs/graph.hpp"
#include "mtobs/placement.hpp"

namespace mtobs {

/// How consensus weights are assigned to the links of the CAV graph.
enum class WeightRule {
  uniform_neighbors,  // w_ij = 1 / |N_i|
  link_weights,       // stored link weights, row-normalized (missing = 1)
};

/// Standard Kronecker product lhs (x) rhs. Result dimensions are capped to
/// keep desk-scale problems honest about memory.
Eigen::MatrixXd kronecker(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs,
                          int max_dim = 4096);

/// Row-stochastic consensus matrix on the graph's support: w_ij is nonzero
/// iff link (j, i) exists (j sends to i). Every node needs a self-loop.
Eigen::MatrixXd build_row_stochastic(const DirectedGraph& g,
                                     WeightRule rule = WeightRule::uniform_neighbors);

/// Block-diagonal shared-observation matrix: block i is the sum of C_j^T C_j
/// over the in-neighborhood of CAV i (self included).
Eigen::MatrixXd build_dc(const SensorPlacement& placement, const DirectedGraph& w_graph,
                         int state_dim);

/// Closed-loop error matrix (I - K D_C)(W (x) A).
Eigen::MatrixXd assemble_ahat(const Eigen::MatrixXd& w, const Eigen::MatrixXd& a,
                              const ObserverGain& k, const Eigen::MatrixXd& dc);

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

bool is_row_stochastic(const Eigen::MatrixXd& w, double tol = 1e-9);

// matrix text format: "rows cols" header, then row-major entries
std::string serialize_matrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd parse_matrix(std::istream& in);
Eigen::MatrixXd parse_matrix_string(const std::string& text);

}  // namespace mtobs

#endif
