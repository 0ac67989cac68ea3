#ifndef MTOBS_SDP_HPP
#define MTOBS_SDP_HPP

#include <Eigen/Dense>
#include <vector>

// Minimal dense log-barrier solver for linear-matrix-inequality problems
//   minimize c^T v   subject to   M(v) = M0 + sum_k v_k S_k  >  0,
// with each S_k a sparse symmetric coefficient matrix. Internal to the gain
// synthesis; sized for desk-scale problems (M up to a few hundred rows).
namespace mtobs::sdp {

struct Entry {
  int row;
  int col;
  double value;
};

struct Problem {
  int dim = 0;                              // M is dim x dim
  Eigen::MatrixXd constant;                 // M0, symmetric
  std::vector<std::vector<Entry>> vars;     // S_k as full (both-halves) entries
  Eigen::VectorXd objective;                // c, one per variable
};

struct Options {
  double t_init = 1.0;
  double t_mult = 10.0;
  double t_max = 1e5;
  int newton_budget = 200;      // total Newton steps across all stages
  double newton_tol = 1e-8;     // stop a stage when decrement^2 / 2 falls below
  double ridge = 1e-11;         // Hessian regularization
};

struct Result {
  Eigen::VectorXd v;
  bool ok = false;          // path stayed strictly feasible and made progress
  int newton_steps = 0;
};

Eigen::MatrixXd assemble(const Problem& p, const Eigen::VectorXd& v);

/// v0 must be strictly feasible (M(v0) > 0); throws otherwise.
Result barrier_minimize(const Problem& p, const Eigen::VectorXd& v0, const Options& opt);

}  // namespace mtobs::sdp

#endif
