#ifndef MTOBS_GAIN_SYNTHESIS_HPP
#define MTOBS_GAIN_SYNTHESIS_HPP

#include <Eigen/Dense>
#include <string>

#include "mtobs/gain.hpp"

namespace mtobs {

enum class GainMethod { ccl, spectral_descent };

std::string to_string(GainMethod m);
GainMethod gain_method_from_string(const std::string& s);

struct SynthesisConfig {
  GainMethod method = GainMethod::ccl;
  double margin = 1e-3;  // target spectral radius is 1 - margin

  /// Expected block count; -1 means one block per CAV. Any other request is
  /// rejected: the design problem is block-diagonal by construction.
  int requested_blocks = -1;

  // cone-complementarity settings
  int ccl_max_outer = 50;
  double ccl_tol = 1e-6;        // stall when linearized objective - 2 dim < tol
  int ccl_newton_budget = 150;  // total inner Newton steps, keeps runtime bounded
  double sdp_t_max = 1e4;

  // derivative-free fallback settings
  int descent_max_sweeps = 80;
  double descent_init_step = 0.2;
  double descent_shrink = 0.5;
  double descent_min_step = 1e-4;

  bool allow_fallback = true;  // ccl falls back to spectral descent on failure

  friend bool operator==(const SynthesisConfig&, const SynthesisConfig&) = default;
};

struct SynthesisResult {
  ObserverGain gain;
  double achieved_spectral_radius = 0.0;
  GainMethod method = GainMethod::ccl;
  int iterations = 0;
  bool converged = false;
};

/// Designs a block-diagonal K such that (I - K D_C)(W (x) A) is Schur stable.
/// Deterministic: identical inputs and config give an identical result.
SynthesisResult synthesize_gain(const Eigen::MatrixXd& w, const Eigen::MatrixXd& a,
                                const Eigen::MatrixXd& dc,
                                const SynthesisConfig& cfg = {});

}  // namespace mtobs

#endif
