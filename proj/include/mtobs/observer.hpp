#ifndef MTOBS_OBSERVER_HPP
#define MTOBS_OBSERVER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtobs/gain.hpp"
#include "mtobs/placement.hpp"
#include "mtobs/scenario.hpp"
#include "mtobs/traffic.hpp"

namespace mtobs {

struct ObserverState {
  std::vector<Eigen::VectorXd> estimates;  // one per CAV, length N*m
  int step = 0;
};

/// One observer iteration: consensus prediction over the W support, then the
/// neighborhood innovation
///   xhat_i <- pred_i + K_i sum_{j in N_i} C_j^T (y_j - C_j pred_i),
/// whose stacked error matrix is exactly (I - K D_C)(W (x) A). CAVs whose
/// neighborhood carries no sensors run prediction only.
ObserverState observer_step(const ObserverState& states, const Eigen::MatrixXd& w,
                            const Eigen::MatrixXd& a_global, const ObserverGain& gain,
                            const SensorPlacement& placement,
                            const std::vector<Eigen::VectorXd>& measurements);

struct SimulationTrace {
  int state_dim = 0;  // N*m
  int cav_count = 0;  // estimators: n for distributed, 1 for the central filter
  GroundTruth truth;
  std::vector<Eigen::VectorXd> truth_state;  // observer-model coordinates, per step
  // estimates[k][i]: estimator i at step k; disengaged (removed) CAVs are empty
  std::vector<std::vector<std::optional<Eigen::VectorXd>>> estimates;
  std::vector<std::vector<double>> squared_error;  // [cav][step], NaN once removed
  std::vector<double> disagreement;  // max pairwise estimate distance, per step
  std::vector<std::string> event_log;
  bool centralized = false;

  int horizon() const { return static_cast<int>(truth_state.size()) - 1; }
};

/// Runs the consensus observer against the ground-truth traffic simulation,
/// applying scheduled faults (weight renewal, optional gain redesign).
/// Deterministic per seed; the measurement noise stream is shared with
/// run_centralized_kalman for paired comparisons.
SimulationTrace run_distributed(const Scenario& sc, const ObserverGain& gain,
                                std::optional<int> horizon_override = {},
                                std::optional<std::uint64_t> seed_override = {});

/// Synthesizes the gain from the scenario's config, then runs.
SimulationTrace run_distributed_auto(const Scenario& sc,
                                     std::optional<int> horizon_override = {},
                                     std::optional<std::uint64_t> seed_override = {});

/// Central benchmark: a standard Kalman filter over the stacked outputs of
/// all CAV sensors, fed the same measurement realizations as the distributed
/// run for the same seed.
SimulationTrace run_centralized_kalman(const Scenario& sc,
                                       std::optional<int> horizon_override = {},
                                       std::optional<std::uint64_t> seed_override = {});

struct MseeSummary {
  std::vector<double> position_per_cav;
  std::vector<double> velocity_per_cav;
  double position_aggregate = 0.0;
  double velocity_aggregate = 0.0;
  std::vector<double> disagreement;  // copied from the trace

  std::string to_key_values() const;
};

/// Mean squared estimation error split into position and velocity components
/// (averaged over HDVs and steps >= steady_start while the CAV is active).
MseeSummary compute_metrics(const SimulationTrace& trace, int steady_start = 0);

std::string trace_csv(const SimulationTrace& trace);

}  // namespace mtobs

#endif
