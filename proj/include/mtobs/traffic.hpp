#ifndef MTOBS_TRAFFIC_HPP
#define MTOBS_TRAFFIC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mtobs {

/// Deterministic, portable N(0, std) stream (Box-Muller over raw mt19937_64
/// bits; no reliance on implementation-defined distributions).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : state_(seed ? seed : 1) {}
  double next(double std_dev);

 private:
  double uniform01();  // in [0, 1)
  std::uint64_t next_bits();

  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Piecewise-constant desired velocity: value at step k is the last change
/// at or before k.
struct VelocityProfile {
  std::vector<std::pair<int, double>> changes;  // (step, m/s), sorted by step

  double at(int step) const;
  void add(int step, double value);

  friend bool operator==(const VelocityProfile&, const VelocityProfile&) = default;
};

struct HdvParams {
  double lambda_gain = 0.3;        // desired-velocity tracking coefficient
  int reaction_delay = 10;         // tau, in steps
  double alpha1 = 0.5;             // relative-speed gain
  double alpha2 = 0.125;           // spacing gain
  double beta1 = 4.0;              // desired headway offset, m
  double beta2 = 0.05;             // desired headway per speed, s
  double noise_std = 0.0;          // std of the free-flow noise eps(k)
  double distance_threshold = 50;  // car-following activation distance L, m
  // when set, lambda/alpha1/alpha2 are per-second rates and the ground-truth
  // simulation scales them by the sample time; the raw step updates below
  // always use the coefficients as given
  bool rate_coefficients = false;
  VelocityProfile desired_velocity;

  friend bool operator==(const HdvParams&, const HdvParams&) = default;
};

enum class DrivingMode { free_flow, car_following };

std::string to_string(DrivingMode m);

/// free-flow velocity update v(k+1) = v(k) + lambda (v_d(k) - v(k - tau)) + eps.
/// Histories shorter than the delay read their first entry.
double step_free_flow(const std::vector<double>& velocity_history, const HdvParams& params,
                      int step, double noise);

/// Helly car-following update
/// v(k+1) = v(k) + a1 dv(k - tau) + a2 (dx(k - tau) - (b1 + b2 v(k - tau))),
/// with dv, dx the front-minus-self speed and position differences.
double step_helly(const std::vector<double>& self_velocity, const std::vector<double>& self_position,
                  const std::vector<double>& front_velocity, const std::vector<double>& front_position,
                  const HdvParams& params, int step);

/// Pure threshold rule: car-following iff a front vehicle exists strictly
/// closer than the distance threshold.
DrivingMode select_mode(double self_position, std::optional<double> front_position,
                        const HdvParams& params);

struct HdvSpec {
  HdvParams params;
  double initial_position = 0.0;
  double initial_velocity = 0.0;

  friend bool operator==(const HdvSpec&, const HdvSpec&) = default;
};

struct GroundTruth {
  // state series, indexed [hdv][step], steps 0..horizon
  std::vector<std::vector<double>> position;
  std::vector<std::vector<double>> velocity;
  // mode used for the k -> k+1 transition, indexed [hdv][k]
  std::vector<std::vector<DrivingMode>> mode;
  // (step, hdv) pairs where the gap to the front vehicle went negative
  std::vector<std::pair<int, int>> collision_warnings;

  int hdv_count() const { return static_cast<int>(position.size()); }
  int horizon() const {
    return position.empty() ? 0 : static_cast<int>(position[0].size()) - 1;
  }
};

/// Front vehicle of HDV i is HDV i+1; the last HDV is the ego vehicle. One
/// noise draw per HDV per step regardless of mode, so traces are
/// reproducible for a fixed seed.
GroundTruth simulate_ground_truth(const std::vector<HdvSpec>& hdvs, double sample_time,
                                  int horizon, std::uint64_t seed);

std::string ground_truth_csv(const GroundTruth& truth);

enum class ModelKind { ncv, nca };

struct ObserverModel {
  ModelKind kind = ModelKind::ncv;
  int hdv_count = 0;
  double sample_time = 0.0;
  Eigen::MatrixXd block;   // per-HDV dynamics block
  Eigen::MatrixXd global;  // block-diagonal over all HDVs

  int state_dim_per_hdv() const { return static_cast<int>(block.rows()); }
  int state_dim() const { return static_cast<int>(global.rows()); }
  /// Global index of HDV h's position state (x position for nca).
  int position_index(int hdv) const;
  int velocity_index(int hdv) const;
};

ObserverModel build_observer_model(ModelKind kind, int hdv_count, double sample_time);

}  // namespace mtobs

#endif
