#include "mtobs/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mtobs {

std::uint64_t GaussianStream::next_bits() {
  // splitmix64: small, portable, good enough for simulation noise
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double GaussianStream::uniform01() {
  return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
}

double GaussianStream::next(double std_dev) {
  if (std_dev == 0.0) {
    // keep the draw count identical with and without noise
    uniform01();
    uniform01();
    has_spare_ = false;
    return 0.0;
  }
  if (has_spare_) {
    has_spare_ = false;
    return spare_ * std_dev;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2) * std_dev;
}

double VelocityProfile::at(int step) const {
  double value = 0.0;
  for (const auto& [s, v] : changes) {
    if (s > step) break;
    value = v;
  }
  return value;
}

void VelocityProfile::add(int step, double value) {
  changes.emplace_back(step, value);
  std::stable_sort(changes.begin(), changes.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
}

std::string to_string(DrivingMode m) {
  return m == DrivingMode::free_flow ? "free_flow" : "car_following";
}

namespace {

double delayed(const std::vector<double>& history, int step, int delay) {
  const int idx = std::max(0, step - delay);  // pad with the initial value
  return history[static_cast<size_t>(idx)];
}

}  // namespace

double step_free_flow(const std::vector<double>& velocity_history, const HdvParams& params,
                      int step, double noise) {
  const double v = velocity_history[static_cast<size_t>(step)];
  const double v_delayed = delayed(velocity_history, step, params.reaction_delay);
  return v + params.lambda_gain * (params.desired_velocity.at(step) - v_delayed) + noise;
}

double step_helly(const std::vector<double>& self_velocity, const std::vector<double>& self_position,
                  const std::vector<double>& front_velocity, const std::vector<double>& front_position,
                  const HdvParams& params, int step) {
  const int tau = params.reaction_delay;
  const double dv = delayed(front_velocity, step, tau) - delayed(self_velocity, step, tau);
  const double dx = delayed(front_position, step, tau) - delayed(self_position, step, tau);
  const double desired_gap = params.beta1 + params.beta2 * delayed(self_velocity, step, tau);
  return self_velocity[static_cast<size_t>(step)] + params.alpha1 * dv +
         params.alpha2 * (dx - desired_gap);
}

DrivingMode select_mode(double self_position, std::optional<double> front_position,
                        const HdvParams& params) {
  if (!front_position) return DrivingMode::free_flow;
  const double gap = *front_position - self_position;
  // gap exactly at the threshold counts as free flow
  return gap < params.distance_threshold ? DrivingMode::car_following
                                         : DrivingMode::free_flow;
}

GroundTruth simulate_ground_truth(const std::vector<HdvSpec>& hdvs, double sample_time,
                                  int horizon, std::uint64_t seed) {
  const int n = static_cast<int>(hdvs.size());
  if (n < 1) throw std::invalid_argument("need at least one HDV");
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  if (sample_time <= 0.0) throw std::invalid_argument("sample_time must be > 0");

  GroundTruth truth;
  truth.position.assign(n, {});
  truth.velocity.assign(n, {});
  truth.mode.assign(n, {});
  for (int h = 0; h < n; ++h) {
    truth.position[h].reserve(horizon + 1);
    truth.velocity[h].reserve(horizon + 1);
    truth.position[h].push_back(hdvs[h].initial_position);
    truth.velocity[h].push_back(hdvs[h].initial_velocity);
  }

  // per-second coefficients become per-step gains here; the steppers
  // themselves apply whatever they are handed
  std::vector<HdvParams> effective;
  effective.reserve(hdvs.size());
  for (const auto& spec : hdvs) {
    HdvParams p = spec.params;
    if (p.rate_coefficients) {
      p.lambda_gain *= sample_time;
      p.alpha1 *= sample_time;
      p.alpha2 *= sample_time;
    }
    effective.push_back(p);
  }

  GaussianStream rng(seed);
  for (int k = 0; k < horizon; ++k) {
    std::vector<double> next_v(n);
    for (int h = 0; h < n; ++h) {
      const bool has_front = h + 1 < n;
      const DrivingMode m = select_mode(
          truth.position[h][k],
          has_front ? std::optional<double>(truth.position[h + 1][k]) : std::nullopt,
          effective[h]);
      truth.mode[h].push_back(m);
      const double noise = rng.next(effective[h].noise_std);
      if (m == DrivingMode::free_flow) {
        next_v[h] = step_free_flow(truth.velocity[h], effective[h], k, noise);
      } else {
        next_v[h] = step_helly(truth.velocity[h], truth.position[h],
                               truth.velocity[h + 1], truth.position[h + 1],
                               effective[h], k);
      }
      if (has_front && truth.position[h + 1][k] - truth.position[h][k] < 0.0)
        truth.collision_warnings.emplace_back(k, h);
    }
    for (int h = 0; h < n; ++h) {
      truth.position[h].push_back(truth.position[h][k] + sample_time * truth.velocity[h][k]);
      truth.velocity[h].push_back(next_v[h]);
    }
  }
  return truth;
}

std::string ground_truth_csv(const GroundTruth& truth) {
  std::ostringstream out;
  out.precision(17);
  out << "step,hdv,mode,position_m,velocity_mps\n";
  for (int k = 0; k <= truth.horizon(); ++k)
    for (int h = 0; h < truth.hdv_count(); ++h) {
      const char* mode = k < truth.horizon()
                             ? (truth.mode[h][k] == DrivingMode::free_flow
                                    ? "free_flow"
                                    : "car_following")
                             : "end";
      out << k << "," << h << "," << mode << "," << truth.position[h][k] << ","
          << truth.velocity[h][k] << "\n";
    }
  return out.str();
}

int ObserverModel::position_index(int hdv) const {
  const int m = state_dim_per_hdv();
  return kind == ModelKind::ncv ? hdv * m : hdv * m + 4;
}

int ObserverModel::velocity_index(int hdv) const {
  const int m = state_dim_per_hdv();
  return kind == ModelKind::ncv ? hdv * m + 1 : hdv * m + 2;
}

ObserverModel build_observer_model(ModelKind kind, int hdv_count, double sample_time) {
  if (hdv_count < 1) throw std::invalid_argument("hdv_count must be >= 1");
  if (sample_time < 0.0) throw std::invalid_argument("sample_time must be >= 0");
  ObserverModel model;
  model.kind = kind;
  model.hdv_count = hdv_count;
  model.sample_time = sample_time;
  const double t = sample_time;
  if (kind == ModelKind::ncv) {
    model.block = Eigen::MatrixXd{{1.0, t}, {0.0, 1.0}};
  } else {
    // state order: ax, ay, vx, vy, px, py
    model.block = Eigen::MatrixXd::Identity(6, 6);
    model.block(2, 0) = t;
    model.block(3, 1) = t;
    model.block(4, 0) = t * t / 2.0;
    model.block(4, 2) = t;
    model.block(5, 1) = t * t / 2.0;
    model.block(5, 3) = t;
  }
  const int m = static_cast<int>(model.block.rows());
  model.global = Eigen::MatrixXd::Zero(hdv_count * m, hdv_count * m);
  for (int h = 0; h < hdv_count; ++h)
    model.global.block(h * m, h * m, m, m) = model.block;
  return model;
}

}  // namespace mtobs
