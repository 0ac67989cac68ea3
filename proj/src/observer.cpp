#include "mtobs/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mtobs/gain_synthesis.hpp"
#include "mtobs/matrix_ops.hpp"
#include "mtobs/observability.hpp"

namespace mtobs {

namespace {

constexpr std::uint64_t kMeasurementStreamSalt = 0x6d65617375726531ull;

Eigen::VectorXd embed_truth(const GroundTruth& truth, const ObserverModel& om, int k) {
  const int n = truth.hdv_count();
  const int m = om.state_dim_per_hdv();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n * m);
  for (int h = 0; h < n; ++h) {
    if (om.kind == ModelKind::ncv) {
      x(h * m + 0) = truth.position[h][k];
      x(h * m + 1) = truth.velocity[h][k];
    } else {
      // 1-D ground truth embedded on the x axis; acceleration by backward
      // difference
      const double v = truth.velocity[h][k];
      const double a =
          k > 0 ? (v - truth.velocity[h][k - 1]) / om.sample_time : 0.0;
      x(h * m + 0) = a;
      x(h * m + 2) = v;
      x(h * m + 4) = truth.position[h][k];
    }
  }
  return x;
}

// y[k][cav]: noisy sensor reads for steps 1..horizon (index 0 unused)
std::vector<std::vector<Eigen::VectorXd>> make_measurements(
    const Scenario& sc, const std::vector<Eigen::VectorXd>& truth_state, int horizon) {
  const SensorPlacement sp = sc.placement();
  const double noise_std = std::sqrt(sc.measurement_variance);
  GaussianStream rng(sc.seed ^ kMeasurementStreamSalt);
  std::vector<std::vector<Eigen::VectorXd>> y(horizon + 1);
  for (int k = 1; k <= horizon; ++k) {
    y[k].resize(sp.cav_count);
    for (int i = 0; i < sp.cav_count; ++i) {
      const auto& idx = sp.measured[i];
      Eigen::VectorXd yi(idx.size());
      for (size_t r = 0; r < idx.size(); ++r)
        yi(static_cast<long>(r)) = truth_state[k](idx[r]) + rng.next(noise_std);
      y[k][i] = std::move(yi);
    }
  }
  return y;
}

double pairwise_disagreement(const std::vector<std::optional<Eigen::VectorXd>>& ests) {
  double worst = 0.0;
  for (size_t i = 0; i < ests.size(); ++i) {
    if (!ests[i]) continue;
    for (size_t j = i + 1; j < ests.size(); ++j) {
      if (!ests[j]) continue;
      worst = std::max(worst, (*ests[i] - *ests[j]).norm());
    }
  }
  return worst;
}

WeightRule pick_rule(const DirectedGraph& g) {
  for (const auto& [i, j] : g.links())
    if (g.weight(i, j)) return WeightRule::link_weights;
  return WeightRule::uniform_neighbors;
}

}  // namespace

ObserverState observer_step(const ObserverState& states, const Eigen::MatrixXd& w,
                            const Eigen::MatrixXd& a_global, const ObserverGain& gain,
                            const SensorPlacement& placement,
                            const std::vector<Eigen::VectorXd>& measurements) {
  const int n = static_cast<int>(w.rows());
  const int d = static_cast<int>(a_global.rows());
  if (w.cols() != n || a_global.cols() != d)
    throw std::invalid_argument("W and A must be square");
  if (static_cast<int>(states.estimates.size()) != n)
    throw std::invalid_argument("estimate count does not match W");
  if (placement.cav_count != n)
    throw std::invalid_argument("placement does not match W");
  if (gain.block_count() != n || gain.block_dim() != d)
    throw std::invalid_argument("gain blocks do not match the problem size");
  if (static_cast<int>(measurements.size()) != n)
    throw std::invalid_argument("need one (possibly empty) measurement vector per CAV");
  for (int i = 0; i < n; ++i) {
    if (states.estimates[i].size() != d)
      throw std::invalid_argument("estimate dimension mismatch");
    if (static_cast<int>(measurements[i].size()) !=
        static_cast<int>(placement.measured[i].size()))
      throw std::invalid_argument("measurement dimension mismatch at CAV " +
                                  std::to_string(i));
  }

  // precompute A xhat_j once per neighbor
  std::vector<Eigen::VectorXd> propagated(n);
  for (int j = 0; j < n; ++j) propagated[j] = a_global * states.estimates[j];

  ObserverState next;
  next.step = states.step + 1;
  next.estimates.resize(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd pred = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < n; ++j)
      if (w(i, j) != 0.0) pred += w(i, j) * propagated[j];

    Eigen::VectorXd innovation = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < n; ++j) {
      if (w(i, j) == 0.0) continue;
      const auto& idx = placement.measured[j];
      for (size_t r = 0; r < idx.size(); ++r)
        innovation(idx[r]) += measurements[j](static_cast<long>(r)) - pred(idx[r]);
    }
    next.estimates[i] = pred + gain.blocks[i] * innovation;
    if (!next.estimates[i].allFinite())
      throw std::runtime_error("divergence: non-finite estimate at CAV " +
                               std::to_string(i));
  }
  return next;
}

namespace {

// live view of the CAV network on original node ids
struct LiveNetwork {
  DirectedGraph initial;
  std::vector<bool> active;
  std::set<Link> removed_links;
  std::set<int> removed_nodes;

  std::vector<int> survivors() const {
    std::vector<int> out;
    for (int i = 0; i < initial.node_count(); ++i)
      if (active[static_cast<size_t>(i)]) out.push_back(i);
    return out;
  }

  DirectedGraph compact() const {
    return survives_removal(initial, removed_nodes, removed_links);
  }
};

struct ObserverRuntime {
  Eigen::MatrixXd w;                    // compact
  Eigen::MatrixXd dc;                   // compact
  std::vector<Eigen::MatrixXd> blocks;  // per original CAV id; empty when removed
  SensorPlacement compact_placement;
  std::vector<int> survivors;
};

ObserverRuntime rebuild_runtime(const Scenario& sc, const LiveNetwork& net,
                                const ObserverModel& om,
                                const std::vector<Eigen::MatrixXd>& old_blocks,
                                bool redesign, std::vector<std::string>& log) {
  ObserverRuntime rt;
  rt.survivors = net.survivors();
  const DirectedGraph compact = net.compact();
  if (!is_strongly_connected(compact))
    throw std::runtime_error("observability lost; redundancy level exceeded");

  const SensorPlacement full = sc.placement();
  rt.compact_placement.cav_count = static_cast<int>(rt.survivors.size());
  for (int orig : rt.survivors)
    rt.compact_placement.measured.push_back(full.measured[static_cast<size_t>(orig)]);

  const auto verdict = distributed_structural_observability(
      sc.dynamics_pattern(), compact, rt.compact_placement);
  if (!verdict.observable)
    throw std::runtime_error("observability lost; redundancy level exceeded");

  rt.w = build_row_stochastic(compact, pick_rule(compact));
  rt.dc = build_dc(rt.compact_placement, compact, om.state_dim());

  rt.blocks.assign(static_cast<size_t>(sc.cav_count()), Eigen::MatrixXd());
  if (redesign) {
    const auto result = synthesize_gain(rt.w, om.global, rt.dc, sc.synthesis);
    std::ostringstream msg;
    msg << "gain redesigned via " << to_string(result.method)
        << ", spectral radius " << result.achieved_spectral_radius
        << (result.converged ? "" : " (not converged)");
    log.push_back(msg.str());
    for (size_t c = 0; c < rt.survivors.size(); ++c)
      rt.blocks[static_cast<size_t>(rt.survivors[c])] = result.gain.blocks[c];
  } else {
    for (int orig : rt.survivors)
      rt.blocks[static_cast<size_t>(orig)] = old_blocks[static_cast<size_t>(orig)];
  }
  return rt;
}

}  // namespace

SimulationTrace run_distributed(const Scenario& sc, const ObserverGain& gain,
                                std::optional<int> horizon_override,
                                std::optional<std::uint64_t> seed_override) {
  Scenario cfg = sc;
  if (horizon_override) cfg.horizon = *horizon_override;
  if (seed_override) cfg.seed = *seed_override;
  const int horizon = cfg.horizon;
  const ObserverModel om = cfg.observer_model();
  const int d = om.state_dim();
  const int n = cfg.cav_count();
  gain.validate();
  if (gain.block_count() != n || gain.block_dim() != d)
    throw std::invalid_argument("gain does not match the scenario dimensions");

  SimulationTrace trace;
  trace.state_dim = d;
  trace.cav_count = n;
  trace.truth = simulate_ground_truth(cfg.hdvs, cfg.sample_time, horizon, cfg.seed);
  trace.truth_state.reserve(horizon + 1);
  for (int k = 0; k <= horizon; ++k)
    trace.truth_state.push_back(embed_truth(trace.truth, om, k));
  const auto measurements = make_measurements(cfg, trace.truth_state, horizon);

  LiveNetwork net{cfg.cav_graph, std::vector<bool>(n, true), {}, {}};
  std::vector<Eigen::MatrixXd> blocks(gain.blocks.begin(), gain.blocks.end());
  std::vector<std::string> dummy_log;
  ObserverRuntime rt = rebuild_runtime(cfg, net, om, blocks, false, dummy_log);

  std::map<int, std::vector<FaultEvent>> faults_by_step;
  for (const auto& ev : cfg.faults) faults_by_step[ev.trigger_step].push_back(ev);

  trace.estimates.assign(horizon + 1,
                         std::vector<std::optional<Eigen::VectorXd>>(n));
  trace.squared_error.assign(n, std::vector<double>(
                                    horizon + 1, std::numeric_limits<double>::quiet_NaN()));
  trace.disagreement.assign(horizon + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    trace.estimates[0][i] = Eigen::VectorXd::Zero(d);
    trace.squared_error[i][0] = trace.truth_state[0].squaredNorm();
  }

  for (int k = 1; k <= horizon; ++k) {
    if (auto it = faults_by_step.find(k); it != faults_by_step.end()) {
      bool redesign = false;
      for (const auto& ev : it->second) {
        if (ev.kind == FaultKind::remove_node) {
          if (!net.active[static_cast<size_t>(ev.node)])
            throw std::runtime_error("fault references already removed node " +
                                     std::to_string(ev.node));
          net.active[static_cast<size_t>(ev.node)] = false;
          net.removed_nodes.insert(ev.node);
          trace.event_log.push_back("step " + std::to_string(k) + ": removed node " +
                                    std::to_string(ev.node));
        } else {
          if (net.removed_links.count({ev.node, ev.target}) ||
              net.removed_nodes.count(ev.node) || net.removed_nodes.count(ev.target))
            throw std::runtime_error("fault references already removed link");
          net.removed_links.insert({ev.node, ev.target});
          trace.event_log.push_back("step " + std::to_string(k) + ": removed link (" +
                                    std::to_string(ev.node) + ", " +
                                    std::to_string(ev.target) + ")");
        }
        redesign = redesign || ev.redesign_gain;
      }
      std::vector<std::string> log;
      rt = rebuild_runtime(cfg, net, om, rt.blocks, redesign, log);
      for (auto& line : log)
        trace.event_log.push_back("step " + std::to_string(k) + ": " + line);
    }

    const int live = static_cast<int>(rt.survivors.size());
    std::vector<Eigen::VectorXd> propagated(live);
    for (int c = 0; c < live; ++c)
      propagated[c] = om.global * *trace.estimates[k - 1][rt.survivors[c]];

    for (int c = 0; c < live; ++c) {
      const int orig = rt.survivors[c];
      Eigen::VectorXd pred = Eigen::VectorXd::Zero(d);
      for (int jc = 0; jc < live; ++jc)
        if (rt.w(c, jc) != 0.0) pred += rt.w(c, jc) * propagated[jc];

      Eigen::VectorXd innovation = Eigen::VectorXd::Zero(d);
      for (int jc = 0; jc < live; ++jc) {
        if (rt.w(c, jc) == 0.0) continue;
        const int jo = rt.survivors[jc];
        const auto& idx = rt.compact_placement.measured[jc];
        const auto& y = measurements[k][jo];
        for (size_t r = 0; r < idx.size(); ++r)
          innovation(idx[r]) += y(static_cast<long>(r)) - pred(idx[r]);
      }
      Eigen::VectorXd est = pred + rt.blocks[static_cast<size_t>(orig)] * innovation;
      if (!est.allFinite())
        throw std::runtime_error("divergence: non-finite estimate at step " +
                                 std::to_string(k));
      trace.estimates[k][orig] = std::move(est);
      trace.squared_error[orig][k] =
          (trace.truth_state[k] - *trace.estimates[k][orig]).squaredNorm();
    }
    trace.disagreement[k] = pairwise_disagreement(trace.estimates[k]);
  }
  return trace;
}

SimulationTrace run_distributed_auto(const Scenario& sc,
                                     std::optional<int> horizon_override,
                                     std::optional<std::uint64_t> seed_override) {
  const ObserverModel om = sc.observer_model();
  const Eigen::MatrixXd w = build_row_stochastic(sc.cav_graph, pick_rule(sc.cav_graph));
  const Eigen::MatrixXd dc = build_dc(sc.placement(), sc.cav_graph, om.state_dim());
  const auto design = synthesize_gain(w, om.global, dc, sc.synthesis);
  return run_distributed(sc, design.gain, horizon_override, seed_override);
}

SimulationTrace run_centralized_kalman(const Scenario& sc,
                                       std::optional<int> horizon_override,
                                       std::optional<std::uint64_t> seed_override) {
  Scenario cfg = sc;
  if (horizon_override) cfg.horizon = *horizon_override;
  if (seed_override) cfg.seed = *seed_override;
  const int horizon = cfg.horizon;
  const ObserverModel om = cfg.observer_model();
  const int d = om.state_dim();
  const Eigen::MatrixXd& a = om.global;

  SimulationTrace trace;
  trace.centralized = true;
  trace.state_dim = d;
  trace.cav_count = 1;
  trace.truth = simulate_ground_truth(cfg.hdvs, cfg.sample_time, horizon, cfg.seed);
  trace.truth_state.reserve(horizon + 1);
  for (int k = 0; k <= horizon; ++k)
    trace.truth_state.push_back(embed_truth(trace.truth, om, k));
  const auto measurements = make_measurements(cfg, trace.truth_state, horizon);

  // stacked output matrix over every sensor of every CAV
  const SensorPlacement sp = cfg.placement();
  std::vector<int> stacked;
  for (const auto& list : sp.measured)
    stacked.insert(stacked.end(), list.begin(), list.end());
  const int rows = static_cast<int>(stacked.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(rows, d);
  for (int r = 0; r < rows; ++r) c(r, stacked[static_cast<size_t>(r)]) = 1.0;

  const Eigen::MatrixXd q_cov = cfg.process_variance * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd r_cov =
      std::max(cfg.measurement_variance, 1e-12) * Eigen::MatrixXd::Identity(rows, rows);

  Eigen::VectorXd xhat = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d);

  trace.estimates.assign(horizon + 1, std::vector<std::optional<Eigen::VectorXd>>(1));
  trace.squared_error.assign(1, std::vector<double>(horizon + 1, 0.0));
  trace.disagreement.assign(horizon + 1, 0.0);
  trace.estimates[0][0] = xhat;
  trace.squared_error[0][0] = trace.truth_state[0].squaredNorm();

  for (int k = 1; k <= horizon; ++k) {
    xhat = a * xhat;
    p = a * p * a.transpose() + q_cov;
    if (rows > 0) {
      Eigen::VectorXd y(rows);
      int r = 0;
      for (int i = 0; i < sp.cav_count; ++i) {
        const auto& yi = measurements[k][i];
        for (long e = 0; e < yi.size(); ++e) y(r++) = yi(e);
      }
      const Eigen::MatrixXd s = c * p * c.transpose() + r_cov;
      const Eigen::MatrixXd gain = s.ldlt().solve(c * p).transpose();
      xhat += gain * (y - c * xhat);
      p = (Eigen::MatrixXd::Identity(d, d) - gain * c) * p;
    }
    if (!xhat.allFinite())
      throw std::runtime_error("divergence: non-finite central estimate");
    trace.estimates[k][0] = xhat;
    trace.squared_error[0][k] = (trace.truth_state[k] - xhat).squaredNorm();
  }
  return trace;
}

std::string MseeSummary::to_key_values() const {
  std::ostringstream out;
  out.precision(12);
  for (size_t i = 0; i < position_per_cav.size(); ++i) {
    out << "position_msee_cav_" << i << "=" << position_per_cav[i] << "\n";
    out << "velocity_msee_cav_" << i << "=" << velocity_per_cav[i] << "\n";
  }
  out << "position_msee=" << position_aggregate << "\n";
  out << "velocity_msee=" << velocity_aggregate << "\n";
  return out.str();
}

MseeSummary compute_metrics(const SimulationTrace& trace, int steady_start) {
  MseeSummary s;
  const int horizon = trace.horizon();
  const int hdvs = trace.truth.hdv_count();
  // recover model addressing from the trace dimensions
  const int m = trace.state_dim / std::max(hdvs, 1);
  const bool nca = m == 6;

  double pos_total = 0.0, vel_total = 0.0;
  int contributing = 0;
  for (int i = 0; i < trace.cav_count; ++i) {
    double pos_sum = 0.0, vel_sum = 0.0;
    int steps = 0;
    for (int k = steady_start; k <= horizon; ++k) {
      const auto& est = trace.estimates[k][i];
      if (!est) continue;
      double pos = 0.0, vel = 0.0;
      for (int h = 0; h < hdvs; ++h) {
        const int pi = nca ? h * m + 4 : h * m;
        const int vi = nca ? h * m + 2 : h * m + 1;
        pos += std::pow(trace.truth_state[k](pi) - (*est)(pi), 2);
        vel += std::pow(trace.truth_state[k](vi) - (*est)(vi), 2);
      }
      pos_sum += pos / hdvs;
      vel_sum += vel / hdvs;
      ++steps;
    }
    s.position_per_cav.push_back(steps ? pos_sum / steps
                                       : std::numeric_limits<double>::quiet_NaN());
    s.velocity_per_cav.push_back(steps ? vel_sum / steps
                                       : std::numeric_limits<double>::quiet_NaN());
    if (steps) {
      pos_total += s.position_per_cav.back();
      vel_total += s.velocity_per_cav.back();
      ++contributing;
    }
  }
  s.position_aggregate = contributing ? pos_total / contributing : 0.0;
  s.velocity_aggregate = contributing ? vel_total / contributing : 0.0;
  s.disagreement = trace.disagreement;
  return s;
}

std::string trace_csv(const SimulationTrace& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "step,entity,role,hdv,position,velocity,sq_error\n";
  const int hdvs = trace.truth.hdv_count();
  const int m = trace.state_dim / std::max(hdvs, 1);
  const bool nca = m == 6;
  const char* role = trace.centralized ? "central_estimate" : "cav_estimate";
  for (int k = 0; k <= trace.horizon(); ++k) {
    for (int h = 0; h < hdvs; ++h) {
      const int pi = nca ? h * m + 4 : h * m;
      const int vi = nca ? h * m + 2 : h * m + 1;
      out << k << ",truth,truth," << h << "," << trace.truth_state[k](pi) << ","
          << trace.truth_state[k](vi) << ",0\n";
      for (int i = 0; i < trace.cav_count; ++i) {
        const auto& est = trace.estimates[k][i];
        if (!est) continue;
        const double dp = trace.truth_state[k](pi) - (*est)(pi);
        const double dv = trace.truth_state[k](vi) - (*est)(vi);
        out << k << "," << i << "," << role << "," << h << "," << (*est)(pi) << ","
            << (*est)(vi) << "," << dp * dp + dv * dv << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace mtobs
