#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mtobs/gain_synthesis.hpp"
#include "mtobs/matrix_ops.hpp"
#include "mtobs/observability.hpp"
#include "mtobs/observer.hpp"
#include "mtobs/scenario.hpp"

namespace fs = std::filesystem;
using namespace mtobs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;

int fail_usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kExitUsage;
}

Scenario load_or_exit(const std::string& path, int& code) {
  auto result = parse_scenario(path);
  if (!result.ok()) {
    for (const auto& e : result.errors) std::cerr << "error: " << e << "\n";
    code = kExitUsage;
    return {};
  }
  code = kExitOk;
  return *result.scenario;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string format_components(const std::vector<std::vector<int>>& comps) {
  std::ostringstream out;
  for (size_t c = 0; c < comps.size(); ++c) {
    if (c) out << " ";
    out << "{";
    for (size_t i = 0; i < comps[c].size(); ++i) {
      if (i) out << ",";
      out << comps[c][i];
    }
    out << "}";
  }
  return out.str();
}

int cmd_analyze(const std::string& path, double rank_tol) {
  int code;
  Scenario sc = load_or_exit(path, code);
  if (code != kExitOk) return code;
  if (rank_tol > 0) sc.rank_tol_factor = rank_tol;

  const StructuredMatrix pattern = sc.dynamics_pattern();
  const SensorPlacement placement = sc.placement();
  const ObserverModel om = sc.observer_model();

  const auto ga = system_digraph(pattern);
  const auto scc = scc_decompose(ga);
  std::vector<std::vector<int>> parents;
  for (int c : scc.parent_components()) parents.push_back(scc.components[c]);

  std::cout << "scenario: " << path << "\n";
  std::cout << "model = " << (sc.model == ModelKind::ncv ? "ncv" : "nca")
            << ", hdvs = " << sc.hdv_count() << ", cavs = " << sc.cav_count()
            << ", state_dim = " << om.state_dim() << "\n";
  std::cout << "parent components of the dynamics digraph: "
            << format_components(parents) << "\n";

  const auto verdict = distributed_structural_observability(pattern, sc.cav_graph, placement);
  const bool sc_connected = is_strongly_connected(sc.cav_graph);
  int node_conn = 0, link_conn = 0;
  if (sc.cav_count() >= 2) {
    node_conn = node_connectivity(sc.cav_graph);
    link_conn = link_connectivity(sc.cav_graph);
  }
  std::cout << "network: strongly_connected = " << (sc_connected ? "yes" : "no")
            << ", node_connectivity = " << node_conn
            << ", link_connectivity = " << link_conn << "\n";

  bool numeric = false;
  try {
    const Eigen::MatrixXd w = build_row_stochastic(sc.cav_graph);
    numeric = numeric_observability_check(om.global, w, placement, sc.rank_tol_factor);
  } catch (const std::exception& e) {
    std::cout << "numeric_check_error: " << e.what() << "\n";
  }
  std::cout << "numeric_rank_check = " << (numeric ? "full" : "deficient") << "\n";
  std::cout << verdict.to_key_values();
  return verdict.observable ? kExitOk : kExitNegative;
}

int cmd_connectivity(const std::string& source) {
  DirectedGraph g;
  bool named = false;
  if (source.find('(') != std::string::npos) {
    g = named_topology(source);
    named = true;
  } else {
    std::ifstream in(source);
    if (!in) return fail_usage("cannot open graph file '" + source + "'");
    g = DirectedGraph::parse(in);
  }
  std::cout << "nodes = " << g.node_count() << "\n";
  std::cout << "links = " << g.link_count() << "\n";
  std::cout << "strongly_connected = "
            << (is_strongly_connected(g) ? "true" : "false") << "\n";
  if (g.node_count() >= 2) {
    std::cout << "node_connectivity = " << node_connectivity(g) << "\n";
    std::cout << "link_connectivity = " << link_connectivity(g) << "\n";
  } else {
    std::cout << "node_connectivity = undefined\n";
    std::cout << "link_connectivity = undefined\n";
  }
  if (named && source.rfind("complete", 0) == 0)
    std::cout << "# note: complete graphs are often quoted as n-connected by "
                 "convention; the computed minimum-cut value is n-1\n";
  return kExitOk;
}

int cmd_design(const std::string& path, const std::string& method,
               const std::string& out_dir) {
  int code;
  Scenario sc = load_or_exit(path, code);
  if (code != kExitOk) return code;
  if (!method.empty()) sc.synthesis.method = gain_method_from_string(method);

  const ObserverModel om = sc.observer_model();
  const Eigen::MatrixXd w = build_row_stochastic(sc.cav_graph);
  const Eigen::MatrixXd dc = build_dc(sc.placement(), sc.cav_graph, om.state_dim());
  const double rho_open = spectral_radius(kronecker(w, om.global));

  const auto result = synthesize_gain(w, om.global, dc, sc.synthesis);
  const fs::path out = fs::path(out_dir) / "gain.txt";
  fs::create_directories(out_dir);
  write_file(out, result.gain.serialize());

  std::cout.precision(12);
  std::cout << "spectral_radius_before = " << rho_open << "\n";
  std::cout << "spectral_radius_after = " << result.achieved_spectral_radius << "\n";
  std::cout << "method = " << to_string(result.method) << "\n";
  std::cout << "iterations = " << result.iterations << "\n";
  std::cout << "converged = " << (result.converged ? "true" : "false") << "\n";
  std::cout << "gain_file = " << out.string() << "\n";
  return result.converged ? kExitOk : kExitNegative;
}

int cmd_simulate(const std::string& path, const std::string& gain_path,
                 const std::string& out_dir, long long horizon, long long seed) {
  int code;
  Scenario sc = load_or_exit(path, code);
  if (code != kExitOk) return code;

  ObserverGain gain;
  if (gain_path.empty())
    return fail_usage("missing --gain file (run 'mtobs design " + path +
                      "' first and pass its gain.txt)");
  std::ifstream in(gain_path);
  if (!in)
    return fail_usage("cannot open gain file '" + gain_path +
                      "' (run 'mtobs design' to produce one)");
  gain = ObserverGain::parse(in);

  std::optional<int> h;
  std::optional<std::uint64_t> s;
  if (horizon >= 0) h = static_cast<int>(horizon);
  if (seed >= 0) s = static_cast<std::uint64_t>(seed);

  const SimulationTrace trace = run_distributed(sc, gain, h, s);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "truth.csv", ground_truth_csv(trace.truth));
  write_file(fs::path(out_dir) / "trace.csv", trace_csv(trace));
  const auto metrics = compute_metrics(trace);
  std::ostringstream summary;
  summary << metrics.to_key_values();
  for (const auto& line : trace.event_log) summary << "# " << line << "\n";
  write_file(fs::path(out_dir) / "metrics.txt", summary.str());

  std::cout << metrics.to_key_values();
  for (const auto& line : trace.event_log) std::cout << "# " << line << "\n";
  std::cout << "out_dir = " << out_dir << "\n";
  return kExitOk;
}

int cmd_compare(const std::string& path, int seeds, int steady_start,
                long long horizon) {
  int code;
  Scenario sc = load_or_exit(path, code);
  if (code != kExitOk) return code;
  if (seeds < 1) return fail_usage("--seeds must be at least 1");
  std::optional<int> h;
  if (horizon >= 0) h = static_cast<int>(horizon);

  const int effective_horizon = h.value_or(sc.horizon);
  if (steady_start < 0) {
    // default: past the last commanded maneuver plus a settling margin
    steady_start = 0;
    for (const auto& hdv : sc.hdvs)
      for (const auto& [step, value] : hdv.params.desired_velocity.changes)
        steady_start = std::max(steady_start, step + 150);
    steady_start = std::min(steady_start, effective_horizon * 3 / 4);
  }
  std::cout << "steady_start = " << steady_start << "\n";

  // the design depends on the topology only, so synthesize once for all seeds
  const ObserverModel om = sc.observer_model();
  const Eigen::MatrixXd w = build_row_stochastic(sc.cav_graph);
  const Eigen::MatrixXd dc = build_dc(sc.placement(), sc.cav_graph, om.state_dim());
  const auto design = synthesize_gain(w, om.global, dc, sc.synthesis);

  std::cout.precision(12);
  std::cout << "seed,distributed_position,distributed_velocity,central_position,"
               "central_velocity\n";
  double dp = 0, dv = 0, cp = 0, cv = 0;
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = sc.seed + static_cast<std::uint64_t>(i);
    const auto dist = run_distributed(sc, design.gain, h, seed);
    const auto cent = run_centralized_kalman(sc, h, seed);
    const auto md = compute_metrics(dist, steady_start);
    const auto mc = compute_metrics(cent, steady_start);
    std::cout << seed << "," << md.position_aggregate << "," << md.velocity_aggregate
              << "," << mc.position_aggregate << "," << mc.velocity_aggregate << "\n";
    dp += md.position_aggregate;
    dv += md.velocity_aggregate;
    cp += mc.position_aggregate;
    cv += mc.velocity_aggregate;
  }
  dp /= seeds;
  dv /= seeds;
  cp /= seeds;
  cv /= seeds;
  std::cout << "mean_distributed_position = " << dp << "\n";
  std::cout << "mean_distributed_velocity = " << dv << "\n";
  std::cout << "mean_central_position = " << cp << "\n";
  std::cout << "mean_central_velocity = " << cv << "\n";
  std::cout << "central_not_worse = "
            << ((cp <= dp && cv <= dv) ? "true" : "false") << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed observability analysis and simulation for mixed-traffic vehicle networks"};
  app.require_subcommand(1);

  std::string scn, gain_method, out_dir = ".", gain_path, graph_source;
  double rank_tol = 0.0;
  long long horizon = -1, seed = -1;
  int seeds = 10, steady_start = -1;

  auto* analyze = app.add_subcommand("analyze", "observability and redundancy report");
  analyze->add_option("scenario", scn, "scenario file")->required();
  analyze->add_option("--rank-tol", rank_tol, "relative SVD rank threshold factor");

  auto* design = app.add_subcommand("design", "synthesize the observer gain");
  design->add_option("scenario", scn, "scenario file")->required();
  design->add_option("--gain-method", gain_method)->check(CLI::IsMember({"ccl", "descent"}));
  design->add_option("--out-dir", out_dir, "output directory");

  auto* simulate = app.add_subcommand("simulate", "run the distributed observer");
  simulate->add_option("scenario", scn, "scenario file")->required();
  simulate->add_option("--gain", gain_path, "gain file from 'design'");
  simulate->add_option("--out-dir", out_dir, "output directory");
  simulate->add_option("--horizon", horizon, "override the scenario horizon");
  simulate->add_option("--seed", seed, "override the scenario seed");

  auto* compare = app.add_subcommand("compare", "paired distributed vs centralized MSEE");
  compare->add_option("scenario", scn, "scenario file")->required();
  compare->add_option("--seeds", seeds, "number of paired seeds");
  compare->add_option("--steady-start", steady_start,
                      "first step of the steady window (default: after the last maneuver)");
  compare->add_option("--horizon", horizon, "override the scenario horizon");

  auto* connectivity = app.add_subcommand("connectivity", "graph connectivity numbers");
  connectivity->add_option("graph", graph_source, "graph file or named topology like ring(8,2)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(analyze)) return cmd_analyze(scn, rank_tol);
    if (app.got_subcommand(design)) return cmd_design(scn, gain_method, out_dir);
    if (app.got_subcommand(simulate))
      return cmd_simulate(scn, gain_path, out_dir, horizon, seed);
    if (app.got_subcommand(compare)) return cmd_compare(scn, seeds, steady_start, horizon);
    if (app.got_subcommand(connectivity)) return cmd_connectivity(graph_source);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNegative;
  }
  return kExitUsage;
}
