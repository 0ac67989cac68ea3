#ifndef MTOBS_SCENARIO_HPP
#define MTOBS_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtobs/fault.hpp"
#include "mtobs/gain_synthesis.hpp"
#include "mtobs/graph.hpp"
#include "mtobs/observability.hpp"
#include "mtobs/placement.hpp"
#include "mtobs/traffic.hpp"

namespace mtobs {

struct SensorRef {
  int cav = 0;
  int hdv = 0;
  std::string component;  // position|velocity for ncv; ax..py for nca

  friend bool operator==(const SensorRef&, const SensorRef&) = default;
};

/// Full experiment description, parsed from the sectioned scenario text
/// format ([observer], [hdv], [network], [sensors], [faults]).
struct Scenario {
  std::vector<HdvSpec> hdvs;
  DirectedGraph cav_graph;      // self-loops already inserted by the loader
  std::string topology_source;  // named constructor text, or "inline"
  std::vector<SensorRef> sensors;
  ModelKind model = ModelKind::ncv;
  double sample_time = 0.1;
  double measurement_variance = 0.0;
  double process_variance = 0.01;
  std::vector<FaultEvent> faults;
  SynthesisConfig synthesis;
  int horizon = 0;
  std::uint64_t seed = 0;
  double rank_tol_factor = 0.0;

  int cav_count() const { return cav_graph.node_count(); }
  int hdv_count() const { return static_cast<int>(hdvs.size()); }

  ObserverModel observer_model() const;
  /// Sensor references resolved to global state indices of the model.
  SensorPlacement placement() const;
  /// Zero/nonzero pattern of the global observer dynamics matrix.
  StructuredMatrix dynamics_pattern() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct ScenarioParseResult {
  std::optional<Scenario> scenario;
  std::vector<std::string> errors;  // all validation problems, not just the first

  bool ok() const { return scenario.has_value() && errors.empty(); }
};

ScenarioParseResult parse_scenario_text(const std::string& text);
ScenarioParseResult parse_scenario(const std::string& path);

/// Builds one of the named topologies: complete(n), cycle(n), star(n),
/// path(n), ring(n,m).
DirectedGraph named_topology(const std::string& text);

/// Convenience wrapper that throws with every collected error joined.
Scenario load_scenario(const std::string& path);

std::string serialize_scenario(const Scenario& sc);

}  // namespace mtobs

#endif
