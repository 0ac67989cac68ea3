#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "mtobs/observability.hpp"
#include "mtobs/scenario.hpp"

using namespace mtobs;

namespace {

const std::string kScenarioDir = MTOBS_SCENARIO_DIR;

std::string minimal_scenario() {
  return R"([observer]
model = ncv
sample_time = 0.1
horizon = 100
seed = 3
measurement_variance = 0.1

[hdv]
count = 2
hdv 0 lambda=0.3 tau=5 p0=0 v0=20
hdv 1 lambda=0.3 tau=5 p0=100 v0=20
vd 0 0 20
vd 1 0 20

[network]
topology = cycle(3)

[sensors]
sensor 0 0 position
sensor 1 1 position
)";
}

}  // namespace

TEST_CASE("bundled ring scenario parses to the documented setup") {
  const auto sc = load_scenario(kScenarioDir + "/fig1.scn");
  CHECK(sc.cav_count() == 5);
  CHECK(sc.hdv_count() == 4);
  CHECK(sc.topology_source == "cycle(5)");
  CHECK(sc.model == ModelKind::ncv);
  CHECK(sc.measurement_variance == 0.1);
  for (const auto& h : sc.hdvs) {
    CHECK(h.params.lambda_gain == 0.3);
    CHECK(h.params.reaction_delay == 10);
    CHECK(h.params.alpha1 == 0.5);
    CHECK(h.params.alpha2 == 0.125);
    CHECK(h.params.beta1 == 4.0);
    CHECK(h.params.beta2 == 0.05);
    CHECK(h.params.rate_coefficients);
  }
  CHECK(sc.sensors.size() == 4);
  CHECK(sc.cav_graph.all_self_loops());
  // every CAV keeps two ring neighbors plus itself
  for (int i = 0; i < 5; ++i) CHECK(sc.cav_graph.in_neighbors(i).size() == 3);
}

TEST_CASE("bundled redundant scenario parses to the two-connected setup") {
  const auto sc = load_scenario(kScenarioDir + "/fig9.scn");
  CHECK(sc.cav_count() == 5);
  CHECK(sc.measurement_variance == 0.15);
  for (const auto& h : sc.hdvs) {
    CHECK(h.params.lambda_gain == 0.4);
    CHECK(h.params.reaction_delay == 15);
    CHECK(h.params.alpha1 == 0.4);
    CHECK(h.params.alpha2 == 0.15);
    CHECK(h.params.beta1 == 10.0);
    CHECK(h.params.beta2 == 0.5);
  }
  CHECK(sc.sensors.size() == 8);
  CHECK(node_connectivity(sc.cav_graph) == 2);
  CHECK(link_connectivity(sc.cav_graph) == 2);
  CHECK(redundant_observability_level(sc.dynamics_pattern(), sc.cav_graph,
                                      sc.placement()) == 2);
}

TEST_CASE("fault scenarios reference existing entities") {
  const auto lf = load_scenario(kScenarioDir + "/fig1_linkfail.scn");
  REQUIRE(lf.faults.size() == 2);
  CHECK(lf.faults[0].kind == FaultKind::remove_link);
  CHECK(lf.faults[0].redesign_gain);

  const auto nf = load_scenario(kScenarioDir + "/fig9_nodefail.scn");
  REQUIRE(nf.faults.size() == 3);
  CHECK(nf.faults[0].kind == FaultKind::remove_node);
  CHECK(nf.faults[0].node == 4);
}

TEST_CASE("round trip: parse, serialize, parse gives the identical scenario") {
  for (const std::string name :
       {"fig1.scn", "fig1_linkfail.scn", "fig9.scn", "fig9_nodefail.scn"}) {
    CAPTURE(name);
    const auto sc = load_scenario(kScenarioDir + "/" + name);
    const auto again = parse_scenario_text(serialize_scenario(sc));
    REQUIRE(again.ok());
    CHECK(*again.scenario == sc);
  }
}

TEST_CASE("minimal inline scenario parses") {
  const auto result = parse_scenario_text(minimal_scenario());
  REQUIRE(result.ok());
  CHECK(result.scenario->cav_count() == 3);
  CHECK(result.scenario->hdvs[0].initial_velocity == 20.0);
  CHECK_FALSE(result.scenario->hdvs[0].params.rate_coefficients);
}

TEST_CASE("validation collects every error, not just the first") {
  std::string bad = minimal_scenario();
  bad += "sensor 0 9 position\n";   // nonexistent HDV
  bad += "sensor 7 0 position\n";   // nonexistent CAV
  bad += "sensor 0 0 flux\n";       // unknown component
  const auto result = parse_scenario_text(bad);
  CHECK_FALSE(result.ok());
  CHECK(result.errors.size() == 3);
  bool saw_hdv = false, saw_cav = false, saw_comp = false;
  for (const auto& e : result.errors) {
    if (e.find(".hdv") != std::string::npos) saw_hdv = true;
    if (e.find(".cav") != std::string::npos) saw_cav = true;
    if (e.find(".component") != std::string::npos) saw_comp = true;
  }
  CHECK(saw_hdv);
  CHECK(saw_cav);
  CHECK(saw_comp);
}

TEST_CASE("syntax errors carry line numbers") {
  const auto result = parse_scenario_text("[observer]\nmodel == ncv is wrong\n");
  CHECK_FALSE(result.ok());
  REQUIRE_FALSE(result.errors.empty());
  CHECK(result.errors[0].rfind("line 2", 0) == 0);
}

TEST_CASE("exactly one topology source") {
  std::string two = minimal_scenario();
  two += "\n[network]\nnodes 3\nlink 0 1\n";
  const auto result = parse_scenario_text(two);
  CHECK_FALSE(result.ok());
  bool mentioned = false;
  for (const auto& e : result.errors)
    if (e.find("one topology source") != std::string::npos) mentioned = true;
  CHECK(mentioned);
}

TEST_CASE("fault referencing a missing link is a semantic error") {
  std::string bad = minimal_scenario();
  bad += "\n[faults]\nat 10 remove_link 0 0\nat 10 remove_link 2 2\n";
  auto result = parse_scenario_text(bad);
  CHECK_FALSE(result.ok());  // self-loop removal is rejected

  bad = minimal_scenario();
  bad += "\n[faults]\nat 10 remove_node 9\n";
  result = parse_scenario_text(bad);
  CHECK_FALSE(result.ok());
}

TEST_CASE("nca components are validated against the model") {
  std::string nca = minimal_scenario();
  nca.replace(nca.find("model = ncv"), 11, "model = nca");
  // 'position' is an ncv component name
  auto result = parse_scenario_text(nca);
  CHECK_FALSE(result.ok());

  std::string fixed = nca;
  fixed.replace(fixed.find("sensor 0 0 position"), 19, "sensor 0 0 px      ");
  fixed.replace(fixed.find("sensor 1 1 position"), 19, "sensor 1 1 py      ");
  result = parse_scenario_text(fixed);
  REQUIRE(result.ok());
  // px of HDV 1 sits at global index 6 + 4
  CHECK(result.scenario->placement().measured[0] == std::vector<int>{4});
}

TEST_CASE("named topologies") {
  CHECK(named_topology("complete(4)").link_count() == 12);
  CHECK(named_topology("ring(8,2)").node_count() == 8);
  CHECK_THROWS_AS(named_topology("blob(3)"), std::invalid_argument);
  CHECK_THROWS_AS(named_topology("ring(8)"), std::invalid_argument);
}

TEST_CASE("missing file reports a readable error") {
  const auto result = parse_scenario("/nonexistent/path.scn");
  CHECK_FALSE(result.ok());
  CHECK(result.errors.size() == 1);
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.scn"), std::runtime_error);
}
