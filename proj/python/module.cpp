#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mtobs/gain_synthesis.hpp"
#include "mtobs/graph.hpp"
#include "mtobs/matrix_ops.hpp"
#include "mtobs/observability.hpp"
#include "mtobs/observer.hpp"
#include "mtobs/scenario.hpp"
#include "mtobs/traffic.hpp"

namespace py = pybind11;
using namespace mtobs;

PYBIND11_MODULE(_mtobs, m) {
  m.doc() = "distributed observability analysis and simulation for mixed-traffic "
            "vehicle networks";

  // ---- graphs
  py::class_<DirectedGraph>(m, "DirectedGraph")
      .def(py::init<int>(), py::arg("node_count"))
      .def_property_readonly("node_count", &DirectedGraph::node_count)
      .def_property_readonly("link_count", &DirectedGraph::link_count)
      .def("add_link", py::overload_cast<int, int>(&DirectedGraph::add_link))
      .def("add_link_weighted",
           py::overload_cast<int, int, double>(&DirectedGraph::add_link))
      .def("has_link", &DirectedGraph::has_link)
      .def("links", &DirectedGraph::links)
      .def("in_neighbors", &DirectedGraph::in_neighbors)
      .def("out_neighbors", &DirectedGraph::out_neighbors)
      .def("with_self_loops", &DirectedGraph::with_self_loops)
      .def("symmetrized", &DirectedGraph::symmetrized)
      .def("serialize", &DirectedGraph::serialize)
      .def_static("parse", &DirectedGraph::parse_string)
      .def_static("complete", &DirectedGraph::complete)
      .def_static("cycle", &DirectedGraph::cycle)
      .def_static("star", &DirectedGraph::star)
      .def_static("path", &DirectedGraph::path)
      .def_static("ring", &DirectedGraph::ring)
      .def("__eq__", [](const DirectedGraph& a, const DirectedGraph& b) { return a == b; });

  py::class_<SccDecomposition>(m, "SccDecomposition")
      .def_readonly("components", &SccDecomposition::components)
      .def_readonly("component_of", &SccDecomposition::component_of)
      .def_readonly("parent_flags", &SccDecomposition::parent_flags)
      .def("parent_components", &SccDecomposition::parent_components);

  m.def("scc_decompose", &scc_decompose);
  m.def("is_strongly_connected", &is_strongly_connected);
  m.def("link_connectivity", &link_connectivity);
  m.def("node_connectivity", &node_connectivity);
  m.def("link_disjoint_path_count", &link_disjoint_path_count);
  m.def("node_disjoint_path_count", &node_disjoint_path_count);
  m.def("survives_removal", &survives_removal);
  m.def("named_topology", &named_topology);

  // ---- matrices
  m.def("kronecker", &kronecker, py::arg("lhs"), py::arg("rhs"),
        py::arg("max_dim") = 4096);
  py::enum_<WeightRule>(m, "WeightRule")
      .value("uniform_neighbors", WeightRule::uniform_neighbors)
      .value("link_weights", WeightRule::link_weights);
  m.def("build_row_stochastic", &build_row_stochastic, py::arg("graph"),
        py::arg("rule") = WeightRule::uniform_neighbors);
  m.def("build_dc", &build_dc);
  m.def("assemble_ahat", &assemble_ahat);
  m.def("spectral_radius", &spectral_radius);
  m.def("is_row_stochastic", &is_row_stochastic, py::arg("w"), py::arg("tol") = 1e-9);

  py::class_<SensorPlacement>(m, "SensorPlacement")
      .def(py::init([](int cavs, std::vector<std::vector<int>> measured) {
             return SensorPlacement{cavs, std::move(measured)};
           }),
           py::arg("cav_count"), py::arg("measured"))
      .def_readwrite("cav_count", &SensorPlacement::cav_count)
      .def_readwrite("measured", &SensorPlacement::measured);

  py::class_<ObserverGain>(m, "ObserverGain")
      .def_static("zero", &ObserverGain::zero)
      .def_readwrite("blocks", &ObserverGain::blocks)
      .def("global_matrix", &ObserverGain::global)
      .def("serialize", &ObserverGain::serialize)
      .def_static("parse", &ObserverGain::parse_string);

  // ---- structural observability
  py::class_<StructuredMatrix>(m, "StructuredMatrix")
      .def(py::init<int, int>())
      .def("set", &StructuredMatrix::set)
      .def_static("from_dense", &StructuredMatrix::from_dense)
      .def_readonly("rows", &StructuredMatrix::rows)
      .def_readonly("cols", &StructuredMatrix::cols);

  py::class_<ObservabilityVerdict>(m, "ObservabilityVerdict")
      .def_readonly("observable", &ObservabilityVerdict::observable)
      .def_readonly("uncovered_parent_components",
                    &ObservabilityVerdict::uncovered_parent_components)
      .def_readonly("redundancy_level", &ObservabilityVerdict::redundancy_level)
      .def_readonly("diagnostics", &ObservabilityVerdict::diagnostics)
      .def("to_key_values", &ObservabilityVerdict::to_key_values);

  m.def("system_digraph", &system_digraph);
  m.def("centralized_structural_observability", &centralized_structural_observability);
  m.def("distributed_structural_observability", &distributed_structural_observability);
  m.def("redundant_observability_level", &redundant_observability_level);
  m.def("numeric_observability_check", &numeric_observability_check, py::arg("a"),
        py::arg("w"), py::arg("placement"), py::arg("rank_tol_factor") = 0.0);

  // ---- gain synthesis
  py::enum_<GainMethod>(m, "GainMethod")
      .value("ccl", GainMethod::ccl)
      .value("spectral_descent", GainMethod::spectral_descent);
  py::class_<SynthesisConfig>(m, "SynthesisConfig")
      .def(py::init<>())
      .def_readwrite("method", &SynthesisConfig::method)
      .def_readwrite("margin", &SynthesisConfig::margin)
      .def_readwrite("ccl_max_outer", &SynthesisConfig::ccl_max_outer)
      .def_readwrite("ccl_newton_budget", &SynthesisConfig::ccl_newton_budget)
      .def_readwrite("descent_max_sweeps", &SynthesisConfig::descent_max_sweeps)
      .def_readwrite("allow_fallback", &SynthesisConfig::allow_fallback);
  py::class_<SynthesisResult>(m, "SynthesisResult")
      .def_readonly("gain", &SynthesisResult::gain)
      .def_readonly("achieved_spectral_radius", &SynthesisResult::achieved_spectral_radius)
      .def_readonly("method", &SynthesisResult::method)
      .def_readonly("iterations", &SynthesisResult::iterations)
      .def_readonly("converged", &SynthesisResult::converged);
  m.def("synthesize_gain", &synthesize_gain, py::arg("w"), py::arg("a"), py::arg("dc"),
        py::arg("config") = SynthesisConfig{});

  // ---- traffic models
  py::enum_<ModelKind>(m, "ModelKind")
      .value("ncv", ModelKind::ncv)
      .value("nca", ModelKind::nca);
  py::enum_<DrivingMode>(m, "DrivingMode")
      .value("free_flow", DrivingMode::free_flow)
      .value("car_following", DrivingMode::car_following);
  py::class_<VelocityProfile>(m, "VelocityProfile")
      .def(py::init<>())
      .def("add", &VelocityProfile::add)
      .def("at", &VelocityProfile::at);
  py::class_<HdvParams>(m, "HdvParams")
      .def(py::init<>())
      .def_readwrite("lambda_gain", &HdvParams::lambda_gain)
      .def_readwrite("reaction_delay", &HdvParams::reaction_delay)
      .def_readwrite("alpha1", &HdvParams::alpha1)
      .def_readwrite("alpha2", &HdvParams::alpha2)
      .def_readwrite("beta1", &HdvParams::beta1)
      .def_readwrite("beta2", &HdvParams::beta2)
      .def_readwrite("noise_std", &HdvParams::noise_std)
      .def_readwrite("distance_threshold", &HdvParams::distance_threshold)
      .def_readwrite("rate_coefficients", &HdvParams::rate_coefficients)
      .def_readwrite("desired_velocity", &HdvParams::desired_velocity);
  py::class_<HdvSpec>(m, "HdvSpec")
      .def(py::init<>())
      .def_readwrite("params", &HdvSpec::params)
      .def_readwrite("initial_position", &HdvSpec::initial_position)
      .def_readwrite("initial_velocity", &HdvSpec::initial_velocity);
  py::class_<GroundTruth>(m, "GroundTruth")
      .def_readonly("position", &GroundTruth::position)
      .def_readonly("velocity", &GroundTruth::velocity)
      .def_readonly("collision_warnings", &GroundTruth::collision_warnings)
      .def("horizon", &GroundTruth::horizon);
  m.def("simulate_ground_truth", &simulate_ground_truth);
  m.def("ground_truth_csv", &ground_truth_csv);

  py::class_<ObserverModel>(m, "ObserverModel")
      .def_readonly("block", &ObserverModel::block)
      .def_readonly("global_matrix", &ObserverModel::global)
      .def_readonly("sample_time", &ObserverModel::sample_time)
      .def("state_dim", &ObserverModel::state_dim)
      .def("position_index", &ObserverModel::position_index)
      .def("velocity_index", &ObserverModel::velocity_index);
  m.def("build_observer_model", &build_observer_model);

  // ---- scenarios and simulation
  py::class_<Scenario>(m, "Scenario")
      .def_readonly("model", &Scenario::model)
      .def_readonly("sample_time", &Scenario::sample_time)
      .def_readonly("horizon", &Scenario::horizon)
      .def_readonly("seed", &Scenario::seed)
      .def_readonly("measurement_variance", &Scenario::measurement_variance)
      .def_readonly("cav_graph", &Scenario::cav_graph)
      .def("cav_count", &Scenario::cav_count)
      .def("hdv_count", &Scenario::hdv_count)
      .def("placement", &Scenario::placement)
      .def("observer_model", &Scenario::observer_model)
      .def("dynamics_pattern", &Scenario::dynamics_pattern);
  m.def("load_scenario", &load_scenario);
  m.def("serialize_scenario", &serialize_scenario);

  py::class_<SimulationTrace>(m, "SimulationTrace")
      .def_readonly("state_dim", &SimulationTrace::state_dim)
      .def_readonly("cav_count", &SimulationTrace::cav_count)
      .def_readonly("truth_state", &SimulationTrace::truth_state)
      .def_readonly("squared_error", &SimulationTrace::squared_error)
      .def_readonly("disagreement", &SimulationTrace::disagreement)
      .def_readonly("event_log", &SimulationTrace::event_log)
      .def("horizon", &SimulationTrace::horizon);
  py::class_<MseeSummary>(m, "MseeSummary")
      .def_readonly("position_per_cav", &MseeSummary::position_per_cav)
      .def_readonly("velocity_per_cav", &MseeSummary::velocity_per_cav)
      .def_readonly("position_aggregate", &MseeSummary::position_aggregate)
      .def_readonly("velocity_aggregate", &MseeSummary::velocity_aggregate)
      .def("to_key_values", &MseeSummary::to_key_values);

  m.def("run_distributed", &run_distributed, py::arg("scenario"), py::arg("gain"),
        py::arg("horizon") = std::nullopt, py::arg("seed") = std::nullopt);
  m.def("run_distributed_auto", &run_distributed_auto, py::arg("scenario"),
        py::arg("horizon") = std::nullopt, py::arg("seed") = std::nullopt);
  m.def("run_centralized_kalman", &run_centralized_kalman, py::arg("scenario"),
        py::arg("horizon") = std::nullopt, py::arg("seed") = std::nullopt);
  m.def("compute_metrics", &compute_metrics, py::arg("trace"),
        py::arg("steady_start") = 0);
  m.def("trace_csv", &trace_csv);
}
