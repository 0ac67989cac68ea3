"""Smoke tests for the python bindings: every main operation is reachable and
returns sane values on small problems."""

import os

import numpy as np
import pytest

import _mtobs as m

SCENARIO_DIR = os.environ.get("MTOBS_SCENARIO_DIR", os.path.join(
    os.path.dirname(__file__), "..", "..", "scenarios"))


def test_graph_connectivity_numbers():
    ring = m.DirectedGraph.ring(8, 2)
    assert m.node_connectivity(ring) == 4
    assert m.link_connectivity(ring) == 4
    assert m.is_strongly_connected(ring)
    assert m.node_connectivity(m.DirectedGraph.complete(5)) == 4

    g = m.DirectedGraph(3)
    g.add_link(0, 1)
    g.add_link(1, 2)
    g.add_link(2, 0)
    assert m.is_strongly_connected(g)
    assert m.scc_decompose(g).components == [[0, 1, 2]]


def test_kinematic_parent_components():
    model = m.build_observer_model(m.ModelKind.nca, 1, 0.1)
    pattern = m.StructuredMatrix.from_dense(model.global_matrix)
    scc = m.scc_decompose(m.system_digraph(pattern))
    parents = {tuple(scc.components[c]) for c in scc.parent_components()}
    assert parents == {(4,), (5,)}

    placement = m.SensorPlacement(1, [[4, 5]])
    verdict = m.centralized_structural_observability(pattern, placement)
    assert verdict.observable


def test_consensus_matrix_and_kronecker():
    g = m.DirectedGraph.cycle(5).with_self_loops()
    w = m.build_row_stochastic(g)
    assert np.allclose(w.sum(axis=1), 1.0)
    a = m.build_observer_model(m.ModelKind.ncv, 4, 0.1).global_matrix
    q = m.kronecker(w, a)
    assert q.shape == (40, 40)
    assert abs(m.spectral_radius(q) - 1.0) < 1e-6


def test_scalar_gain_synthesis():
    w = np.eye(1)
    a = np.array([[2.0]])
    dc = np.eye(1)
    cfg = m.SynthesisConfig()
    cfg.method = m.GainMethod.spectral_descent
    res = m.synthesize_gain(w, a, dc, cfg)
    assert res.converged
    k = res.gain.blocks[0][0, 0]
    assert 0.5 < k < 1.5
    assert res.achieved_spectral_radius < 1.0


def test_scenario_pipeline():
    sc = m.load_scenario(os.path.join(SCENARIO_DIR, "fig1.scn"))
    assert sc.cav_count() == 5
    assert sc.hdv_count() == 4

    pattern = sc.dynamics_pattern()
    verdict = m.distributed_structural_observability(pattern, sc.cav_graph,
                                                     sc.placement())
    assert verdict.observable
    assert verdict.redundancy_level == 1

    om = sc.observer_model()
    w = m.build_row_stochastic(sc.cav_graph)
    dc = m.build_dc(sc.placement(), sc.cav_graph, om.state_dim())
    cfg = m.SynthesisConfig()
    cfg.method = m.GainMethod.spectral_descent
    design = m.synthesize_gain(w, om.global_matrix, dc, cfg)
    assert design.converged

    trace = m.run_distributed(sc, design.gain, 120, 5)
    metrics = m.compute_metrics(trace, 60)
    assert metrics.position_aggregate < 5.0
    assert len(trace.disagreement) == 121

    csv = m.trace_csv(trace)
    assert csv.startswith("step,entity,role,hdv,position,velocity,sq_error")


def test_ground_truth_simulation():
    p = m.HdvParams()
    p.lambda_gain = 0.0
    p.noise_std = 0.0
    spec = m.HdvSpec()
    spec.params = p
    spec.initial_position = 3.0
    spec.initial_velocity = 15.0
    truth = m.simulate_ground_truth([spec], 0.1, 10, 1)
    assert truth.velocity[0] == pytest.approx([15.0] * 11)
    assert truth.position[0][10] == pytest.approx(3.0 + 15.0)
