import numpy as np
import pytest

from topinfer.detector import (
    AccessLog,
    DetectorConfig,
    DetectorError,
    NeighborhoodOracle,
    calibrate_threshold,
    default_walk_length,
    detect,
    detect_many,
    detection_rate,
    roc_table,
    single_trial,
)
from topinfer.ensembles import ErdosRenyi, PlantedBridge
from topinfer.graph import build_graph, complete_graph, disjoint_union
from topinfer.walks import simulate_walks

TWO_K10 = disjoint_union(complete_graph(10), complete_graph(10))


def test_config_validation():
    with pytest.raises(DetectorError):
        DetectorConfig(repetitions=4)
    with pytest.raises(DetectorError):
        DetectorConfig(n_pairs=0)
    with pytest.raises(DetectorError):
        DetectorConfig(walk_length=0)
    assert DetectorConfig().length_for(1000) == default_walk_length(1000) == 1000


def test_oracle_returns_incident_only():
    o = NeighborhoodOracle(complete_graph(4))
    assert len(o.incident(2)) == 3
    assert o.log.vertices() == {2} and o.log.violations == 0
    assert NeighborhoodOracle(build_graph(1, [])).incident(0) == []
    with pytest.raises(DetectorError):
        o.incident(9)


def test_log_equals_walk_support():
    g = complete_graph(7)
    o = NeighborhoodOracle(g)
    pos = np.array([3])
    seen = {3}
    from topinfer._seeding import hash_uniform

    keys = np.array([12345], dtype=np.uint64)
    for t in range(1, 30):
        pos, _ = o.step(pos, hash_uniform(keys, t))
        seen.add(int(pos[0]))
    # every vertex queried is one the walker stood on before a move
    assert o.log.vertices() <= seen
    assert o.log.n_queries == 29


def test_cross_component_pair_scores_zero():
    cfg = DetectorConfig(n_pairs=16, walk_length=40)
    res = single_trial(TWO_K10, cfg, 3)
    # pairs are either inside a component (positive overlap) or across (exactly zero)
    assert any(x == 0.0 for x in res.pair_overlaps)
    assert any(x > 0.3 for x in res.pair_overlaps)


def test_empty_graph_all_stuck():
    res = single_trial(build_graph(5, []), DetectorConfig(walk_length=10), 1)
    assert res.stuck_pairs == 8 and res.statistic == 0.0 and res.vote


def test_k4_high_overlap():
    stats = [single_trial(complete_graph(4), DetectorConfig(walk_length=50), s).statistic for s in range(200)]
    assert np.mean(np.array(stats) > 0.5) > 0.95


def test_detect_deterministic_and_batched():
    cfg = DetectorConfig(walk_length=60, threshold=0.45)
    graphs = [TWO_K10, complete_graph(20), ErdosRenyi(20, 0.5).sample(1)]
    seeds = [4, 5, 6]
    solo = [detect(g, cfg, s) for g, s in zip(graphs, seeds)]
    assert solo == [detect(g, cfg, s) for g, s in zip(graphs, seeds)]
    assert detect_many(graphs, cfg, seeds, batch=2) == solo


def test_locality_over_many_runs():
    log = AccessLog(0)
    cfg = DetectorConfig(walk_length=100, threshold=0.4)
    graphs = [PlantedBridge(50, 50, k, 0.2).sample(k) for k in range(10)]
    detect_many(graphs, cfg, list(range(10)), log=log)
    assert log.violations == 0 and log.n_queries > 0


def test_disconnected_flagged_and_dense_connected():
    # same-component pairs overlap ~0.85 at this length; half the pairs straddle two K10s
    cfg = DetectorConfig(walk_length=400, threshold=0.7)
    assert detect(TWO_K10, cfg, 9).decision == "suspect-disconnected"
    assert detect(complete_graph(20), cfg, 9).decision == "connected"


def test_roc_and_calibration():
    roc = roc_table(np.array([0.1, 0.2]), np.array([0.5, 0.6]))
    assert min(r["balanced_error"] for r in roc) == 0.0
    pos = PlantedBridge(30, 30, 0, 0.3)
    cal = calibrate_threshold(pos, ErdosRenyi(60, 0.3), DetectorConfig(walk_length=120), 60, 1)
    assert cal.balanced_error < 0.1
    same = calibrate_threshold(pos, pos, DetectorConfig(walk_length=120), 200, 2)
    assert same.balanced_error > 0.35
    with pytest.raises(DetectorError):
        calibrate_threshold(pos, pos, DetectorConfig(), 1, 0)


def test_degenerate_calibration():
    empty = PlantedBridge(3, 3, 0, 0.0)
    with pytest.raises(DetectorError):
        calibrate_threshold(empty, empty, DetectorConfig(walk_length=5), 10, 0)


def test_detection_rate_disconnected():
    rate, verdicts = detection_rate(PlantedBridge(20, 20, 0, 0.6), DetectorConfig(walk_length=400, threshold=0.7), 40, 3)
    assert rate == 1.0 and len(verdicts) == 40


def test_walk_rule_matches_simulator():
    # the detector's oracle and the walks module use the same uniform-incident-edge rule
    g = complete_graph(5)
    traj = simulate_walks(g, 0, 200, 2000, 1)
    freq = np.bincount(traj[:, 1:].ravel(), minlength=5) / traj[:, 1:].size
    assert np.allclose(freq, 0.2, atol=0.01)
