import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corpus import REGULAR, corpus
from topinfer._exact import bareiss_det, interpolate, series_inverse
from topinfer.graph import build_graph, complete_graph, cycle_graph, path_graph, petersen_graph
from topinfer.zeta import (
    IdentityDegenerateError,
    PreconditionError,
    WeightedGraphError,
    ZetaPolynomial,
    circuit_rank,
    delta_from_primes,
    enumerate_prime_loops,
    euler_product_truncation,
    hashimoto_matrix,
    kappa_from_zeta,
    loop_counts,
    loop_counts_logderiv,
    loop_counts_trace,
    prime_asymptotics_check,
    radius_of_convergence,
    spanning_tree_count,
    topological_summary,
    weighted_zeta_reciprocal,
    zeta_reciprocal,
)

ORACLES = json.loads((Path(__file__).parent / "data" / "oracles.json").read_text())
CORPUS = corpus()


def test_corpus_matches_frozen_edges():
    assert set(CORPUS) == set(ORACLES)
    for name, g in CORPUS.items():
        assert [list(e[:2]) for e in g.edges] == ORACLES[name]["edges"], name


@pytest.mark.parametrize("name", sorted(ORACLES))
def test_bass_polynomial_matches_symbolic(name):
    assert list(zeta_reciprocal(CORPUS[name]).coeffs) == ORACLES[name]["zeta_reciprocal"]


@pytest.mark.parametrize("name", sorted(ORACLES))
def test_invariants_match_frozen(name):
    g, o = CORPUS[name], ORACLES[name]
    assert loop_counts_trace(g, 12) == o["loop_counts"]
    assert spanning_tree_count(g) == o["spanning_trees"]


def test_k4_coefficients():
    zp = zeta_reciprocal(complete_graph(4))
    assert zp.coeffs == (1, 0, 0, -8, -6, 0, 16, 24, -3, -16, -24, 0, 16)
    assert zp.degree == 12


def test_cycle_zeta():
    for k in range(3, 8):
        zp = zeta_reciprocal(cycle_graph(k))
        expected = [0] * (2 * k + 1)
        expected[0], expected[k], expected[2 * k] = 1, -2, 1
        assert list(zp.coeffs) == expected


def test_euler_product_k4():
    pi = enumerate_prime_loops(complete_graph(4), 12)
    assert pi[:6] == [0, 0, 0, 8, 6, 0]
    assert euler_product_truncation(pi, 12) == list(zeta_reciprocal(complete_graph(4)).coeffs)


def test_loop_counts_k4():
    assert loop_counts(complete_graph(4), 6) == [0, 0, 24, 24, 0, 96]


def test_loop_count_logderiv_consistency():
    zp = zeta_reciprocal(petersen_graph())
    assert loop_counts_logderiv(zp, 12) == loop_counts_trace(petersen_graph(), 12)


def test_kappa_k4():
    zp = zeta_reciprocal(complete_graph(4))
    assert zp.derivative_at(3, 1) == 1536
    assert kappa_from_zeta(zp, 3) == 16 == spanning_tree_count(complete_graph(4))


def test_kappa_degenerate_rank_one():
    with pytest.raises(IdentityDegenerateError):
        kappa_from_zeta(zeta_reciprocal(cycle_graph(5)), circuit_rank(cycle_graph(5)))


def test_preconditions():
    with pytest.raises(PreconditionError):
        zeta_reciprocal(path_graph(4))
    with pytest.raises(PreconditionError):
        radius_of_convergence(build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]))
    with pytest.raises(WeightedGraphError):
        zeta_reciprocal(build_graph(3, [(0, 1, 2), (1, 2), (2, 0)]))


def test_weighted_zeta_is_inflated():
    g = build_graph(3, [(0, 1, 2), (1, 2, 1), (2, 0, 1)])
    assert weighted_zeta_reciprocal(g) == zeta_reciprocal(cycle_graph(4))


@pytest.mark.parametrize("name, d", sorted(REGULAR.items()))
def test_radius_regular(name, d):
    r, err = radius_of_convergence(CORPUS[name])
    assert abs(r - 1 / (d - 1)) < 1e-8
    assert err < 1e-8


def test_radius_irregular_matches_eigvals():
    g = CORPUS["ER8_1"]
    lam = max(abs(np.linalg.eigvals(hashimoto_matrix(g).astype(float))))
    r, err = radius_of_convergence(g)
    assert abs(r - 1 / lam) < max(err, 1e-9) + 1e-9


def test_hashimoto_shape():
    b = hashimoto_matrix(complete_graph(4))
    assert b.shape == (12, 12)
    assert (b.sum(axis=1) == 2).all()


def test_delta_and_asymptotics():
    pi = enumerate_prime_loops(cycle_graph(5), 12)
    assert delta_from_primes(pi) == 5
    assert delta_from_primes(enumerate_prime_loops(CORPUS["K33"], 12)) == 2
    s = topological_summary(petersen_graph(), 12)
    assert s.spanning_trees == 2000 and s.delta == 1
    rows = prime_asymptotics_check(s)
    assert rows[-1]["m"] == 12 and rows[-1]["relative_error"] < rows[0]["relative_error"]


def test_summary_serializes():
    d = topological_summary(complete_graph(4), 6).to_dict()
    json.dumps(d)
    assert d["loop_counts"]["3"] == "24"


def test_polynomial_validation():
    with pytest.raises(AssertionError):
        ZetaPolynomial((2, 1))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=4, max_size=4))
def test_bareiss_matches_float(m):
    assert bareiss_det(m) == round(np.linalg.det(np.array(m, dtype=float)))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=8))
def test_interpolation_roundtrip(coeffs):
    nodes = list(range(-(len(coeffs) // 2), len(coeffs) - len(coeffs) // 2))
    vals = [sum(c * x ** i for i, c in enumerate(coeffs)) for x in nodes]
    assert interpolate(nodes, vals) == coeffs


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=6))
def test_series_inverse(tail):
    a = [1] + tail
    inv = series_inverse(a, 10)
    prod = [sum(a[j] * inv[k - j] for j in range(min(k, len(a) - 1) + 1)) for k in range(11)]
    assert prod == [1] + [0] * 10


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 7), st.data())
def test_random_md2_euler_vs_bass(n, data):
    import itertools

    pairs = list(itertools.combinations(range(n), 2))
    mask = data.draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    g = build_graph(n, [p for p, k in zip(pairs, mask) if k] + [(i, (i + 1) % n) for i in range(n)])
    zp = zeta_reciprocal(g)
    M = 8
    assert euler_product_truncation(enumerate_prime_loops(g, M), M) == list(zp.coeffs[:M + 1])
    rank = circuit_rank(g)
    if rank >= 2:
        assert kappa_from_zeta(zp, rank) == spanning_tree_count(g)
    # 1/zeta vanishes at u = 1 to order exactly the circuit rank
    assert all(zp.derivative_at(k, 1) == 0 for k in range(rank))
    assert zp.derivative_at(rank, 1) != 0 or rank == 1
