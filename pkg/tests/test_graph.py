import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from plpca.errors import ConfigurationError
from plpca.graph import (
    GraphLaplacian,
    build_knn_graph,
    laplacian_quadratic,
    to_coordinate_text,
)

from oracles import connected_components, quadratic_oracle


def test_two_point_graph_unit_weight():
    X = np.array([[0.0], [1.0]])
    g = build_knn_graph(X, knn_k=1, eta=1.0)
    assert g.W[0, 1] == pytest.approx(np.exp(-1.0))
    assert g.W[0, 0] == 0.0
    # L = D - W with D the row sums
    w = g.W[0, 1]
    assert np.allclose(g.L, [[w, -w], [-w, w]])


def test_unit_square_topology_and_weights():
    # knn_k=1 picks each point's unique nearest neighbour (side, not
    # diagonal); the union of directed picks gives 3 edges here because
    # stable argsort breaks the two equidistant sides toward the smaller
    # index.
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    g = build_knn_graph(X, knn_k=1, eta=1.0)
    edges = {(i, j) for i in range(4) for j in range(i + 1, 4) if g.W[i, j] > 0}
    assert edges == {(0, 1), (0, 2), (1, 3)}
    for i, j in edges:
        assert g.W[i, j] == pytest.approx(np.exp(-1.0))


def test_eta_auto_is_squared_median_distance():
    X = np.array([[0.0], [1.0], [3.0]])
    g = build_knn_graph(X, knn_k=1, eta="auto")
    # connected pairs: (0,1) d=1 and (1,2) d=2 -> median distance 1.5
    assert g.eta == pytest.approx(1.5**2)
    assert g.W[0, 1] == pytest.approx(np.exp(-1.0 / 2.25))


def test_eta_auto_coincident_points_falls_back_to_one():
    X = np.array([[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]])
    g = build_knn_graph(X, knn_k=1, eta="auto")
    assert g.eta == 1.0
    assert g.W[0, 1] == pytest.approx(1.0)  # exp(0)


def test_knn_k_bounds():
    X = np.zeros((4, 2)) + np.arange(4)[:, None]
    with pytest.raises(ConfigurationError):
        build_knn_graph(X, knn_k=4)  # only 3 other points exist
    with pytest.raises(ConfigurationError):
        build_knn_graph(X, knn_k=0)


def test_eta_validation():
    X = np.zeros((3, 2)) + np.arange(3)[:, None]
    with pytest.raises(ConfigurationError):
        build_knn_graph(X, knn_k=1, eta=-2.0)
    with pytest.raises(ConfigurationError):
        build_knn_graph(X, knn_k=1, eta="tiny")


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=3, max_value=12),
    k=st.integers(min_value=1, max_value=4),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_graph_invariants(n, k, seed):
    if k >= n:
        k = n - 1
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3))
    g = build_knn_graph(X, knn_k=k)
    W, D, L = g.W, g.D, g.L
    assert np.array_equal(W, W.T)
    assert np.all(np.diag(W) == 0.0)
    assert np.all(W >= 0.0)
    assert np.allclose(np.diag(D), W.sum(axis=1))
    assert np.array_equal(L, D - W)
    assert np.allclose(L.sum(axis=1), 0.0, atol=1e-12)
    # every row keeps at least k neighbours after the union
    assert np.all((W > 0).sum(axis=1) >= k)
    # PSD up to round-off
    ev = np.linalg.eigvalsh(L)
    assert ev.min() > -1e-10


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(min_value=3, max_value=10),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_zero_eigenvalue_count_matches_components(n, seed):
    rng = np.random.default_rng(seed)
    # two clusters far apart can disconnect the knn graph; count the
    # components with union-find over the realized edge set
    X = rng.normal(size=(n, 2))
    X[: n // 2] += 100.0
    g = build_knn_graph(X, knn_k=1)
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if g.W[i, j] > 0
    ]
    # a realized edge with near-zero weight blurs the harmonic count;
    # the multiplicity property assumes weights clear the tolerance
    assume(all(g.W[i, j] > 1e-6 for i, j in edges))
    expected = connected_components(n, edges)
    ev = np.linalg.eigvalsh(g.L)
    assert int(np.sum(np.abs(ev) < 1e-8)) == expected


def test_quadratic_two_node_value():
    # tr(Q^T L Q) on a single edge of weight w equals w * (q_i - q_j)^2
    w = 0.7
    W = np.array([[0.0, w], [w, 0.0]])
    L = np.diag(W.sum(axis=1)) - W
    Q = np.array([[1.0], [0.0]])
    assert laplacian_quadratic(Q, L) == pytest.approx(w)


def test_quadratic_matches_pairwise_oracle():
    rng = np.random.default_rng(4)
    for _ in range(10):
        n, k = 6, 2
        X = rng.normal(size=(n, 3))
        g = build_knn_graph(X, knn_k=2)
        Q = rng.normal(size=(n, k))
        assert laplacian_quadratic(Q, g.L) == pytest.approx(
            quadratic_oracle(Q, g.W), rel=1e-12, abs=1e-12
        )


def test_quadratic_constant_embedding_is_zero():
    X = np.arange(5, dtype=float)[:, None]
    g = build_knn_graph(X, knn_k=2)
    Q = np.ones((5, 3))
    assert laplacian_quadratic(Q, g.L) == pytest.approx(0.0, abs=1e-12)


def test_quadratic_zero_laplacian():
    Q = np.random.default_rng(0).normal(size=(4, 2))
    assert laplacian_quadratic(Q, np.zeros((4, 4))) == 0.0


def test_graph_laplacian_validates_consistency():
    W = np.array([[0.0, 1.0], [1.0, 0.0]])
    D = np.diag(W.sum(axis=1))
    with pytest.raises(ConfigurationError):
        GraphLaplacian(W=W, D=D, L=D + W, eta=1.0, knn_k=1)  # wrong sign


def test_coordinate_text_format():
    M = np.array([[0.0, -1.5], [2.0, 0.0]])
    text = to_coordinate_text(M)
    assert text == "0 1 -1.5\n1 0 2.0\n"
    assert to_coordinate_text(np.zeros((2, 2))) == ""
