import numpy as np
import pytest

from plpca.errors import ConfigurationError, InclusionError
from plpca.topology import (
    SimplicialComplex,
    boundary_matrix,
    build_complex_vr,
    combinatorial_laplacian,
    combinatorial_spectrum,
    persistent_laplacian_q,
)

from oracles import (
    betti_oracle,
    boundary_oracle,
    exact_rank,
    persistent_betti_oracle,
    random_vr_simplices,
)


def _complex(simplices):
    return SimplicialComplex(simplices=simplices)


HOLLOW_TRIANGLE = {
    0: [(0,), (1,), (2,)],
    1: [(0, 1), (0, 2), (1, 2)],
}
FILLED_TRIANGLE = {**HOLLOW_TRIANGLE, 2: [(0, 1, 2)]}


# ---------------------------------------------------------------------------
# complex construction


def test_vr_triangle_fills_at_large_epsilon():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    K = build_complex_vr(pts, epsilon=2.0, max_dim=2)
    assert K.simplices[1] == ((0, 1), (0, 2), (1, 2))
    assert K.simplices[2] == ((0, 1, 2),)


def test_vr_epsilon_zero_gives_isolated_vertices():
    pts = np.array([[0.0], [1.0], [2.0]])
    K = build_complex_vr(pts, epsilon=0.0, max_dim=2)
    assert K.simplices[0] == ((0,), (1,), (2,))
    assert K.n_simplices(1) == 0
    assert K.max_dim == 0


def test_vr_square_has_one_loop():
    # unit square, diagonal sqrt(2) excluded: a 4-cycle, beta_1 = 1
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    K = build_complex_vr(pts, epsilon=1.1, max_dim=2)
    assert K.n_simplices(1) == 4
    assert K.n_simplices(2) == 0
    spec = combinatorial_spectrum(K, q=1)
    B1 = boundary_matrix(K, 1)
    assert spec.betti == K.n_simplices(1) - exact_rank(B1)  # = 1
    assert spec.betti == 1


def test_vr_max_dim_truncates():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.6, 0.6]])
    K = build_complex_vr(pts, epsilon=3.0, max_dim=1)
    assert K.max_dim == 1
    assert 2 not in K.simplices


# ---------------------------------------------------------------------------
# validation


def test_complex_rejects_unsorted_vertices():
    with pytest.raises(ConfigurationError):
        _complex({0: [(0,), (1,)], 1: [(1, 0)]})


def test_complex_rejects_missing_face():
    with pytest.raises(ConfigurationError, match="face"):
        _complex({0: [(0,), (1,)], 1: [(0, 2)]})


def test_complex_rejects_duplicates():
    with pytest.raises(ConfigurationError):
        _complex({0: [(0,), (0,), (1,)]})


# ---------------------------------------------------------------------------
# boundary matrices


def test_boundary_of_an_edge():
    K = _complex({0: [(0,), (1,)], 1: [(0, 1)]})
    B1 = boundary_matrix(K, 1)
    assert B1.dtype == np.int64
    assert np.array_equal(B1, [[-1], [1]])


def test_boundary_of_a_triangle_column():
    K = _complex(FILLED_TRIANGLE)
    B2 = boundary_matrix(K, 2)
    # faces of (0,1,2) in lex row order (0,1), (0,2), (1,2) with signs
    # (-1)^i for the i-th omitted vertex
    assert np.array_equal(B2[:, 0], [1, -1, 1])


def test_boundary_q0_is_empty():
    K = _complex(HOLLOW_TRIANGLE)
    B0 = boundary_matrix(K, 0)
    assert B0.shape == (0, 3)


def test_boundary_composition_vanishes():
    K = _complex(FILLED_TRIANGLE)
    B1 = boundary_matrix(K, 1)
    B2 = boundary_matrix(K, 2)
    assert np.array_equal(B1 @ B2, np.zeros((3, 1), dtype=np.int64))


def test_boundary_matches_sign_oracle():
    rng = np.random.default_rng(0)
    for _ in range(15):
        _, _, simp = random_vr_simplices(rng)
        K = _complex(simp)
        for q in range(1, K.max_dim + 1):
            got = boundary_matrix(K, q)
            want = boundary_oracle(K.simplices[q], K.simplices[q - 1])
            assert np.array_equal(got, want)


# ---------------------------------------------------------------------------
# combinatorial spectra


def test_hollow_triangle_l0_spectrum():
    K = _complex(HOLLOW_TRIANGLE)
    spec = combinatorial_spectrum(K, q=0)
    assert spec.eigenvalues == pytest.approx([0.0, 3.0, 3.0], abs=1e-9)
    assert spec.betti == 1


def test_hollow_vs_filled_triangle_beta1():
    hollow = combinatorial_spectrum(_complex(HOLLOW_TRIANGLE), q=1)
    filled = combinatorial_spectrum(_complex(FILLED_TRIANGLE), q=1)
    assert hollow.betti == 1
    assert filled.betti == 0


def test_l0_is_graph_laplacian():
    K = _complex(HOLLOW_TRIANGLE)
    L0 = combinatorial_laplacian(K, 0)
    assert np.array_equal(L0, [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])


def test_betti_matches_rank_oracle_on_random_complexes():
    rng = np.random.default_rng(1)
    for _ in range(20):
        _, _, simp = random_vr_simplices(rng)
        K = _complex(simp)
        for q in range(0, K.max_dim + 1):
            spec = combinatorial_spectrum(K, q)
            assert spec.betti == betti_oracle(K.simplices, q)


def test_spectrum_to_dict_round_trip():
    spec = combinatorial_spectrum(_complex(HOLLOW_TRIANGLE), q=0)
    d = spec.to_dict()
    assert d["q"] == 0 and d["t"] == 0 and d["p"] == 0
    assert d["betti"] == 1
    assert len(d["eigenvalues"]) == 3
    assert isinstance(d["eigenvalues"], list)


# ---------------------------------------------------------------------------
# persistent Laplacians


def test_persistent_reduces_to_combinatorial_when_equal():
    K = _complex(FILLED_TRIANGLE)
    plain = combinatorial_spectrum(K, q=1)
    pers = persistent_laplacian_q(K, K, q=1)
    assert pers.eigenvalues == pytest.approx(plain.eigenvalues, abs=1e-9)
    assert pers.betti == plain.betti


def test_square_loop_dies_when_filled():
    # hollow square includes into a square with both triangles: the loop
    # does not persist
    hollow = _complex(
        {
            0: [(0,), (1,), (2,), (3,)],
            1: [(0, 1), (0, 3), (1, 2), (2, 3)],
        }
    )
    filled = _complex(
        {
            0: [(0,), (1,), (2,), (3,)],
            1: [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)],
            2: [(0, 1, 2), (0, 2, 3)],
        }
    )
    assert combinatorial_spectrum(hollow, q=1).betti == 1
    pers = persistent_laplacian_q(hollow, filled, q=1)
    assert pers.betti == 0
    assert min(pers.eigenvalues) > 1e-8  # no persistent harmonic part


def test_components_merge_under_inclusion():
    two = _complex({0: [(0,), (1,)]})
    joined = _complex({0: [(0,), (1,)], 1: [(0, 1)]})
    assert combinatorial_spectrum(two, q=0).betti == 2
    pers = persistent_laplacian_q(two, joined, q=0)
    assert pers.betti == 1


def test_persistent_betti_matches_rank_oracle():
    rng = np.random.default_rng(2)
    done = 0
    while done < 15:
        pts, eps, small = random_vr_simplices(rng)
        big = build_complex_vr(pts, epsilon=eps * 1.8, max_dim=2).simplices
        if big == small:
            continue
        Ks, Kb = _complex(small), _complex(big)
        for q in (0, 1):
            pers = persistent_laplacian_q(Ks, Kb, q=q)
            assert pers.betti == persistent_betti_oracle(small, big, q)
        done += 1


def test_non_nested_pair_is_rejected():
    K1 = _complex({0: [(0,), (1,)], 1: [(0, 1)]})
    K2 = _complex({0: [(0,), (1,)]})
    with pytest.raises(InclusionError, match="not nested"):
        persistent_laplacian_q(K1, K2, q=0)


def test_persistent_matrix_is_psd_and_symmetric():
    rng = np.random.default_rng(3)
    for _ in range(10):
        pts, eps, small = random_vr_simplices(rng)
        big = build_complex_vr(pts, epsilon=eps * 1.5, max_dim=2).simplices
        pers = persistent_laplacian_q(_complex(small), _complex(big), q=0)
        M = pers.matrix
        assert np.allclose(M, M.T, atol=1e-10)
        assert np.min(np.linalg.eigvalsh(M)) > -1e-8
