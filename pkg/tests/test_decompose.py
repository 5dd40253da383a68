"""Tests for the diagonal-equalizing rotations, the vector averaging of
density matrices, and the two-term block split."""

import numpy as np
import pytest

from cptwb import channels as chan
from cptwb import decompose as dec
from cptwb import linalg as la
from cptwb import zoo
from cptwb._rng import random_density, rng_from


def _random_block_psd(d1, rng, rank=None):
    n = 2 * d1
    r = n if rank is None else rank
    g = rng.normal(size=(n, r)) + 1j * rng.normal(size=(n, r))
    return g @ g.conj().T


# ---------------------------------------------------------------------------
# Schur-Horn rotations
# ---------------------------------------------------------------------------

def test_schur_horn_equalize_basics():
    lam = np.array([0.7, 0.2, 0.1, 0.0])
    r = dec.schur_horn_equalize(lam)
    # real orthogonal
    assert np.abs(r @ r.T - np.eye(4)).max() < 1e-12
    c = r @ np.diag(lam) @ r.T
    assert np.abs(np.diag(c) - 0.25).max() < 1e-12
    # similarity: spectrum untouched
    assert np.abs(np.linalg.eigvalsh(c) - np.sort(lam)).max() < 1e-12


def test_schur_horn_equalize_flat_input_is_identity():
    r = dec.schur_horn_equalize(np.full(3, 1.0 / 3.0))
    assert np.abs(r - np.eye(3)).max() < 1e-12


def test_schur_horn_equalize_random_spectra():
    rng = np.random.default_rng(60)
    for _ in range(50):
        d = int(rng.integers(1, 9))
        lam = rng.exponential(size=d)
        r = dec.schur_horn_equalize(lam)
        c = r @ np.diag(lam) @ r.T
        t = lam.sum() / d
        assert np.abs(np.diag(c) - t).max() < 1e-10
        assert np.abs(r @ r.T - np.eye(d)).max() < 1e-12


def test_schur_horn_equalize_rejects_empty():
    with pytest.raises(ValueError):
        dec.schur_horn_equalize([])


# ---------------------------------------------------------------------------
# averages of rank-one projectors
# ---------------------------------------------------------------------------

def test_horn_vectors_reconstruct():
    rng = np.random.default_rng(61)
    for trial in range(20):
        d = int(rng.integers(2, 9))
        rho = random_density(d, rng)
        xs = dec.horn_vectors(rho)
        assert len(xs) == d
        acc = sum(np.outer(x, x.conj()) for x in xs) / d
        assert np.abs(acc - rho).max() < 1e-10
        for x in xs:
            assert abs(np.linalg.norm(x) - 1.0) < 1e-10


def test_horn_vectors_maximally_mixed_gives_orthonormal_basis():
    xs = dec.horn_vectors(np.eye(4) / 4)
    g = np.array([[np.vdot(a, b) for b in xs] for a in xs])
    assert np.abs(g - np.eye(4)).max() < 1e-10


def test_horn_vectors_pure_state_gives_copies():
    psi = np.array([1.0, 1.0j, 0.0]) / np.sqrt(2)
    xs = dec.horn_vectors(np.outer(psi, psi.conj()))
    for x in xs:
        assert abs(abs(np.vdot(x, psi)) - 1.0) < 1e-10


def test_horn_vectors_rejects_bad_trace_and_negativity():
    with pytest.raises(ValueError):
        dec.horn_vectors(np.eye(3))
    with pytest.raises(la.NotPSDError):
        dec.horn_vectors(np.diag([1.2, -0.2]))


# ---------------------------------------------------------------------------
# two-term block split
# ---------------------------------------------------------------------------

def test_block_matrix_accessors():
    rng = np.random.default_rng(62)
    m = _random_block_psd(2, rng)
    bm = dec.BlockMatrix(2, 2, m)
    assert np.abs(bm.block(0, 1) - m[0:2, 2:4]).max() == 0.0
    assert np.abs(bm.diagonal_block_sum - (m[0:2, 0:2] + m[2:4, 2:4])).max() == 0.0
    with pytest.raises(la.ShapeError):
        dec.BlockMatrix(3, 2, m)


def test_szarek_split_scalar_blocks():
    # d1 = 1: A = [[1, c], [c, 1]]/2 splits into two rank-one halves with
    # off-diagonal phases e^{±iθ}, cos θ = c
    c = 0.6
    a = np.array([[1.0, c], [c, 1.0]]) / 2.0
    d = dec.szarek_split(a, d1=1)
    assert d.weights == (0.5, 0.5)
    mix = 0.5 * (d.terms[0] + d.terms[1])
    assert np.abs(mix - a).max() < 1e-12
    for term in d.terms:
        assert la.numerical_rank(term) == 1
        assert abs(term[0, 0] - 0.5) < 1e-12 and abs(term[1, 1] - 0.5) < 1e-12
        assert abs(abs(term[0, 1]) - 0.5) < 1e-12


def test_szarek_split_random_blocks():
    rng = np.random.default_rng(63)
    for trial in range(30):
        d1 = int(rng.integers(1, 7))
        rank = int(rng.integers(1, 2 * d1 + 1))
        a = _random_block_psd(d1, rng, rank=rank)
        d = dec.szarek_split(dec.BlockMatrix(d1, 2, a))
        mix = 0.5 * (d.terms[0] + d.terms[1])
        scale = max(np.abs(a).max(), 1.0)
        assert np.abs(mix - a).max() < 1e-9 * scale
        for term, x in zip(d.terms, d.factors):
            assert la.numerical_rank(term) <= d1
            # each term is the Gram matrix of its factor
            assert np.abs(term - x @ x.conj().T).max() < 1e-9 * scale
            # diagonal blocks are preserved exactly up to roundoff
            assert np.abs(term[:d1, :d1] - a[:d1, :d1]).max() < 1e-9 * scale
            assert np.abs(term[d1:, d1:] - a[d1:, d1:]).max() < 1e-9 * scale
            # PSD halves
            la.psd_eigvals(term, what="szarek term")


def test_szarek_split_flags_support_mismatch():
    # coupling through a numerically dead direction of A11 cannot be
    # balanced; the split must refuse rather than produce junk
    a = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1e-20, 1e-7, 0.0],
            [0.0, 1e-7, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    with pytest.raises(ValueError):
        dec.szarek_split(a, d1=2)


def test_szarek_split_shape_errors():
    with pytest.raises(ValueError):
        dec.szarek_split(np.eye(4))  # no d1
    with pytest.raises(la.ShapeError):
        dec.szarek_split(np.eye(6), d1=2)
    with pytest.raises(la.ShapeError):
        dec.szarek_split(dec.BlockMatrix(2, 3, np.eye(6)))


# ---------------------------------------------------------------------------
# Choi-level split
# ---------------------------------------------------------------------------

def test_szarek_split_choi_halves_are_channels():
    for seed in (1, 2, 3):
        phi = zoo.random_channel(3, 2, 5, seed=seed)
        j = chan.kraus_to_choi(phi)
        h1, h2 = dec.szarek_split_choi(j)
        for h in (h1, h2):
            assert chan.choi_rank(h) <= 3
            half = chan.choi_to_kraus(h)
            rep = chan.validate_cpt(half, tol=1e-8)
            assert rep.ok, rep.messages
        mix = 0.5 * (h1.matrix + h2.matrix)
        assert np.abs(mix - j.matrix).max() < 1e-9


def test_szarek_split_choi_rejects_non_qubit_output():
    j = chan.kraus_to_choi(zoo.identity_channel(3))
    with pytest.raises(la.ShapeError):
        dec.szarek_split_choi(j)


# ---------------------------------------------------------------------------
# combined-form verification
# ---------------------------------------------------------------------------

def test_verify_ar4_on_block_factors():
    rng = np.random.default_rng(64)
    d1 = 3
    a = _random_block_psd(d1, rng)
    d = dec.szarek_split(dec.BlockMatrix(d1, 2, a))
    rep = dec.verify_ar4(a, d.factors, rank_bound=d1)
    assert rep.ok
    assert rep.reconstruction_residual < 1e-9
    assert all(r <= d1 for r in rep.ranks)


def test_verify_ar4_flags_corruption():
    rng = np.random.default_rng(65)
    d1 = 2
    a = _random_block_psd(d1, rng)
    d = dec.szarek_split(dec.BlockMatrix(d1, 2, a))
    bad = list(d.factors)
    bad[0] = bad[0] + 0.05
    rep = dec.verify_ar4(a, bad, rank_bound=d1)
    assert not rep.ok


def test_decomposition_to_json_round_trip_shape():
    rng = np.random.default_rng(66)
    a = _random_block_psd(2, rng)
    d = dec.szarek_split(dec.BlockMatrix(2, 2, a))
    data = dec.decomposition_to_json(d)
    assert data["rank_bound"] == 2
    assert len(data["terms"]) == 2
    back = la.matrix_from_json(data["terms"][0])
    assert np.abs(back - d.terms[0]).max() == 0.0
