"""Dense Hermitian linear algebra kernel.

All heavier modules funnel their numerics through the routines here so that
tolerance policy lives in exactly one place:

* rank decisions use a *relative* cutoff ``RANK_TOL`` (1e-8) against the
  largest singular/eigen value, overridable per call;
* eigenvalues of nominally PSD matrices may dip slightly negative from
  roundoff; anything within ``PSD_CLAMP`` (1e-12) of the largest eigenvalue
  is clamped to zero, anything worse raises :class:`NotPSDError`;
* Hermiticity is accepted up to ``HERM_TOL`` (1e-12) relative to the largest
  entry.

Matrices are plain complex128 ``numpy`` arrays.  Matrix powers of PSD
matrices are pseudo-powers: the kernel (numerically rank-deficient part) is
mapped to zero for every exponent, including negative ones.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "RANK_TOL",
    "PSD_CLAMP",
    "HERM_TOL",
    "ShapeError",
    "NotHermitianError",
    "NotPSDError",
    "as_matrix",
    "dagger",
    "is_hermitian",
    "check_hermitian",
    "herm_eig",
    "svd",
    "psd_eigvals",
    "psd_power",
    "psd_sqrt",
    "kron",
    "partial_trace",
    "numerical_rank",
    "schatten_p",
    "trace_power",
    "matrix_to_json",
    "matrix_from_json",
    "close",
    "log",
]

#: Relative singular-value cutoff for all rank decisions.
RANK_TOL = 1e-8

#: Eigenvalues of PSD inputs more negative than this (times the max
#: eigenvalue) are a hard error instead of being clamped to zero.
PSD_CLAMP = 1e-12

#: Relative tolerance for accepting a matrix as Hermitian.
HERM_TOL = 1e-12


class ShapeError(ValueError):
    """Input has the wrong shape (non-square, dim mismatch, ...)."""


class NotHermitianError(ValueError):
    """Matrix deviates from its conjugate transpose beyond tolerance."""


class NotPSDError(ValueError):
    """Matrix has a genuinely negative eigenvalue (beyond the clamp window)."""


def as_matrix(m) -> np.ndarray:
    """Coerce input to a 2-D complex128 array, rejecting other shapes."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={a.ndim}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(m)).T


def is_hermitian(m, tol: float = HERM_TOL) -> bool:
    """True if ``max|m - m†| <= tol * max|m|`` (zero matrix counts)."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    scale = np.abs(a).max()
    if scale == 0.0:
        return True
    return np.abs(a - dagger(a)).max() <= tol * scale


def check_hermitian(m, tol: float = HERM_TOL, what: str = "matrix") -> np.ndarray:
    """Validate Hermiticity and return the exactly symmetrized matrix.

    Symmetrizing after the check means downstream eigensolves see a matrix
    that is Hermitian to the last bit, so their output is deterministic.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{what} must be square, got shape {a.shape}")
    scale = np.abs(a).max()
    if scale != 0.0 and np.abs(a - dagger(a)).max() > tol * scale:
        raise NotHermitianError(
            f"{what} is not Hermitian: max|m - m†| = "
            f"{np.abs(a - dagger(a)).max():.3e} > {tol:.1e} * {scale:.3e}"
        )
    return (a + dagger(a)) / 2.0


def _canonical_phases(vecs: np.ndarray) -> np.ndarray:
    """Fix each column's global phase: first significant entry positive real.

    The first component with modulus above 1e-12 times the column max is
    rotated onto the positive real axis.  This is the deterministic
    tie-break used everywhere an eigenvector is reported.
    """
    out = np.array(vecs, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        idx = int(np.argmax(mags > 1e-12 * top))
        phase = col[idx] / abs(col[idx])
        out[:, j] = col / phase
    return out


def herm_eig(m, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` sorted descending and
    eigenvectors in the columns of ``v`` (``m @ v[:, i] = w[i] * v[:, i]``).
    Eigenvector phases are canonicalized (first significant component
    positive real) so repeated runs and degenerate subspaces come out
    deterministically on a given platform.
    """
    a = check_hermitian(m) if check else (as_matrix(m) + dagger(as_matrix(m))) / 2.0
    w, v = np.linalg.eigh(a)
    w = w[::-1]
    v = v[:, ::-1]
    return w, _canonical_phases(v)


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition ``m = u @ diag(s) @ vh``, s descending."""
    return np.linalg.svd(as_matrix(m))


def psd_eigvals(m, clamp: float = PSD_CLAMP, what: str = "matrix") -> np.ndarray:
    """Eigenvalues of a PSD matrix, descending, negatives clamped to zero.

    Raises :class:`NotPSDError` when an eigenvalue is more negative than
    ``clamp`` times the largest eigenvalue.
    """
    w, _ = herm_eig(m)
    top = w[0] if w.size else 0.0
    floor = -clamp * max(top, 0.0)
    if w.size and w[-1] < floor:
        raise NotPSDError(
            f"{what} has negative eigenvalue {w[-1]:.3e} "
            f"(clamp window {floor:.3e})"
        )
    return np.clip(w, 0.0, None)


def psd_power(m, a: float, rank_tol: float | None = None) -> np.ndarray:
    """Pseudo-power ``m^a`` of a PSD matrix on its numerical support.

    Eigenvalues at or below ``rank_tol`` (relative, default ``RANK_TOL``)
    times the top eigenvalue are treated as exact zeros and stay zero for
    every exponent — in particular negative exponents never blow up on the
    kernel.  ``a = 0`` returns the support projector.
    """
    tol = RANK_TOL if rank_tol is None else rank_tol
    h = check_hermitian(m)
    w, v = np.linalg.eigh(h)
    top = w.max(initial=0.0)
    floor = -PSD_CLAMP * max(top, 0.0)
    if w.size and w.min() < floor:
        raise NotPSDError(
            f"psd_power input has negative eigenvalue {w.min():.3e}"
        )
    w = np.clip(w, 0.0, None)
    support = w > tol * top if top > 0.0 else np.zeros_like(w, dtype=bool)
    pw = np.zeros_like(w)
    pw[support] = w[support] ** a
    return (v * pw) @ dagger(v)


def psd_sqrt(m, rank_tol: float | None = None) -> np.ndarray:
    """PSD square root (pseudo, on the support)."""
    return psd_power(m, 0.5, rank_tol=rank_tol)


def kron(a, b) -> np.ndarray:
    """Kronecker product with the first factor on the slow (major) index."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one tensor factor of a bipartite matrix.

    Parameters
    ----------
    m : array, shape (dA*dB, dA*dB)
        Operator on the tensor product, legs ordered (A ⊗ B) as produced
        by :func:`kron`.
    dims : (dA, dB)
        Factor dimensions.
    keep : int
        0 keeps subsystem A (traces out B), 1 keeps B.
    """
    da, db = dims
    a = as_matrix(m)
    if a.shape != (da * db, da * db):
        raise ShapeError(
            f"partial_trace: shape {a.shape} incompatible with dims {dims}"
        )
    if keep not in (0, 1):
        raise ValueError("keep must be 0 (keep A) or 1 (keep B)")
    t = a.reshape(da, db, da, db)
    if keep == 0:
        return np.trace(t, axis1=1, axis2=3)
    return np.trace(t, axis1=0, axis2=2)


def numerical_rank(m, tol: float | None = None) -> int:
    """Number of singular values above ``tol`` (relative, default RANK_TOL)."""
    a = as_matrix(m)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    t = RANK_TOL if tol is None else tol
    return int(np.count_nonzero(s > t * s[0]))


def schatten_p(m, p: float, rank_tol: float | None = None) -> float:
    """Schatten p-(quasi)norm ``(Σ λ^p)^(1/p)`` of a PSD matrix.

    Computed from the clamped eigenvalues restricted to the numerical
    support, so 0 < p < 1 (a quasi-norm) is safe on singular inputs.
    """
    if p <= 0:
        raise ValueError(f"schatten_p requires p > 0, got {p}")
    return trace_power(m, p, rank_tol=rank_tol) ** (1.0 / p)


def trace_power(m, p: float, rank_tol: float | None = None) -> float:
    """``Tr m^p`` for PSD ``m``, eigenvalues below the support cutoff dropped."""
    tol = RANK_TOL if rank_tol is None else rank_tol
    w = psd_eigvals(m)
    top = w[0] if w.size else 0.0
    if top == 0.0:
        return 0.0
    w = w[w > tol * top]
    return float(np.sum(w**p))


# ---------------------------------------------------------------------------
# JSON encoding: a complex matrix is a nested list of [re, im] pairs,
# row-major.  This is the one wire format every other module reuses.
# ---------------------------------------------------------------------------

def matrix_to_json(m) -> list:
    """Encode a complex matrix as nested ``[re, im]`` pairs (row-major)."""
    a = as_matrix(m)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def matrix_from_json(data) -> np.ndarray:
    """Decode the nested ``[re, im]`` pair format back into an array."""
    if not isinstance(data, list) or not data:
        raise ValueError("matrix JSON must be a non-empty list of rows")
    ncols = None
    rows = []
    for row in data:
        if not isinstance(row, list) or not row:
            raise ValueError("matrix JSON rows must be non-empty lists")
        if ncols is None:
            ncols = len(row)
        elif len(row) != ncols:
            raise ValueError("matrix JSON rows have inconsistent lengths")
        vals = []
        for cell in row:
            if (
                not isinstance(cell, (list, tuple))
                or len(cell) != 2
                or not all(isinstance(x, (int, float)) for x in cell)
            ):
                raise ValueError(
                    "matrix JSON entries must be [re, im] number pairs"
                )
            vals.append(complex(cell[0], cell[1]))
        rows.append(vals)
    return np.array(rows, dtype=np.complex128)


def close(a, b, tol: float = 1e-10) -> bool:
    """Max-entry-norm comparison used throughout the tests and reports."""
    return bool(np.abs(np.asarray(a) - np.asarray(b)).max() <= tol)


def log(x: float) -> float:
    """Natural log; all entropies in this package are in nats."""
    return math.log(x)
