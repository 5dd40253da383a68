"""Completely positive trace-preserving maps in Kraus and Choi form.

Conventions
-----------
* A channel maps d_in × d_in density matrices to d_out × d_out ones; each
  Kraus operator is a (d_out, d_in) array and Φ(ρ) = Σ_k A_k ρ A_k† with
  Σ_k A_k† A_k = I.
* The Choi matrix is (id ⊗ Φ) applied to the maximally entangled state,
  normalized to trace one, with legs ordered (input ⊗ output):

      J(Φ) = (1/d_in) Σ_jk |e_j⟩⟨e_k| ⊗ Φ(|e_j⟩⟨e_k|)

  so the partial trace over the *output* leg of a CPT channel is I/d_in.
* ``choi_to_kraus`` scales eigenvectors by sqrt(d_in · λ) to undo the 1/d_in
  normalization, and returns a minimal (rank-many) Kraus set.

Extremality
-----------
A CPT map with minimal Kraus set {A_k}, k = 1..K, is an extreme point of
the CPT convex body iff the K² products {A_j† A_k} are linearly
independent, which forces K ≤ d_in.  The weaker "generalized extreme"
property is Choi rank ≤ d_in; extreme maps satisfy it, and maps satisfying
it decompose no further under rank-preserving mixtures.  ``classify``
reports both flags plus the Choi rank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from ._rng import haar_isometry, rng_from

__all__ = [
    "KrausChannel",
    "ChoiMatrix",
    "ChannelMeta",
    "ValidationReport",
    "ChannelValidationError",
    "PerturbResult",
    "DegradingReport",
    "validate_cpt",
    "apply",
    "apply_adjoint",
    "kraus_to_choi",
    "choi_to_kraus",
    "choi_rank",
    "adjoint",
    "compose",
    "tensor",
    "complement",
    "is_extreme",
    "is_generalized_extreme",
    "classify",
    "perturb_to_extreme",
    "choi_distance",
    "verify_degrading",
    "channel_to_json",
    "channel_from_json",
    "choi_to_json",
    "choi_from_json",
]


class ChannelValidationError(ValueError):
    """Channel data is structurally or numerically invalid."""


@dataclass(frozen=True)
class KrausChannel:
    """A CP map given by its Kraus operators (shape checks only).

    Construction does not enforce trace preservation — ``adjoint`` returns
    unital maps through the same type — call :func:`validate_cpt` to check.
    """

    d_in: int
    d_out: int
    kraus: tuple

    def __post_init__(self):
        ops = tuple(la.as_matrix(a) for a in self.kraus)
        if not ops:
            raise ChannelValidationError("channel needs at least one Kraus operator")
        for a in ops:
            if a.shape != (self.d_out, self.d_in):
                raise ChannelValidationError(
                    f"Kraus operator shape {a.shape} != ({self.d_out}, {self.d_in})"
                )
        object.__setattr__(self, "kraus", ops)

    @classmethod
    def from_kraus(cls, ops) -> "KrausChannel":
        """Build a channel from a Kraus list, inferring dimensions."""
        mats = [la.as_matrix(a) for a in ops]
        if not mats:
            raise ChannelValidationError("empty Kraus list")
        d_out, d_in = mats[0].shape
        return cls(d_in=d_in, d_out=d_out, kraus=tuple(mats))

    def __len__(self) -> int:
        return len(self.kraus)


@dataclass(frozen=True)
class ChoiMatrix:
    """Trace-normalized Choi matrix with legs ordered (input ⊗ output)."""

    d_in: int
    d_out: int
    matrix: np.ndarray

    def __post_init__(self):
        m = la.as_matrix(self.matrix)
        n = self.d_in * self.d_out
        if m.shape != (n, n):
            raise ChannelValidationError(
                f"Choi matrix shape {m.shape} != ({n}, {n})"
            )
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class ChannelMeta:
    """Classification record: Choi rank and the two extremality flags."""

    choi_rank: int
    is_extreme: bool
    is_generalized_extreme: bool


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_cpt; ``ok`` summarizes the individual checks."""

    ok: bool
    trace_preserving: bool
    tp_residual: float
    choi_psd: bool
    min_choi_eigval: float
    messages: tuple = ()


# ---------------------------------------------------------------------------
# Core maps
# ---------------------------------------------------------------------------

def validate_cpt(ch: KrausChannel, tol: float = 1e-10) -> ValidationReport:
    """Check trace preservation and complete positivity of a Kraus channel.

    Complete positivity of a Kraus-form map is automatic; what is actually
    verified is that the assembled Choi matrix is PSD (guards against NaN
    and bad inputs) and that Σ A_k†A_k = I within ``tol`` (max-entry norm).
    """
    ident = np.eye(ch.d_in)
    acc = sum(la.dagger(a) @ a for a in ch.kraus)
    tp_residual = float(np.abs(acc - ident).max())
    trace_preserving = tp_residual <= tol

    j = kraus_to_choi(ch).matrix
    w, _ = la.herm_eig(j)
    min_eig = float(w[-1])
    choi_psd = min_eig >= -la.PSD_CLAMP * max(float(w[0]), 1.0)

    messages = []
    if not trace_preserving:
        messages.append(f"sum A†A deviates from identity by {tp_residual:.3e}")
    if not choi_psd:
        messages.append(f"Choi matrix has negative eigenvalue {min_eig:.3e}")
    return ValidationReport(
        ok=trace_preserving and choi_psd,
        trace_preserving=trace_preserving,
        tp_residual=tp_residual,
        choi_psd=choi_psd,
        min_choi_eigval=min_eig,
        messages=tuple(messages),
    )


def apply(ch: KrausChannel, rho) -> np.ndarray:
    """Φ(ρ) = Σ_k A_k ρ A_k† (linear — ρ need not be a state)."""
    r = la.as_matrix(rho)
    if r.shape != (ch.d_in, ch.d_in):
        raise la.ShapeError(
            f"input shape {r.shape} != ({ch.d_in}, {ch.d_in})"
        )
    out = np.zeros((ch.d_out, ch.d_out), dtype=np.complex128)
    for a in ch.kraus:
        out += a @ r @ la.dagger(a)
    return out


def apply_adjoint(ch: KrausChannel, x) -> np.ndarray:
    """Adjoint action Φ̂(X) = Σ_k A_k† X A_k on a d_out × d_out operator."""
    m = la.as_matrix(x)
    if m.shape != (ch.d_out, ch.d_out):
        raise la.ShapeError(
            f"input shape {m.shape} != ({ch.d_out}, {ch.d_out})"
        )
    out = np.zeros((ch.d_in, ch.d_in), dtype=np.complex128)
    for a in ch.kraus:
        out += la.dagger(a) @ m @ a
    return out


def _kraus_to_vec(a: np.ndarray) -> np.ndarray:
    # Component (j*d_out + i) of the vector is A[i, j]: input leg slow,
    # output leg fast, matching the (in ⊗ out) Choi ordering.
    return a.T.reshape(-1)


def kraus_to_choi(ch: KrausChannel) -> ChoiMatrix:
    """Assemble the trace-normalized (input ⊗ output) Choi matrix."""
    n = ch.d_in * ch.d_out
    j = np.zeros((n, n), dtype=np.complex128)
    for a in ch.kraus:
        w = _kraus_to_vec(a)
        j += np.outer(w, np.conj(w))
    j /= ch.d_in
    j = (j + la.dagger(j)) / 2.0
    return ChoiMatrix(d_in=ch.d_in, d_out=ch.d_out, matrix=j)


def choi_to_kraus(choi: ChoiMatrix, rank_tol: float | None = None) -> KrausChannel:
    """Minimal Kraus set from the Choi eigendecomposition.

    Eigenvectors with eigenvalue above the rank cutoff are rescaled by
    sqrt(d_in · λ) and unvectorized; the result has choi-rank many
    operators (at most d_in · d_out).
    """
    tol = la.RANK_TOL if rank_tol is None else rank_tol
    w, v = la.herm_eig(choi.matrix)
    top = max(float(w[0]), 0.0)
    if top == 0.0:
        raise ChannelValidationError("Choi matrix is zero")
    if w[-1] < -la.PSD_CLAMP * max(top, 1.0):
        raise la.NotPSDError(
            f"Choi matrix has negative eigenvalue {w[-1]:.3e}; not a CP map"
        )
    ops = []
    for lam, vec in zip(w, v.T):
        if lam <= tol * top:
            continue
        mat = np.sqrt(choi.d_in * lam) * vec.reshape(choi.d_in, choi.d_out)
        ops.append(mat.T)
    return KrausChannel(d_in=choi.d_in, d_out=choi.d_out, kraus=tuple(ops))


def choi_rank(obj, rank_tol: float | None = None) -> int:
    """Numerical rank of the Choi matrix of a channel (or Choi directly)."""
    j = obj.matrix if isinstance(obj, ChoiMatrix) else kraus_to_choi(obj).matrix
    tol = la.RANK_TOL if rank_tol is None else rank_tol
    w = la.psd_eigvals(j, what="Choi matrix")
    top = w[0] if w.size else 0.0
    if top == 0.0:
        return 0
    return int(np.count_nonzero(w > tol * top))


def adjoint(ch: KrausChannel) -> KrausChannel:
    """The adjoint map with Kraus set {A_k†} (unital CP, not CPT in general)."""
    return KrausChannel(
        d_in=ch.d_out,
        d_out=ch.d_in,
        kraus=tuple(la.dagger(a) for a in ch.kraus),
    )


def compose(after: KrausChannel, first: KrausChannel) -> KrausChannel:
    """(after ∘ first) with the product Kraus set {A_i B_j}."""
    if first.d_out != after.d_in:
        raise la.ShapeError(
            f"compose: inner dim mismatch {first.d_out} != {after.d_in}"
        )
    ops = tuple(a @ b for a in after.kraus for b in first.kraus)
    return KrausChannel(d_in=first.d_in, d_out=after.d_out, kraus=ops)


def tensor(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Tensor product channel with Kraus set {A_i ⊗ B_j}."""
    ops = tuple(la.kron(x, y) for x in a.kraus for y in b.kraus)
    return KrausChannel(
        d_in=a.d_in * b.d_in, d_out=a.d_out * b.d_out, kraus=ops
    )


def complement(ch: KrausChannel) -> KrausChannel:
    """Complementary channel to the environment of the given Kraus set.

    With Stinespring isometry Vψ = Σ_k (A_k ψ) ⊗ e_k, tracing out the
    output instead of the environment gives [Φ^C(ρ)]_jk = Tr(A_j ρ A_k†).
    The environment dimension — and hence the output dimension here — is
    the number of Kraus operators in the *given* representation; feed a
    minimal set (``choi_to_kraus``) for the canonical complement.
    """
    k = len(ch.kraus)
    stacked = np.stack(ch.kraus)  # (k, d_out, d_in)
    ops = tuple(stacked[:, i, :] for i in range(ch.d_out))  # each (k, d_in)
    return KrausChannel(d_in=ch.d_in, d_out=k, kraus=ops)


# ---------------------------------------------------------------------------
# Extremality
# ---------------------------------------------------------------------------

def _minimal_kraus(ch: KrausChannel, rank_tol: float | None = None) -> KrausChannel:
    r = choi_rank(ch, rank_tol=rank_tol)
    if len(ch.kraus) == r:
        return ch
    return choi_to_kraus(kraus_to_choi(ch), rank_tol=rank_tol)


def is_extreme(ch: KrausChannel, rank_tol: float | None = None) -> bool:
    """Extreme-point test: {A_j†A_k} linearly independent on a minimal set.

    Stacks the K² vectorized products into a (K², d_in²) matrix and asks
    for full row rank; K > d_in short-circuits to False since K² vectors
    cannot be independent in a d_in²-dimensional space.
    """
    m = _minimal_kraus(ch, rank_tol=rank_tol)
    k = len(m.kraus)
    if k > m.d_in:
        return False
    rows = [
        (la.dagger(a) @ b).reshape(-1)
        for a in m.kraus
        for b in m.kraus
    ]
    g = np.stack(rows)
    return la.numerical_rank(g, tol=rank_tol) == k * k


def is_generalized_extreme(ch: KrausChannel, rank_tol: float | None = None) -> bool:
    """Choi rank ≤ d_in (extreme maps satisfy this; the converse fails)."""
    return choi_rank(ch, rank_tol=rank_tol) <= ch.d_in


def classify(ch: KrausChannel, rank_tol: float | None = None) -> ChannelMeta:
    """Choi rank plus both extremality flags in one record."""
    r = choi_rank(ch, rank_tol=rank_tol)
    return ChannelMeta(
        choi_rank=r,
        is_extreme=is_extreme(ch, rank_tol=rank_tol),
        is_generalized_extreme=r <= ch.d_in,
    )


@dataclass(frozen=True)
class PerturbResult:
    """Result of perturb_to_extreme."""

    channel: KrausChannel
    epsilon: float
    already_extreme: bool
    halvings: int
    choi_distance: float


def perturb_to_extreme(
    ch: KrausChannel,
    epsilon0: float = 0.1,
    seed=0,
    max_halvings: int = 40,
    rank_tol: float | None = None,
) -> PerturbResult:
    """Push a generalized-extreme channel to a nearby true extreme point.

    The input Kraus list (padded with zero operators up to d_in entries) is
    mixed with a seeded Haar-random extreme reference {B_k}:

        C_k(ε) = A_k + ε B_k,   S(ε) = Σ_k C_k†C_k,
        new Kraus = C_k(ε) · S(ε)^{-1/2}

    ε is searched geometrically downward from ``epsilon0`` (halving) until
    S(ε) is positive definite and the renormalized channel passes
    ``is_extreme``; generically the first ε works.  ε = 0 or an already
    extreme input is a no-op (flagged).
    """
    if epsilon0 < 0:
        raise ValueError("epsilon0 must be >= 0")
    if choi_rank(ch, rank_tol=rank_tol) > ch.d_in:
        raise ChannelValidationError(
            "perturb_to_extreme needs Choi rank <= d_in"
        )
    if epsilon0 == 0.0 or is_extreme(ch, rank_tol=rank_tol):
        return PerturbResult(
            channel=ch,
            epsilon=0.0,
            already_extreme=is_extreme(ch, rank_tol=rank_tol),
            halvings=0,
            choi_distance=0.0,
        )

    base = _minimal_kraus(ch, rank_tol=rank_tol)
    ops = list(base.kraus)
    while len(ops) < ch.d_in:
        ops.append(np.zeros((ch.d_out, ch.d_in), dtype=np.complex128))

    # Seeded extreme reference: slices of a Haar isometry C^d_in -> C^(d_out*d_in).
    reference = None
    for attempt in range(10):
        v = haar_isometry(ch.d_out * ch.d_in, ch.d_in, rng_from(seed, attempt))
        cand = [
            v[k * ch.d_out : (k + 1) * ch.d_out, :] for k in range(ch.d_in)
        ]
        ref = KrausChannel(d_in=ch.d_in, d_out=ch.d_out, kraus=tuple(cand))
        if is_extreme(ref, rank_tol=rank_tol):
            reference = ref
            break
    if reference is None:  # pragma: no cover - Haar draws are generic
        raise RuntimeError("could not draw an extreme reference channel")

    j_in = kraus_to_choi(ch).matrix
    eps = float(epsilon0)
    for halving in range(max_halvings + 1):
        c_ops = [a + eps * b for a, b in zip(ops, reference.kraus)]
        s = sum(la.dagger(c) @ c for c in c_ops)
        w, _ = la.herm_eig(s)
        if w[-1] > 1e-12:
            s_isqrt = la.psd_power(s, -0.5, rank_tol=1e-14)
            new_ops = tuple(c @ s_isqrt for c in c_ops)
            cand = KrausChannel(d_in=ch.d_in, d_out=ch.d_out, kraus=new_ops)
            if is_extreme(cand, rank_tol=rank_tol):
                dist = float(
                    np.abs(kraus_to_choi(cand).matrix - j_in).max()
                )
                return PerturbResult(
                    channel=cand,
                    epsilon=eps,
                    already_extreme=False,
                    halvings=halving,
                    choi_distance=dist,
                )
        eps /= 2.0
    raise RuntimeError(
        f"no extreme perturbation found after {max_halvings} halvings"
    )


def choi_distance(a: KrausChannel, b: KrausChannel) -> float:
    """Max-entry distance between two channels' Choi matrices."""
    ja = kraus_to_choi(a).matrix
    jb = kraus_to_choi(b).matrix
    if ja.shape != jb.shape:
        raise la.ShapeError("choi_distance: dimension mismatch")
    return float(np.abs(ja - jb).max())


# ---------------------------------------------------------------------------
# Degradability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegradingReport:
    """Residual of the degrading identity X ∘ Φ = Φ^C (max-entry norm)."""

    ok: bool
    residual: float


def verify_degrading(
    phi: KrausChannel, degrading: KrausChannel, tol: float = 1e-8
) -> DegradingReport:
    """Check that ``degrading`` maps Φ's output onto Φ's complement.

    Compares Choi matrices of (degrading ∘ Φ) and complement(Φ), where the
    complement is taken with respect to Φ's stored Kraus representation.
    """
    if degrading.d_in != phi.d_out:
        raise la.ShapeError(
            "degrading map input dim must equal channel output dim"
        )
    lhs = kraus_to_choi(compose(degrading, phi)).matrix
    rhs = kraus_to_choi(complement(phi)).matrix
    if lhs.shape != rhs.shape:
        return DegradingReport(ok=False, residual=float("inf"))
    residual = float(np.abs(lhs - rhs).max())
    return DegradingReport(ok=residual <= tol, residual=residual)


# ---------------------------------------------------------------------------
# Serialization: {"d_in": int, "d_out": int, "kraus": [matrix, ...]} with
# matrices encoded as nested [re, im] pairs (see linalg.matrix_to_json).
# ---------------------------------------------------------------------------

def channel_to_json(ch: KrausChannel) -> dict:
    return {
        "d_in": ch.d_in,
        "d_out": ch.d_out,
        "kraus": [la.matrix_to_json(a) for a in ch.kraus],
    }


def channel_from_json(data: dict, validate: bool = True, tol: float = 1e-10) -> KrausChannel:
    """Load a channel from its JSON dict, validating CPT unless told not to."""
    if not isinstance(data, dict):
        raise ChannelValidationError("channel JSON must be an object")
    missing = {"d_in", "d_out", "kraus"} - set(data)
    if missing:
        raise ChannelValidationError(f"channel JSON missing keys: {sorted(missing)}")
    d_in, d_out = data["d_in"], data["d_out"]
    if not isinstance(d_in, int) or not isinstance(d_out, int) or d_in < 1 or d_out < 1:
        raise ChannelValidationError("d_in and d_out must be positive integers")
    if not isinstance(data["kraus"], list) or not data["kraus"]:
        raise ChannelValidationError("kraus must be a non-empty list of matrices")
    try:
        ops = tuple(la.matrix_from_json(m) for m in data["kraus"])
    except ValueError as exc:
        raise ChannelValidationError(f"bad Kraus matrix encoding: {exc}") from exc
    ch = KrausChannel(d_in=d_in, d_out=d_out, kraus=ops)
    if validate:
        report = validate_cpt(ch, tol=tol)
        if not report.ok:
            raise ChannelValidationError(
                "channel failed CPT validation: " + "; ".join(report.messages)
            )
    return ch


def choi_to_json(choi: ChoiMatrix) -> dict:
    return {
        "d_in": choi.d_in,
        "d_out": choi.d_out,
        "choi": la.matrix_to_json(choi.matrix),
    }


def choi_from_json(data: dict) -> ChoiMatrix:
    if not isinstance(data, dict) or {"d_in", "d_out", "choi"} - set(data):
        raise ChannelValidationError("Choi JSON needs d_in, d_out, choi")
    return ChoiMatrix(
        d_in=data["d_in"],
        d_out=data["d_out"],
        matrix=la.matrix_from_json(data["choi"]),
    )
