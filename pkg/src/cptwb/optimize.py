"""Fixed-point search for extremal output p-norms and multiplicativity checks.

The iteration
-------------
For a channel Φ with Kraus set {A_k}, adjoint Φ̂, 0 < p ≠ 1, and a pure
state ψ, one step maps ψ to the eigenvector of

    M(ψ) = Φ̂[ (Φ(ψψ†))^{p−1} ]

with the *largest* eigenvalue when p > 1 and the *smallest* when p < 1
(matrix powers are pseudo-powers on the numerical support).  The step is
monotone in Tr Φ(ψψ†)^p — non-decreasing for p > 1, non-increasing for
p < 1 — so the iteration climbs toward the maximal output p-norm

    ν_p(Φ) = sup_ρ ‖Φ(ρ)‖_p        (p > 1)

and descends toward the minimal output p-quasi-norm for p < 1.  Both
directions head for the minimal output Rényi entropy S^p_min: the map
S^p = (p/(1−p))·log‖·‖_p is decreasing in ‖·‖_p for p > 1 and increasing
for p < 1.  Pure inputs suffice: ‖Φ(ρ)‖_p is convex in ρ for p ≥ 1 and
Tr Φ(ρ)^p is concave for p < 1, so the extremum sits on pure states.

For p < 1 the matrix power has a negative exponent; on the kernel of a
singular output the pseudo-power silently maps to zero, which makes
kernel-escaping candidates look artificially cheap and can break the
monotonicity proof.  ``opt2_step`` therefore guards every step: a
candidate is accepted only when the objective does not move against the
iteration direction by more than ``value_tol``; otherwise the current
state is kept (the stall registers as convergence).

Multistart
----------
``estimate_nu_p`` runs the iteration from a deterministic seed queue:
maximally entangled states (when d_in is a perfect square and enabled),
computational basis states, coherent pairs (e_j ± i·e_k)/√2, then seeded
Haar-random states up to the restart budget.  Each Haar restart draws
from the stream (seed, restart_index), so results are independent of
scheduling; restarts may run on up to ``CPTWB_THREADS`` threads.  The
reduction keeps the best value, breaking ties within ``value_tol`` by
restart index — with the canonical seeds queued first, a canonical
optimum is the one reported when it ties the best.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import linalg as la
from . import channels as chan
from ._rng import random_pure_state, rng_from

__all__ = [
    "OptimizerConfig",
    "Opt2Run",
    "OptimizerReport",
    "SminReport",
    "MultReport",
    "ScanReport",
    "opt2_step",
    "opt2_run",
    "multistart_seeds",
    "estimate_nu_p",
    "estimate_smin_p",
    "mult_check",
    "mult_scan",
]


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the multistart fixed-point search.

    ``restarts`` counts every seed (structured seeds included);
    ``tensor_restarts`` replaces it for tensor-product searches inside
    ``mult_check``; ``tensor_dim_cap`` refuses tensor inputs beyond the
    cap instead of grinding.
    """

    restarts: int = 50
    max_iters: int = 500
    value_tol: float = 1e-12
    seed: int = 0
    include_entangled_seeds: bool = True
    tensor_restarts: int = 200
    tensor_dim_cap: int = 256


@dataclass(frozen=True)
class Opt2Run:
    """Trace of one fixed-point run from a single seed."""

    state: np.ndarray
    trace_power: float
    value: float
    trace: tuple
    iterations: int
    converged: bool
    monotonicity_violations: int
    guard_fallbacks: int


@dataclass(frozen=True)
class OptimizerReport:
    """Multistart outcome for one channel and one Rényi order.

    ``best_value`` is the output p-norm at the best state found: the
    largest over restarts when p > 1 (a lower bound of ν_p), the smallest
    when p < 1 (an upper bound of the infimum).
    """

    p: float
    direction: str
    best_value: float
    best_trace_power: float
    best_input: np.ndarray
    best_restart: int
    restart_values: tuple
    restart_states: tuple
    iterations: tuple
    converged: tuple
    monotonicity_violations: int
    guard_fallbacks: int
    seed: int
    n_structured_seeds: int
    config: dict


def _threads() -> int:
    raw = os.environ.get("CPTWB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def _outer(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, np.conj(psi))


def output_trace_power(ch: chan.KrausChannel, psi: np.ndarray, p: float) -> float:
    """Tr Φ(ψψ†)^p on the numerical support."""
    return la.trace_power(chan.apply(ch, _outer(psi)), p)


def _check_p(p: float):
    if not (p > 0.0) or p == 1.0:
        raise ValueError(f"the iteration needs p > 0, p != 1; got {p}")


def _step_ex(
    ch: chan.KrausChannel,
    psi: np.ndarray,
    p: float,
    value_tol: float,
) -> tuple[np.ndarray, float, bool]:
    """Guarded step core: (next state, its Tr Φ^p, guard_fell_back)."""
    _check_p(p)
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if v.shape != (ch.d_in,):
        raise la.ShapeError(f"state has shape {v.shape}, expected ({ch.d_in},)")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state norm {norm:.3e} is not 1")
    v = v / norm

    gamma = chan.apply(ch, _outer(v))
    if abs(np.trace(gamma)) < 1e-14:
        raise ValueError("channel output has (numerically) zero trace")
    m = chan.apply_adjoint(ch, la.psd_power(gamma, p - 1.0))
    _, vecs = la.herm_eig(m)
    candidate = vecs[:, 0] if p > 1.0 else vecs[:, -1]

    t_now = la.trace_power(gamma, p)
    t_cand = output_trace_power(ch, candidate, p)
    if p > 1.0:
        ok = t_cand >= t_now - value_tol
    else:
        ok = t_cand <= t_now + value_tol
    if ok:
        return candidate, t_cand, False
    return v, t_now, True


def opt2_step(
    ch: chan.KrausChannel,
    psi: np.ndarray,
    p: float,
    value_tol: float = 1e-12,
) -> np.ndarray:
    """One guarded fixed-point step; returns the next unit vector.

    Computes the eigenvector of Φ̂[(Φ(ψψ†))^{p−1}] with extremal eigenvalue
    (largest for p > 1, smallest for p < 1) and accepts it only if the
    objective Tr Φ(·)^p does not move against the iteration direction by
    more than ``value_tol``; otherwise returns ``psi`` unchanged (the
    pseudo-power kernel fallback for singular outputs at p < 1).
    """
    state, _, _ = _step_ex(ch, psi, p, value_tol)
    return state


def opt2_run(
    ch: chan.KrausChannel,
    psi0: np.ndarray,
    p: float,
    config: OptimizerConfig | None = None,
) -> Opt2Run:
    """Iterate opt2_step from ``psi0`` until the objective stalls.

    Convergence is declared on the scalar Tr Φ(ψψ†)^p (the iterate itself
    may wander inside a degenerate optimal manifold).  The best visited
    state is returned, which under the monotone guarantee is the last one.
    """
    cfg = config or OptimizerConfig()
    _check_p(p)
    psi = np.asarray(psi0, dtype=np.complex128).reshape(-1)
    psi = psi / np.linalg.norm(psi)

    sign = 1.0 if p > 1.0 else -1.0
    t = output_trace_power(ch, psi, p)
    trace = [t]
    best_t, best_psi = t, psi
    violations = 0
    fallbacks = 0
    converged = False
    iterations = 0

    for iterations in range(1, cfg.max_iters + 1):
        nxt, t_next, fell_back = _step_ex(ch, psi, p, cfg.value_tol)
        if fell_back:
            fallbacks += 1
        trace.append(t_next)
        if sign * (t_next - t) < -cfg.value_tol:
            violations += 1  # should not happen: the step is guarded
        if sign * (t_next - best_t) > 0.0:
            best_t, best_psi = t_next, nxt
        if abs(t_next - t) <= cfg.value_tol:
            psi, t = nxt, t_next
            converged = True
            break
        psi, t = nxt, t_next

    return Opt2Run(
        state=best_psi,
        trace_power=best_t,
        value=best_t ** (1.0 / p),
        trace=tuple(trace),
        iterations=iterations,
        converged=converged,
        monotonicity_violations=violations,
        guard_fallbacks=fallbacks,
    )


def multistart_seeds(d: int, config: OptimizerConfig) -> list[np.ndarray]:
    """The deterministic structured seed queue (before Haar fill-in).

    Order: maximally entangled state(s) for the square factorization of d
    (when enabled), computational basis states, coherent pairs
    (e_j ± i·e_k)/√2 for j < k.  Truncated to the restart budget.
    """
    seeds: list[np.ndarray] = []
    m = math.isqrt(d)
    if config.include_entangled_seeds and m * m == d and m > 1:
        beta = np.zeros(d, dtype=np.complex128)
        for j in range(m):
            beta[j * m + j] = 1.0
        seeds.append(beta / np.linalg.norm(beta))
    eye = np.eye(d, dtype=np.complex128)
    seeds.extend(eye[:, j] for j in range(d))
    for j in range(d):
        for k in range(j + 1, d):
            for sgn in (1.0, -1.0):
                v = np.zeros(d, dtype=np.complex128)
                v[j] = 1.0
                v[k] = sgn * 1j
                seeds.append(v / np.sqrt(2.0))
    return seeds[: config.restarts]


def estimate_nu_p(
    ch: chan.KrausChannel,
    p: float,
    config: OptimizerConfig | None = None,
) -> OptimizerReport:
    """Multistart estimate of the extremal output p-norm of a channel.

    Returns the best output p-norm over ``config.restarts`` fixed-point
    runs (largest for p > 1, smallest for p < 1), together with the
    achieving input and per-restart diagnostics.  Ties within
    ``value_tol`` resolve to the lowest restart index, so the canonical
    structured seeds win whenever they reach the optimum.
    """
    cfg = config or OptimizerConfig()
    _check_p(p)
    if cfg.restarts < 1:
        raise ValueError("need at least one restart")

    structured = multistart_seeds(ch.d_in, cfg)

    def seed_state(index: int) -> np.ndarray:
        if index < len(structured):
            return structured[index]
        return random_pure_state(ch.d_in, rng_from(cfg.seed, index))

    def run_one(index: int) -> Opt2Run:
        return opt2_run(ch, seed_state(index), p, cfg)

    n = cfg.restarts
    workers = min(_threads(), n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run_one, range(n)))
    else:
        runs = [run_one(i) for i in range(n)]

    sign = 1.0 if p > 1.0 else -1.0
    best = 0
    for i in range(1, n):
        if sign * (runs[i].trace_power - runs[best].trace_power) > cfg.value_tol:
            best = i

    chosen = runs[best]
    return OptimizerReport(
        p=p,
        direction="max" if p > 1.0 else "min",
        best_value=chosen.value,
        best_trace_power=chosen.trace_power,
        best_input=chosen.state,
        best_restart=best,
        restart_values=tuple(r.value for r in runs),
        restart_states=tuple(r.state for r in runs),
        iterations=tuple(r.iterations for r in runs),
        converged=tuple(r.converged for r in runs),
        monotonicity_violations=sum(r.monotonicity_violations for r in runs),
        guard_fallbacks=sum(r.guard_fallbacks for r in runs),
        seed=cfg.seed,
        n_structured_seeds=len(structured),
        config=asdict(cfg),
    )


@dataclass(frozen=True)
class SminReport:
    """Minimal output Rényi entropy estimate."""

    p: float
    value: float
    argmin: np.ndarray
    extrapolated: float | None
    nu_value: float | None
    config: dict


def _vn_entropy_of_output(ch: chan.KrausChannel, psi: np.ndarray) -> float:
    w = la.psd_eigvals(chan.apply(ch, _outer(psi)))
    w = w / w.sum()
    w = w[w > 0.0]
    return float(-np.sum(w * np.log(w)))


def estimate_smin_p(
    ch: chan.KrausChannel,
    p: float,
    config: OptimizerConfig | None = None,
) -> SminReport:
    """Minimal output Rényi-p entropy via the fixed-point search.

    For p ≠ 1 this is (1/(1−p))·log of the extremal Tr Φ(ρ)^p from
    ``estimate_nu_p`` (max for p > 1, min for p < 1 — both minimize S^p).
    p = 1 runs the search at p ∈ {0.99, 1.01}, picks the argmin with the
    smaller *direct von Neumann* output entropy (stationarity makes the
    O(0.01) argmin error second order in the value), and attaches the
    two-sided extrapolation (S^0.99 + S^1.01)/2 as a diagnostic.
    p = 0 reports log of the minimal output rank at the p = 0.05 proxy.
    """
    cfg = config or OptimizerConfig()
    if p < 0:
        raise ValueError(f"need p >= 0, got {p}")

    if p == 1.0:
        lo = estimate_nu_p(ch, 0.99, cfg)
        hi = estimate_nu_p(ch, 1.01, cfg)
        s_lo = math.log(lo.best_trace_power) / (1.0 - 0.99)
        s_hi = math.log(hi.best_trace_power) / (1.0 - 1.01)
        cands = [
            (_vn_entropy_of_output(ch, lo.best_input), lo.best_input),
            (_vn_entropy_of_output(ch, hi.best_input), hi.best_input),
        ]
        value, argmin = min(cands, key=lambda t: t[0])
        return SminReport(
            p=1.0,
            value=value,
            argmin=argmin,
            extrapolated=(s_lo + s_hi) / 2.0,
            nu_value=None,
            config=asdict(cfg),
        )

    if p == 0.0:
        from . import entropy

        rank, state = entropy.min_output_rank(ch, config=cfg)
        return SminReport(
            p=0.0,
            value=math.log(rank),
            argmin=state,
            extrapolated=None,
            nu_value=None,
            config=asdict(cfg),
        )

    report = estimate_nu_p(ch, p, cfg)
    value = math.log(report.best_trace_power) / (1.0 - p)
    return SminReport(
        p=p,
        value=value,
        argmin=report.best_input,
        extrapolated=None,
        nu_value=report.best_value,
        config=asdict(cfg),
    )


# ---------------------------------------------------------------------------
# Multiplicativity
# ---------------------------------------------------------------------------

#: Relative margin above which a tensor-search bound certifies violation.
VIOLATION_MARGIN = 1e-7


@dataclass(frozen=True)
class MultReport:
    """Multiplicativity check for one pair of channels at one order p.

    For p > 1: ``nu_product_lb`` is a lower bound of ν_p(A⊗B); ``violated``
    means it exceeds ν̂_p(A)·ν̂_p(B) by the relative margin, and the
    certifying input state is shipped.  For p < 1 the direction flips
    (the bound is an upper bound of the infimum and a violation is a
    certified shortfall).
    """

    p: float
    nu_a: float
    nu_b: float
    nu_product_lb: float
    product_of_singles: float
    gap: float
    violated: bool
    certificate: np.ndarray
    tensor_dim: int
    seed: int
    config: dict


@dataclass(frozen=True)
class ScanReport:
    """Grid + bisection multiplicativity scan over Rényi orders."""

    rows: tuple
    threshold: float | None
    bracket: tuple | None


def mult_check(
    a: chan.KrausChannel,
    b: chan.KrausChannel,
    p: float,
    config: OptimizerConfig | None = None,
) -> MultReport:
    """Compare the tensor-product search against the product of singles."""
    cfg = config or OptimizerConfig()
    tensor_dim = a.d_in * b.d_in
    if tensor_dim > cfg.tensor_dim_cap:
        raise ValueError(
            f"tensor input dimension {tensor_dim} exceeds the cap "
            f"{cfg.tensor_dim_cap}; raise tensor_dim_cap explicitly if you "
            "really want this (runtime grows sharply)"
        )
    rep_a = estimate_nu_p(a, p, cfg)
    rep_b = estimate_nu_p(b, p, cfg)
    tensor_cfg = replace(cfg, restarts=cfg.tensor_restarts)
    rep_ab = estimate_nu_p(chan.tensor(a, b), p, tensor_cfg)

    product = rep_a.best_value * rep_b.best_value
    gap = math.log(rep_ab.best_value) - math.log(product)
    if p > 1.0:
        violated = rep_ab.best_value > product * (1.0 + VIOLATION_MARGIN)
    else:
        violated = rep_ab.best_value < product * (1.0 - VIOLATION_MARGIN)
    return MultReport(
        p=p,
        nu_a=rep_a.best_value,
        nu_b=rep_b.best_value,
        nu_product_lb=rep_ab.best_value,
        product_of_singles=product,
        gap=gap,
        violated=violated,
        certificate=rep_ab.best_input,
        tensor_dim=tensor_dim,
        seed=cfg.seed,
        config=asdict(cfg),
    )


def mult_scan(
    a: chan.KrausChannel,
    b: chan.KrausChannel,
    p_grid,
    config: OptimizerConfig | None = None,
    resolution: float = 0.01,
) -> ScanReport:
    """Run mult_check on a grid and bisect the first violation onset.

    When adjacent grid points flip from non-violated to violated, the
    threshold is bisected to within ``resolution`` and reported as the
    final bracket midpoint; all evaluated points (grid and bisection)
    appear in ``rows`` sorted by p.
    """
    grid = sorted(float(p) for p in p_grid)
    if not grid:
        raise ValueError("empty p grid")
    rows = {p: mult_check(a, b, p, config) for p in grid}

    bracket = None
    for lo, hi in zip(grid, grid[1:]):
        if not rows[lo].violated and rows[hi].violated:
            bracket = (lo, hi)
            break

    threshold = None
    if bracket is not None:
        lo, hi = bracket
        while hi - lo > resolution:
            mid = (lo + hi) / 2.0
            r = mult_check(a, b, mid, config)
            rows[mid] = r
            if r.violated:
                hi = mid
            else:
                lo = mid
        threshold = (lo + hi) / 2.0
        bracket = (lo, hi)

    ordered = tuple(rows[p] for p in sorted(rows))
    return ScanReport(rows=ordered, threshold=threshold, bracket=bracket)
