"""I-divergence NMF solvers behind the two-step reduction.

The objective throughout is the generalized Kullback-Leibler divergence
between nonnegative matrices,

    D(P || Q) = sum_ij (P_ij log(P_ij / Q_ij) - P_ij + Q_ij),

with the conventions 0*log(0/q) = 0 and an infinite value whenever some
P_ij > 0 meets Q_ij = 0.  Three solvers are provided:

* step1_factorize: alternating multiplicative updates for
  min D(H || Pi Gamma) under e'Pi e = 1, Gamma e = e (the law-approximation
  step; sensitive to initialization, like EM).
* step2_gamma: single-factor updates for min D(S || M G) under M e = e.
  When the rows of S and G sum to 1 the plain update preserves the row sums
  of M exactly, so no renormalization is applied.
* step2_pi: single-factor updates for min D(T || P M) under M e = e, with
  an explicit row renormalization each iteration.

Both step-2 problems are convex in M, so the iterates converge to the
global minimizer from any strictly positive start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DegenerateStateError,
    InputError,
    InternalConsistencyError,
    ShapeError,
)

# Multiplicative updates cannot revive an exact zero; keep iterates strictly
# positive instead.
POSITIVITY_FLOOR = 1e-300

# Slack for the nonincreasing-divergence check: relative 1e-12 plus a tiny
# absolute term for traces that plateau at machine scale.
_MONO_REL = 1e-12
_MONO_ABS = 1e-14


def divergence(P: np.ndarray, Q: np.ndarray) -> float:
    """Generalized KL divergence between nonnegative matrices.

    Returns math.inf (a value, not an exception) when P charges a cell
    where Q vanishes.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape:
        raise ShapeError(f"shape mismatch {P.shape} vs {Q.shape}")
    if np.any(P < 0) or np.any(Q < 0):
        raise InputError("divergence arguments must be nonnegative")
    mask = P > 0
    if np.any(Q[mask] == 0):
        return math.inf
    p = P[mask]
    q = Q[mask]
    value = float(np.sum(p * np.log(p / q)) - P.sum() + Q.sum())
    # Exactly-equal arguments can round to a tiny negative.
    return max(value, 0.0)


@dataclass
class NmfState:
    """Factor pair plus the per-iteration divergence trace of one run."""

    left: np.ndarray
    right: np.ndarray
    iteration: int
    trace: list = field(default_factory=list)
    snapshots: Optional[list] = None  # periodic copies of the learned factor


@dataclass
class Step1Config:
    max_iterations: int = 3000
    seed: int = 0
    init: Optional[tuple] = None  # explicit (Pi0, Gamma0), else random
    tolerance: Optional[float] = None  # relative decrease for early stop

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")


@dataclass
class Step2Config:
    max_iterations: int = 3000
    seed: int = 0
    init: Optional[np.ndarray] = None  # explicit M0, else random
    tolerance: Optional[float] = None
    snapshot_every: Optional[int] = None  # record M every k iterations

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")


def random_step1_init(rows: int, N: int, cols: int, seed: int) -> tuple:
    """Uniform(0,1) factors, Gamma rows normalized to 1, Pi to total mass 1."""
    rng = np.random.default_rng(seed)
    Pi = rng.random((rows, N))
    Gamma = rng.random((N, cols))
    Pi /= Pi.sum()
    Gamma /= Gamma.sum(axis=1)[:, None]
    return Pi, Gamma


def random_stochastic(rows: int, cols: int, seed: int) -> np.ndarray:
    """Uniform(0,1) matrix with rows normalized to sum 1."""
    rng = np.random.default_rng(seed)
    M = rng.random((rows, cols))
    return M / M.sum(axis=1)[:, None]


def _check_monotone(trace: list, value: float, context: str) -> None:
    if trace:
        prev = trace[-1]
        if value > prev * (1.0 + _MONO_REL) + _MONO_ABS:
            raise InternalConsistencyError(
                f"{context}: divergence rose from {prev!r} to {value!r} "
                f"at iteration {len(trace)}"
            )
    trace.append(value)


def _converged(trace: list, tolerance: Optional[float]) -> bool:
    if tolerance is None or len(trace) < 2:
        return False
    prev, cur = trace[-2], trace[-1]
    if prev == 0.0:
        return True
    return (prev - cur) / prev < tolerance


def step1_factorize(H: np.ndarray, N: int, cfg: Step1Config) -> NmfState:
    """Alternating NMF for min D(H || Pi Gamma), e'Pi e = 1, Gamma e = e.

    Each iteration updates Pi, then Gamma, then applies the product-invariant
    rescale Gamma <- D^-1 Gamma, Pi <- Pi D with D = diag(Gamma row sums),
    which restores Gamma e = e exactly without changing Pi @ Gamma.  The
    total-mass constraint on Pi is not enforced mid-run; it converges to
    sum(H) = 1 at stationary points and is asserted on return.
    """
    H = np.asarray(H, dtype=float)
    if np.any(H < 0):
        raise InputError("H must be nonnegative")
    if abs(H.sum() - 1.0) > 1e-8:
        raise InputError(f"H must have total mass 1, got {H.sum():.12g}")
    if N < 1:
        raise InputError("target size must be >= 1")
    rows, cols = H.shape
    if cfg.init is not None:
        Pi = np.array(cfg.init[0], dtype=float)
        Gamma = np.array(cfg.init[1], dtype=float)
        if Pi.shape != (rows, N) or Gamma.shape != (N, cols):
            raise ShapeError("initial factors have wrong shapes")
    else:
        Pi, Gamma = random_step1_init(rows, N, cols, cfg.seed)
    np.maximum(Pi, POSITIVITY_FLOOR, out=Pi)
    np.maximum(Gamma, POSITIVITY_FLOOR, out=Gamma)

    trace: list = []
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        R = H / np.maximum(Pi @ Gamma, POSITIVITY_FLOOR)
        Pi *= (R @ Gamma.T) / Gamma.sum(axis=1)[None, :]
        np.maximum(Pi, POSITIVITY_FLOOR, out=Pi)

        R = H / np.maximum(Pi @ Gamma, POSITIVITY_FLOOR)
        Gamma *= (Pi.T @ R) / Pi.sum(axis=0)[:, None]
        np.maximum(Gamma, POSITIVITY_FLOOR, out=Gamma)

        d = Gamma.sum(axis=1)
        Gamma /= d[:, None]
        Pi *= d[None, :]

        _check_monotone(trace, divergence(H, Pi @ Gamma), "step 1")
        if _converged(trace, cfg.tolerance):
            break

    mass = float(Pi.sum())
    if abs(mass - 1.0) > 1e-6:
        raise InternalConsistencyError(
            f"step 1 total mass of Pi is {mass:.12g}, expected 1"
        )
    return NmfState(left=Pi, right=Gamma, iteration=it, trace=trace)


def _maybe_snapshot(snapshots, it: int, every: Optional[int], M: np.ndarray):
    if every is not None and it % every == 0:
        snapshots.append(M.copy())


def step2_gamma(gamma_star: np.ndarray, gamma_block: np.ndarray,
                cfg: Step2Config) -> NmfState:
    """Single-factor NMF for min D(gamma_star || M gamma_block), M e = e.

    Requires rows of both inputs to sum to 1 (within 1e-8); the plain
    multiplicative update then keeps the rows of M summing to 1 without any
    renormalization, which is asserted every iteration.
    """
    S = np.asarray(gamma_star, dtype=float)
    G = np.asarray(gamma_block, dtype=float)
    if S.shape[1] != G.shape[1]:
        raise ShapeError(f"column mismatch {S.shape} vs {G.shape}")
    for X, name in ((S, "gamma_star"), (G, "gamma_block")):
        drift = float(np.max(np.abs(X.sum(axis=1) - 1.0)))
        if drift > 1e-8:
            raise InputError(f"rows of {name} must sum to 1 (off by {drift:.3g})")

    N, K = S.shape[0], G.shape[0]
    M = _init_step2(cfg, N, K)
    trace: list = []
    snapshots: list = [] if cfg.snapshot_every is not None else None
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        MG = np.maximum(M @ G, POSITIVITY_FLOOR)
        M *= (S / MG) @ G.T
        np.maximum(M, POSITIVITY_FLOOR, out=M)
        drift = float(np.max(np.abs(M.sum(axis=1) - 1.0)))
        if drift > 1e-6:
            raise InternalConsistencyError(
                f"step 2 (gamma) row sums drifted by {drift:.3g}; inputs "
                "likely violate the row-sum preconditions"
            )
        _check_monotone(trace, divergence(S, M @ G), "step 2 (gamma)")
        if snapshots is not None:
            _maybe_snapshot(snapshots, it, cfg.snapshot_every, M)
        if _converged(trace, cfg.tolerance):
            break
    return NmfState(left=M, right=G, iteration=it, trace=trace,
                    snapshots=snapshots)


def step2_pi(pi_tilde_star: np.ndarray, pi_prev_star: np.ndarray,
             cfg: Step2Config) -> NmfState:
    """Single-factor NMF for min D(pi_tilde_star || pi_prev_star M), M e = e.

    The multiplicative update is followed by a row renormalization of M;
    under the row-sum constraint the linear part of the objective is
    constant, so the renormalized update is the EM step and the divergence
    stays nonincreasing (checked every iteration).
    """
    T = np.asarray(pi_tilde_star, dtype=float)
    P = np.asarray(pi_prev_star, dtype=float)
    if T.shape[0] != P.shape[0]:
        raise ShapeError(f"row mismatch {T.shape} vs {P.shape}")
    col_mass = P.sum(axis=0)
    if np.any(col_mass <= 0):
        k = int(np.argmax(col_mass <= 0))
        raise DegenerateStateError(
            f"state {k} carries no mass in pi_prev_star; it is unreachable"
        )

    N, K = P.shape[1], T.shape[1]
    M = _init_step2(cfg, N, K)
    trace: list = []
    snapshots: list = [] if cfg.snapshot_every is not None else None
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        PM = np.maximum(P @ M, POSITIVITY_FLOOR)
        M *= (P.T @ (T / PM)) / col_mass[:, None]
        M /= M.sum(axis=1)[:, None]
        np.maximum(M, POSITIVITY_FLOOR, out=M)
        _check_monotone(trace, divergence(T, P @ M), "step 2 (pi)")
        if snapshots is not None:
            _maybe_snapshot(snapshots, it, cfg.snapshot_every, M)
        if _converged(trace, cfg.tolerance):
            break
    return NmfState(left=P, right=M, iteration=it, trace=trace,
                    snapshots=snapshots)


def _init_step2(cfg: Step2Config, rows: int, cols: int) -> np.ndarray:
    if cfg.init is not None:
        M = np.array(cfg.init, dtype=float)
        if M.shape != (rows, cols):
            raise ShapeError(f"M0 has shape {M.shape}, expected {(rows, cols)}")
    else:
        M = random_stochastic(rows, cols, cfg.seed)
    np.maximum(M, POSITIVITY_FLOOR, out=M)
    return M
