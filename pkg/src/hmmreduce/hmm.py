"""Discrete-output HMM parameters and exact string probabilities.

An HMM over the alphabet {0, ..., m-1} with hidden-state space of size N is
parametrized by m nonnegative N x N matrices M(y), where M(y)[i, j] is the
joint probability of emitting y and moving to state j from state i.  Their
sum A = sum_y M(y) is the transition matrix of the hidden chain, and pi is
its stationary row vector.  The probability of an output string w is
pi * M(w[0]) * ... * M(w[-1]) * e.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ReducibilityError, ValidationError

ROW_SUM_TOL = 1e-10
STATIONARITY_TOL = 1e-8
# Row sums off by less than this are silently renormalized (covers inputs
# like repeating decimals truncated in a text file); larger deviations are
# rejected.
RENORM_TOL = 1e-6


def _as_readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


def _check_row_stochastic(X: np.ndarray, name: str) -> np.ndarray:
    """Validate nonnegativity and row sums of 1, renormalizing tiny drift."""
    X = np.array(X, dtype=float)
    if X.ndim != 2:
        raise ValidationError(f"{name} must be a 2-d matrix")
    if np.any(~np.isfinite(X)):
        raise ValidationError(f"{name} contains non-finite entries")
    if np.any(X < 0):
        i = int(np.argwhere(X < 0)[0][0])
        raise ValidationError(f"{name} has a negative entry in row {i}")
    sums = X.sum(axis=1)
    bad = np.abs(sums - 1.0) > RENORM_TOL
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ValidationError(
            f"{name} row {i} sums to {sums[i]:.12g}, expected 1"
        )
    drift = np.abs(sums - 1.0) > ROW_SUM_TOL
    if np.any(drift):
        X = X / sums[:, None]
    return X


def stationary_vector(A: np.ndarray) -> np.ndarray:
    """Unique stationary row vector pi of a row-stochastic matrix A.

    Solves (A^T - I) x = 0 with one equation replaced by the normalization
    sum(x) = 1.  Raises ReducibilityError when the null space of A^T - I is
    not one-dimensional (reducible or otherwise degenerate chain).
    """
    A = np.asarray(A, dtype=float)
    N = A.shape[0]
    if A.shape != (N, N):
        raise ValidationError("A must be square")
    K = A.T - np.eye(N)
    null_dim = N - np.linalg.matrix_rank(K, tol=1e-9)
    if null_dim != 1:
        raise ReducibilityError(
            f"stationary vector is not unique: null space has dimension {null_dim}"
        )
    G = np.vstack([K, np.ones((1, N))])
    rhs = np.zeros(N + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(G, rhs, rcond=None)
    pi = np.where(np.abs(pi) < 1e-13, np.abs(pi), pi)
    if np.any(pi < 0):
        raise ReducibilityError("stationary solve produced negative entries")
    pi = pi / pi.sum()
    residual = float(np.max(np.abs(pi @ A - pi)))
    if residual > STATIONARITY_TOL:
        raise ReducibilityError(
            f"stationary residual {residual:.3g} exceeds tolerance"
        )
    return pi


@dataclass(frozen=True)
class AbSpec:
    """Transition matrix A (N x N) plus read-out matrix B (N x m).

    Both must be row-stochastic; B[i, y] is the probability of emitting y
    from state i.
    """

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = _check_row_stochastic(self.A, "A")
        B = _check_row_stochastic(self.B, "B")
        if A.shape[0] != B.shape[0]:
            raise ValidationError(
                f"A has {A.shape[0]} states but B has {B.shape[0]} rows"
            )
        object.__setattr__(self, "A", _as_readonly(A))
        object.__setattr__(self, "B", _as_readonly(B))

    @property
    def N(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class HmmModel:
    """Validated HMM parameter set: matrices M(y), sizes, stationary pi."""

    m: int
    N: int
    M: tuple  # m read-only N x N arrays
    pi: np.ndarray

    def __post_init__(self):
        if self.m != len(self.M):
            raise ValidationError("alphabet size does not match number of M(y)")
        Ms = []
        for y, My in enumerate(self.M):
            My = np.array(My, dtype=float)
            if My.shape != (self.N, self.N):
                raise ValidationError(f"M({y}) has shape {My.shape}, expected square")
            if np.any(~np.isfinite(My)) or np.any(My < 0):
                raise ValidationError(f"M({y}) has a negative or non-finite entry")
            Ms.append(My)
        A = sum(Ms)
        A = _check_row_stochastic(A, "sum of M(y)")
        pi = np.array(self.pi, dtype=float)
        if pi.shape != (self.N,):
            raise ValidationError("pi has wrong length")
        if np.any(pi < 0):
            raise ValidationError("pi has a negative entry")
        if abs(pi.sum() - 1.0) > ROW_SUM_TOL:
            raise ValidationError(f"pi sums to {pi.sum():.12g}, expected 1")
        if np.max(np.abs(pi @ A - pi)) > STATIONARITY_TOL:
            raise ValidationError("pi is not stationary for sum of M(y)")
        object.__setattr__(self, "M", tuple(_as_readonly(My) for My in Ms))
        object.__setattr__(self, "pi", _as_readonly(pi))

    @property
    def A(self) -> np.ndarray:
        """Transition matrix of the hidden chain, sum over symbols of M(y)."""
        return sum(np.asarray(My) for My in self.M)

    @classmethod
    def from_matrices(cls, M: Sequence[np.ndarray], pi=None) -> "HmmModel":
        """Build from the M(y) list; computes pi when not supplied."""
        M = [np.asarray(My, dtype=float) for My in M]
        N = M[0].shape[0]
        if pi is None:
            A = _check_row_stochastic(sum(M), "sum of M(y)")
            pi = stationary_vector(A)
        return cls(m=len(M), N=N, M=tuple(M), pi=np.asarray(pi, dtype=float))


def model_from_ab(spec: AbSpec) -> HmmModel:
    """Assemble M(y) = A * diag(B[:, y]) and the stationary pi of A."""
    M = [spec.A * spec.B[:, y][None, :] for y in range(spec.m)]
    pi = stationary_vector(spec.A)
    return HmmModel(m=spec.m, N=spec.N, M=tuple(M), pi=pi)


def string_probability(model: HmmModel, w: Sequence[int]) -> float:
    """Exact probability of the output string w; 1.0 for the empty string."""
    vec = model.pi
    for t, y in enumerate(w):
        if not 0 <= int(y) < model.m:
            raise DomainError(f"symbol {y} at position {t} outside 0..{model.m - 1}")
        vec = vec @ model.M[int(y)]
    return float(vec.sum())
