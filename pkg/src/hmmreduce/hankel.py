"""Pseudo-Hankel matrices of an HMM and their structured factors.

For half-length n the Hankel matrix H has entry H[r, s] equal to the joint
probability of the length-2n string u_r + v_s, with prefixes u_r ordered in
FLO and suffixes v_s in LLO.  For an HMM it factors exactly as H = Pi @ Gamma
where Pi stacks the forward rows pi*M(u) and Gamma the backward columns
M(v)*e.  This module builds those objects and the reshaping transforms
(marginalization to half-length n-1, block-diagonal expansion, repackaging)
used by the two-step reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np

from .errors import InputError, ShapeError, SizeLimitError
from .hmm import HmmModel
from . import lexical

# Dense-storage cap on the total entry count of H.
DEFAULT_ENTRY_CAP = 1 << 20


def _check_size(m: int, n: int, entry_cap: int) -> int:
    side = m ** n
    if side * side > entry_cap:
        raise SizeLimitError(
            f"dense Hankel would hold {side}x{side} entries, cap is {entry_cap}"
        )
    return side


def _is_power(count: int, m: int) -> bool:
    if count < 1:
        return False
    while count % m == 0:
        count //= m
    return count == 1


def _split_rows(X: np.ndarray, m: int, name: str) -> int:
    """Number of row groups m^(n-1); errors unless rows are a power of m."""
    rows = X.shape[0]
    if rows == 1 or not _is_power(rows, m):
        raise ShapeError(f"{name} has {rows} rows, not a positive power of {m}")
    return rows // m


@dataclass(frozen=True)
class HankelSystem:
    """The triple (H, Pi, Gamma) for one half-length n."""

    m: int
    n: int
    H: np.ndarray       # m^n x m^n
    Pi: np.ndarray      # m^n x N, rows in FLO
    Gamma: np.ndarray   # N x m^n, columns in LLO


def build_factors(model: HmmModel, n: int,
                  entry_cap: int = DEFAULT_ENTRY_CAP) -> HankelSystem:
    """Forward/backward construction of (H, Pi, Gamma) for half-length n.

    Pi grows from the single row pi by appending symbols (FLO blocks of the
    last symbol stack vertically); Gamma grows from the all-ones column by
    prepending symbols (LLO blocks of the first symbol stack horizontally).
    """
    if n < 1:
        raise InputError("half-length n must be >= 1")
    _check_size(model.m, n, entry_cap)
    Pi = model.pi[None, :]
    Gamma = np.ones((model.N, 1))
    for _ in range(n):
        Pi = np.vstack([Pi @ model.M[y] for y in range(model.m)])
        Gamma = np.hstack([model.M[y] @ Gamma for y in range(model.m)])
    H = Pi @ Gamma
    return HankelSystem(m=model.m, n=n, H=H, Pi=Pi, Gamma=Gamma)


def hankel_from_oracle(dist: Callable[[tuple], float], m: int, n: int,
                       entry_cap: int = DEFAULT_ENTRY_CAP) -> np.ndarray:
    """Hankel matrix from an exact length-2n distribution oracle.

    The oracle is evaluated on every string of length 2n; the resulting
    values must be nonnegative and sum to 1 within 1e-8.
    """
    side = _check_size(m, n, entry_cap)
    row_order = lexical.flo(m, n)
    col_order = lexical.llo(m, n)
    H = np.empty((side, side))
    for w in product(range(m), repeat=2 * n):
        r = row_order.encode(w[:n])
        s = col_order.encode(w[n:])
        H[r, s] = dist(w)
    if np.any(H < 0):
        raise InputError("distribution oracle returned a negative probability")
    total = float(H.sum())
    if abs(total - 1.0) > 1e-8:
        raise InputError(
            f"length-{2 * n} probabilities sum to {total:.12g}, off by {total - 1.0:.3g}"
        )
    return H


def marginalize_pi(Pi: np.ndarray, m: int) -> np.ndarray:
    """Sum out the first symbol: row u of the result is sum_y of row yu.

    In FLO the row index of yu is y + m*u, so the rows group as
    (u, y) blocks of size m.
    """
    groups = _split_rows(Pi, m, "Pi")
    return Pi.reshape(groups, m, Pi.shape[1]).sum(axis=1)


def marginalize_gamma(Gamma: np.ndarray, m: int) -> np.ndarray:
    """Sum out the last symbol: column v of the result is sum_y of column vy."""
    cols = Gamma.shape[1]
    if cols == 1 or not _is_power(cols, m):
        raise ShapeError(f"Gamma has {cols} columns, not a positive power of {m}")
    return Gamma.reshape(Gamma.shape[0], cols // m, m).sum(axis=2)


def block_diag_gamma(Gamma: np.ndarray, m: int,
                     entry_cap: int = DEFAULT_ENTRY_CAP) -> np.ndarray:
    """Block-diagonal matrix with m copies of Gamma on the diagonal."""
    out_entries = (m * Gamma.shape[0]) * (m * Gamma.shape[1])
    if out_entries > entry_cap:
        raise SizeLimitError(
            f"block-diagonal expansion would hold {out_entries} entries, cap is {entry_cap}"
        )
    return np.kron(np.eye(m), Gamma)


def repackage_pi_tilde(Pi: np.ndarray, m: int) -> np.ndarray:
    """Reindex Pi (half-length n) as the m^(n-1) x mN matrix of rows pi(u y).

    Block y holds the rows of Pi whose FLO index is u + y*m^(n-1), i.e. the
    last symbol moves from the most significant row digit to a column block.
    """
    _split_rows(Pi, m, "Pi")
    return np.hstack(np.split(Pi, m, axis=0))
