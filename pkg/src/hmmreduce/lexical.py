"""Bijections between fixed-length symbol strings and matrix indices.

Two orderings are used for Hankel rows and columns:

* FLO ("first" order): the first symbol is the least significant digit,
  so for m=2, n=2 the strings in increasing order are 00, 10, 01, 11.
* LLO ("last" order): the first symbol is the most significant digit,
  giving 00, 01, 10, 11.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, SizeLimitError

FLO = "flo"
LLO = "llo"

# Hard cap so that m**n always fits comfortably in a machine integer.
MAX_INDEX = 1 << 62


@dataclass(frozen=True)
class LexOrder:
    kind: str
    m: int
    n: int

    def __post_init__(self):
        if self.kind not in (FLO, LLO):
            raise DomainError(f"unknown order kind {self.kind!r}")
        if self.m < 1 or self.n < 0:
            raise DomainError("need m >= 1 and n >= 0")
        if self.m ** self.n > MAX_INDEX:
            raise SizeLimitError(
                f"index range {self.m}**{self.n} exceeds the machine-integer cap"
            )

    @property
    def size(self) -> int:
        return self.m ** self.n

    def _check_symbol(self, y: int) -> int:
        y = int(y)
        if not 0 <= y < self.m:
            raise DomainError(f"symbol {y} outside 0..{self.m - 1}")
        return y

    def encode(self, w: Sequence[int]) -> int:
        """Index of the length-n string w under this order."""
        if len(w) != self.n:
            raise DomainError(f"string length {len(w)} != {self.n}")
        idx = 0
        if self.kind == FLO:
            for t in reversed(range(self.n)):
                idx = idx * self.m + self._check_symbol(w[t])
        else:
            for t in range(self.n):
                idx = idx * self.m + self._check_symbol(w[t])
        return idx

    def decode(self, index: int) -> tuple:
        """String whose encode() equals index."""
        index = int(index)
        if not 0 <= index < self.size:
            raise DomainError(f"index {index} outside 0..{self.size - 1}")
        digits = []
        for _ in range(self.n):
            digits.append(index % self.m)
            index //= self.m
        if self.kind == LLO:
            digits.reverse()
        return tuple(digits)

    def prepend(self, y: int, u_index: int) -> int:
        """Index of the string y+u in the corresponding length-(n+1) order."""
        y = self._check_symbol(y)
        u_index = int(u_index)
        if not 0 <= u_index < self.size:
            raise DomainError(f"index {u_index} outside 0..{self.size - 1}")
        if self.kind == FLO:
            return y + self.m * u_index
        return y * self.size + u_index

    def append(self, u_index: int, y: int) -> int:
        """Index of the string u+y in the corresponding length-(n+1) order."""
        y = self._check_symbol(y)
        u_index = int(u_index)
        if not 0 <= u_index < self.size:
            raise DomainError(f"index {u_index} outside 0..{self.size - 1}")
        if self.kind == FLO:
            return u_index + y * self.size
        return self.m * u_index + y


def flo(m: int, n: int) -> LexOrder:
    return LexOrder(FLO, m, n)


def llo(m: int, n: int) -> LexOrder:
    return LexOrder(LLO, m, n)
