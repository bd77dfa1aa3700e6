"""Pair-state sets and the diagonal / indistinguishable / distinguishable split.

Pair (i, j) of single-network states lives at linear index (i-1)*2^n + j in
the pair space of size 4^n.  The mirror of (i, j) is (j, i); dynamics and
output tests are mirror-symmetric, so analyses run on the full pair space and
results are folded to the canonical i < j representatives for display.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import PbnModel


class StateSet:
    """Immutable subset of {1, ..., universe} backed by one big integer.

    Bit k-1 of ``mask`` holds membership of index k, so unions, intersections
    and subset tests are word-wise integer operations.
    """

    __slots__ = ("universe", "mask")

    def __init__(self, universe: int, mask: int = 0):
        if universe <= 0:
            raise ValueError("universe must be positive")
        if mask < 0 or mask >> universe:
            raise ValueError("mask has bits outside the universe")
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("StateSet is immutable")

    @classmethod
    def empty(cls, universe: int) -> "StateSet":
        return cls(universe, 0)

    @classmethod
    def full(cls, universe: int) -> "StateSet":
        return cls(universe, (1 << universe) - 1)

    @classmethod
    def from_indices(cls, universe: int, indices) -> "StateSet":
        mask = 0
        for k in indices:
            if not 1 <= k <= universe:
                raise ValueError(f"index {k} out of range [1, {universe}]")
            mask |= 1 << (k - 1)
        return cls(universe, mask)

    @classmethod
    def from_bool_array(cls, arr) -> "StateSet":
        arr = np.asarray(arr, dtype=bool)
        packed = np.packbits(arr, bitorder="little").tobytes()
        return cls(arr.size, int.from_bytes(packed, "little"))

    def to_bool_array(self) -> np.ndarray:
        nbytes = (self.universe + 7) // 8
        raw = np.frombuffer(self.mask.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.universe].astype(bool)

    def _check(self, other: "StateSet") -> None:
        if not isinstance(other, StateSet):
            raise TypeError(f"expected StateSet, got {type(other).__name__}")
        if other.universe != self.universe:
            raise ValueError(f"universe mismatch: {self.universe} vs {other.universe}")

    def __contains__(self, k: int) -> bool:
        return 1 <= k <= self.universe and bool((self.mask >> (k - 1)) & 1)

    def __or__(self, other: "StateSet") -> "StateSet":
        self._check(other)
        return StateSet(self.universe, self.mask | other.mask)

    def __and__(self, other: "StateSet") -> "StateSet":
        self._check(other)
        return StateSet(self.universe, self.mask & other.mask)

    def __sub__(self, other: "StateSet") -> "StateSet":
        self._check(other)
        return StateSet(self.universe, self.mask & ~other.mask)

    def issubset(self, other: "StateSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "StateSet") -> bool:
        self._check(other)
        return self.mask & other.mask == 0

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __iter__(self):
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length()
            mask ^= low

    def indices(self) -> tuple[int, ...]:
        return tuple(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateSet):
            return NotImplemented
        return self.universe == other.universe and self.mask == other.mask

    def __hash__(self):
        return hash((self.universe, self.mask))

    def __repr__(self) -> str:
        shown = self.indices()
        body = ", ".join(map(str, shown[:12]))
        if len(shown) > 12:
            body += ", ..."
        return f"StateSet({self.universe}, {{{body}}})"


# ---------------------------------------------------------------------------
# Pair-space index arithmetic
# ---------------------------------------------------------------------------

def pair_index(i: int, j: int, n: int) -> int:
    """Linear pair-space index of (i, j), matching delta_2^n^i |x delta_2^n^j."""
    size = 1 << n
    if not (1 <= i <= size and 1 <= j <= size):
        raise ValueError(f"pair ({i}, {j}) out of range [1, {size}]^2")
    return (i - 1) * size + j


def pair_split(k: int, n: int) -> tuple[int, int]:
    size = 1 << n
    if not 1 <= k <= size * size:
        raise ValueError(f"pair index {k} out of range [1, {size * size}]")
    return (k - 1) // size + 1, (k - 1) % size + 1


def mirror_index(k: int, n: int) -> int:
    """Index of (j, i) for the pair (i, j) at index k; an involution."""
    i, j = pair_split(k, n)
    return pair_index(j, i, n)


def is_diagonal_index(k: int, n: int) -> bool:
    i, j = pair_split(k, n)
    return i == j


def diagonal_set(n: int) -> StateSet:
    size = 1 << n
    return StateSet.from_indices(size * size, (pair_index(i, i, n) for i in range(1, size + 1)))


def _as_square(s: StateSet, n: int) -> np.ndarray:
    size = 1 << n
    if s.universe != size * size:
        raise ValueError(f"state set universe {s.universe} does not match pair space {size * size}")
    return s.to_bool_array().reshape(size, size)


def mirror_close(s: StateSet, n: int) -> StateSet:
    """Union of the set with its mirror image."""
    grid = _as_square(s, n)
    return StateSet.from_bool_array((grid | grid.T).reshape(-1))


def canonicalize(s: StateSet, n: int) -> StateSet:
    """Fold every pair to its i <= j representative."""
    grid = _as_square(s, n)
    folded = np.triu(grid | grid.T)
    return StateSet.from_bool_array(folded.reshape(-1))


# ---------------------------------------------------------------------------
# The output-based partition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Diagonal pairs s0, and the canonical i < j pairs split by output equality."""

    s0: StateSet
    s1: StateSet
    s2: StateSet

    def named(self, name: str) -> StateSet:
        key = name.strip().lower()
        if key not in ("s0", "s1", "s2"):
            raise ValueError(f"unknown set name {name!r} (expected S0, S1 or S2)")
        return getattr(self, key)


def partition_states(model: PbnModel) -> Partition:
    """Split the pair space by the output matrix.

    s1 holds the i < j pairs the output cannot tell apart, s2 those it can;
    s0 is the diagonal.
    """
    h = model.output.col_index
    equal = h[:, None] == h[None, :]
    upper = np.triu(np.ones_like(equal, dtype=bool), k=1)
    diag = np.eye(len(h), dtype=bool)
    return Partition(
        s0=StateSet.from_bool_array(diag.reshape(-1)),
        s1=StateSet.from_bool_array((equal & upper).reshape(-1)),
        s2=StateSet.from_bool_array((~equal & upper).reshape(-1)),
    )
