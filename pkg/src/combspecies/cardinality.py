"""Cardinality constraints: finite unions of integer intervals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

Interval = Tuple[int, Optional[int]]  # (lo, hi); hi None means unbounded


def _normalize(intervals: Iterable[Interval]) -> Tuple[Interval, ...]:
    items = []
    for lo, hi in intervals:
        if lo < 0:
            raise ValueError(f"negative lower bound {lo}")
        if hi is not None and hi < lo:
            continue
        items.append((lo, hi))
    items.sort(key=lambda iv: iv[0])
    merged: list[list] = []
    for lo, hi in items:
        if merged:
            plo, phi = merged[-1]
            # adjacent or overlapping intervals are merged
            if phi is None or lo <= phi + 1:
                if phi is not None and (hi is None or hi > phi):
                    merged[-1][1] = hi
                continue
        merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class Card:
    """A set of admissible component counts, kept sorted, disjoint and merged.

    An empty union is allowed as a value (it denotes the empty species once
    applied) but never survives expression construction.
    """

    intervals: Tuple[Interval, ...]

    @staticmethod
    def of(*intervals: Interval) -> "Card":
        return Card(_normalize(intervals))

    @staticmethod
    def full() -> "Card":
        return FULL

    @staticmethod
    def at_least(k: int) -> "Card":
        return Card(((k, None),))

    @staticmethod
    def at_most(k: int) -> "Card":
        return Card(((0, k),))

    @staticmethod
    def exactly(k: int) -> "Card":
        return Card(((k, k),))

    def normalized(self) -> "Card":
        return Card(_normalize(self.intervals))

    # -- queries -----------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_full(self) -> bool:
        return self.intervals == ((0, None),)

    @property
    def is_finite(self) -> bool:
        return all(hi is not None for _, hi in self.intervals)

    @property
    def min(self) -> int:
        return self.intervals[0][0]

    @property
    def max(self) -> Optional[int]:
        return self.intervals[-1][1] if self.intervals else 0

    def __contains__(self, n: int) -> bool:
        return any(lo <= n and (hi is None or n <= hi) for lo, hi in self.intervals)

    def members(self, bound: int) -> Iterator[int]:
        """Members of the constraint that are < bound, in increasing order."""
        for lo, hi in self.intervals:
            top = bound if hi is None else min(hi + 1, bound)
            yield from range(lo, top)

    def is_exactly(self) -> Optional[int]:
        if len(self.intervals) == 1 and self.intervals[0][0] == self.intervals[0][1]:
            return self.intervals[0][0]
        return None

    # -- algebra -----------------------------------------------------------

    def intersect_at_least(self, k: int) -> "Card":
        return Card(_normalize((max(lo, k), hi) for lo, hi in self.intervals))

    def without_zero(self) -> "Card":
        return self.intersect_at_least(1)

    def shift_down(self) -> "Card":
        """{n - 1 : n in self, n >= 1}."""
        out = []
        for lo, hi in self.intervals:
            if hi is not None and hi == 0:
                continue
            out.append((max(lo - 1, 0), None if hi is None else hi - 1))
        return Card(_normalize(out))

    def below(self, k: int) -> "Card":
        """Members strictly smaller than k."""
        out = []
        for lo, hi in self.intervals:
            top = k - 1 if hi is None else min(hi, k - 1)
            if top >= lo:
                out.append((lo, top))
        return Card(_normalize(out))

    # -- text --------------------------------------------------------------

    def __str__(self) -> str:
        if self.is_full:
            return ""
        if len(self.intervals) == 1:
            lo, hi = self.intervals[0]
            if hi is None:
                return f"card >= {lo}"
            if lo == hi:
                return f"card = {lo}"
            if lo == 0:
                return f"card <= {hi}"
        parts = [f"{lo}..{'inf' if hi is None else hi}" for lo, hi in self.intervals]
        return "card in [" + ", ".join(parts) + "]"


FULL = Card(((0, None),))
EMPTY = Card(())
