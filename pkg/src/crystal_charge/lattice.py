"""Exact arithmetic in the charge lattice Z^n modulo the all-ones vector.

Boxes of an n-dimensional partition sit in Z^n_{>=0}.  Each axis carries a
generic weight and the weights sum to zero, so the weight attached to a box
depends only on its coordinate vector modulo integer multiples of
E = (1, ..., 1).  A *charge* is the canonical representative of that residue
class: the vector shifted so that its minimum component is exactly zero.
Because the weights are generic apart from the zero-sum constraint, two
charges coincide iff their canonical vectors are componentwise equal, which
lets the whole calculus run on plain integer tuples.

Axis indices are 0-based throughout the package.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

Vec = tuple  # length-n tuple of ints


def normalize(raw: Sequence[int]) -> Vec:
    """Canonical representative of ``raw`` modulo E (minimum component 0)."""
    if len(raw) == 0:
        raise ValueError("cannot normalize an empty vector")
    m = min(raw)
    if m == 0:
        return tuple(raw)
    return tuple(x - m for x in raw)


def zero_charge(n: int) -> Vec:
    return (0,) * n


def charge_of_box(box: Sequence[int]) -> Vec:
    """Project a box position to its charge."""
    return normalize(box)


def add_dirs(charge: Sequence[int], dirs: Iterable[int]) -> Vec:
    """Charge reached from ``charge`` by one unit step along each axis in ``dirs``.

    ``dirs`` must be distinct 0-based axis indices.  Stepping along every
    axis at once adds E and therefore returns the same charge.
    """
    n = len(charge)
    lp = list(charge)
    seen = set()
    for i in dirs:
        if not 0 <= i < n:
            raise ValueError(f"axis {i} out of range for n={n}")
        if i in seen:
            raise ValueError(f"duplicate axis {i} in direction set")
        seen.add(i)
        lp[i] += 1
    return normalize(lp)


def neighbor_degree(c: Sequence[int], c2: Sequence[int]) -> Optional[int]:
    """Number of distinct unit steps leading from charge ``c`` to ``c2``.

    Returns d when ``c2 - c`` is congruent to a 0/1 vector with d ones, and
    None otherwise.  For distinct charges the relation is complementary:
    degree(c, c2) == d implies degree(c2, c) == n - d.  Equal charges sit in
    the degenerate class where 0 and n describe the same step set, and the
    canonical answer is 0.
    """
    if len(c) != len(c2):
        raise ValueError(f"dimension mismatch: {len(c)} vs {len(c2)}")
    delta = normalize(tuple(b - a for a, b in zip(c, c2)))
    for x in delta:
        if x > 1:
            return None
    return sum(delta)
