"""n-dimensional partitions (molten crystals) and their box-level combinatorics.

A crystal is a finite subset of Z^n_{>=0} that is downward closed under the
componentwise order (the melting rule): whenever a box is present, so is
every box obtained by decrementing one of its positive coordinates.  The
module provides validation, the addable/removable frontier, projection to
charges, the bisect and hypercube constructions used by the structural
lemmas, surface-point classification, a seeded random growth process and a
JSON file format.
"""

from __future__ import annotations

import hashlib
import json
import random
from typing import Iterable, Optional, Sequence

from .lattice import charge_of_box

Box = tuple


class InvalidPartitionError(ValueError):
    """A box set violates the melting rule; ``box`` names the first offender."""

    def __init__(self, message: str, box: Optional[Box] = None):
        super().__init__(message)
        self.box = box


class ProjectionCollisionError(RuntimeError):
    """Two distinct frontier boxes projected to the same charge.

    For a valid crystal this cannot happen (distinct addable/removable boxes
    never differ by a multiple of E), so hitting it means either the input
    was not a crystal or the size identity between frontier boxes and their
    projections has been falsified.  It is surfaced loudly instead of being
    deduplicated away.
    """


def _step(box: Box, axis: int, amount: int = 1) -> Box:
    return box[:axis] + (box[axis] + amount,) + box[axis + 1:]


def _check_shape(boxes: Iterable[Box], n: int) -> None:
    for b in boxes:
        if len(b) != n:
            raise InvalidPartitionError(
                f"box {b} has dimension {len(b)}, expected {n}", box=b)
        if min(b, default=0) < 0:
            raise InvalidPartitionError(f"box {b} has a negative component", box=b)


class Crystal:
    """Immutable n-dimensional partition stored as a frozenset of box tuples."""

    __slots__ = ("boxes", "n")

    def __init__(self, boxes: Iterable[Sequence[int]], n: int, *, validate: bool = True):
        bs = frozenset(tuple(int(x) for x in b) for b in boxes)
        _check_shape(bs, n)
        object.__setattr__(self, "boxes", bs)
        object.__setattr__(self, "n", n)
        if validate:
            bad = first_melting_violation(bs, n)
            if bad is not None:
                box, pred = bad
                raise InvalidPartitionError(
                    f"melting rule violated at box {list(box)}: "
                    f"missing predecessor {list(pred)}", box=box)

    def __setattr__(self, *_):
        raise AttributeError("Crystal is immutable")

    @classmethod
    def empty(cls, n: int) -> "Crystal":
        return cls((), n, validate=False)

    def __contains__(self, box) -> bool:
        return tuple(box) in self.boxes

    def __iter__(self):
        return iter(sorted(self.boxes))

    def __len__(self) -> int:
        return len(self.boxes)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Crystal)
                and self.n == other.n and self.boxes == other.boxes)

    def __hash__(self) -> int:
        return hash((self.n, self.boxes))

    def __repr__(self) -> str:
        return f"Crystal(n={self.n}, boxes={len(self.boxes)})"

    def with_box(self, box: Box) -> "Crystal":
        """New crystal with ``box`` added; caller guarantees addability."""
        return Crystal(self.boxes | {tuple(box)}, self.n, validate=False)

    def digest(self) -> str:
        payload = json.dumps(sorted(self.boxes)).encode()
        return hashlib.sha1(payload).hexdigest()[:12]


def first_melting_violation(boxes, n):
    """First (box, missing predecessor) pair in sorted order, or None."""
    bs = boxes if isinstance(boxes, (set, frozenset)) else frozenset(boxes)
    for b in sorted(bs):
        for k in range(n):
            if b[k] > 0:
                pred = _step(b, k, -1)
                if pred not in bs:
                    return b, pred
    return None


def is_crystal(boxes: Iterable[Sequence[int]], n: int) -> bool:
    """True iff the box set is downward closed (melting rule)."""
    bs = frozenset(tuple(b) for b in boxes)
    _check_shape(bs, n)
    return first_melting_violation(bs, n) is None


def _boxes_of(delta) -> tuple:
    if isinstance(delta, Crystal):
        return delta.boxes, delta.n
    bs = frozenset(tuple(b) for b in delta)
    if not bs:
        raise ValueError("cannot infer dimension from an empty box set")
    return bs, len(next(iter(bs)))


def addable(delta: Crystal) -> frozenset:
    """Boxes whose insertion keeps the melting rule.

    Candidates are the origin plus every single-axis successor of an
    existing box; nothing else can have all of its predecessors present.
    """
    boxes, n = _boxes_of(delta) if len(delta) else (frozenset(), delta.n)
    origin = (0,) * n
    candidates = {origin}
    for b in boxes:
        for k in range(n):
            candidates.add(_step(b, k))
    out = set()
    for cand in candidates:
        if cand in boxes:
            continue
        if all(cand[k] == 0 or _step(cand, k, -1) in boxes for k in range(n)):
            out.add(cand)
    return frozenset(out)


def removable(delta: Crystal) -> frozenset:
    """Boxes whose deletion keeps the melting rule (the maximal boxes)."""
    boxes = delta.boxes
    n = delta.n
    return frozenset(
        b for b in boxes
        if not any(_step(b, k) in boxes for k in range(n)))


def targets(delta: Crystal) -> frozenset:
    """Projected charges of the addable/removable frontier.

    Distinct frontier boxes must project to distinct charges; a collision
    raises ProjectionCollisionError rather than silently deduplicating.
    """
    seen = {}
    for b in sorted(addable(delta) | removable(delta)):
        c = charge_of_box(b)
        if c in seen:
            raise ProjectionCollisionError(
                f"boxes {list(seen[c])} and {list(b)} both project to charge {list(c)}")
        seen[c] = b
    return frozenset(seen)


def bisect(delta: Crystal, box: Sequence[int]) -> frozenset:
    """Sub-collection of the crystal dominating ``box`` componentwise."""
    b = tuple(box)
    if len(b) != delta.n:
        raise ValueError(f"box {b} has dimension {len(b)}, expected {delta.n}")
    return frozenset(x for x in delta.boxes
                     if all(xi >= bi for xi, bi in zip(x, b)))


def hypercube(origin: Sequence[int], dirs: Iterable[int]) -> frozenset:
    """The 2^d boxes spanned from ``origin`` by 0/1 steps along ``dirs``."""
    o = tuple(origin)
    ds = tuple(dirs)
    if len(set(ds)) != len(ds):
        raise ValueError(f"duplicate axis in direction set {ds}")
    for i in ds:
        if not 0 <= i < len(o):
            raise ValueError(f"axis {i} out of range for n={len(o)}")
    cells = {o}
    for i in ds:
        cells |= {_step(c, i) for c in cells}
    return frozenset(cells)


def surface_membership(delta: Crystal, box: Sequence[int]):
    """Classify ``box`` as a surface point of the crystal.

    Returns ``(d, dirs)`` where ``dirs`` are the axes with nonzero
    components, or None.  A box outside the crystal with at least one zero
    component is always a surface point of its zero pattern; an everywhere
    positive box additionally needs its full diagonal predecessor inside the
    crystal.
    """
    b = tuple(box)
    n = delta.n
    if len(b) != n:
        raise ValueError(f"box {b} has dimension {len(b)}, expected {n}")
    if min(b) < 0:
        raise ValueError(f"box {b} has a negative component")
    if b in delta.boxes:
        return None
    dirs = tuple(i for i, x in enumerate(b) if x != 0)
    d = len(dirs)
    if d == n:
        below = tuple(x - 1 for x in b)
        if below not in delta.boxes:
            return None
    return d, dirs


def grow_random(delta: Crystal, steps: int, seed) -> Crystal:
    """Add ``steps`` uniformly random addable boxes; deterministic per seed."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    n = delta.n
    boxes = set(delta.boxes)
    frontier = set(addable(delta))
    rng = random.Random(seed)
    for _ in range(steps):
        chosen = rng.choice(sorted(frontier))
        boxes.add(chosen)
        frontier.discard(chosen)
        # only successors of the new box can have become addable
        for k in range(n):
            succ = _step(chosen, k)
            if succ in boxes:
                continue
            if all(succ[j] == 0 or _step(succ, j, -1) in boxes for j in range(n)):
                frontier.add(succ)
    return Crystal(boxes, n, validate=False)


# ---------------------------------------------------------------------------
# Partition file format: JSON array of boxes, each a length-n array of
# non-negative integers.

def dumps_crystal(delta: Crystal) -> str:
    return json.dumps(sorted(list(b) for b in delta.boxes))


def loads_crystal(text: str, n: Optional[int] = None) -> Crystal:
    data = json.loads(text)
    if not isinstance(data, list) or any(not isinstance(b, list) for b in data):
        raise InvalidPartitionError("partition file must be a JSON array of boxes")
    if not data:
        if n is None:
            raise InvalidPartitionError(
                "empty partition file needs an explicit dimension")
        return Crystal.empty(n)
    dim = n if n is not None else len(data[0])
    return Crystal(data, dim)


def dump_crystal(delta: Crystal, path) -> None:
    with open(path, "w") as fp:
        fp.write(dumps_crystal(delta))
        fp.write("\n")


def load_crystal(path, n: Optional[int] = None) -> Crystal:
    with open(path) as fp:
        return loads_crystal(fp.read(), n)
