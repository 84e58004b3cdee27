"""Dense enumeration and sampling of hypercube order ideals.

The sub-partitions of a d-dimensional hypercube are exactly the
downward-closed subsets (order ideals) of the Boolean lattice {0,1}^d; their
total count is the Dedekind number M(d).  Cells are indexed by their corner
bit patterns and an ideal is a single Python int used as a 2^d-wide bit
field, so closure checks and toggles are O(d) mask operations even for the
512-cell 9-cube.

The stratified scan drives the pole-order evaluation of every (or a sampled
set of) ideals bucketed by box count, recording the (box count, pole order)
histogram behind the bubble plots together with frontier-membership flags
and any violation of the expected bound.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional

from .charge_engine import Recipe, omega_at, recipe_for
from .crystal import Crystal, targets
from .lattice import charge_of_box

DEDEKIND = {0: 2, 1: 3, 2: 6, 3: 20, 4: 168, 5: 7581, 6: 7828354}

_EXHAUSTIVE_LIMIT = 6


@lru_cache(maxsize=None)
def _cube_tables(d: int):
    size = 1 << d
    preds = []
    succs = []
    pred_cells = []
    succ_cells = []
    for cell in range(size):
        pm = 0
        sm = 0
        pc = []
        sc = []
        for j in range(d):
            bit = 1 << j
            if cell & bit:
                pm |= 1 << (cell ^ bit)
                pc.append(cell ^ bit)
            else:
                sm |= 1 << (cell | bit)
                sc.append(cell | bit)
        preds.append(pm)
        succs.append(sm)
        pred_cells.append(tuple(pc))
        succ_cells.append(tuple(sc))
    # linear extension of the cube poset: by popcount, then numerically
    order = sorted(range(size), key=lambda c: (c.bit_count(), c))
    return (tuple(preds), tuple(succs), tuple(order),
            tuple(pred_cells), tuple(succ_cells))


class CubeIdeal:
    """Downward-closed subset of a d-cube, encoded over its 2^d cells.

    ``dirs`` lists the ambient axes the cube spans (0-based); cell j of the
    bit field corresponds to the corner whose coordinate along ``dirs[i]``
    is bit i of j.
    """

    __slots__ = ("d", "dirs", "bits")

    def __init__(self, d: int, dirs=None, bits: int = 0, *, validate: bool = True):
        self.d = d
        self.dirs = tuple(range(d)) if dirs is None else tuple(dirs)
        if len(self.dirs) != d or len(set(self.dirs)) != d:
            raise ValueError(f"need {d} distinct ambient axes, got {self.dirs}")
        self.bits = bits
        if validate and not self.is_downward_closed():
            raise ValueError(f"cell set {bits:#x} is not downward closed")

    @classmethod
    def empty(cls, d: int, dirs=None) -> "CubeIdeal":
        return cls(d, dirs, 0, validate=False)

    @classmethod
    def full(cls, d: int, dirs=None) -> "CubeIdeal":
        return cls(d, dirs, (1 << (1 << d)) - 1, validate=False)

    @property
    def count(self) -> int:
        return self.bits.bit_count()

    def cells(self):
        return [c for c in range(1 << self.d) if self.bits >> c & 1]

    def is_downward_closed(self) -> bool:
        preds = _cube_tables(self.d)[0]
        bits = self.bits
        for cell in range(1 << self.d):
            if bits >> cell & 1 and bits & preds[cell] != preds[cell]:
                return False
        return True

    def addable_cells(self):
        preds = _cube_tables(self.d)[0]
        bits = self.bits
        return [c for c in range(1 << self.d)
                if not bits >> c & 1 and bits & preds[c] == preds[c]]

    def removable_cells(self):
        succs = _cube_tables(self.d)[1]
        bits = self.bits
        return [c for c in range(1 << self.d)
                if bits >> c & 1 and not bits & succs[c]]

    def with_cell(self, cell: int) -> "CubeIdeal":
        return CubeIdeal(self.d, self.dirs, self.bits | (1 << cell), validate=False)

    def without_cell(self, cell: int) -> "CubeIdeal":
        return CubeIdeal(self.d, self.dirs, self.bits & ~(1 << cell), validate=False)

    def boxes(self, n: int):
        out = []
        for cell in self.cells():
            box = [0] * n
            for j, axis in enumerate(self.dirs):
                box[axis] = cell >> j & 1
            out.append(tuple(box))
        return frozenset(out)

    def to_crystal(self, n: int) -> Crystal:
        if n < self.d or max(self.dirs, default=-1) >= n:
            raise ValueError(f"cannot embed a {self.d}-cube on axes {self.dirs} in n={n}")
        return Crystal(self.boxes(n), n, validate=False)

    def target_box(self, n: int):
        box = [0] * n
        for axis in self.dirs:
            box[axis] = 1
        return tuple(box)

    def __eq__(self, other):
        return (isinstance(other, CubeIdeal) and self.d == other.d
                and self.dirs == other.dirs and self.bits == other.bits)

    def __hash__(self):
        return hash((self.d, self.dirs, self.bits))

    def __repr__(self):
        return f"CubeIdeal(d={self.d}, boxes={self.count}, bits={self.bits:#x})"


def enumerate_ideals(d: int, dirs=None) -> Iterator[CubeIdeal]:
    """Every order ideal of the d-cube exactly once (M(d) of them).

    Depth-first over a fixed linear extension: each cell in popcount order is
    excluded or, when all its covers below are present, included.
    """
    if not 1 <= d <= _EXHAUSTIVE_LIMIT:
        raise ValueError(
            f"exhaustive enumeration supports 1 <= d <= {_EXHAUSTIVE_LIMIT}; "
            f"use sample_ideal for larger cubes")
    preds, _, order = _cube_tables(d)[:3]
    size = 1 << d
    stack = [(0, 0)]
    while stack:
        idx, bits = stack.pop()
        while idx < size:
            cell = order[idx]
            if bits & preds[cell] == preds[cell]:
                stack.append((idx + 1, bits | (1 << cell)))
            idx += 1
        yield CubeIdeal(d, dirs, bits, validate=False)


def _close_down(d: int, bits: int) -> int:
    preds, _, order = _cube_tables(d)[:3]
    for cell in reversed(order):
        if bits >> cell & 1:
            bits |= preds[cell]
    return bits


class _FrontierState:
    """Ideal bits plus incrementally maintained addable/removable cell sets."""

    __slots__ = ("d", "bits", "add", "rem", "_pmask", "_smask", "_pcells", "_scells")

    def __init__(self, d: int):
        self.d = d
        self.bits = 0
        self.add = {0}
        self.rem = set()
        tables = _cube_tables(d)
        self._pmask, self._smask = tables[0], tables[1]
        self._pcells, self._scells = tables[3], tables[4]

    def insert(self, cell: int):
        self.bits |= 1 << cell
        self.add.discard(cell)
        self.rem.add(cell)  # nothing above a newly addable cell is occupied
        for p in self._pcells[cell]:
            self.rem.discard(p)
        for s in self._scells[cell]:
            if not self.bits >> s & 1 and self.bits & self._pmask[s] == self._pmask[s]:
                self.add.add(s)

    def delete(self, cell: int):
        self.bits &= ~(1 << cell)
        self.rem.discard(cell)
        self.add.add(cell)
        for s in self._scells[cell]:
            self.add.discard(s)
        for p in self._pcells[cell]:
            if self.bits >> p & 1 and not self.bits & self._smask[p]:
                self.rem.add(p)


def sample_ideal(d: int, strategy: str, seed, *, size: Optional[int] = None,
                 dirs=None) -> CubeIdeal:
    """Random order ideal of the d-cube, deterministic per (strategy, seed).

    closure   cell-wise Bernoulli subset (sparse-biased inclusion rate so the
              closure sizes spread over the whole range), then downward closure
    walk      8 * 2^d toggles of a uniformly random addable/removable cell,
              starting from the empty ideal
    grow_to   add uniformly random addable cells until ``size`` boxes
    """
    if d > 10:
        raise ValueError("sampling supported up to d=10")
    ncells = 1 << d
    rng = random.Random(f"{strategy}/{d}/{seed}")
    if strategy == "closure":
        rate = rng.random() ** 3
        bits = 0
        for cell in range(ncells):
            if rng.random() < rate:
                bits |= 1 << cell
        return CubeIdeal(d, dirs, _close_down(d, bits), validate=False)
    if strategy == "walk":
        state = _FrontierState(d)
        for _ in range(8 * ncells):
            pool = sorted(state.add) + sorted(state.rem)
            cell = rng.choice(pool)
            if state.bits >> cell & 1:
                state.delete(cell)
            else:
                state.insert(cell)
        return CubeIdeal(d, dirs, state.bits, validate=False)
    if strategy == "grow_to":
        if size is None or not 0 <= size <= ncells:
            raise ValueError(f"grow_to needs a target size in [0, {ncells}]")
        state = _FrontierState(d)
        while state.bits.bit_count() < size:
            state.insert(rng.choice(sorted(state.add)))
        return CubeIdeal(d, dirs, state.bits, validate=False)
    raise ValueError(f"unknown sampling strategy {strategy!r}")


# ---------------------------------------------------------------------------
# Stratified scanning.

@dataclass
class StratumHistogram:
    """Counts of ideals per (box count, pole order) with frontier flags."""

    d: int
    n: int
    mode: str = "exhaustive"
    counts: Counter = field(default_factory=Counter)
    in_g_counts: Counter = field(default_factory=Counter)
    violations: list = field(default_factory=list)
    processed: int = 0

    def record(self, box_count: int, order: int, in_g: bool) -> None:
        self.counts[(box_count, order)] += 1
        if in_g:
            self.in_g_counts[(box_count, order)] += 1
        self.processed += 1

    def merge(self, other: "StratumHistogram") -> "StratumHistogram":
        if (self.d, self.n) != (other.d, other.n):
            raise ValueError("cannot merge histograms of different cubes")
        self.counts.update(other.counts)
        self.in_g_counts.update(other.in_g_counts)
        self.violations.extend(other.violations)
        self.processed += other.processed
        return self

    def rows(self):
        return [(bc, order, cnt, self.in_g_counts.get((bc, order), 0))
                for (bc, order), cnt in sorted(self.counts.items())]

    def box_counts_with_order(self, order: int):
        return sorted({bc for (bc, o) in self.counts if o == order})

    def write_csv(self, fp) -> None:
        fp.write("box_count,pole_order,count,in_G_count\n")
        for bc, order, cnt, ing in self.rows():
            fp.write(f"{bc},{order},{cnt},{ing}\n")


def _evaluate_ideal(ideal: CubeIdeal, n: int, recipe: Recipe):
    crystal = ideal.to_crystal(n)
    target = charge_of_box(ideal.target_box(n))
    order = omega_at(crystal, target, recipe)
    in_g = target in targets(crystal)
    return order, in_g


def _record_checked(hist: StratumHistogram, ideal: CubeIdeal, n: int,
                    order: int, in_g: bool) -> None:
    hist.record(ideal.count, order, in_g)
    if (in_g and order != 1) or (not in_g and order > 0):
        hist.violations.append({
            "d": ideal.d, "n": n, "bits": hex(ideal.bits),
            "boxes": ideal.count, "order": order, "in_g": in_g,
        })


def _scan_stratum(args):
    d, n, size, samples, seed = args
    recipe = recipe_for(n)
    hist = StratumHistogram(d=d, n=n, mode="sampled")
    for j in range(samples):
        ideal = sample_ideal(d, "grow_to", f"{seed}/{size}/{j}", size=size)
        order, in_g = _evaluate_ideal(ideal, n, recipe)
        _record_checked(hist, ideal, n, order, in_g)
    return hist


def _sample_block(args):
    d, n, strategy, seed, start, stop = args
    recipe = recipe_for(n)
    hist = StratumHistogram(d=d, n=n, mode=f"sampled-{strategy}")
    for j in range(start, stop):
        # sample j must not depend on how the block was sharded
        if strategy == "grow_to":
            size = random.Random(f"scan-size/{d}/{seed}/{j}").randint(0, 1 << d)
            ideal = sample_ideal(d, strategy, f"{seed}/{j}", size=size)
        else:
            ideal = sample_ideal(d, strategy, f"{seed}/{j}")
        order, in_g = _evaluate_ideal(ideal, n, recipe)
        _record_checked(hist, ideal, n, order, in_g)
    return hist


def sample_scan(d: int, n: int, samples: int, strategy: str = "closure",
                seed=0, *, workers: int = 1) -> StratumHistogram:
    """Bound check over freely sampled ideals, without stratification.

    With the grow_to strategy each sample targets a uniformly random box
    count; closure and walk samples land wherever their dynamics take them.
    """
    hist = StratumHistogram(d=d, n=n, mode=f"sampled-{strategy}")
    if workers > 1:
        chunk = -(-samples // workers)
        tasks = [(d, n, strategy, seed, lo, min(lo + chunk, samples))
                 for lo in range(0, samples, chunk)]
        from multiprocessing import Pool
        with Pool(workers) as pool:
            parts = pool.map(_sample_block, tasks)
    else:
        parts = [_sample_block((d, n, strategy, seed, 0, samples))]
    for part in parts:
        hist.merge(part)
    return hist


def stratified_scan(d: int, n: int, samples_per_stratum: int = 100, seed=0, *,
                    exhaustive: Optional[bool] = None,
                    workers: int = 1) -> StratumHistogram:
    """Histogram of (box count, pole order) over the ideals of the d-cube.

    Enumerates exhaustively when the cube is small enough, otherwise draws
    ``samples_per_stratum`` grow_to samples for every box count from 0 to
    2^d.  Bound violations (frontier membership without a simple pole, or a
    pole outside the frontier) are recorded as data, not raised.
    """
    if exhaustive is None:
        exhaustive = d <= 5
    if exhaustive:
        recipe = recipe_for(n)
        hist = StratumHistogram(d=d, n=n, mode="exhaustive")
        for ideal in enumerate_ideals(d):
            order, in_g = _evaluate_ideal(ideal, n, recipe)
            _record_checked(hist, ideal, n, order, in_g)
        return hist
    tasks = [(d, n, size, samples_per_stratum, seed) for size in range((1 << d) + 1)]
    hist = StratumHistogram(d=d, n=n, mode="sampled")
    if workers > 1:
        from multiprocessing import Pool
        with Pool(workers) as pool:
            parts = pool.map(_scan_stratum, tasks)
    else:
        parts = [_scan_stratum(t) for t in tasks]
    for part in parts:
        hist.merge(part)
    return hist
