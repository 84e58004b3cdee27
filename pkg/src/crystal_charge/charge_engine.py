"""Pole-order calculus for charge functions of n-dimensional partitions.

The charge function of a partition is a product of a 1/u prefactor, one
rational bonding factor per box and one correction factor per box cluster.
Everything this module needs from that product is *where* its poles and
zeros sit and with which integer order, so the calculus never touches the
spectral variable: a spectrum is a finitely supported map from charges to
integer orders (positive for poles, negative for zeros), and every factor
family is reduced to "add this order delta at that charge".

Three independent routes compute the same object and cross-check each other:

* :func:`potential` accumulates per-box and per-cluster order deltas,
* :func:`factor_multiset_oracle` walks the literal numerator/denominator
  factors of the product form,
* :func:`residue_probe` evaluates the product at exact rational points near
  a candidate pole and reads the order off the growth rate.
"""

from __future__ import annotations

import math
from collections import defaultdict
from itertools import combinations
from typing import Dict, Iterable, Iterator, NamedTuple, Optional, Sequence

from .crystal import Crystal, _step
from .lattice import add_dirs, normalize, zero_charge

Spectrum = Dict[tuple, int]


class UnsupportedDimensionError(ValueError):
    """Requested a recipe for a dimension with no known factor family."""


class Cluster(NamedTuple):
    """A box together with one unit-step neighbor along each listed axis."""
    base: tuple
    dirs: tuple

    def boxes(self):
        return (self.base,) + tuple(_step(self.base, i) for i in self.dirs)


class SingleRule(NamedTuple):
    dirs: tuple   # axes whose weights shift the contribution away from the box
    delta: int    # order contributed at the shifted charge


class ClusterRule(NamedTuple):
    size: int     # number of boxes in the cluster (1 + number of directions)
    delta: int    # order contributed by each such cluster
    anchor: str   # "tip": at the base charge advanced along every cluster
                  # direction; "base": at the base charge itself


class Recipe:
    """Dimension-specific contribution table for the charge function."""

    __slots__ = ("n", "k", "single_rules", "cluster_rules",
                 "_single_by_pattern", "_tip_delta_by_len")

    def __init__(self, n, k, single_rules, cluster_rules):
        self.n = n
        self.k = k
        self.single_rules = tuple(single_rules)
        self.cluster_rules = tuple(cluster_rules)
        # Pattern lookup for the single-charge evaluator: the canonical form
        # of the 0/1 indicator of each rule's direction set.
        by_pattern = defaultdict(int)
        for dirs, delta in self.single_rules:
            pattern = normalize(tuple(1 if i in dirs else 0 for i in range(n)))
            by_pattern[pattern] += delta
        self._single_by_pattern = dict(by_pattern)
        self._tip_delta_by_len = {
            rule.size - 1: rule.delta
            for rule in self.cluster_rules
            if rule.anchor == "tip" and rule.size - 1 < n
        }

    def __repr__(self):
        return (f"Recipe(n={self.n}, singles={len(self.single_rules)}, "
                f"clusters={len(self.cluster_rules)})")


_RECIPES: Dict[int, Recipe] = {}


def recipe_for(n: int) -> Recipe:
    """Contribution recipe for dimension n (2, 3, 4, or any odd n >= 3)."""
    if n in _RECIPES:
        return _RECIPES[n]
    if n < 2:
        raise UnsupportedDimensionError(f"no charge function for n={n}")
    if n % 2 == 0 and n > 4:
        raise UnsupportedDimensionError(
            f"n={n}: even dimensions above 4 have no known charge function")
    singles = []
    clusters = []
    if n == 2:
        # bonding factor 1/((u-h1)(u-h2)); pair factor u^2 anchored at the
        # pair's base charge, full-corner factor 1/u^2
        singles = [SingleRule((i,), +1) for i in range(2)]
        clusters = [ClusterRule(2, -2, "base"), ClusterRule(3, +2, "tip")]
        k = None
    elif n == 4:
        # bonding factor with pair and triple sums in the numerator; the
        # four-box cluster contributes a double pole, the five-box a double zero
        singles = [SingleRule((i,), +1) for i in range(4)]
        singles += [SingleRule(s, -1) for s in combinations(range(4), 2)]
        singles += [SingleRule(s, -1) for s in combinations(range(4), 3)]
        clusters = [ClusterRule(4, +2, "tip"), ClusterRule(5, -2, "tip")]
        k = None
    else:
        # odd n = 2K+1: simple pole toward each axis, simple zero toward
        # every even-size axis subset, and a simple pole per 2m-box cluster
        k = (n - 1) // 2
        singles = [SingleRule((i,), +1) for i in range(n)]
        for m in range(1, k + 1):
            singles += [SingleRule(s, -1) for s in combinations(range(n), 2 * m)]
        clusters = [ClusterRule(2 * m, +1, "tip") for m in range(2, k + 1)]
    recipe = Recipe(n, k, singles, clusters)
    _RECIPES[n] = recipe
    return recipe


def _box_set(source, recipe: Optional[Recipe] = None):
    if isinstance(source, Crystal):
        boxes, n = source.boxes, source.n
    else:
        boxes = frozenset(tuple(b) for b in source)
        n = len(next(iter(boxes))) if boxes else None
    if recipe is not None and n is not None and n != recipe.n:
        raise ValueError(f"box dimension {n} does not match recipe n={recipe.n}")
    return boxes


def cluster_charge(cl: Cluster, rule: ClusterRule) -> tuple:
    if rule.anchor == "base":
        return normalize(cl.base)
    return add_dirs(normalize(cl.base), cl.dirs)


def clusters_in(source, p: int, n: Optional[int] = None) -> Iterator[Cluster]:
    """All p-box clusters inside the box set, lexicographic in (base, dirs)."""
    if p < 2:
        raise ValueError("a cluster has at least two boxes")
    boxes = _box_set(source)
    if not boxes:
        return
    dim = n if n is not None else len(next(iter(boxes)))
    if p - 1 > dim:
        return
    for base in sorted(boxes):
        for dirs in combinations(range(dim), p - 1):
            if all(_step(base, i) in boxes for i in dirs):
                yield Cluster(base, dirs)


def potential(source, recipe: Recipe, *, prefactor: bool = True) -> Spectrum:
    """Full pole/zero spectrum of the charge function of a box set.

    Accumulates the 1/u prefactor, every single-box rule and every cluster
    rule as integer order deltas keyed on canonical charges; exact
    cancellation drops entries whose total is zero.
    """
    boxes = _box_set(source, recipe)
    acc: Spectrum = defaultdict(int)
    if prefactor:
        acc[zero_charge(recipe.n)] += 1
    for b in boxes:
        cb = normalize(b)
        for dirs, delta in recipe.single_rules:
            acc[add_dirs(cb, dirs)] += delta
    for rule in recipe.cluster_rules:
        for cl in clusters_in(boxes, rule.size, recipe.n):
            acc[cluster_charge(cl, rule)] += rule.delta
    return {c: o for c, o in acc.items() if o != 0}


def omega_at(source, charge: Sequence[int], recipe: Recipe, *,
             prefactor: bool = True) -> int:
    """Pole order of the charge function at one charge.

    Equals ``potential(source, recipe).get(charge, 0)`` but inverts the
    bookkeeping: for each box the offset to the target charge is normalized
    once and matched against the rule table, so the cost is linear in the
    box count instead of in the rule count.
    """
    boxes = _box_set(source, recipe)
    n = recipe.n
    c = normalize(tuple(charge))
    if len(c) != n:
        raise ValueError(f"charge dimension {len(c)} does not match recipe n={n}")
    total = 1 if prefactor and not any(c) else 0
    patterns = recipe._single_by_pattern
    tip_by_len = recipe._tip_delta_by_len
    for b in boxes:
        offset = normalize(tuple(ci - bi for ci, bi in zip(c, b)))
        if any(x > 1 for x in offset):
            continue
        total += patterns.get(offset, 0)
        weight = sum(offset)
        if weight == 0:
            # contributions that land back on the box's own charge: clusters
            # anchored at their base, or tip clusters spanning every axis
            for rule in recipe.cluster_rules:
                span = rule.size - 1
                if rule.anchor == "base":
                    for dirs in combinations(range(n), span):
                        if all(_step(b, i) in boxes for i in dirs):
                            total += rule.delta
                elif span == n:
                    if all(_step(b, i) in boxes for i in range(n)):
                        total += rule.delta
        else:
            delta_rule = tip_by_len.get(weight)
            if delta_rule is not None:
                dirs = tuple(i for i, x in enumerate(offset) if x)
                if all(_step(b, i) in boxes for i in dirs):
                    total += delta_rule
    return total


def omega_cluster_between(s1, s2, charge: Sequence[int], recipe: Recipe) -> int:
    """Total cluster order at ``charge`` from clusters crossing two disjoint sets.

    This is the correction term in the additivity identity: the potential of
    a disjoint union equals the sum of the parts plus the contribution of
    clusters with boxes in both parts.
    """
    b1 = _box_set(s1, recipe)
    b2 = _box_set(s2, recipe)
    if b1 & b2:
        raise ValueError("cluster correction requires disjoint box sets")
    union = b1 | b2
    n = recipe.n
    c = normalize(tuple(charge))
    total = 0
    for b in union:
        offset = normalize(tuple(ci - bi for ci, bi in zip(c, b)))
        if any(x > 1 for x in offset):
            continue
        weight = sum(offset)
        for rule in recipe.cluster_rules:
            span = rule.size - 1
            if rule.anchor == "tip":
                if weight and weight == span and span < n:
                    dir_sets = (tuple(i for i, x in enumerate(offset) if x),)
                elif weight == 0 and span == n:
                    dir_sets = (tuple(range(n)),)
                else:
                    continue
            else:
                if weight:
                    continue
                dir_sets = combinations(range(n), span)
            for dirs in dir_sets:
                members = [b] + [_step(b, i) for i in dirs]
                if not all(m in union for m in members):
                    continue
                if any(m in b1 for m in members) and any(m in b2 for m in members):
                    total += rule.delta
    return total


def factor_multiset_oracle(source, recipe: Recipe) -> Spectrum:
    """Spectrum built by walking the literal product form of the charge function.

    Independent code path from :func:`potential`: it records the exponent of
    each linear factor as it appears in the numerator or denominator of the
    product (prefactor, per-box bonding factors, per-cluster corrections) and
    only at the end flips exponents into pole orders.  The 3- and
    4-dimensional bonding factors are written with their reflected numerator
    factors (one backward step per axis), which exercises the quotient
    arithmetic along a different route than the subset sums.
    """
    boxes = _box_set(source, recipe)
    n = recipe.n
    exponents: Dict[tuple, int] = defaultdict(int)
    exponents[zero_charge(n)] -= 1  # the 1/u prefactor

    def backward(lp, axis):
        return normalize(lp[:axis] + (lp[axis] - 1,) + lp[axis + 1:])

    if n == 2:
        for b in boxes:
            cb = normalize(b)
            exponents[add_dirs(cb, (0,))] -= 1
            exponents[add_dirs(cb, (1,))] -= 1
        for cl in clusters_in(boxes, 2, n):
            exponents[normalize(cl.base)] += 2
        for cl in clusters_in(boxes, 3, n):
            exponents[add_dirs(normalize(cl.base), cl.dirs)] -= 2
    elif n == 3:
        for b in boxes:
            cb = normalize(b)
            for i in range(3):
                exponents[backward(cb, i)] += 1
                exponents[add_dirs(cb, (i,))] -= 1
    elif n == 4:
        for b in boxes:
            cb = normalize(b)
            for i in range(4):
                exponents[backward(cb, i)] += 1
                exponents[add_dirs(cb, (i,))] -= 1
            for pair in combinations(range(4), 2):
                exponents[add_dirs(cb, pair)] += 1
        for cl in clusters_in(boxes, 4, n):
            exponents[add_dirs(normalize(cl.base), cl.dirs)] -= 2
        for cl in clusters_in(boxes, 5, n):
            exponents[add_dirs(normalize(cl.base), cl.dirs)] += 2
    else:
        k = recipe.k
        for b in boxes:
            cb = normalize(b)
            for i in range(n):
                exponents[add_dirs(cb, (i,))] -= 1
            for m in range(1, k + 1):
                for sub in combinations(range(n), 2 * m):
                    exponents[add_dirs(cb, sub)] += 1
        for m in range(2, k + 1):
            for cl in clusters_in(boxes, 2 * m, n):
                exponents[add_dirs(normalize(cl.base), cl.dirs)] -= 1
    return {c: -e for c, e in exponents.items() if e != 0}


# ---------------------------------------------------------------------------
# Numeric confirmation: concrete integer weights and a two-point probe.

class WeightCollisionError(RuntimeError):
    """Two distinct charges evaluated to the same number under these weights."""


class WeightSystem:
    """Concrete integer axis weights summing to zero.

    Geometric weights in a large base keep small-coefficient combinations
    distinct; :meth:`check_distinct` certifies that on the finite charge set
    actually in play, and :meth:`generate` perturbs the base until it holds.
    """

    __slots__ = ("h",)

    def __init__(self, h: Sequence[int]):
        hv = tuple(int(x) for x in h)
        if sum(hv) != 0:
            raise ValueError("weights must sum to zero")
        self.h = hv

    @property
    def n(self) -> int:
        return len(self.h)

    def value(self, charge: Sequence[int]) -> int:
        return sum(l * w for l, w in zip(charge, self.h))

    def check_distinct(self, charges: Iterable[Sequence[int]]) -> None:
        seen = {}
        for c in charges:
            c = tuple(c)
            v = self.value(c)
            if v in seen and seen[v] != c:
                raise WeightCollisionError(
                    f"charges {list(seen[v])} and {list(c)} both evaluate to {v}")
            seen[v] = c

    @classmethod
    def generate(cls, n: int, charges: Iterable[Sequence[int]] = (),
                 base: int = 10 ** 6, max_attempts: int = 16) -> "WeightSystem":
        charge_list = [tuple(c) for c in charges]
        for attempt in range(max_attempts):
            b = base + 997 * attempt
            head = tuple(b ** (i + 1) for i in range(n - 1))
            ws = cls(head + (-sum(head),))
            try:
                ws.check_distinct(charge_list)
                return ws
            except WeightCollisionError:
                continue
        raise WeightCollisionError(
            f"no collision-free weight system found in {max_attempts} attempts")


def _log2_int(x: int) -> float:
    bits = x.bit_length()
    if bits <= 512:
        return math.log2(x)
    shift = bits - 64
    return math.log2(x >> shift) + shift


def _log2_abs_product(terms, k: int) -> float:
    # terms: (value offset dv, exponent e); the factor at u = v0 + 2^-k is
    # (dv + 2^-k) = ((dv << k) + 1) / 2^k, an exact integer over a power of two
    total = 0.0
    for dv, e in terms:
        numer = (dv << k) + 1
        if numer == 0:
            raise ArithmeticError("probe point hit a root exactly")
        total += e * (_log2_int(abs(numer)) - k)
    return total


def residue_probe(source, recipe: Recipe, weights: WeightSystem,
                  charge: Sequence[int], *, delta_exp: int = 20,
                  max_attempts: int = 6) -> int:
    """Pole order at ``charge`` read off the charge function numerically.

    Builds the product form of the function, evaluates its magnitude at two
    exact rational offsets delta and delta/2 from the charge's weight value,
    and rounds the base-2 growth rate to the nearest integer.  Each linear
    factor is evaluated exactly (an integer over a power of two); only the
    final magnitude comparison is floating point, with error far below the
    rounding threshold.  Halves delta further if the estimate has not
    separated cleanly from the neighboring factors.
    """
    spectrum = factor_multiset_oracle(source, recipe)
    target = normalize(tuple(charge))
    weights.check_distinct(list(spectrum) + [target])
    v0 = weights.value(target)
    terms = [(v0 - weights.value(c), -order) for c, order in spectrum.items()]
    k = delta_exp
    for _ in range(max_attempts):
        try:
            low = _log2_abs_product(terms, k)
            high = _log2_abs_product(terms, k + 1)
        except ArithmeticError:
            k += 7
            continue
        estimate = high - low
        order = round(estimate)
        if abs(estimate - order) <= 0.25:
            return int(order)
        k += 7
    raise ArithmeticError(f"pole order did not stabilize at charge {list(target)}")


# ---------------------------------------------------------------------------
# Serialization: stable, diff-friendly spectrum dumps.

def spectrum_items(spectrum: Spectrum):
    return sorted(spectrum.items())


def spectrum_to_json(spectrum: Spectrum) -> list:
    return [{"charge": list(c), "order": o} for c, o in spectrum_items(spectrum)]
