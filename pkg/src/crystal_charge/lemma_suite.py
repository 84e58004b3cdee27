"""Executable structural properties of the pole-order calculus.

Each check turns one step of the simple-pole argument into a predicate on a
concrete instance and reports the observed versus expected values:

1. removing a dominating slice (bisect) of a partition leaves a partition;
2. at a surface point, the potential only sees the local hypercube chunk,
   not the rest of the dominating slice;
3. clusters crossing from that chunk into the remainder contribute nothing
   at the surface point;
4. the remainder alone contributes nothing at a surface point that touches
   a coordinate hyperplane;
5. for a sub-partition of a hypercube, the potential at the cube's corner
   target is exactly 1 when the target's charge is reachable on the
   partition's frontier and at most 0 otherwise.

The headline check, :func:`check_conjecture`, asserts the full pole-target
correspondence: every pole of the charge function is simple and the simple
poles are exactly the projected addable/removable positions.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .charge_engine import (Recipe, factor_multiset_oracle, omega_at,
                            omega_cluster_between, potential, recipe_for)
from .crystal import (Crystal, bisect, hypercube, is_crystal, grow_random,
                      surface_membership, targets)
from .hypercube_lab import CubeIdeal
from .lattice import charge_of_box, zero_charge


@dataclass
class LemmaReport:
    """Outcome of one property check with enough data to replay it."""

    lemma: str
    passed: bool
    instance: dict = field(default_factory=dict)
    observed: object = None
    expected: object = None

    def to_json(self) -> str:
        return json.dumps({
            "lemma": self.lemma,
            "passed": self.passed,
            "instance": self.instance,
            "observed": self.observed,
            "expected": self.expected,
        }, sort_keys=True)


def _crystal_info(delta: Crystal, failed: bool = False) -> dict:
    info = {"n": delta.n, "boxes": len(delta), "digest": delta.digest()}
    if failed:
        info["box_list"] = sorted(list(b) for b in delta.boxes)
    return info


def in_G(delta: Crystal, box: Sequence[int]) -> bool:
    """True iff some addable/removable box projects to the charge of ``box``."""
    return charge_of_box(box) in targets(delta)


def hypercube_G_shortcut(ideal: CubeIdeal, d: int, n: int) -> bool:
    """Frontier membership of the cube's corner target, by case list.

    For a cube spanning every ambient axis the admissible ideals are the
    empty ideal, the single origin cell, the full cube and the full cube
    minus its top corner; for a lower-dimensional cube only the last two
    qualify.  Agreement with :func:`in_G` on the embedded crystal is a
    tested claim, not assumed.
    """
    if ideal.d != d:
        raise ValueError(f"ideal dimension {ideal.d} does not match d={d}")
    full = (1 << (1 << d)) - 1
    top = 1 << ((1 << d) - 1)
    if d == n:
        return ideal.bits in (0, 1, full & ~top, full)
    return ideal.bits in (full & ~top, full)


def check_conjecture(delta: Crystal, recipe: Optional[Recipe] = None) -> LemmaReport:
    """Simple poles only, and the simple-pole set equals the projected frontier."""
    recipe = recipe or recipe_for(delta.n)
    spectrum = potential(delta, recipe)
    poles = {c for c, o in spectrum.items() if o > 0}
    multi = {c: o for c, o in spectrum.items() if o > 1}
    frontier = targets(delta)
    passed = not multi and poles == frontier
    observed = {"poles": len(poles), "multi_poles": len(multi),
                "targets": len(frontier)}
    if not passed:
        observed["order>1"] = sorted([list(c), o] for c, o in multi.items())
        observed["extra_poles"] = sorted(list(c) for c in poles - frontier)
        observed["missing_poles"] = sorted(list(c) for c in frontier - poles)
    return LemmaReport(
        lemma="conjecture", passed=passed,
        instance=_crystal_info(delta, failed=not passed),
        observed=observed,
        expected={"simple_poles_equal_targets": True})


def check_lemma1(delta: Crystal, box: Sequence[int]) -> LemmaReport:
    """Removing the boxes dominating ``box`` leaves a valid partition."""
    remainder = delta.boxes - bisect(delta, box)
    ok = is_crystal(remainder, delta.n)
    info = _crystal_info(delta, failed=not ok)
    info["box"] = list(box)
    return LemmaReport(lemma="lemma1", passed=ok, instance=info,
                       observed=ok, expected=True)


def _surface_pieces(delta: Crystal, box: Sequence[int]):
    sm = surface_membership(delta, box)
    if sm is None:
        raise ValueError(f"box {list(box)} is not a surface point of the crystal")
    d, dirs = sm
    b = tuple(box)
    sliced = bisect(delta, tuple(x - 1 for x in b))
    corner = list(b)
    for i in dirs:
        corner[i] -= 1
    chunk = hypercube(tuple(corner), dirs) & delta.boxes
    remainder = delta.boxes - sliced
    return d, dirs, sliced, chunk, remainder


def check_lemma2(delta: Crystal, box: Sequence[int],
                 recipe: Optional[Recipe] = None) -> LemmaReport:
    """The potential at a surface point survives swapping the dominating
    slice for its local hypercube chunk."""
    recipe = recipe or recipe_for(delta.n)
    d, dirs, _, chunk, remainder = _surface_pieces(delta, box)
    c = charge_of_box(box)
    left = omega_at(delta, c, recipe)
    right = omega_at(remainder | chunk, c, recipe)
    info = _crystal_info(delta, failed=left != right)
    info.update({"box": list(box), "d": d, "dirs": list(dirs)})
    return LemmaReport(lemma="lemma2", passed=left == right, instance=info,
                       observed={"original": left, "processed": right},
                       expected="equal")


def check_lemma3(delta: Crystal, box: Sequence[int],
                 recipe: Optional[Recipe] = None) -> LemmaReport:
    """Clusters crossing between the hypercube chunk and the remainder
    contribute nothing at the surface point."""
    recipe = recipe or recipe_for(delta.n)
    d, dirs, _, chunk, remainder = _surface_pieces(delta, box)
    value = omega_cluster_between(chunk, remainder, charge_of_box(box), recipe)
    info = _crystal_info(delta, failed=value != 0)
    info.update({"box": list(box), "d": d, "dirs": list(dirs)})
    return LemmaReport(lemma="lemma3", passed=value == 0, instance=info,
                       observed=value, expected=0)


def check_lemma4(delta: Crystal, box: Sequence[int],
                 recipe: Optional[Recipe] = None) -> LemmaReport:
    """With the dominating slice removed, the potential vanishes at a
    surface point touching a coordinate hyperplane (d < n)."""
    recipe = recipe or recipe_for(delta.n)
    d, dirs, _, _, remainder = _surface_pieces(delta, box)
    if d >= delta.n:
        raise ValueError("this check needs a surface point with d < n")
    value = omega_at(remainder, charge_of_box(box), recipe)
    info = _crystal_info(delta, failed=value != 0)
    info.update({"box": list(box), "d": d, "dirs": list(dirs)})
    return LemmaReport(lemma="lemma4", passed=value == 0, instance=info,
                       observed=value, expected=0)


def check_lemma5(ideal: CubeIdeal, d: int, n: int,
                 recipe: Optional[Recipe] = None) -> LemmaReport:
    """Potential bound at the cube's corner target.

    Exactly 1 when the target charge is reachable on the embedded crystal's
    frontier, at most 0 otherwise.
    """
    recipe = recipe or recipe_for(n)
    crystal = ideal.to_crystal(n)
    target = charge_of_box(ideal.target_box(n))
    order = omega_at(crystal, target, recipe)
    member = target in targets(crystal)
    passed = (order == 1) if member else (order <= 0)
    return LemmaReport(
        lemma="lemma5", passed=passed,
        instance={"d": d, "n": n, "bits": hex(ideal.bits), "boxes": ideal.count},
        observed={"order": order, "in_g": member},
        expected="order == 1 iff in_g else order <= 0")


def analytic_hc_identity(d: int, n: int) -> bool:
    """Hypercube potential identities, binomial and computed.

    The alternating binomial sum over step distances is 1 for a cube that
    misses at least one ambient axis and 0 when the cube spans all of them
    (the sum then stops one short of the top corner, whose slot the 1/u
    prefactor fills).  Both are checked against the direct potential of the
    cube and of its corner-deleted variant.
    """
    binom = sum(math.comb(d, m) * (-1) ** (m + 1) for m in range(1, d + 1))
    if d < n:
        if binom != 1:
            return False
    else:
        truncated = sum(math.comb(d, m) * (-1) ** (m + 1) for m in range(1, n))
        if truncated != 0:
            return False
    recipe = recipe_for(n)
    e_vec = (1,) * n
    if potential({(0,) * n}, recipe).get(zero_charge(n), 0) != 1:
        return False
    if potential((), recipe).get(zero_charge(n), 0) != 1:
        return False
    dirs = tuple(range(d))
    cube = hypercube((0,) * n, dirs)
    corner = tuple(1 if i < d else 0 for i in range(n))
    target = charge_of_box(corner)
    full = potential(cube, recipe).get(target, 0)
    clipped = potential(cube - {corner}, recipe).get(target, 0)
    return full == 1 and clipped == 1


# ---------------------------------------------------------------------------
# Instance generation and suite runners.

def random_crystal(n: int, boxes: int, seed) -> Crystal:
    return grow_random(Crystal.empty(n), boxes, seed)


def sample_surface_point(delta: Crystal, rng: random.Random,
                         max_tries: int = 40):
    """Random surface point of the crystal, or None if none was found.

    Picks a zero pattern and coordinates within the crystal's extent plus
    one; for the all-axes pattern it steps diagonally up from an existing
    box so the depth condition holds.
    """
    n = delta.n
    if not len(delta):
        return None
    extent = [max(b[i] for b in delta.boxes) for i in range(n)]
    boxes_sorted = sorted(delta.boxes)
    for _ in range(max_tries):
        d = rng.randint(1, n)
        if d == n:
            base = rng.choice(boxes_sorted)
            cand = tuple(x + 1 for x in base)
            if cand not in delta.boxes:
                return cand
            continue
        dirs = rng.sample(range(n), d)
        cand = [0] * n
        for i in dirs:
            cand[i] = rng.randint(1, extent[i] + 1)
        cand = tuple(cand)
        if cand not in delta.boxes:
            return cand
    return None


_LEMMA_CHECKS = {1: check_lemma1, 2: check_lemma2, 3: check_lemma3, 4: check_lemma4}


def run_lemma_instances(which: int, n: int, instances: int, seed,
                        max_boxes: int = 30):
    """Run one surface-point lemma on randomly grown instances.

    Returns (instances actually run, list of failing reports).  Instances
    that cannot be formed (no surface point found, or the hyperplane
    condition of check 4 not met) are resampled.
    """
    if which not in _LEMMA_CHECKS:
        raise ValueError(f"no such lemma check: {which}")
    check = _LEMMA_CHECKS[which]
    recipe = recipe_for(n)
    rng = random.Random(f"lemma{which}/{n}/{seed}")
    failures = []
    ran = 0
    while ran < instances:
        delta = random_crystal(n, rng.randint(1, max_boxes), rng.random())
        if which == 1:
            box = tuple(rng.randint(-1, max(b[i] for b in delta.boxes) + 1)
                        for i in range(n)) if len(delta) else (0,) * n
            report = check_lemma1(delta, box)
        else:
            box = sample_surface_point(delta, rng)
            if box is None:
                continue
            if which == 4 and not any(x == 0 for x in box):
                continue
            report = check(delta, box, recipe)
        ran += 1
        if not report.passed:
            report.instance["seed"] = f"lemma{which}/{n}/{seed}"
            failures.append(report)
    return ran, failures


def run_conjecture_scan(n: int, boxes: int, count: int, seed,
                        cross_check_oracle: bool = False):
    """Conjecture reports for ``count`` randomly grown crystals."""
    recipe = recipe_for(n)
    reports = []
    for i in range(count):
        crystal_seed = f"conjecture/{n}/{seed}/{i}"
        delta = random_crystal(n, boxes, crystal_seed)
        report = check_conjecture(delta, recipe)
        report.instance.update({"seed": crystal_seed, "steps": boxes})
        if cross_check_oracle and report.passed:
            if potential(delta, recipe) != factor_multiset_oracle(delta, recipe):
                report.passed = False
                report.observed = "spectrum mismatch between rule table and factor walk"
        reports.append(report)
    return reports


def write_reports_jsonl(reports, fp) -> int:
    failures = 0
    for report in reports:
        fp.write(report.to_json())
        fp.write("\n")
        if not report.passed:
            failures += 1
    return failures
