import math
import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brute import brute_clusters
from crystal_charge import (Crystal, UnsupportedDimensionError, WeightSystem,
                            charge_of_box, clusters_in,
                            factor_multiset_oracle, grow_random, hypercube,
                            normalize, omega_at, omega_cluster_between,
                            potential, recipe_for, residue_probe,
                            spectrum_to_json, targets)
from crystal_charge.charge_engine import WeightCollisionError
from crystal_charge.lattice import zero_charge


def grown(n, size, seed):
    return grow_random(Crystal.empty(n), size, seed)


# ---------------------------------------------------------------------------
# recipes

def test_recipe_n3():
    r = recipe_for(3)
    assert r.k == 1
    assert sorted(delta for _, delta in r.single_rules) == [-1, -1, -1, 1, 1, 1]
    assert [len(dirs) for dirs, d in r.single_rules if d == -1] == [2, 2, 2]
    assert r.cluster_rules == ()


def test_recipe_n5():
    r = recipe_for(5)
    assert r.k == 2
    poles = [dirs for dirs, d in r.single_rules if d == +1]
    zeros = [dirs for dirs, d in r.single_rules if d == -1]
    assert len(poles) == 5 and all(len(s) == 1 for s in poles)
    assert len(zeros) == math.comb(5, 2) + math.comb(5, 4) == 15
    assert [(c.size, c.delta) for c in r.cluster_rules] == [(4, +1)]


def test_recipe_n7():
    r = recipe_for(7)
    zeros = [dirs for dirs, d in r.single_rules if d == -1]
    # every even-size axis subset: C(7,2) + C(7,4) + C(7,6)
    assert len(zeros) == 21 + 35 + 7 == 63
    assert [(c.size, c.delta) for c in r.cluster_rules] == [(4, +1), (6, +1)]


def test_recipe_n2_n4():
    r2 = recipe_for(2)
    assert [(tuple(s), d) for s, d in r2.single_rules] == [((0,), 1), ((1,), 1)]
    assert sorted((c.size, c.delta) for c in r2.cluster_rules) == [(2, -2), (3, 2)]
    r4 = recipe_for(4)
    assert sum(1 for _, d in r4.single_rules if d == +1) == 4
    assert sum(1 for _, d in r4.single_rules if d == -1) == math.comb(4, 2) + math.comb(4, 3)
    assert sorted((c.size, c.delta) for c in r4.cluster_rules) == [(4, 2), (5, -2)]


def test_recipe_unsupported_dimensions():
    for n in (0, 1, 6, 8, 10):
        with pytest.raises(UnsupportedDimensionError):
            recipe_for(n)
    recipe_for(9)  # odd dimensions stay open-ended


# ---------------------------------------------------------------------------
# cluster enumeration

def test_clusters_in_examples():
    square = hypercube((0,) * 5, (0, 1))
    assert list(clusters_in(square, 4)) == []
    cube3 = hypercube((0,) * 5, (0, 1, 2))
    found = list(clusters_in(cube3, 4))
    assert len(found) == 1
    assert found[0].base == (0,) * 5 and found[0].dirs == (0, 1, 2)


def test_clusters_in_full_5_cube_against_scan():
    cube5 = hypercube((0,) * 5, range(5))
    got = {(c.base, c.dirs) for c in clusters_in(cube5, 4)}
    assert len(got) == 40  # sum over bases of C(#zero coords, 3)
    assert got == brute_clusters(cube5, 4)


def test_clusters_in_random_crystal_against_scan():
    delta = grown(5, 25, seed=3)
    for p in (2, 3, 4):
        got = {(c.base, c.dirs) for c in clusters_in(delta.boxes, p)}
        assert got == brute_clusters(delta.boxes, p)


def test_clusters_in_is_sorted():
    delta = grown(5, 30, seed=4)
    found = [(c.base, c.dirs) for c in clusters_in(delta.boxes, 4)]
    assert found == sorted(found)


# ---------------------------------------------------------------------------
# potential and its single-charge evaluator

def test_potential_empty_is_pure_prefactor():
    r = recipe_for(5)
    assert potential((), r) == {zero_charge(5): 1}
    assert potential((), r, prefactor=False) == {}


def test_potential_single_box_n5():
    r = recipe_for(5)
    spectrum = potential(Crystal([(0,) * 5], 5), r)
    poles = {c for c, o in spectrum.items() if o == 1}
    zeros = {c for c, o in spectrum.items() if o == -1}
    assert poles == {zero_charge(5)} | {
        tuple(1 if j == i else 0 for j in range(5)) for i in range(5)}
    expected_zeros = set()
    for m in (2, 4):
        for sub in combinations(range(5), m):
            expected_zeros.add(tuple(1 if j in sub else 0 for j in range(5)))
    assert zeros == expected_zeros
    assert set(spectrum.values()) <= {1, -1}


def test_potential_hypercube_corner_is_simple_pole():
    r = recipe_for(5)
    for d in range(1, 6):
        cube = hypercube((0,) * 5, range(d))
        corner = tuple(1 if i < d else 0 for i in range(5))
        assert potential(cube, r).get(charge_of_box(corner), 0) == 1


def test_omega_at_examples():
    r = recipe_for(5)
    assert omega_at((), zero_charge(5), r) == 1
    assert omega_at(Crystal([(0,) * 5], 5), (1, 0, 0, 0, 0), r) == 1
    clipped = hypercube((0,) * 5, range(5)) - {(1, 1, 1, 1, 1)}
    assert omega_at(clipped, zero_charge(5), r) == 1


@given(st.sampled_from([2, 3, 4, 5]), st.integers(0, 30), st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_omega_at_matches_potential(n, size, seed):
    r = recipe_for(n)
    delta = grown(n, size, seed)
    spectrum = potential(delta, r)
    for c in sorted(spectrum)[:25]:
        assert omega_at(delta, c, r) == spectrum[c]
    rng = random.Random(seed)
    for _ in range(5):
        c = tuple(rng.randint(0, 4) for _ in range(n))
        assert omega_at(delta, c, r) == spectrum.get(normalize(c), 0)


# ---------------------------------------------------------------------------
# oracle equivalence, translation invariance, additivity

@given(st.sampled_from([2, 3, 4, 5, 7]), st.integers(0, 35), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_factor_oracle_equals_potential(n, size, seed):
    if n == 7:
        size = min(size, 20)
    r = recipe_for(n)
    delta = grown(n, size, seed)
    assert factor_multiset_oracle(delta, r) == potential(delta, r)


def test_factor_oracle_single_box_n3():
    r = recipe_for(3)
    spectrum = factor_multiset_oracle(Crystal([(0, 0, 0)], 3), r)
    assert spectrum == {
        (0, 0, 0): 1, (1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 1,
        (0, 1, 1): -1, (1, 0, 1): -1, (1, 1, 0): -1}


def test_translation_invariance():
    r = recipe_for(5)
    rng = random.Random(9)
    for trial in range(20):
        boxes = {tuple(rng.randint(0, 3) for _ in range(5))
                 for _ in range(rng.randint(0, 12))}
        box = tuple(rng.randint(0, 4) for _ in range(5))
        shift = tuple(rng.randint(0, 3) for _ in range(5))
        moved = {tuple(b + s for b, s in zip(x, shift)) for x in boxes}
        assert omega_at(moved, charge_of_box(tuple(b + s for b, s in zip(box, shift))),
                        r, prefactor=False) == \
            omega_at(boxes, charge_of_box(box), r, prefactor=False)


def test_cluster_correction_trivial_cases():
    r = recipe_for(5)
    delta = grown(5, 20, seed=2)
    assert omega_cluster_between(delta.boxes, (), zero_charge(5), r) == 0
    # two far-apart single boxes cannot span a cluster
    far = {(0,) * 5}, {(9, 9, 9, 9, 9)}
    assert omega_cluster_between(far[0], far[1], (1, 1, 1, 0, 0), r) == 0
    with pytest.raises(ValueError):
        omega_cluster_between(delta.boxes, delta.boxes, zero_charge(5), r)


@given(st.sampled_from([4, 5, 7]), st.integers(2, 30), st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_additivity_with_cluster_correction(n, size, seed):
    if n == 7:
        size = min(size, 18)
    r = recipe_for(n)
    delta = grown(n, size, seed)
    rng = random.Random(seed)
    boxes = sorted(delta.boxes)
    part1 = frozenset(b for b in boxes if rng.random() < 0.5)
    part2 = delta.boxes - part1
    union_spec = potential(delta.boxes, r, prefactor=False)
    charges = sorted(union_spec)[:12] + [zero_charge(n)]
    s1 = potential(part1, r, prefactor=False)
    s2 = potential(part2, r, prefactor=False)
    for c in charges:
        assert union_spec.get(c, 0) == (
            s1.get(c, 0) + s2.get(c, 0) + omega_cluster_between(part1, part2, c, r))


# ---------------------------------------------------------------------------
# regressions: the established low-dimensional pole structures

@pytest.mark.parametrize("n,size,seeds", [(2, 40, 6), (3, 60, 6), (4, 40, 4)])
def test_low_dimensional_pole_target_equality(n, size, seeds):
    r = recipe_for(n)
    for seed in range(seeds):
        delta = grown(n, size, seed)
        spectrum = potential(delta, r)
        poles = {c for c, o in spectrum.items() if o > 0}
        assert all(spectrum[c] == 1 for c in poles)
        assert poles == targets(delta)


# ---------------------------------------------------------------------------
# weights and the numeric probe

def test_weight_system_basics():
    w = WeightSystem.generate(5)
    assert sum(w.h) == 0 and w.n == 5
    assert w.value((1, 0, 0, 0, 0)) == w.h[0]
    with pytest.raises(ValueError):
        WeightSystem((1, 2, 3))


def test_weight_collision_detection():
    w = WeightSystem((1, 2, -3))
    with pytest.raises(WeightCollisionError):
        # both evaluate to 3 under these degenerate weights
        w.check_distinct([(3, 0, 0), (0, 3, 1)])


def test_residue_probe_examples():
    r = recipe_for(5)
    w = WeightSystem.generate(5, [zero_charge(5)])
    assert residue_probe((), r, w, zero_charge(5)) == 1
    org = Crystal([(0,) * 5], 5)
    spectrum = potential(org, r)
    w = WeightSystem.generate(5, spectrum.keys())
    assert residue_probe(org, r, w, (1, 0, 0, 0, 0)) == 1
    three = Crystal(hypercube((0,) * 5, (0, 1)) - {(1, 1, 0, 0, 0)}, 5)
    spectrum3 = potential(three, r)
    w3 = WeightSystem.generate(5, spectrum3.keys())
    assert residue_probe(three, r, w3, (1, 1, 0, 0, 0)) == 1


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_residue_probe_agrees_on_support(n):
    r = recipe_for(n)
    delta = grown(n, 12, seed=100 + n)
    spectrum = potential(delta, r)
    w = WeightSystem.generate(n, spectrum.keys())
    for c, order in spectrum.items():
        assert residue_probe(delta, r, w, c) == order


def test_spectrum_serialization_is_sorted():
    r = recipe_for(3)
    spectrum = potential(grown(3, 9, seed=8), r)
    dumped = spectrum_to_json(spectrum)
    assert dumped == sorted(dumped, key=lambda row: row["charge"])
    assert all(row["order"] != 0 for row in dumped)
