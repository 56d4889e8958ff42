import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import topologies
from timdof.graphs import build_bundle, set_conflict_graph
from timdof.scheme import (
    Infeasible, SchemeTopologyMismatch, build_four_ninths_scheme, build_half_scheme, color_set_conflict_graph,
    slot_contents, validate_scheme_structure,
)
from timdof.topology import NetworkTopology


def test_square8_two_coloring(square8):
    colors = color_set_conflict_graph(build_bundle(square8), 2)
    assert colors == {(1, 2): 1, (3, 4): 2, (5, 6): 1, (7, 8): 2}


def test_paper7_coloring(paper7):
    b = build_bundle(paper7)
    colors = color_set_conflict_graph(b, 3)
    assert len({colors[s] for s in b.reduced_sets()}) == 3
    assert isinstance(color_set_conflict_graph(b, 2), Infeasible)


def test_half_scheme(square8, hexnet6, iconflict3):
    s = build_half_scheme(build_bundle(square8))
    assert s.nominal_dof == Fraction(1, 2) and not s.common_active
    assert not build_half_scheme(build_bundle(hexnet6))
    r = build_half_scheme(build_bundle(iconflict3))
    assert isinstance(r, Infeasible) and "internal" in r.reason


def test_four_ninths_scheme(paper7, hexnet6, iconflict3):
    for t in (paper7, hexnet6):
        s = build_four_ninths_scheme(build_bundle(t))
        assert s.nominal_dof == Fraction(4, 9) and s.slots == 3 and s.common_active
        assert s.powers == {"private": 0.5, "common": 0.5}
    assert isinstance(build_four_ninths_scheme(build_bundle(iconflict3)), Infeasible)


def test_crowded_receiver_rejected():
    # receiver 4 hears three interferers, all aligned, so only the MAC size rule blocks it
    t = NetworkTopology.from_interferers(4, {4: [1, 2, 3]})
    r = build_four_ninths_scheme(build_bundle(t))
    assert isinstance(r, Infeasible) and "three" in r.reason


def test_validate_paper7(paper7):
    s = build_four_ninths_scheme(build_bundle(paper7))
    v = validate_scheme_structure(s, paper7)
    assert v.ok and not v.failures()
    free = v.receivers[1].free_slot
    assert free not in (s.colors[(1, 2)], s.colors[(3, 5, 6)])
    assert sorted(slot_contents(s, 1, free)) == [(1, "common"), (3, "common"), (5, "common")]


def test_validate_square8(square8, paper7):
    s = build_half_scheme(build_bundle(square8))
    v = validate_scheme_structure(s, square8)
    assert v.ok
    assert all(r.private_slots_ok and r.private_clean and r.free_slot_ok is None for r in v.receivers.values())
    with pytest.raises(SchemeTopologyMismatch):
        validate_scheme_structure(build_four_ninths_scheme(build_bundle(paper7)), square8)


def test_singleton_sets_are_colored():
    # a singleton victim must not share a slot with the transmitter it hears
    t = NetworkTopology.from_interferers(2, {1: [2]})
    s = build_half_scheme(build_bundle(t))
    assert s.private_slot(1) != s.private_slot(2)
    assert validate_scheme_structure(s, t).ok


def random_proper_coloring(edges, vertices, rng):
    colors = {}
    order = list(vertices)
    rng.shuffle(order)
    for v in order:
        used = {colors.get(u) for a, b in edges for u in (a, b) if v in (a, b) and u != v}
        c = 0
        while c in used or rng.random() < 0.3:
            c += 1
        colors[v] = c
    return colors


@settings(max_examples=300, deadline=None)
@given(topologies(), st.integers(0, 2 ** 32))
def test_heard_sets_span_two_colors(t, seed):
    b = build_bundle(t)
    if b.internal_conflicts:
        return
    edges = set_conflict_graph(b)
    colors = random_proper_coloring(edges, range(len(b.sets)), random.Random(seed))
    for k in t.users:
        assert len({colors[b.set_index(l)] for l in t.heard[k]}) <= 2


@settings(max_examples=300, deadline=None)
@given(topologies())
def test_constructors_validate(t):
    b = build_bundle(t)
    half = build_half_scheme(b)
    if half:
        v = validate_scheme_structure(half, t)
        assert all(r.private_clean for r in v.receivers.values())
    four = build_four_ninths_scheme(b)
    if four:
        assert validate_scheme_structure(four, t).ok
    if b.internal_conflicts:
        assert not half and not four


def test_scheme_json(paper7):
    d = build_four_ninths_scheme(build_bundle(paper7)).to_json()
    assert d["slots"] == 3 and d["nominal_dof"] == {"num": 4, "den": 9}
