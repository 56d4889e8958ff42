import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from timdof.cycles import best_completed_cycle
from timdof.graphs import build_bundle
from timdof.oracle import (
    AisInstance, InstanceTooLarge, NotADistribution, aligned_image_set, alignment_probability_bound,
    build_support, check_alignment_interval, check_submodularity, draw_alignment_coefficients, entropy_bits,
    entropy_gap_report, estimate_alignment_probability, eval_floor_form, expected_image_size_check,
    expected_size_bound, random_distribution,
)


def naive_image_set(inst, nu, g0, g1):
    """Plain-Python enumeration: first preimage in lexicographic order, then a direct comparison."""
    m, q = inst.m, inst.pbar + 1
    free = [i for i in range(m) if not inst.same[i]]
    psi = {}
    for word in product(range(q), repeat=m + len(free)):
        a = list(word[:m])
        b = [0] * m
        for pos, i in enumerate(free):
            b[i] = word[m + pos]
        z = tuple(
            math.floor(inst.h_exit[i] * (a[i] if inst.same[i] else b[i])) + math.floor(inst.h_entry[i] * a[(i + 1) % m])
            for i in range(m)
        )
        psi.setdefault(z, (a, b))

    def aligned(z):
        a, b = psi[z]
        return tuple(math.floor(g0[i] * a[i]) + math.floor(g1[i] * b[i]) for i in range(m))

    ref = aligned(tuple(nu))
    return {z for z in psi if aligned(z) == ref}


def test_eval_floor_form():
    assert eval_floor_form([1.5], [2]) == 3
    assert eval_floor_form([1.1, 1.9], [3, 2]) == 6
    assert eval_floor_form([1.3, 1.7, 1.1], [0, 0, 0]) == 0
    with pytest.raises(ValueError):
        eval_floor_form([1.0, 1.0], [1])


def test_instance_validation():
    with pytest.raises(ValueError):
        AisInstance(4, 2, (1.0,) * 4, (1.0,) * 4)
    with pytest.raises(ValueError):
        AisInstance(3, 2, (1.0, 1.0, 3.0), (1.0,) * 3)


def test_support_is_right_inverse():
    inst = AisInstance.random(3, 4, np.random.default_rng(0))
    sup = build_support(inst)
    from timdof.oracle import conflict_outputs
    np.testing.assert_array_equal(conflict_outputs(inst, sup.a, sup.b), sup.z)
    assert sup.a.min() >= 0 and sup.a.max() <= 4 and sup.b.max() <= 4
    assert sup.counts.sum() == inst.enumeration_size()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(1, 3), st.lists(st.booleans(), min_size=3, max_size=3))
def test_matches_naive_enumerator(seed, pbar, same):
    rng = np.random.default_rng(seed)
    inst = AisInstance.random(3, pbar, rng, same=same)
    sup = build_support(inst)
    g0, g1 = draw_alignment_coefficients(inst, rng)
    for idx in rng.choice(len(sup), size=min(5, len(sup)), replace=False):
        nu = tuple(int(v) for v in sup.z[idx])
        got = aligned_image_set(inst, nu, g0, g1, sup)
        assert got == naive_image_set(inst, nu, g0, g1)
        assert nu in got


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(1, 4))
def test_shrinking_alphabet(seed, drop):
    rng = np.random.default_rng(seed)
    big = AisInstance.random(3, 5, rng)
    small = AisInstance(3, 5 - drop, big.h_exit, big.h_entry, big.same, big.model)
    sup_s = build_support(small)
    # keep the same codeword for every output reachable from the smaller alphabet
    psi = {tuple(int(v) for v in z): tuple(int(v) for v in np.concatenate([a, b]))
           for z, a, b in zip(sup_s.z, sup_s.a, sup_s.b)}
    sup_b = build_support(big, psi)
    reachable = set(psi)
    g0, g1 = draw_alignment_coefficients(big, rng)
    for nu in list(reachable)[:8]:
        small_set = aligned_image_set(small, nu, g0, g1, sup_s)
        big_set = aligned_image_set(big, nu, g0, g1, sup_b) & reachable
        assert small_set <= big_set


def test_zero_alphabet():
    inst = AisInstance.random(3, 0, np.random.default_rng(0))
    r = expected_image_size_check(inst, (0, 0, 0), 50, 0)
    assert set(r.sizes) == {1} and r.bound >= 1 and r.ok


def test_psi_must_be_preimage():
    inst = AisInstance.random(3, 2, np.random.default_rng(1))
    sup = build_support(inst)
    z = tuple(int(v) for v in sup.z[-1])
    with pytest.raises(ValueError):
        build_support(inst, {z: (0,) * 6})


def test_too_large():
    with pytest.raises(InstanceTooLarge):
        build_support(AisInstance.random(5, 12, np.random.default_rng(0)))


@pytest.mark.parametrize("a, a_prime, limit", [(10, 0, 0.4), (12, 0, 1 / 3), (3, 7, 1.0)])
def test_interval_confinement(a, a_prime, limit):
    r = check_alignment_interval(a, a_prime)
    assert r.bound == pytest.approx(limit) and r.ok


def test_interval_vacuous_case():
    r = check_alignment_interval(1, 0)
    assert r.bound == 4 and r.ok and r.extent <= 1


def test_interval_partner_value():
    full = check_alignment_interval(10, 0)
    assert check_alignment_interval(10, 0, partner_difference=15).extent <= full.extent
    assert check_alignment_interval(10, 0, partner_difference=1000).extent == 0


def test_interval_requires_distinct():
    with pytest.raises(ValueError):
        check_alignment_interval(3, 3)


def test_probability_bound_trivial_when_close():
    inst = AisInstance.random(3, 6, np.random.default_rng(0))
    assert alignment_probability_bound(inst, (1, 2, 3), (2, 4, 1)) >= 1


def test_probability_bound_factor():
    inst = AisInstance.random(3, 4, np.random.default_rng(0))
    base = 4 ** 1 * 16 ** 3
    assert alignment_probability_bound(inst, (0, 0, 0), (5, 1, 10)) == pytest.approx(base / 3 / 8)


def test_probability_estimate_pbar8():
    rng = np.random.default_rng(9)
    inst = AisInstance.random(3, 8, rng)
    sup = build_support(inst)
    for _ in range(3):
        i, j = rng.choice(len(sup), size=2, replace=False)
        est = estimate_alignment_probability(inst, sup.z[i], sup.z[j], 10 ** 4, 1, sup)
        assert est.ok and 0 <= est.estimate <= 1


def test_size_bound_formula():
    inst = AisInstance.random(3, 4, np.random.default_rng(0))
    assert inst.pbar_hat == 19
    assert expected_size_bound(inst) == pytest.approx(4 * 16 ** 3 * (7 + 2 * math.log(19)) ** 3)


def test_expected_size_pbar4():
    inst = AisInstance.random(3, 4, np.random.default_rng(2))
    sup = build_support(inst)
    for idx in (0, len(sup) // 2, len(sup) - 1):
        r = expected_image_size_check(inst, sup.z[idx], 2000, 3, sup)
        assert r.ok and min(r.sizes) >= 1


def test_expected_size_threads_deterministic():
    inst = AisInstance.random(3, 3, np.random.default_rng(4))
    sup = build_support(inst)
    one = expected_image_size_check(inst, sup.z[5], 64, 11, sup, threads=1)
    many = expected_image_size_check(inst, sup.z[5], 64, 11, sup, threads=8)
    assert one == many


def test_instance_from_cycle(paper7):
    cc = best_completed_cycle(build_bundle(paper7)).cycle
    inst = AisInstance.from_cycle(cc, 3, np.random.default_rng(0))
    assert inst.m == 3 and sum(inst.same) == cc.params.m2


def test_entropy_gap_report_runs():
    inst = AisInstance.random(3, 3, np.random.default_rng(0))
    rep = entropy_gap_report(inst, 20, 0)
    assert rep.h_conflict >= rep.h_alignment_given_g - 1e-12
    assert rep.reference == pytest.approx(math.log(3))


def test_entropy_bits():
    assert entropy_bits({0: 0.5, 1: 0.5}) == pytest.approx(1.0)
    assert entropy_bits({0: 1.0}) == 0
    with pytest.raises(NotADistribution):
        entropy_bits({0: 0.5, 1: 0.4})
    with pytest.raises(NotADistribution):
        entropy_bits({0: 1.5, 1: -0.5})


def test_submodularity_binary_example():
    u = {0: 0.5, 1: 0.5}
    r = check_submodularity(u, u, u)
    assert r.independent_lhs == pytest.approx(1 + 1.8112781244591327)
    assert r.independent_rhs == pytest.approx(3.0)
    assert r


def test_submodularity_point_mass():
    rng = np.random.default_rng(1)
    r = check_submodularity(random_distribution(rng), {4: 1.0}, random_distribution(rng))
    assert r and r.independent_lhs is not None


def test_submodularity_random_triples():
    rng = np.random.default_rng(123)
    for _ in range(100):
        assert check_submodularity(*(random_distribution(rng, 6) for _ in range(3)))


def test_submodularity_dependent_joints():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(1, 20))
        keys = {tuple(int(v) for v in rng.integers(-3, 4, size=3)) for _ in range(n)}
        p = rng.dirichlet(np.ones(len(keys)))
        r = check_submodularity(joint=dict(zip(sorted(keys), p)))
        assert r.joint_ok and r.independent_lhs is None
