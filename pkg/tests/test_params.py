import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bundled
from crskex.ec import Curve, count_points
from crskex.ff import PrimeField
from crskex.isogeny import IdealStep, order_mod
from crskex.params import (Constraints, CostModel, ParamError, Partition,
                           SearchError, ascend_to_maximal, bounds_for_budget,
                           classify_primes, eigenvalues_mod_ell, factorize,
                           fundamental_discriminant, has_rational_torsion,
                           is_probable_prime, keyspace_size, optimize_bounds,
                           parse_constraints, random_prime, search_toy_curve,
                           small_primes)
from crskex.protocol import load_params_file

F7 = PrimeField(7)


def test_eigenvalues_mod_ell_kinds():
    assert eigenvalues_mod_ell(2, 7, 5) == ("elkies", (3, 4))
    assert eigenvalues_mod_ell(2, 7, 3) == ("ramified", 1)
    assert eigenvalues_mod_ell(32, 6007, 7) == ("atkin", None)
    with pytest.raises(ValueError):
        eigenvalues_mod_ell(2, 7, 4)
    with pytest.raises(ValueError):
        eigenvalues_mod_ell(2, 7, 7)


@settings(max_examples=150, deadline=None)
@given(
    st.sampled_from([3, 5, 7, 11, 13, 17, 19, 23, 29, 31]),
    st.integers(min_value=-500, max_value=500),
    st.integers(min_value=2, max_value=10**6),
)
def test_eigenvalues_satisfy_vieta(ell, t, q):
    if q % ell == 0:
        return
    kind, data = eigenvalues_mod_ell(t, q, ell)
    if kind == "elkies":
        lam, mu = data
        assert 0 < lam < mu < ell
        assert (lam + mu - t) % ell == 0
        assert (lam * mu - q) % ell == 0
    elif kind == "ramified":
        assert (t * t - 4 * q) % ell == 0


def test_classify_toy_partitions():
    p7 = classify_primes(7, 2, 5)
    assert [s.ell for s in p7.ve] == [5] and not p7.vv and not p7.ee
    p6 = classify_primes(6007, 32, 31)
    assert sorted(s.ell for s in p6.vv) == [19, 29]
    assert [s.ell for s in p6.ve] == [5] and not p6.ee
    p45 = classify_primes(4507, -28, 23)
    assert sorted(s.ell for s in p45.vv) == [7, 11]
    assert [s.ell for s in p45.ve] == [5]
    assert [s.ell for s in p45.ee] == [23]


def test_partition_steps_consistent():
    part = classify_primes(4507, -28, 23)
    assert len(set(part.primes())) == len(part.primes())
    for s in part.all_steps():
        assert (s.lam + s.mu + 28) % s.ell == 0  # Vieta: sum = t
        assert (s.lam * s.mu - 4507) % s.ell == 0  # product = q
        if s.method in ("VV", "VE"):
            eff = (-s.lam) % s.ell if s.use_twist else s.lam
            assert s.r == order_mod(eff, s.ell)


def test_classify_rejects_non_ordinary():
    with pytest.raises(ParamError, match="ordinary"):
        classify_primes(7, 7, 5)


def test_fundamental_discriminant_cases():
    assert fundamental_discriminant(-24) == (1, -24)
    assert fundamental_discriminant(-23004) == (18, -71)
    assert fundamental_discriminant(-4) == (1, -4)
    assert fundamental_discriminant(-12) == (2, -3)
    assert fundamental_discriminant(-75) == (5, -3)
    with pytest.raises(ValueError):
        fundamental_discriminant(24)
    with pytest.raises(ParamError):
        fundamental_discriminant(-6)


def test_utility_number_theory(rng):
    assert factorize(5976) == [(2, 3), (3, 2), (83, 1)]
    assert small_primes(31)[-1] == 31 and small_primes(31)[0] == 2
    assert is_probable_prime(6007) and not is_probable_prime(6006)
    p = random_prime(12, rng)
    assert 2**11 <= p < 2**12 and is_probable_prime(p)


def test_parse_constraints():
    c = parse_constraints("require 5\nrequire 3\n# note\nbits = 12\nbudget 99\n")
    assert c.require == (3, 5) and c.bits == 12 and c.budget == 99
    with pytest.raises(ParamError, match="line 2"):
        parse_constraints("require 3\nwat\n")


def test_search_respects_torsion_requirements(rng):
    E, t, dpi = search_toy_curve(F7, Constraints(require=(2, 3)), rng)
    N = count_points(E)
    assert N % 6 == 0
    assert t == 7 + 1 - N and dpi == t * t - 28
    assert t % 7 != 0  # ordinary
    assert E.expected_trace == t
    assert has_rational_torsion(E, 2, rng) and has_rational_torsion(E, 3, rng)


def test_search_budget_exhaustion(rng):
    # 2- and 11-torsion needs 22 | N, beyond the Hasse window of F_7
    with pytest.raises(SearchError) as e:
        search_toy_curve(F7, Constraints(require=(2, 11), budget=150), rng)
    stats = e.value.stats
    assert stats["trials"] == 150
    assert stats["torsion_abort"] > 0


def test_search_without_field_uses_bits(rng):
    E, t, dpi = search_toy_curve(None, Constraints(bits=9), rng)
    assert 2**8 <= E.field.order < 2**9
    assert dpi < 0


def test_ascend_identity_when_maximal(f7_curve, rng):
    assert ascend_to_maximal(f7_curve, -24, rng) is f7_curve


def test_ascend_reaches_crater(rng):
    from crskex.isogeny import curve_on_component
    from crskex.volcano import is_on_crater

    F6 = PrimeField(6007)
    E = curve_on_component(F6(607), F6, 32, rng)
    up = ascend_to_maximal(E, -23004, rng)
    assert up.j_invariant() == F6(5518)
    assert up.expected_trace == 32
    assert is_on_crater(up.j_invariant(), 3, 2, rng)


def test_cost_model_interpolation():
    cm = CostModel()
    assert cm.velu_cost(1) == pytest.approx(0.02)
    assert cm.velu_cost(3) == pytest.approx(0.10)
    assert cm.velu_cost(2) == pytest.approx(0.06)
    assert cm.velu_cost(9) == pytest.approx(1.3)
    assert cm.velu_cost(10) == pytest.approx(1.45)  # linear extrapolation
    costs = [cm.velu_cost(r) for r in range(1, 13)]
    assert all(a < b for a, b in zip(costs, costs[1:]))
    assert cm.elkies_cost(5) == pytest.approx(0.085)
    with pytest.raises(ValueError):
        CostModel(elkies_per_ell=0.0)
    with pytest.raises(ValueError):
        CostModel(velu_timings=((1, 0.5), (2, 0.4)))
    with pytest.raises(ValueError):
        cm.velu_cost(0)


def test_step_cost_dispatch():
    cm = CostModel()
    vv = IdealStep(19, 11, 2, 3, "VV", False)
    ee = IdealStep(23, 5, 7, 11, "EE", False)
    assert cm.step_cost(vv) == pytest.approx(cm.velu_cost(3))
    assert cm.step_cost(ee) == pytest.approx(0.017 * 23)


def test_keyspace_size():
    vv = IdealStep(19, 11, 2, 3, "VV", False)
    ve = IdealStep(5, 4, 3, 1, "VE", True, use_twist=True)
    part = Partition((vv,), (ve,), ())
    # two-direction primes contribute 2M+1, one-direction M+1
    assert keyspace_size({19: 409, 5: 3}, part) == 819 * 4
    assert keyspace_size({19: 0, 5: 0}, part) == 1


def test_bounds_for_budget_monotone():
    cm = CostModel()
    part = classify_primes(6007, 32, 31)
    b1 = bounds_for_budget(cm, part, 0.5)
    b2 = bounds_for_budget(cm, part, 2.0)
    assert set(b1) == {5, 19, 29}
    assert all(b2[ell] >= b1[ell] for ell in b1)


def test_optimize_single_prime():
    cm = CostModel()
    part = Partition((), (IdealStep(5, 4, 3, 1, "VE", True, use_twist=True),), ())
    bounds = optimize_bounds(cm, part, 1)  # keyspace target 2^2 = 4
    assert bounds == {5: 3}
    part2 = Partition((IdealStep(19, 11, 2, 3, "VV", False),), (), ())
    bounds2 = optimize_bounds(cm, part2, 2)  # target 16: 2M+1 >= 16
    assert bounds2 == {19: 8}


def test_optimize_meets_target_frugally():
    cm = CostModel()
    part = classify_primes(6007, 32, 31)
    bounds = optimize_bounds(cm, part, 4)
    assert keyspace_size(bounds, part) >= 2**8
    slack = {ell: max(0, m - 1) for ell, m in bounds.items()}
    assert keyspace_size(slack, part) < 2**8


def test_crs512_partition_matches_published_table():
    params = load_params_file(bundled("crs512.params"), random.Random(5))
    part = params.partition
    assert (len(part.vv), len(part.ve), len(part.ee)) == (13, 11, 29)
    expected_r = {}
    for r, ells in (
        (1, (3, 5, 7, 11, 13, 17, 103, 523, 821, 947, 1723)),
        (3, (19, 661)),
        (4, (1013, 1181)),
        (5, (31, 61, 1321)),
        (7, (29, 71, 547)),
        (8, (881,)),
        (9, (37, 1693)),
    ):
        for ell in ells:
            expected_r[ell] = r
    actual_r = {s.ell: s.r for s in part.vv + part.ve}
    assert actual_r == expected_r
    starred = {3, 5, 7, 11, 13, 17, 19, 29, 31, 37, 61, 71, 103}
    for ell in expected_r:
        assert ((params.p + 1) % ell == 0) == (ell in starred), ell
    # classification from scratch agrees on every published prime; it
    # also finds two more r = 5 sampling-amenable primes (431, 1061)
    # the published system leaves unused
    fresh = classify_primes(params.p, params.t, 1723)
    fresh_r = {s.ell: s.r for s in fresh.vv + fresh.ve}
    assert {ell: fresh_r[ell] for ell in expected_r} == expected_r
    assert set(fresh_r) - set(expected_r) == {431, 1061}
    assert {s.ell for s in part.ee} <= {s.ell for s in fresh.ee}
