import random

import pytest

from conftest import F6007_CRATER
from crskex.ec import (Curve, check_trace, division_polynomial,
                       point_of_exact_order)
from crskex.ff import PrimeField
from crskex.isogeny import (IdealStep, StepError, curve_on_component,
                            eigen_kernel_poly, eigenvalue_pair,
                            elkies_first_step, elkies_next_step, elkies_walk,
                            kernel_poly_from_adjacent_j,
                            kernel_poly_from_point, order_mod,
                            resolve_direction, twist_direction,
                            velu_from_kernel, velu_step, velu_walk,
                            walk_step_j)
from crskex.poly import Polynomial

F7 = PrimeField(7)
F6 = PrimeField(6007)


def P7(*coeffs):
    return Polynomial(F7, [F7(c) for c in coeffs])


def test_order_mod():
    assert order_mod(5, 13) == 4
    assert order_mod(1, 7) == 1
    assert order_mod(-1 % 19, 19) == 2
    with pytest.raises(ValueError):
        order_mod(0, 7)


def test_eigenvalue_pair():
    assert eigenvalue_pair(2, 7, 5) == (3, 4)
    assert eigenvalue_pair(32, 6007, 19) == (2, 11)
    # double root at ell = 3 (3 divides the discriminant): not Elkies
    assert eigenvalue_pair(2, 7, 3) is None
    # inert case
    assert eigenvalue_pair(32, 6007, 7) is None


def test_ideal_step_validation():
    with pytest.raises(ValueError, match="odd"):
        IdealStep(2, 1, 0, 1, "VV", False)
    with pytest.raises(ValueError, match="distinct"):
        IdealStep(5, 3, 3, 1, "VV", False)


def test_resolve_direction_routes():
    s = resolve_direction(5, 4, 3, 7)
    assert (s.r, s.use_twist, s.method) == (1, True, "VV")
    # ord(3) = 4 = ord(2): the co-eigenvalue annihilates both routes
    s = resolve_direction(5, 3, 4, 7)
    assert s.method == "EE" and s.r == 4
    s = resolve_direction(19, 11, 2, 6007)
    assert (s.r, s.use_twist, s.method) == (3, False, "VV")
    s = resolve_direction(29, 9, 23, 6007)
    assert (s.r, s.use_twist, s.method) == (7, True, "VV")
    # capping the extension degree forces the fallback
    s = resolve_direction(19, 2, 11, 6007, r_max=6)
    assert s.method == "EE" and s.r == order_mod(2, 19)


def test_twist_direction_recipe():
    s = IdealStep(3, 1, 2, 1, "VV", True)
    tw = twist_direction(s, 14)
    assert (tw.lam, tw.mu, tw.r, tw.use_twist) == (1, 2, 1, True)
    with pytest.raises(StepError, match="not -1"):
        twist_direction(s, 7)
    # with q = -1 mod ell the twisted direction costs exactly ord(lam)
    s13 = IdealStep(13, 2, 6, order_mod(2, 13), "VV", True)
    tw13 = twist_direction(s13, 25)
    assert tw13.r == order_mod(s13.lam, 13) == 12
    assert tw13.lam == (-s13.mu) % 13


def test_eigen_kernel_polys(f7_curve, rng):
    k3 = eigen_kernel_poly(f7_curve, 5, 3)
    k4 = eigen_kernel_poly(f7_curve, 5, 4)
    assert k3 == P7(6, 4, 1)
    assert k4 == P7(6, 5, 1)
    psi5 = division_polynomial(f7_curve, 5)
    for k in (k3, k4):
        _, rem = psi5.divmod(k)
        assert rem.is_zero()
    # the orbit has size 2, so both directions land on j = 4
    assert velu_from_kernel(f7_curve, k3).j_invariant() == F7(4)
    assert velu_from_kernel(f7_curve, k4).j_invariant() == F7(4)


def test_kernel_poly_from_point(f7_curve, rng):
    Et = f7_curve.quadratic_twist()  # order 10: rational 5-torsion
    Q = point_of_exact_order(Et, 10, 5, [(5, 1)], rng)
    K = kernel_poly_from_point(Q, 5)
    assert K.degree == 2 and K == K.monic()
    assert velu_from_kernel(Et, K).j_invariant() == F7(4)


def test_velu_step_alternates(f7_params, f7_curve, rng):
    step = f7_params.step_for(5, 1)
    E = f7_curve
    seen = []
    for _ in range(4):
        E = velu_step(E, step, rng)
        seen.append(E.j_invariant().canonical_key())
    assert seen == [4, 5, 4, 5]
    assert E.expected_trace == 2


def test_velu_walk_matches_repeated_steps(f7_params, f7_curve, rng):
    step = f7_params.step_for(5, 1)
    assert velu_walk(f7_curve, step, 3, rng).j_invariant() == F7(4)
    assert velu_walk(f7_curve, step, 4, rng).j_invariant() == F7(5)
    with pytest.raises(ValueError):
        velu_walk(f7_curve, step, 0, rng)


def test_velu_trial_rate(f7_params, f7_curve, rng):
    # sampling misses the ell-torsion with probability 1/ell, so the
    # expected number of draws per step is ell/(ell-1) = 1.25
    step = f7_params.step_for(5, 1)
    stats = {}
    velu_walk(f7_curve, step, 400, rng, stats=stats)
    assert stats["steps"] == 400
    rate = stats["trials"] / stats["steps"]
    assert 1.05 < rate < 1.5


def test_cross_engine_agreement(f6007_params, rng):
    E0 = f6007_params.e0.to_weierstrass()
    for ell in (5, 19, 29):
        fwd = f6007_params.step_for(ell, 1)
        j_velu = velu_step(E0, fwd, rng).j_invariant()
        j_elk = elkies_first_step(E0, fwd, rng)
        assert j_velu == j_elk, ell
        rev = f6007_params.step_for(ell, -1)
        j_back = (
            elkies_first_step(E0, rev, rng)
            if rev.method == "EE"
            else velu_step(E0, rev, rng).j_invariant()
        )
        assert j_back != j_velu, ell  # cycle length 7 > 2
        assert {j_velu, j_back} <= {F6(j) for j in F6007_CRATER}


def test_elkies_next_step_walks_the_cycle(f6007_params, rng):
    E0 = f6007_params.e0.to_weierstrass()
    s = f6007_params.step_for(5, 1)
    j0 = E0.j_invariant()
    j1 = elkies_first_step(E0, s, rng)
    visited = [j0, j1]
    for _ in range(6):
        visited.append(elkies_next_step(s, visited[-2], visited[-1], rng))
    assert visited[-1] == j0  # h(-71) = 7: the cycle closes
    assert {j.canonical_key() for j in visited} == F6007_CRATER


def test_elkies_next_step_rejects_nonadjacent(f6007_params, rng):
    s = f6007_params.step_for(5, 1)
    with pytest.raises(StepError, match="not adjacent"):
        elkies_next_step(s, F6(208), F6(1247), rng)


def test_elkies_rejects_non_elkies_prime(f6007_params, rng):
    # 3 divides the conductor: a crater vertex has 4 rational
    # Phi_3-neighbors and the floor has 1, never the Elkies count of 2
    fake = IdealStep(3, 1, 2, 1, "EE", False)
    with pytest.raises(StepError, match="not an Elkies prime"):
        elkies_first_step(f6007_params.e0, fake, rng)
    floor = curve_on_component(F6(607), F6, 32, rng)
    with pytest.raises(StepError, match="not an Elkies prime"):
        elkies_first_step(floor, fake, rng)


def test_degenerate_two_cycle_returns_both_kernels(f7_curve, rng):
    ks = kernel_poly_from_adjacent_j(f7_curve, F7(4), 5, rng)
    assert isinstance(ks, list) and len(ks) == 2
    assert {k.degree for k in ks} == {2}


def test_adjacent_kernel_single_direction(f6007_params, rng):
    E0 = f6007_params.e0.to_weierstrass()
    s = f6007_params.step_for(5, 1)
    j1 = velu_step(E0, s, rng).j_invariant()
    K = kernel_poly_from_adjacent_j(E0, j1, 5, rng)
    assert isinstance(K, Polynomial)
    assert velu_from_kernel(E0, K).j_invariant() == j1
    with pytest.raises(StepError, match="not adjacent"):
        kernel_poly_from_adjacent_j(E0, F6(208), 5, rng)


def test_walks_preserve_trace_and_close(f6007_params, rng):
    E0 = f6007_params.e0.to_weierstrass()
    s = f6007_params.step_for(5, 1)
    for E7 in (velu_walk(E0, s, 7, rng), elkies_walk(E0, s, 7, rng)):
        assert E7.j_invariant() == E0.j_invariant()
        assert E7.expected_trace == 32
        assert check_trace(E7, 32, rng)
    assert velu_walk(E0, s, 3, rng).j_invariant() == \
        elkies_walk(E0, s, 3, rng).j_invariant()


def test_walk_step_j_inverts(f7_params, f6007_params, rng):
    assert walk_step_j(f7_params, F7(5), 5, 1, rng) == F7(4)
    assert walk_step_j(f7_params, F7(5), 5, -1, rng) == F7(4)
    for ell in (5, 19, 29):
        j1 = walk_step_j(f6007_params, F6(1247), ell, 1, rng)
        assert walk_step_j(f6007_params, j1, ell, -1, rng) == F6(1247)


def test_curve_on_component(rng):
    E = curve_on_component(F6(1247), F6, 32, rng)
    assert E.j_invariant() == F6(1247) and E.expected_trace == 32
    Em = curve_on_component(F6(1247), F6, -32, rng)
    assert check_trace(Em, -32, rng)
    with pytest.raises(StepError, match="trace"):
        curve_on_component(F6(1247), F6, 5, rng)
