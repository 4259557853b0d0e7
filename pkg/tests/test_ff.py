import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crskex.ff import PrimeField, build_extension, is_probable_prime

F7 = PrimeField(7)


def test_inverse_in_f7():
    assert (F7(3).inverse()).val == 5


def test_addition_in_f7():
    assert F7(4) + F7(5) == F7(2)


def test_extension_modulus_forces_x_squared():
    f49 = build_extension(F7, 2)
    x = f49.gen
    m = f49.modulus
    # monic quadratic modulus: x^2 reduces to -(m0 + m1 x)
    want = -(f49([m[0]]) + x * f49([m[1]]))
    assert x * x == want
    if tuple(m[:2]) == (1, 0):
        # the deterministic modulus for F_49 is x^2 + 1, so x*x = -1 = 6
        assert x * x == f49([6])


def test_sqrt_of_2_mod_7():
    roots = F7(2).sqrt()
    assert roots is not None and {r.val for r in roots} == {3, 4}
    for r in roots:
        assert r * r == F7(2)


def test_sqrt_of_3_mod_7_absent():
    assert not F7(3).is_square()
    assert F7(3).sqrt() is None


def test_sqrt_zero():
    assert F7(0).sqrt() == (F7(0), F7(0))


def test_build_extension_degree_one_is_identity():
    assert build_extension(F7, 1) is F7


def test_f49_multiplicative_group_order():
    f49 = build_extension(F7, 2)
    one = f49(1)
    count = 0
    for a in range(7):
        for b in range(7):
            e = f49([a, b])
            if e.is_zero():
                continue
            count += 1
            assert e**48 == one
    assert count == 48


def test_extension_frobenius_order_small():
    rng = random.Random(3)
    f343 = build_extension(F7, 3)
    for _ in range(10):
        e = f343.random_element(rng)
        assert e.frobenius(3) == e
        assert e**7 == e.frobenius()


@given(st.integers(min_value=0, max_value=6), st.integers(min_value=0, max_value=6))
def test_f7_field_axioms_sample(a, b):
    x, y = F7(a), F7(b)
    assert x + y == y + x
    assert x * y == y * x
    assert x * (y + F7(1)) == x * y + x


@settings(max_examples=30)
@given(st.integers(min_value=1, max_value=10**6))
def test_prime_field_inverse_roundtrip(v):
    p = 2**61 - 1
    F = PrimeField(p)
    e = F(v)
    assert e * e.inverse() == F(1)


def test_is_probable_prime_basics():
    assert is_probable_prime(2**61 - 1)
    assert not is_probable_prime(2**61 - 3)
    assert not is_probable_prime(1)
    assert is_probable_prime(3)


def test_extension_sqrt_consistency():
    rng = random.Random(9)
    f49 = build_extension(F7, 2)
    squares = 0
    for a in range(7):
        for b in range(7):
            e = f49([a, b])
            if e.is_zero():
                continue
            if e.is_square():
                squares += 1
                r = e.sqrt()[0]
                assert r * r == e
    assert squares == 24  # half of the 48 nonzero elements


def test_work_counter_accumulates():
    F = PrimeField(10007)
    F.reset_work()
    a = F(123)
    before = F.work
    _ = a * a
    assert F.work == before + 1
    ext = build_extension(F, 2)
    before = F.work
    _ = ext([1, 2]) * ext([3, 4])
    assert F.work > before
