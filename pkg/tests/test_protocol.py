import random

import pytest

from conftest import F6007_CRATER, bundled
from crskex import protocol
from crskex.ec import count_points, curve_from_j
from crskex.ff import PrimeField
from crskex.oracle import verify_params
from crskex.protocol import (InconclusiveValidation, ParseError, PrivateKey,
                             ProtocolError, PublicKey, SystemParams,
                             ValidationError, build_system, check_private_key,
                             derive_shared, keygen, load_params_file,
                             parse_params, parse_private_key,
                             parse_public_key, public_from_private,
                             serialize_params, validate_endo_level,
                             validate_order, validate_public_key)

F6 = PrimeField(6007)


def test_order_divisor_values(f7_params, f6007_params):
    # F_7: pi - 1 has content 1, so the full order 6 certifies
    assert f7_params.order_divisor() == 6
    # F_6007: the group is Z/6 x Z/996; only the exponent survives
    assert f6007_params.order_divisor() == 996
    big = load_params_file(bundled("crs512.params"))
    assert big.order_divisor() * 2 == big.n


def test_dh_agreement_toy7(f7_params, rng):
    for _ in range(5):
        priv_a, pub_a = keygen(f7_params, rng)
        priv_b, pub_b = keygen(f7_params, rng)
        s_ab = derive_shared(priv_a, pub_b, f7_params, rng)
        s_ba = derive_shared(priv_b, pub_a, f7_params, rng)
        assert s_ab == s_ba
        assert s_ab.canonical_key() in {4, 5}


def test_dh_agreement_toy6007(f6007_params, rng):
    for _ in range(3):
        priv_a, pub_a = keygen(f6007_params, rng)
        priv_b, pub_b = keygen(f6007_params, rng)
        s_ab = derive_shared(priv_a, pub_b, f6007_params, rng)
        s_ba = derive_shared(priv_b, pub_a, f6007_params, rng)
        assert s_ab == s_ba
        assert s_ab.canonical_key() in F6007_CRATER


def test_zero_key_is_identity(f6007_params, rng):
    zero = PrivateKey(tuple((s.ell, 0) for s in sorted(
        f6007_params.steps, key=lambda s: s.ell)))
    pub = public_from_private(f6007_params, zero, rng)
    assert pub.j == f6007_params.e0_j()


def test_keygen_respects_bounds(f7_params, rng):
    for _ in range(20):
        priv, pub = keygen(f7_params, rng)
        ((ell, k),) = priv.exponents
        assert ell == 5 and 0 <= k <= 3  # one-direction prime: k >= 0
        assert pub.j.canonical_key() in {4, 5}


def test_check_private_key_errors(f7_params, f6007_params):
    with pytest.raises(ProtocolError, match="exceeds the bound"):
        check_private_key(PrivateKey(((5, 4),)), f7_params)
    with pytest.raises(ProtocolError, match="stored direction"):
        check_private_key(PrivateKey(((5, -1),)), f7_params)
    with pytest.raises(ProtocolError, match="not part"):
        check_private_key(PrivateKey(((7, 1),)), f7_params)
    # two-direction primes accept negative exponents
    check_private_key(PrivateKey(((19, -2),)), f6007_params)


def test_private_key_shape_and_roundtrip():
    with pytest.raises(ValueError, match="sorted"):
        PrivateKey(((5, 1), (5, 2)))
    priv = PrivateKey(((5, 2), (19, -1)))
    assert parse_private_key(priv.serialize()) == priv
    with pytest.raises(ParseError, match="bad entry"):
        parse_private_key("5:x\n")


def test_public_key_roundtrip_and_errors(f6007_params):
    pub = PublicKey(F6(1247))
    assert parse_public_key(pub.serialize(), F6) == pub
    with pytest.raises(ParseError, match="hex"):
        parse_public_key("zz\n", F6)
    with pytest.raises(ParseError, match="range"):
        parse_public_key(format(6007, "x"), F6)


def test_params_roundtrip_weierstrass(f7_params, rng):
    text = serialize_params(f7_params)
    assert "e0_weierstrass" in text  # no Montgomery model over F_7
    again = parse_params(text, rng)
    assert (again.p, again.t, again.delta_k, again.conductor) == (7, 2, -24, 1)
    assert again.bounds == {5: 3}
    assert again.e0_j() == f7_params.e0_j()
    assert [s.ell for s in again.steps] == [s.ell for s in f7_params.steps]


def test_params_roundtrip_montgomery(f6007_params, rng):
    text = serialize_params(f6007_params)
    assert "e0_A" in text
    again = parse_params(text, rng)
    assert again.e0_j() == f6007_params.e0_j()
    assert again.order_divisor() == 996
    assert {s.ell: (s.lam, s.mu, s.r) for s in again.steps} == \
        {s.ell: (s.lam, s.mu, s.r) for s in f6007_params.steps}


def test_parse_errors_name_the_field(f6007_params, rng):
    text = serialize_params(f6007_params)
    with pytest.raises(ParseError, match="p"):
        parse_params(text.replace("p = 6007", "p = seven"), rng)
    with pytest.raises(ParseError, match="delta_k"):
        parse_params(text.replace("delta_k = -71\n", ""), rng)
    with pytest.raises(ParseError, match="n_factorization"):
        parse_params(text.replace("2^3,3^2,83", "2^3,3^2,82"), rng)
    with pytest.raises(ParseError, match="bounds"):
        parse_params(text.replace("5:3", "5:"), rng)


def test_conductor_discriminant_consistency_enforced(f7_curve):
    from crskex.params import classify_primes, factorize

    with pytest.raises(ProtocolError, match="conductor"):
        SystemParams(p=7, t=2, delta_k=-24, conductor=2, e0=f7_curve,
                     n_factorization=tuple(factorize(6)),
                     partition=classify_primes(7, 2, 5), bounds={5: 3})


def test_wrong_trace_rejected(f7):
    from crskex.ec import Curve
    from crskex.params import classify_primes, factorize

    # t = -4 is a real trace over F_7 but not this curve's
    with pytest.raises(ProtocolError, match="trace"):
        SystemParams(p=7, t=-4, delta_k=-3, conductor=2,
                     e0=Curve.weierstrass(f7, f7(2), f7(3)),
                     n_factorization=tuple(factorize(12)),
                     partition=classify_primes(7, -4, 5), bounds={})


def test_validate_accepts_component_curves(f6007_params, rng):
    assert validate_public_key(PublicKey(F6(1247)), f6007_params, rng)
    # same component, same order, but not locally maximal at 3
    for j, expect_endo in ((782, False), (607, False), (2291, True)):
        pub = PublicKey(F6(j))
        assert validate_order(pub, f6007_params, rng), j
        assert validate_endo_level(pub, f6007_params, rng) is expect_endo, j


def test_validate_rejects_wrong_order(f6007_params, rng):
    # find a j whose curve and twist both have the wrong point count
    j = None
    for cand in range(2, 100):
        E, Et = curve_from_j(F6(cand), F6)
        if count_points(E) != 5976 and count_points(Et) != 5976:
            j = F6(cand)
            break
    assert j is not None
    assert not validate_order(PublicKey(j), f6007_params, rng)
    assert not validate_public_key(PublicKey(j), f6007_params, rng)


def test_validate_rejects_exceptional_j(f6007_params, rng):
    assert not validate_order(PublicKey(F6(0)), f6007_params, rng)
    assert not validate_order(PublicKey(F6(1728)), f6007_params, rng)


def test_validation_failure_raises_in_dh(f6007_params, rng):
    priv, _ = keygen(f6007_params, rng)
    with pytest.raises(ValidationError, match="validation"):
        derive_shared(priv, PublicKey(F6(607)), f6007_params, rng)


def test_inconclusive_validation(f6007_params, rng, monkeypatch):
    # a tiny certified divisor over a field too big to count exactly
    monkeypatch.setattr(SystemParams, "order_divisor", lambda self: 2)
    monkeypatch.setattr(protocol, "EXACT_COUNT_BOUND", 10)
    with pytest.raises(InconclusiveValidation):
        validate_order(PublicKey(F6(1247)), f6007_params, rng)


def test_bundled_files_parse_with_expected_classes(rng):
    expected = {
        "toy.params": (-24, 1),
        "toy6007.params": (-71, 18),
        "toy4283.params": (-4087, 2),
        "toy4507.params": (-479, 6),
        "toy7741.params": (-131, 12),
        "toy2347.params": (-9192, 1),
    }
    seen = set()
    for name, (dk, cond) in expected.items():
        params = load_params_file(bundled(name), rng)
        assert (params.delta_k, params.conductor) == (dk, cond), name
        assert params.conductor**2 * params.delta_k == params.dpi
        seen.add(params.delta_k)
    assert len(seen) == 6  # six distinct class groups


def test_load_params_falls_back_to_bundled(rng):
    params = load_params_file("toy.params", rng)
    assert params.p == 7 and params.delta_k == -24


def test_build_system_toy(rng):
    params = build_system(PrimeField(7), rng, ell_max=5)
    assert isinstance(params, SystemParams)
    assert params.p == 7
    rep = verify_params(params, rng)
    assert rep["ok"], rep["checks"]


def test_build_system_with_optimizer(rng):
    params = build_system(PrimeField(6007), rng, require=(2, 3),
                          ell_max=31, security_bits=4)
    assert params.keyspace() >= 2**8
    rep = verify_params(params, rng)
    assert rep["ok"], rep["checks"]
