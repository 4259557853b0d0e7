"""Shared fixtures: the two hand-derived reference systems.

The F_7 system is the smallest usable instance (orbit of size 2); the
F_6007 system sits on a conductor-18 class whose 3-volcano component
was enumerated exhaustively, so its crater and middle layers are known
vertex-by-vertex.  Every frozen constant here was derived by
independent exhaustive computation (point counts by x-sweeps, orbits by
brute-force closure, volcano layers by neighbor enumeration) before the
walk engine existed.
"""

import random

import pytest

from crskex.ec import Curve
from crskex.ff import PrimeField
from crskex.params import classify_primes, factorize
from crskex.protocol import SystemParams, bundled_params_path

# F_7: y^2 = x^3 + 2x + 3, N = 6, t = 2, delta_pi = delta_K = -24, h = 2.
F7_ORBIT = {4, 5}

# F_6007: trace-32 class, delta_pi = -23004 = 18^2 * (-71), h(-71) = 7.
# The 3-volcano component of j = 607 has 63 vertices in 3 layers.
F6007_CRATER = {1247, 2291, 3211, 3425, 4034, 4289, 5518}
F6007_MIDDLE = {208, 354, 782, 1131, 1426, 1428, 2324, 2607, 2692,
                4012, 4470, 4654, 4858, 5267}
F6007_FLOOR_SAMPLE = 607          # ascends 607 -> 782 -> 5518
F6007_ASCENT = (607, 782, 5518)


@pytest.fixture()
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture(scope="session")
def f7():
    return PrimeField(7)


@pytest.fixture(scope="session")
def f7_curve(f7):
    return Curve.weierstrass(f7, f7(2), f7(3), expected_trace=2)


@pytest.fixture(scope="session")
def f7_params(f7, f7_curve):
    return SystemParams(
        p=7, t=2, delta_k=-24, conductor=1, e0=f7_curve,
        n_factorization=tuple(factorize(6)),
        partition=classify_primes(7, 2, 5), bounds={5: 3},
    )


@pytest.fixture(scope="session")
def f6007():
    return PrimeField(6007)


@pytest.fixture(scope="session")
def f6007_params(f6007):
    return SystemParams(
        p=6007, t=32, delta_k=-71, conductor=18,
        e0=Curve.montgomery(f6007, f6007(3956)),
        n_factorization=tuple(factorize(5976)),
        partition=classify_primes(6007, 32, 31),
        bounds={5: 3, 19: 2, 29: 2},
    )


def bundled(name: str) -> str:
    path = bundled_params_path(name)
    assert path.exists(), f"missing bundled parameter file {name}"
    return str(path)
