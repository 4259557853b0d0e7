"""Parameter analysis: eigenvalue classification per prime, toy curve
search with early aborts, conductor handling, and walk-bound
optimization against a step-cost model.

The classification decides, for every small split prime ell, how each
of the two walking directions is best executed: by point sampling over
a small extension (possibly on the quadratic twist) or by modular
polynomial root finding.  Primes whose two directions both sample are
collected in S_VV, mixed ones in S_VE, the rest in S_EE.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from .ec import (Curve, count_points, curve_from_j, division_polynomial,
                 random_point)
from .isogeny import IdealStep, StepError, order_mod, resolve_direction
from .poly import roots_in_field
from .volcano import ascend


class ParamError(RuntimeError):
    pass


class SearchError(ParamError):
    """Curve search budget exhausted; carries trial statistics."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats or {}


# -- primality and factoring (desk scale) --------------------------------


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic for n < 3.3e24 with the fixed bases."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng: random.Random) -> int:
    if bits < 3:
        raise ValueError("need at least 3 bits")
    while True:
        n = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(n):
            return n


def factorize(n: int, effort: int = 10**6) -> list[tuple[int, int]]:
    """Trial division up to `effort`, then a primality check on the rest.

    Returns sorted (prime, exponent) pairs; raises ParamError when the
    leftover cofactor is composite, since the caller cannot use a
    partial factorization.
    """
    if n <= 0:
        raise ValueError("factorize expects a positive integer")
    out = []
    f = 2
    while f <= effort and f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            out.append((f, e))
        f += 1 if f == 2 else 2
    if n > 1:
        if not is_probable_prime(n):
            raise ParamError(f"cofactor {n} is composite beyond effort {effort}")
        out.append((n, 1))
    return out


def small_primes(bound: int) -> list[int]:
    sieve = bytearray([1]) * (bound + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, math.isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytes(len(sieve[i * i :: i]))
    return [i for i in range(bound + 1) if sieve[i]]


# -- eigenvalue classification -------------------------------------------


def eigenvalues_mod_ell(t: int, q: int, ell: int):
    """Roots of X^2 - tX + q mod ell, found by enumeration.

    Returns ("atkin", None) for no roots, ("ramified", lam) for a double
    root (ell divides t^2 - 4q), or ("elkies", (lam, mu)) with lam < mu.
    Only the last kind supports two distinct horizontal directions.
    """
    if ell < 3 or not is_probable_prime(ell):
        raise ValueError("ell must be an odd prime")
    if q % ell == 0:
        raise ValueError("ell must differ from the field characteristic")
    roots = [x for x in range(ell) if (x * x - t * x + q) % ell == 0]
    if not roots:
        return ("atkin", None)
    if (t * t - 4 * q) % ell == 0:
        return ("ramified", roots[0])
    return ("elkies", (roots[0], roots[1]))


@dataclass(frozen=True)
class Partition:
    """The S_VV / S_VE / S_EE split of usable walk primes."""

    vv: tuple[IdealStep, ...]
    ve: tuple[IdealStep, ...]
    ee: tuple[IdealStep, ...]

    def all_steps(self) -> tuple[IdealStep, ...]:
        return self.vv + self.ve + self.ee

    def primes(self) -> list[int]:
        return sorted(s.ell for s in self.all_steps())


def classify_primes(p: int, t: int, ell_max: int, r_max: int = 9) -> Partition:
    """Partition the split primes up to ell_max by step-engine amenability.

    A direction is sampling-amenable when its eigenspace becomes
    rational over an extension of degree at most r_max on the curve or
    its twist, exclusively of the other eigenspace.  The stored entry
    for a prime is the cheaper direction's recipe; the opposite
    direction is reconstructed by swapping eigenvalues.
    """
    if math.gcd(t, p) != 1:
        raise ParamError("curve is not ordinary")
    vv, ve, ee = [], [], []
    for ell in small_primes(ell_max):
        if ell < 3 or ell == p:
            continue
        kind, data = eigenvalues_mod_ell(t, p, ell)
        if kind != "elkies":
            continue
        lam, mu = data
        fwd = resolve_direction(ell, lam, mu, p, r_max=r_max)
        bwd = resolve_direction(ell, mu, lam, p, r_max=r_max)
        amenable = [s for s in (fwd, bwd) if s.method == "VV"]
        if len(amenable) == 2:
            vv.append(min(amenable, key=lambda s: (s.r, s.lam)))
        elif len(amenable) == 1:
            ve.append(replace(amenable[0], method="VE"))
        else:
            ee.append(fwd)
    return Partition(tuple(vv), tuple(ve), tuple(ee))


# -- toy curve search -----------------------------------------------------


@dataclass
class Constraints:
    require: tuple[int, ...] = ()
    bits: int | None = None
    forbid_supersingular: bool = True
    budget: int = 50000


def parse_constraints(text: str) -> Constraints:
    """Line-oriented constraints: "require ell", "forbid supersingular",
    "bits = k".  Unknown directives are an error."""
    c = Constraints()
    require = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace("=", " ").split()
        if parts[0] == "require" and len(parts) == 2:
            require.append(int(parts[1]))
        elif parts[0] == "forbid" and parts[1:] == ["supersingular"]:
            c.forbid_supersingular = True
        elif parts[0] == "bits" and len(parts) == 2:
            c.bits = int(parts[1])
        elif parts[0] == "budget" and len(parts) == 2:
            c.budget = int(parts[1])
        else:
            raise ParamError(f"constraints line {lineno}: cannot parse {raw!r}")
    c.require = tuple(sorted(set(require)))
    return c


def has_rational_torsion(E: Curve, ell: int, rng: random.Random) -> bool:
    """Whether E has a rational point of order ell (so ell | #E).

    Tested before any point counting: for ell = 2 by a rational root of
    the curve cubic, else by a rational root of the division polynomial
    whose y-coordinate also descends.
    """
    if ell == 2:
        return bool(roots_in_field(E.f_poly(), rng))
    for x0 in roots_in_field(division_polynomial(E, ell), rng):
        if E.f_eval(x0).is_square():
            return True
    return False


def search_toy_curve(field, constraints: Constraints, rng: random.Random):
    """Random curve search with per-prime early aborts (desk scale).

    Samples short Weierstrass curves, discards one as soon as any
    required torsion prime is absent, and only then counts points
    exactly.  Returns (curve, t, dpi) with the trace recorded on the
    curve.  Raises SearchError with statistics when the budget runs out.
    """
    if field is None:
        if constraints.bits is None:
            raise ParamError("no field and no bits constraint")
        from .ff import PrimeField

        field = PrimeField(random_prime(constraints.bits, rng))
    q = field.order
    if q > 2**32:
        raise ParamError("toy search is for fields below 2^32")
    stats = {"trials": 0, "singular": 0, "torsion_abort": 0,
             "supersingular": 0, "bad_j": 0}
    for _ in range(constraints.budget):
        stats["trials"] += 1
        a, b = field(rng.randrange(q)), field(rng.randrange(q))
        try:
            E = Curve.weierstrass(field, a, b)
        except ValueError:
            stats["singular"] += 1
            continue
        if E.j_invariant() == field(0) or E.j_invariant() == field(1728):
            stats["bad_j"] += 1
            continue
        if not all(has_rational_torsion(E, ell, rng) for ell in constraints.require):
            stats["torsion_abort"] += 1
            continue
        N = count_points(E)
        t = q + 1 - N
        if constraints.forbid_supersingular and t % field.p == 0:
            stats["supersingular"] += 1
            continue
        if any(N % ell for ell in constraints.require):
            raise ParamError("torsion test accepted a curve the count rejects")
        E.expected_trace = t
        return E, t, t * t - 4 * q
    raise SearchError(f"no curve within {constraints.budget} trials", stats)


# -- conductor handling ---------------------------------------------------


def fundamental_discriminant(dpi: int, effort: int = 10**6):
    """Split dpi = d^2 * dK with dK fundamental.  Returns (d, dK)."""
    if dpi >= 0:
        raise ValueError("ordinary Frobenius discriminants are negative")
    d = 1
    m = -dpi
    for prime, e in factorize(m, effort=effort):
        d *= prime ** (e // 2)
    m_sf = -(m // (d * d))  # squarefree
    if m_sf % 4 in (2, 3):
        # the fundamental discriminant is then 4 * m_sf
        if d % 2:
            raise ParamError("dpi is not a discriminant (dpi mod 4 not in {0,1})")
        return d // 2, 4 * m_sf
    return d, m_sf


def ascend_to_maximal(E: Curve, dpi: int, rng: random.Random,
                      effort: int = 10**6, data_dir=None) -> Curve:
    """Replace E by a curve of the same trace whose endomorphism ring is
    the maximal order: for each prime dividing the conductor, walk the
    ascending isogenies to the crater of that prime's volcano."""
    from .isogeny import curve_on_component

    d, _ = fundamental_discriminant(dpi, effort=effort)
    if d == 1:
        return E
    t = E.expected_trace
    if t is None:
        raise ParamError("curve trace unknown; set expected_trace")
    j = E.j_invariant()
    for ell, depth in factorize(d):
        j, _ = ascend(j, ell, depth, rng, data_dir=data_dir)
    if j == E.j_invariant():
        return E
    return curve_on_component(j, E.field, t, rng)


# -- cost model and walk bounds -------------------------------------------


_VELU_TIMINGS = ((1, 0.02), (3, 0.10), (4, 0.15), (5, 0.24), (7, 0.8),
                 (8, 1.15), (9, 1.3))


@dataclass(frozen=True)
class CostModel:
    """Seconds per isogeny step, by engine.

    Root finding in the modular polynomial scales linearly in ell;
    sampling scales with the extension degree r, anchored at measured
    points and interpolated linearly between them.
    """

    elkies_per_ell: float = 0.017
    velu_timings: tuple[tuple[int, float], ...] = _VELU_TIMINGS

    def __post_init__(self):
        last_r, last_c = 0, 0.0
        for r, c in self.velu_timings:
            if r <= last_r or c <= last_c:
                raise ValueError("sampling timings must increase with r")
            last_r, last_c = r, c
        if self.elkies_per_ell <= 0:
            raise ValueError("costs must be positive")

    def elkies_cost(self, ell: int) -> float:
        return self.elkies_per_ell * ell

    def velu_cost(self, r: int) -> float:
        if r < 1:
            raise ValueError("extension degree must be positive")
        pts = self.velu_timings
        if r <= pts[0][0]:
            return pts[0][1] * r / pts[0][0]
        for (r0, c0), (r1, c1) in zip(pts, pts[1:]):
            if r <= r1:
                return c0 + (c1 - c0) * (r - r0) / (r1 - r0)
        (r0, c0), (r1, c1) = pts[-2], pts[-1]
        return c1 + (c1 - c0) * (r - r1) / (r1 - r0)

    def step_cost(self, s: IdealStep) -> float:
        if s.method in ("VV", "VE"):
            return self.velu_cost(s.r)
        return self.elkies_cost(s.ell)


def keyspace_size(bounds, partition: Partition) -> int:
    """Number of distinct exponent vectors the bounds allow.

    Two-direction primes contribute 2M+1 each, one-direction primes
    M+1; exact integer arithmetic throughout.
    """
    n = 1
    for s in partition.vv + partition.ee:
        n *= 2 * bounds[s.ell] + 1
    for s in partition.ve:
        n *= bounds[s.ell] + 1
    return n


def bounds_for_budget(cost: CostModel, partition: Partition, T: float) -> dict:
    """Per-prime walk bounds: the most steps whose total cost fits T."""
    out = {}
    for s in partition.all_steps():
        c = cost.step_cost(s)
        out[s.ell] = max(0, int(T / c)) if c > 0 else 0
    return out


def optimize_bounds(cost: CostModel, partition: Partition, n: int,
                    granule: float = 0.01) -> dict:
    """Smallest per-prime time budget whose keyspace reaches 2^(2n).

    Binary search over the budget T to a 1% relative granule, biased
    toward the smaller side.  The keyspace target follows the square-root
    attack bound: 2n bits of keyspace for n bits of security.
    """
    steps = partition.all_steps()
    if not steps:
        raise ParamError("empty partition: nothing to optimize")
    target = 1 << (2 * n)

    def feasible(T: float) -> bool:
        return keyspace_size(bounds_for_budget(cost, partition, T), partition) >= target

    lo = min(cost.step_cost(s) for s in steps) / 2
    hi = max(lo, 1.0)
    for _ in range(200):
        if feasible(hi):
            break
        hi *= 2
    else:
        raise ParamError("no feasible budget found")
    if feasible(lo):
        hi = lo
    while hi > lo * (1 + granule):
        mid = math.sqrt(lo * hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return bounds_for_budget(cost, partition, hi)
