"""The key exchange: system parameters, key generation, shared-secret
derivation, public-key validation, and the plain-text formats.

Public keys are j-invariants.  A private key is an exponent vector
over the system's walk primes; deriving a shared secret replays the
private walk starting from the peer's curve.  Validation proves group
membership before any walk touches a peer value: the curve order is
pinned by exhibiting a point of large exact order (or an exact count
at desk scale), and the endomorphism ring is pinned by crater tests at
the primes dividing the conductor.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .ec import (Curve, XPoint, check_trace, count_points, curve_from_j,
                 point_order, random_point)
from .ff import PrimeField
from .isogeny import (IdealStep, StepError, curve_on_component, elkies_walk,
                      order_mod, resolve_direction, velu_walk)
from .modpolydb import available_levels
from .params import (Constraints, CostModel, ParamError, Partition,
                     ascend_to_maximal, classify_primes, eigenvalues_mod_ell,
                     factorize, fundamental_discriminant, keyspace_size,
                     optimize_bounds, search_toy_curve)
from .volcano import is_on_crater

EXACT_COUNT_BOUND = 2**20


class ProtocolError(RuntimeError):
    pass


class ParseError(ProtocolError):
    """Malformed serialized data; the message names the offending field."""


class ValidationError(ProtocolError):
    """A peer value failed validation."""


class InconclusiveValidation(ProtocolError):
    """Validation can neither accept nor reject with the stored data."""


# -- system parameters ----------------------------------------------------


@dataclass
class SystemParams:
    """Everything both parties share: the field, the isogeny class, the
    base curve, the walk directions, and the per-prime walk bounds."""

    p: int
    t: int
    delta_k: int
    conductor: int
    e0: Curve
    n_factorization: tuple[tuple[int, int], ...]
    partition: Partition
    bounds: dict[int, int]
    r_max: int = 9
    modpoly_manifest: str = ""
    field: PrimeField = None

    def __post_init__(self):
        if self.field is None:
            self.field = self.e0.field
        if self.field.order != self.p:
            raise ProtocolError("base curve field does not match p")
        dpi = self.dpi
        if dpi >= 0:
            raise ProtocolError("not an ordinary class: t^2 - 4p must be negative")
        if self.conductor ** 2 * self.delta_k != dpi:
            raise ProtocolError("conductor^2 * delta_k must equal t^2 - 4p")
        n = 1
        for prime, e in self.n_factorization:
            n *= prime**e
        if n != self.n:
            raise ProtocolError("n_factorization does not multiply to p + 1 - t")
        for s in self.partition.all_steps():
            kind, data = eigenvalues_mod_ell(self.t, self.p, s.ell)
            if kind != "elkies" or {s.lam, s.mu} != set(data):
                raise ProtocolError(
                    f"ell={s.ell}: stored eigenvalues are not the roots of "
                    f"X^2 - tX + p"
                )
        for ell in self.bounds:
            if all(s.ell != ell for s in self.partition.all_steps()):
                raise ProtocolError(f"bound given for unlisted prime {ell}")
        # at desk scale a wrong trace can collide with the real one
        # modulo the group exponent, so count instead of sampling
        if self.p <= EXACT_COUNT_BOUND:
            if count_points(self.e0) != n:
                raise ProtocolError("base curve fails the trace spot check")
        elif not check_trace(self.e0, self.t, random.Random(0)):
            raise ProtocolError("base curve fails the trace spot check")
        self.e0.expected_trace = self.t

    # -- derived quantities --

    @property
    def dpi(self) -> int:
        return self.t * self.t - 4 * self.p

    @property
    def n(self) -> int:
        return self.p + 1 - self.t

    @property
    def steps(self) -> tuple[IdealStep, ...]:
        return self.partition.all_steps()

    def e0_j(self):
        return self.e0.j_invariant()

    def keyspace(self) -> int:
        return keyspace_size(self.bounds, self.partition)

    def order_divisor(self) -> int:
        """The largest divisor m of n that divides the group exponent of
        every curve in the class.

        By Lenstra's structure theorem the group is O/(pi - 1), so the
        exponent is n divided by the integer content of pi - 1; the
        content is largest at the maximal order, giving m = n / c with
        c computed from (t, conductor, delta_k).  Exhibiting a point of
        order divisible by m pins the group order once m > 4 sqrt(p).
        """
        d, t = self.conductor, self.t
        if self.delta_k % 4 == 1:
            c = math.gcd((t - d - 2) // 2, d)
        else:
            c = math.gcd((t - 2) // 2, d)
        return self.n // max(c, 1)

    def step_for(self, ell: int, sign: int) -> IdealStep:
        """The walking recipe for one prime and direction.

        sign > 0 is the stored direction; sign < 0 swaps the
        eigenvalues and re-resolves the route under the same extension
        cap, so a one-direction sampling prime walks its reverse through
        the modular polynomial.
        """
        for s in self.steps:
            if s.ell == ell:
                if sign > 0:
                    return s
                if s.method == "EE":
                    return IdealStep(ell, s.mu, s.lam, order_mod(s.mu, ell),
                                     "EE", s.twist_usable)
                return resolve_direction(ell, s.mu, s.lam, self.p,
                                         r_max=self.r_max)
        raise ProtocolError(f"prime {ell} is not part of this system")


# -- keys ------------------------------------------------------------------


@dataclass(frozen=True)
class PrivateKey:
    """Exponent vector: steps to walk per prime, signed by direction."""

    exponents: tuple[tuple[int, int], ...]  # (ell, k), sorted by ell

    def __post_init__(self):
        ells = [ell for ell, _ in self.exponents]
        if ells != sorted(set(ells)):
            raise ValueError("exponents must be sorted with distinct primes")

    def serialize(self) -> str:
        return ";".join(f"{ell}:{k}" for ell, k in self.exponents) + "\n"


@dataclass(frozen=True)
class PublicKey:
    """A j-invariant; j = 0 and j = 1728 never occur in valid systems."""

    j: object

    def serialize(self) -> str:
        return format(self.j.val, "x") + "\n"


def check_private_key(priv: PrivateKey, params: SystemParams) -> None:
    by_ell = {s.ell: s for s in params.steps}
    ve = {s.ell for s in params.partition.ve}
    for ell, k in priv.exponents:
        if ell not in by_ell:
            raise ProtocolError(f"prime {ell} is not part of this system")
        m = params.bounds.get(ell, 0)
        if abs(k) > m:
            raise ProtocolError(f"exponent for {ell} exceeds the bound {m}")
        if k < 0 and ell in ve:
            raise ProtocolError(f"prime {ell} only walks the stored direction")


def keygen(params: SystemParams, rng: random.Random):
    """Sample an exponent vector within the bounds and walk it."""
    exps = []
    ve = {s.ell for s in params.partition.ve}
    for s in sorted(params.steps, key=lambda s: s.ell):
        m = params.bounds.get(s.ell, 0)
        lo = 0 if s.ell in ve else -m
        exps.append((s.ell, rng.randint(lo, m)))
    priv = PrivateKey(tuple(exps))
    return priv, public_from_private(params, priv, rng)


def _walk(params: SystemParams, E: Curve, priv: PrivateKey,
          rng: random.Random) -> Curve:
    if E.c2 != E.field.zero:
        E = E.to_weierstrass()
    for ell, k in priv.exponents:
        if k == 0:
            continue
        s = params.step_for(ell, 1 if k > 0 else -1)
        if s.method in ("VV", "VE"):
            E = velu_walk(E, s, abs(k), rng)
        else:
            E = elkies_walk(E, s, abs(k), rng)
    return E


def public_from_private(params: SystemParams, priv: PrivateKey,
                        rng: random.Random) -> PublicKey:
    check_private_key(priv, params)
    return PublicKey(_walk(params, params.e0, priv, rng).j_invariant())


def derive_shared(priv: PrivateKey, peer: PublicKey, params: SystemParams,
                  rng: random.Random, validate: bool = True):
    """Walk the private vector from the peer's curve; the result's
    j-invariant is the shared secret."""
    check_private_key(priv, params)
    if validate and not validate_public_key(peer, params, rng):
        raise ValidationError("peer public key failed validation")
    try:
        E = curve_on_component(peer.j, params.field, params.t, rng)
    except (StepError, ValueError) as e:
        raise ValidationError(f"peer key does not lift to the class: {e}")
    return _walk(params, E, priv, rng).j_invariant()


# -- validation ------------------------------------------------------------


def validate_order(pub: PublicKey, params: SystemParams,
                   rng: random.Random, budget: int = 40) -> bool:
    """Whether a curve with invariant j has exactly p + 1 - t points.

    Exhibits a point whose order is a multiple of m, the stored
    exponent divisor of n: m | #E and #E in the Hasse interval force
    #E = n once m > 4 sqrt(p).  A sample not killed by n rejects its
    twist immediately.  When m is too small, desk-scale systems fall
    back to an exact count; larger systems cannot decide and say so.
    """
    f = params.field
    if pub.j == f(0) or pub.j == f(1728):
        return False
    try:
        E, Et = curve_from_j(pub.j, f)
    except ValueError:
        return False
    m = params.order_divisor()
    n, nf = params.n, list(params.n_factorization)
    if m * m > 16 * params.p:
        for cand in (E, Et):
            for _ in range(budget):
                XP = XPoint.from_point(random_point(cand, rng))
                if not XP.mul(n).is_infinity():
                    break
                if point_order(XP, n, nf) % m == 0:
                    return True
        return False
    if params.p <= EXACT_COUNT_BOUND:
        return count_points(E) == params.n or count_points(Et) == params.n
    raise InconclusiveValidation(
        "no stored divisor of n is large enough to pin the order"
    )


def validate_endo_level(pub: PublicKey, params: SystemParams,
                        rng: random.Random, data_dir=None) -> bool:
    """Whether the endomorphism ring at j is the full maximal order.

    For each prime ell dividing the conductor the curve must sit on the
    crater of its ell-volcano.  Exponent-one 2-parts use the rational
    2-torsion shortcut: maximal at 2 iff the curve cubic splits
    completely (in Montgomery terms, iff A^2 - 4 is a square).
    """
    if params.conductor == 1:
        return True
    f = params.field
    try:
        E, _ = curve_from_j(pub.j, f)
    except ValueError:
        return False
    from .poly import roots_in_field

    for ell, depth in factorize(params.conductor):
        if ell == 2 and depth == 1:
            if len(roots_in_field(E.f_poly(), rng)) != 3:
                return False
            continue
        if ell not in available_levels(data_dir):
            raise InconclusiveValidation(
                f"no modular polynomial for conductor prime {ell}"
            )
        if not is_on_crater(pub.j, ell, depth, rng, data_dir=data_dir):
            return False
    return True


def validate_public_key(pub: PublicKey, params: SystemParams,
                        rng: random.Random, data_dir=None) -> bool:
    """Order check and endomorphism-level check together."""
    return validate_order(pub, params, rng) and validate_endo_level(
        pub, params, rng, data_dir=data_dir
    )


# -- toy system construction ----------------------------------------------


def build_system(field, rng: random.Random, require=(), ell_max: int = 47,
                 r_max: int = 9, bounds=None, security_bits=None,
                 cost: CostModel = None, budget: int = 50000,
                 ell_min: int = 3, bits: int = None) -> SystemParams:
    """Search a curve over `field` (or a fresh `bits`-bit prime field),
    lift it to the maximal order, classify its walk primes, and assemble
    a full parameter set.

    Walk primes are capped by the shipped modular polynomial levels so
    every direction (including reverses of one-direction primes) stays
    walkable.  Bounds come either from an explicit dict, from the cost
    optimizer at `security_bits`, or default to 1 step per prime.
    """
    constraints = Constraints(require=tuple(require), bits=bits, budget=budget)
    E, t, dpi = search_toy_curve(field, constraints, rng)
    d, dk = fundamental_discriminant(dpi)
    if d > 1:
        E = ascend_to_maximal(E, dpi, rng)
    p = E.field.order
    have_phi = set(available_levels())
    part = classify_primes(p, t, ell_max, r_max=r_max)
    keep = lambda s: ell_min <= s.ell <= ell_max and s.ell in have_phi
    part = Partition(
        tuple(s for s in part.vv if keep(s)),
        tuple(s for s in part.ve if keep(s)),
        tuple(s for s in part.ee if keep(s)),
    )
    if not part.all_steps():
        raise ParamError("no usable walk primes below the cap")
    if bounds is None:
        if security_bits is not None:
            bounds = optimize_bounds(cost or CostModel(), part, security_bits)
        else:
            bounds = {s.ell: 1 for s in part.all_steps()}
    return SystemParams(
        p=p,
        t=t,
        delta_k=dk,
        conductor=d,
        e0=E,
        n_factorization=tuple(factorize(p + 1 - t)),
        partition=part,
        bounds=dict(sorted(bounds.items())),
        r_max=r_max,
    )


# -- serialization ---------------------------------------------------------


def serialize_params(params: SystemParams) -> str:
    lines = [
        f"p = {params.p}",
        f"t = {params.t}",
        f"delta_k = {params.delta_k}",
        f"conductor = {params.conductor}",
    ]
    A = params.e0.to_montgomery_A()
    if A is not None:
        lines.append(f"e0_A = {A.val}")
    else:
        E = params.e0.to_weierstrass()
        lines.append(f"e0_weierstrass = {E.c4.val},{E.c6.val}")
    lines.append("n_factorization = " + ",".join(
        f"{q}^{e}" if e > 1 else f"{q}" for q, e in params.n_factorization
    ))
    fmt = lambda ss: ";".join(f"{s.ell},{s.lam},{s.mu},{s.r}" for s in ss)
    lines.append("svv = " + fmt(params.partition.vv))
    lines.append("sve = " + fmt(params.partition.ve))
    lines.append("see = " + fmt(params.partition.ee))
    lines.append("bounds = " + ";".join(
        f"{ell}:{m}" for ell, m in sorted(params.bounds.items())
    ))
    if params.r_max != 9:
        lines.append(f"r_max = {params.r_max}")
    if params.modpoly_manifest:
        lines.append(f"modpoly_manifest = {params.modpoly_manifest}")
    return "\n".join(lines) + "\n"


def _parse_steps(raw: str, key: str, p: int, r_max: int) -> tuple[IdealStep, ...]:
    out = []
    if not raw:
        return tuple(out)
    for item in raw.split(";"):
        try:
            ell, lam, mu, r = (int(v) for v in item.split(","))
        except ValueError:
            raise ParseError(f"field {key}: bad tuple {item!r}")
        if key == "see":
            if order_mod(lam, ell) != r:
                raise ParseError(f"field {key}: r must be the order of lam mod ell")
            out.append(IdealStep(ell, lam, mu, r, "EE", False))
            continue
        s = resolve_direction(ell, lam, mu, p, r_max=r_max)
        if s.method != "VV" or s.r != r:
            raise ParseError(
                f"field {key}: direction ({ell},{lam}) does not sample at r={r}"
            )
        if key == "sve":
            s = IdealStep(ell, lam, mu, r, "VE", s.twist_usable, s.use_twist)
        out.append(s)
    return tuple(out)


def parse_params(text: str, rng: random.Random = None) -> SystemParams:
    """Parse the line-oriented "key = value" format; the base curve's
    trace is spot-checked so a corrupted file fails loudly."""
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected key = value")
        key, _, val = line.partition("=")
        key = key.strip()
        if key in kv:
            raise ParseError(f"field {key}: duplicated")
        kv[key] = val.strip()

    def need(key):
        if key not in kv:
            raise ParseError(f"field {key}: missing")
        return kv[key]

    def integer(key, raw=None):
        raw = need(key) if raw is None else raw
        try:
            return int(raw)
        except ValueError:
            raise ParseError(f"field {key}: not an integer: {raw!r}")

    p = integer("p")
    t = integer("t")
    delta_k = integer("delta_k")
    conductor = integer("conductor")
    r_max = integer("r_max") if "r_max" in kv else 9
    field = PrimeField(p)
    if "e0_A" in kv:
        e0 = Curve.montgomery(field, field(integer("e0_A")))
    elif "e0_weierstrass" in kv:
        parts = kv["e0_weierstrass"].split(",")
        if len(parts) != 2:
            raise ParseError("field e0_weierstrass: expected a,b")
        e0 = Curve.weierstrass(field, field(integer("e0_weierstrass", parts[0])),
                               field(integer("e0_weierstrass", parts[1])))
    else:
        raise ParseError("field e0_A: missing (no base curve)")
    nf = []
    for item in need("n_factorization").split(","):
        q, _, e = item.partition("^")
        nf.append((integer("n_factorization", q),
                   integer("n_factorization", e) if e else 1))
    bounds = {}
    for item in need("bounds").split(";"):
        if not item:
            continue
        ell, _, m = item.partition(":")
        bounds[integer("bounds", ell)] = integer("bounds", m)
    part = Partition(
        _parse_steps(kv.get("svv", ""), "svv", p, r_max),
        _parse_steps(kv.get("sve", ""), "sve", p, r_max),
        _parse_steps(kv.get("see", ""), "see", p, r_max),
    )
    try:
        params = SystemParams(
            p=p, t=t, delta_k=delta_k, conductor=conductor, e0=e0,
            n_factorization=tuple(nf), partition=part, bounds=bounds,
            r_max=r_max, modpoly_manifest=kv.get("modpoly_manifest", ""),
        )
    except ProtocolError as e:
        raise ParseError(str(e))
    if rng is not None and not check_trace(params.e0, t, rng):
        raise ParseError("field t: base curve fails the trace check")
    return params


def bundled_params_path(name: str):
    """Path of a parameter file shipped with the package."""
    from pathlib import Path

    return Path(__file__).parent / "data" / "params" / name


def load_params_file(path, rng: random.Random = None) -> SystemParams:
    """Parse a params file from `path`, falling back to the bundled set
    when no such file exists (so `toy.params` works from anywhere)."""
    import os

    if not os.path.exists(path):
        cand = bundled_params_path(os.path.basename(str(path)))
        if cand.exists():
            path = cand
    with open(path) as fh:
        return parse_params(fh.read(), rng)


def parse_public_key(text: str, field) -> PublicKey:
    line = text.strip()
    try:
        val = int(line, 16)
    except ValueError:
        raise ParseError(f"public key: not a hex integer: {line!r}")
    if not 0 <= val < field.order:
        raise ParseError("public key: out of field range")
    return PublicKey(field(val))


def parse_private_key(text: str) -> PrivateKey:
    exps = []
    for item in text.strip().split(";"):
        if not item:
            continue
        ell, _, k = item.partition(":")
        try:
            exps.append((int(ell), int(k)))
        except ValueError:
            raise ParseError(f"private key: bad entry {item!r}")
    return PrivateKey(tuple(sorted(exps)))
