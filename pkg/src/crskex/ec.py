"""Elliptic curves over the fields in ff.

Curves are y^2 = x^3 + c2 x^2 + c4 x + c6 with a model tag: Montgomery
means (c2, c4, c6) = (A, 1, 0), Weierstrass means c2 = 0.  Montgomery
arithmetic drives the x-only ladders used on Velu paths; division
polynomial work always happens on the short Weierstrass form.  Point
counting is exhaustive up to 2^20 and baby-step giant-step with Hasse
interval disambiguation up to 2^32; anything larger is refused, the
protocol layer never needs it.
"""

from __future__ import annotations

import random

from .poly import Polynomial, roots_in_field

HASSE_EXHAUSTIVE_LIMIT = 1 << 20
HASSE_BSGS_LIMIT = 1 << 32


class Curve:
    """y^2 = x^3 + c2 x^2 + c4 x + c6 with nonzero discriminant."""

    __slots__ = ("field", "c2", "c4", "c6", "model", "expected_trace", "_divpoly_cache")

    def __init__(self, field, c2, c4, c6, model: str = "generic", expected_trace=None):
        self.field = field
        self.c2 = field(c2)
        self.c4 = field(c4)
        self.c6 = field(c6)
        self.model = model
        self.expected_trace = expected_trace
        self._divpoly_cache = None
        if self.discriminant().is_zero():
            raise ValueError("singular curve")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def weierstrass(field, a, b, expected_trace=None) -> "Curve":
        return Curve(field, 0, a, b, model="weierstrass", expected_trace=expected_trace)

    @staticmethod
    def montgomery(field, A, expected_trace=None) -> "Curve":
        return Curve(field, A, 1, 0, model="montgomery", expected_trace=expected_trace)

    # -- invariants -------------------------------------------------------

    def discriminant(self):
        c2, c4, c6 = self.c2, self.c4, self.c6
        # for y^2 = cubic: b2 = 4 c2, b4 = 2 c4, b6 = 4 c6
        b2 = 4 * c2
        b4 = 2 * c4
        b6 = 4 * c6
        b8 = (b2 * b6 - b4 * b4) * self.field(4).inverse()
        return (
            -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        )

    def j_invariant(self):
        b2 = 4 * self.c2
        b4 = 2 * self.c4
        c4i = b2 * b2 - 24 * b4
        return c4i * c4i * c4i / self.discriminant()

    def f_poly(self) -> Polynomial:
        """The cubic f(x) with y^2 = f(x)."""
        return Polynomial(
            self.field, [self.c6, self.c4, self.c2, self.field.one], coerce=False
        )

    def f_eval(self, x):
        return ((x + self.c2) * x + self.c4) * x + self.c6

    def is_on_curve(self, x, y) -> bool:
        return y * y == self.f_eval(x)

    # -- derived curves ---------------------------------------------------

    def to_weierstrass(self) -> "Curve":
        """Isomorphic short Weierstrass model (x shifted by c2/3)."""
        if self.c2.is_zero():
            if self.model == "weierstrass":
                return self
            return Curve.weierstrass(
                self.field, self.c4, self.c6, expected_trace=self.expected_trace
            )
        s = self.c2 * self.field(3).inverse()
        a = self.c4 - 3 * s * s
        b = self.c6 - s * self.c4 + 2 * s * s * s
        return Curve.weierstrass(self.field, a, b, expected_trace=self.expected_trace)

    def weierstrass_shift(self):
        """s with x_w = x + s mapping this curve to to_weierstrass()."""
        return self.c2 * self.field(3).inverse()

    def quadratic_twist(self) -> "Curve":
        """Twist by the deterministic smallest nonsquare g: x -> gx scaling."""
        g = self.field.nonsquare()
        tr = -self.expected_trace if self.expected_trace is not None else None
        return Curve(
            self.field, g * self.c2, g * g * self.c4, g * g * g * self.c6,
            model="generic", expected_trace=tr,
        )

    def base_extend(self, ext) -> "Curve":
        return Curve(
            ext, ext(self.c2), ext(self.c4), ext(self.c6), model=self.model
        )

    def to_montgomery_A(self):
        """A with this curve isomorphic (not just twist-isomorphic) to
        y^2 = x^3 + Ax^2 + x, or None.

        Requires a rational 2-torsion point x0 with 3 x0^2 + 2 c2 x0 + c4
        a square whose inverse square root is itself a square.
        """
        if self.model == "montgomery":
            return self.c2
        rng = random.Random(0)
        for x0 in roots_in_field(self.f_poly(), rng):
            beta = (3 * x0 + 2 * self.c2) * x0 + self.c4
            if beta.is_zero():
                continue
            rts = beta.inverse().sqrt()
            if rts is None:
                continue
            for s in rts:
                if s.is_square():
                    return (3 * x0 + self.c2) * s
        return None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Curve)
            and self.field == other.field
            and (self.c2, self.c4, self.c6) == (other.c2, other.c4, other.c6)
        )

    def __hash__(self):
        return hash((self.field, self.c2, self.c4, self.c6))

    def __repr__(self) -> str:
        return f"Curve({self.c2}, {self.c4}, {self.c6} / {self.field})"


class Point:
    """Affine point or the point at infinity."""

    __slots__ = ("curve", "x", "y", "inf")

    def __init__(self, curve: Curve, x=None, y=None, inf: bool = False):
        self.curve = curve
        self.inf = inf
        if not inf:
            self.x = curve.field(x)
            self.y = curve.field(y)
        else:
            self.x = None
            self.y = None

    @staticmethod
    def infinity(curve: Curve) -> "Point":
        return Point(curve, inf=True)

    def is_infinity(self) -> bool:
        return self.inf

    def __neg__(self) -> "Point":
        if self.inf:
            return self
        return Point(self.curve, self.x, -self.y)

    def __add__(self, other: "Point") -> "Point":
        if self.inf:
            return other
        if other.inf:
            return self
        E = self.curve
        if self.x == other.x:
            if self.y == -other.y:
                return Point.infinity(E)
            # tangent
            m = ((3 * self.x + 2 * E.c2) * self.x + E.c4) / (2 * self.y)
        else:
            m = (self.y - other.y) / (self.x - other.x)
        x3 = m * m - E.c2 - self.x - other.x
        y3 = m * (self.x - x3) - self.y
        return Point(E, x3, y3)

    def __sub__(self, other: "Point") -> "Point":
        return self + (-other)

    def mul(self, n: int) -> "Point":
        if n < 0:
            return (-self).mul(-n)
        result = Point.infinity(self.curve)
        addend = self
        while n:
            if n & 1:
                result = result + addend
            addend = addend + addend
            n >>= 1
        return result

    __rmul__ = lambda self, n: self.mul(n)

    def __eq__(self, other) -> bool:
        if self.inf or other.inf:
            return self.inf and other.inf
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.inf, self.x, self.y))

    def __repr__(self) -> str:
        return "O" if self.inf else f"({self.x}, {self.y})"


class XPoint:
    """x-only projective point (X : Z) with ladder arithmetic.

    Montgomery curves use the standard Montgomery ladder; any other
    model is shifted to short Weierstrass and uses the Brier-Joye
    x-only formulas.  Ladders never invert, so they are the cheap path
    for large scalar multiplications.
    """

    __slots__ = ("curve", "X", "Z")

    def __init__(self, curve: Curve, X, Z):
        self.curve = curve
        self.X = X
        self.Z = Z

    @staticmethod
    def from_x(curve: Curve, x) -> "XPoint":
        return XPoint(curve, curve.field(x), curve.field.one)

    @staticmethod
    def from_point(P: Point) -> "XPoint":
        if P.inf:
            return XPoint(P.curve, P.curve.field.one, P.curve.field.zero)
        return XPoint(P.curve, P.x, P.curve.field.one)

    def is_infinity(self) -> bool:
        return self.Z.is_zero()

    def x(self):
        if self.Z.is_zero():
            return None
        return self.X / self.Z

    def same_x(self, other: "XPoint") -> bool:
        if self.is_infinity() or other.is_infinity():
            return self.is_infinity() and other.is_infinity()
        return self.X * other.Z == other.X * self.Z

    def mul(self, n: int) -> "XPoint":
        if n < 0:
            n = -n
        if n == 0 or self.is_infinity():
            return XPoint(self.curve, self.curve.field.one, self.curve.field.zero)
        if n == 1:
            return self
        E = self.curve
        if E.model == "montgomery":
            return self._mont_ladder(n)
        if E.c2.is_zero():
            return self._weier_ladder(n, E.c4, E.c6, self.X, self.Z)
        # shift to short Weierstrass, ladder there, shift back
        s = E.weierstrass_shift()
        W = E.to_weierstrass()
        Xs = self.X + s * self.Z
        R = XPoint(W, Xs, self.Z)._weier_ladder(n, W.c4, W.c6, Xs, self.Z)
        return XPoint(E, R.X - s * R.Z, R.Z)

    def _mont_ladder(self, n: int) -> "XPoint":
        E = self.curve
        A24 = (E.c2 + 2) * E.field(4).inverse()
        XD, ZD = self.X, self.Z

        def xdbl(X, Z):
            t0 = X + Z
            t0 = t0 * t0
            t1 = X - Z
            t1 = t1 * t1
            t2 = t0 - t1
            X2 = t0 * t1
            Z2 = t2 * (t1 + A24 * t2)
            return X2, Z2

        def xadd(X1, Z1, X2, Z2):
            t0 = (X1 - Z1) * (X2 + Z2)
            t1 = (X1 + Z1) * (X2 - Z2)
            s = t0 + t1
            d = t0 - t1
            X3 = ZD * s * s
            Z3 = XD * d * d
            return X3, Z3

        R0 = (self.X, self.Z)
        R1 = xdbl(*R0)
        for bit in bin(n)[3:]:
            if bit == "1":
                R0 = xadd(R1[0], R1[1], R0[0], R0[1])
                R1 = xdbl(*R1)
            else:
                R1 = xadd(R0[0], R0[1], R1[0], R1[1])
                R0 = xdbl(*R0)
        return XPoint(E, R0[0], R0[1])

    def _weier_ladder(self, n: int, a, b, XD, ZD) -> "XPoint":
        E = self.curve

        def xdbl(X, Z):
            XX = X * X
            ZZ = Z * Z
            ZZZ = ZZ * Z
            t = XX - a * ZZ
            X2 = t * t - 8 * b * X * ZZZ
            Z2 = 4 * Z * (XX * X + a * X * ZZ + b * ZZZ)
            return X2, Z2

        def xadd(X1, Z1, X2, Z2):
            A_ = X1 * X2
            B_ = Z1 * Z2
            C_ = X1 * Z2
            D_ = X2 * Z1
            t = A_ - a * B_
            u = C_ - D_
            X3 = ZD * (t * t - 4 * b * B_ * (C_ + D_))
            Z3 = XD * u * u
            return X3, Z3

        R0 = (self.X, self.Z)
        R1 = xdbl(*R0)
        for bit in bin(n)[3:]:
            if bit == "1":
                R0 = xadd(R1[0], R1[1], R0[0], R0[1])
                R1 = xdbl(*R1)
            else:
                R1 = xadd(R0[0], R0[1], R1[0], R1[1])
                R0 = xdbl(*R0)
        return XPoint(E, R0[0], R0[1])


# ---------------------------------------------------------------------------
# Construction from j, sampling, counting
# ---------------------------------------------------------------------------


def curve_from_j(j, field) -> tuple[Curve, Curve]:
    """The short Weierstrass curve with a = 3j(1728-j), b = 2j(1728-j)^2
    and its quadratic twist.  j in {0, 1728} is out of scope here."""
    j = field(j)
    if j == field(0) or j == field(1728):
        raise ValueError("j = 0 and j = 1728 are excluded (extra automorphisms)")
    k = field(1728) - j
    a = 3 * j * k
    b = 2 * j * k * k
    E = Curve.weierstrass(field, a, b)
    return E, E.quadratic_twist()


def random_point(E: Curve, rng: random.Random) -> Point:
    """Uniform random affine point: sample x until f(x) is a square."""
    field = E.field
    while True:
        x = field.random_element(rng)
        fx = E.f_eval(x)
        if fx.is_zero():
            return Point(E, x, field.zero)
        rts = fx.sqrt()
        if rts is None:
            continue
        return Point(E, x, rts[rng.randrange(2)])


def count_points(E: Curve) -> int:
    """#E(F) exactly.  Exhaustive below 2^20, BSGS below 2^32."""
    q = E.field.order
    if q <= HASSE_EXHAUSTIVE_LIMIT:
        return _count_exhaustive(E)
    if q <= HASSE_BSGS_LIMIT:
        return _count_bsgs(E)
    raise ValueError("point counting beyond 2^32 is out of scope")


def _count_exhaustive(E: Curve) -> int:
    field = E.field
    q = field.order
    if field.degree == 1:
        p = field.p
        squares = bytearray(p)
        for v in range(0, (p + 1) // 2):
            squares[v * v % p] = 1
        c2, c4, c6 = int(E.c2), int(E.c4), int(E.c6)
        n = 1  # infinity
        for x in range(p):
            fx = ((x + c2) * x + c4) * x + c6
            fx %= p
            if fx == 0:
                n += 1
            elif squares[fx]:
                n += 2
        return n
    # extension field: same sweep with a set of squares
    squares = set()
    for e in _iter_field(field):
        squares.add(e * e)
    n = 1
    for x in _iter_field(field):
        fx = E.f_eval(x)
        if fx.is_zero():
            n += 1
        elif fx in squares:
            n += 2
    return n


def _iter_field(field):
    if field.degree == 1:
        for v in range(field.p):
            yield field(v)
        return
    p, r = field.p, field.degree
    idx = [0] * r
    while True:
        yield field(tuple(idx))
        i = 0
        while i < r:
            idx[i] += 1
            if idx[i] < p:
                break
            idx[i] = 0
            i += 1
        else:
            return


def _count_bsgs(E: Curve) -> int:
    """Order of E(F_q) by Mestre-style BSGS over the Hasse interval."""
    q = E.field.order
    import math

    w = 2 * math.isqrt(4 * q)  # interval width upper bound
    lo = q + 1 - math.isqrt(4 * q)
    rng = random.Random(q ^ 0x5EED)
    candidates: set[int] | None = None
    for _ in range(24):
        P = random_point(E, rng)
        matches = _annihilators_in_window(P, lo, w)
        candidates = matches if candidates is None else (candidates & matches)
        if candidates is not None and len(candidates) == 1:
            return candidates.pop()
    raise ArithmeticError("BSGS could not disambiguate the group order")


def _annihilators_in_window(P: Point, lo: int, width: int) -> set[int]:
    import math

    L = math.isqrt(width) + 1
    baby = {}
    Q = Point.infinity(P.curve)
    for j in range(L + 1):
        key = (Q.x, Q.y) if not Q.inf else None
        baby.setdefault(key, []).append(j)
        Q = Q + P
    # giant steps: [lo + iL] P against baby table, using x to catch +-j
    step = P.mul(L)
    G = P.mul(lo)
    out = set()
    i = 0
    while lo + i * L <= lo + width + L:
        key = (G.x, G.y) if not G.inf else None
        if key in baby:
            for j in baby[key]:
                m = lo + i * L - j
                if lo <= m <= lo + width:
                    out.add(m)
        negkey = (G.x, -G.y) if not G.inf else None
        if negkey in baby:
            for j in baby[negkey]:
                m = lo + i * L + j
                if lo <= m <= lo + width:
                    out.add(m)
        G = G + step
        i += 1
    return {m for m in out if P.mul(m).is_infinity()}


def trace_power(t: int, q: int, r: int) -> int:
    """t_r with t_0 = 2, t_1 = t, t_r = t*t_{r-1} - q*t_{r-2}."""
    if r == 0:
        return 2
    a, b = 2, t
    for _ in range(r - 1):
        a, b = b, t * b - q * a
    return b


def curve_order_ext(q: int, t: int, r: int) -> int:
    """#E(F_{q^r}) = q^r + 1 - t_r given #E(F_q) = q + 1 - t."""
    return q**r + 1 - trace_power(t, q, r)


def check_trace(E: Curve, t: int, rng: random.Random, samples: int = 3) -> bool:
    """True iff sampled points are annihilated by q + 1 - t and the
    evidence separates t from -t.

    Tries to find a sample killed by q+1-t but not q+1+t; if every
    sample is killed by both, falls back to exact counting at toy
    scale and reports failure to disambiguate beyond that.
    """
    q = E.field.order
    n_t = q + 1 - t
    n_mt = q + 1 + t
    ambiguous = True
    for _ in range(samples):
        P = random_point(E, rng)
        XP = XPoint.from_point(P)
        if not XP.mul(n_t).is_infinity():
            return False
        if not XP.mul(n_mt).is_infinity():
            ambiguous = False
    if not ambiguous or t == 0:
        return True
    for _ in range(3 * samples):
        P = random_point(E, rng)
        XP = XPoint.from_point(P)
        if not XP.mul(n_t).is_infinity():
            return False
        if not XP.mul(n_mt).is_infinity():
            return True
    if q <= HASSE_BSGS_LIMIT:
        return count_points(E) == n_t
    raise ArithmeticError("could not separate t from -t by sampling")


def point_order(P: Point, multiple: int, factorization: list[tuple[int, int]]) -> int:
    """Exact order of P given a multiple of it and its factorization."""
    order = multiple
    for prime, _ in factorization:
        while order % prime == 0 and P.mul(order // prime).is_infinity():
            order //= prime
    return order


def point_of_exact_order(
    E: Curve,
    group_order: int,
    target: int,
    target_factors: list[tuple[int, int]],
    rng: random.Random,
    budget: int = 40,
):
    """A point of exact order `target`, or None within the retry budget.

    target must divide group_order; target_factors is the factorization
    of target.  Points are sampled, cofactored by group_order/target,
    and checked for exact order with x-only ladders.
    """
    if group_order % target:
        raise ValueError("target does not divide the group order")
    cofactor = group_order // target
    for _ in range(budget):
        P = random_point(E, rng)
        XQ = XPoint.from_point(P).mul(cofactor)
        if XQ.is_infinity():
            continue
        if not XQ.mul(target).is_infinity():
            return None  # group order wrong; no point retrying
        ok = True
        for prime, _ in target_factors:
            if XQ.mul(target // prime).is_infinity():
                ok = False
                break
        if ok:
            return XQ
    return None


# ---------------------------------------------------------------------------
# Division polynomials
# ---------------------------------------------------------------------------


def division_polynomial(E: Curve, n: int) -> Polynomial:
    """psi_n as a polynomial in x alone.

    Uses the standard recurrence with even-index entries stored as the
    cofactor of y (psi_{2m} = y * p_{2m}(x)).  For odd n the returned
    polynomial has degree (n^2 - 1)/2 and leading coefficient n; its
    roots are the x-coordinates of the nonzero n-torsion points.
    """
    W = E if E.c2.is_zero() else E.to_weierstrass()
    if W._divpoly_cache is None:
        W._divpoly_cache = {}
    cache = W._divpoly_cache
    field = W.field
    a, b = W.c4, W.c6
    f = Polynomial(field, [b, a, field.zero, field.one], coerce=False)
    f2 = f * f

    def p(m: int) -> Polynomial:
        if m in cache:
            return cache[m]
        if m == 0:
            r = Polynomial.zero(field)
        elif m in (1, 2):
            r = Polynomial.constant(field, 1 if m == 1 else 2)
        elif m == 3:
            r = Polynomial(field, [-(a * a), 12 * b, 6 * a, field.zero, field(3)])
        elif m == 4:
            r = Polynomial(
                field,
                [
                    -4 * (8 * b * b + a * a * a),
                    -16 * (a * b),
                    -20 * (a * a),
                    80 * b,
                    20 * a,
                    field.zero,
                    field(4),
                ],
            )
        elif m % 2 == 1:
            k = m // 2
            t1 = p(k + 2) * p(k) * p(k) * p(k)
            t2 = p(k - 1) * p(k + 1) * p(k + 1) * p(k + 1)
            if k % 2 == 0:
                r = f2 * t1 - t2
            else:
                r = t1 - f2 * t2
        else:
            k = m // 2
            t1 = p(k + 2) * p(k - 1) * p(k - 1)
            t2 = p(k - 2) * p(k + 1) * p(k + 1)
            r = (p(k) * (t1 - t2)).scale(field(2).inverse())
        cache[m] = r
        return r

    result = p(n)
    if E is not W and not E.c2.is_zero():
        # shift back: roots of psi on E are roots on W shifted by -s
        s = E.weierstrass_shift()
        shift = Polynomial(E.field, [s, E.field.one])
        result = result.evaluate_poly_shift(shift)
    return result


def _evaluate_poly_shift(self: Polynomial, at: Polynomial) -> Polynomial:
    acc = Polynomial.zero(self.field)
    for c in reversed(self.coeffs):
        acc = acc * at + Polynomial.constant(self.field, c)
    return acc


Polynomial.evaluate_poly_shift = _evaluate_poly_shift
