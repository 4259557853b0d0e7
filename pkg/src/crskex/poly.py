"""Dense univariate polynomial arithmetic over the fields in ff.

Coefficients are stored constant term first with trailing zeros
stripped, so the zero polynomial has an empty coefficient tuple and
degree -1.  gcds are returned monic.  Root finding uses the standard
gcd with x^|F| - x followed by randomized Cantor-Zassenhaus splitting;
all randomness comes from a caller-supplied random.Random.

The module also implements arithmetic on symbolic points of an
elliptic curve y^2 = f(x) in the quotient ring F[x]/(K(x)), which is
how Frobenius eigenvalues are matched against candidate isogeny
kernels.  A point is a pair (a(x), b(x)*y); inverting a denominator
that shares a factor with K is not an error, the factor is returned to
the caller, who may retry the computation modulo the factor.
"""

from __future__ import annotations

import random

KARATSUBA_CUTOFF = 48  # schoolbook below this many coefficients; tuning knob


class Polynomial:
    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs, coerce: bool = True):
        if coerce:
            cs = [field(c) for c in coeffs]
        else:
            cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(field) -> "Polynomial":
        return Polynomial(field, (), coerce=False)

    @staticmethod
    def one(field) -> "Polynomial":
        return Polynomial(field, (field.one,), coerce=False)

    @staticmethod
    def x(field) -> "Polynomial":
        return Polynomial(field, (field.zero, field.one), coerce=False)

    @staticmethod
    def constant(field, c) -> "Polynomial":
        return Polynomial(field, (field(c),))

    @staticmethod
    def from_roots(field, roots) -> "Polynomial":
        out = Polynomial.one(field)
        for r in roots:
            out = out * Polynomial(field, (-field(r), field.one), coerce=False)
        return out

    # -- basic structure ----------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self):
        if not self.coeffs:
            return self.field.zero
        return self.coeffs[-1]

    def __getitem__(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        if lead == self.field.one:
            return self
        inv = lead.inverse()
        return Polynomial(self.field, [c * inv for c in self.coeffs], coerce=False)

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial(self.field, out, coerce=False)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.field, [-c for c in self.coeffs], coerce=False)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial.zero(self.field)
        out = _mul_list(list(a), list(b), self.field)
        return Polynomial(self.field, out, coerce=False)

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = self.field(c)
        if c.is_zero():
            return Polynomial.zero(self.field)
        return Polynomial(self.field, [a * c for a in self.coeffs], coerce=False)

    def shift(self, k: int) -> "Polynomial":
        """Multiply by x^k."""
        if self.is_zero():
            return self
        return Polynomial(
            self.field, (self.field.zero,) * k + self.coeffs, coerce=False
        )

    def divmod(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.degree < other.degree:
            return Polynomial.zero(self.field), self
        field = self.field
        rem = list(self.coeffs)
        d = other.degree
        inv_lead = other.leading().inverse()
        q = [field.zero] * (len(rem) - d)
        oc = other.coeffs
        for i in range(len(rem) - d - 1, -1, -1):
            c = rem[i + d] * inv_lead
            if not c.is_zero():
                q[i] = c
                for k in range(d + 1):
                    rem[i + k] = rem[i + k] - c * oc[k]
        return (
            Polynomial(field, q, coerce=False),
            Polynomial(field, rem[:d], coerce=False),
        )

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[1]

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("division is not exact")
        return q

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def derivative(self) -> "Polynomial":
        return Polynomial(
            self.field,
            [self.coeffs[i] * i for i in range(1, len(self.coeffs))],
        )

    def evaluate(self, x):
        """Horner evaluation; x may live in an extension of the base field."""
        if not self.coeffs:
            try:
                return x.field.zero
            except AttributeError:
                return self.field.zero
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        return acc

    def pow_mod(self, e: int, modulus: "Polynomial") -> "Polynomial":
        result = Polynomial.one(self.field)
        base = self % modulus
        while e:
            if e & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return result

    def map_coeffs(self, target_field, embed) -> "Polynomial":
        """New polynomial over target_field with embed applied per coefficient."""
        return Polynomial(target_field, [embed(c) for c in self.coeffs])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.coeffs == other.coeffs
            and self.field == other.field
        )

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if i == 0:
                parts.append(f"{c}")
            elif i == 1:
                parts.append(f"{c}*x")
            else:
                parts.append(f"{c}*x^{i}")
        return " + ".join(parts)


def _mul_list(a: list, b: list, field) -> list:
    if min(len(a), len(b)) < KARATSUBA_CUTOFF:
        zero = field.zero
        out = [zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai.is_zero():
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return out
    n = max(len(a), len(b))
    h = n // 2
    a0, a1 = a[:h], a[h:]
    b0, b1 = b[:h], b[h:]
    zero = field.zero

    def add_lists(x, y):
        if len(x) < len(y):
            x, y = y, x
        out = list(x)
        for i, c in enumerate(y):
            out[i] = out[i] + c
        return out

    z0 = _mul_list(a0, b0, field) if a0 and b0 else []
    z2 = _mul_list(a1, b1, field) if a1 and b1 else []
    za, zb = add_lists(a0, a1), add_lists(b0, b1)
    z1 = _mul_list(za, zb, field) if za and zb else []
    for i, c in enumerate(z0):
        if i < len(z1):
            z1[i] = z1[i] - c
    for i, c in enumerate(z2):
        if i < len(z1):
            z1[i] = z1[i] - c
    out = [zero] * (len(a) + len(b) - 1)
    for i, c in enumerate(z0):
        out[i] = out[i] + c
    for i, c in enumerate(z1):
        if not c.is_zero():
            out[i + h] = out[i + h] + c
    for i, c in enumerate(z2):
        if not c.is_zero():
            out[i + 2 * h] = out[i + 2 * h] + c
    return out


# ---------------------------------------------------------------------------
# Root finding and equal degree factorization
# ---------------------------------------------------------------------------


def roots_in_field(f: Polynomial, rng: random.Random) -> list:
    """Distinct roots of f in its coefficient field, sorted canonically.

    Computes gcd(f, x^|F| - x) to isolate the part that splits into
    rational linear factors, then splits it by Cantor-Zassenhaus.
    """
    field = f.field
    if f.is_zero():
        raise ValueError("zero polynomial has every root")
    if f.degree == 0:
        return []
    xq = Polynomial.x(field).pow_mod(field.order, f)
    linear_part = f.gcd(xq - Polynomial.x(field))
    roots = []
    _collect_linear_roots(linear_part, rng, roots)
    roots.sort(key=lambda r: r.canonical_key())
    return roots


def roots_with_multiplicity(f: Polynomial, rng: random.Random) -> list:
    """[(root, multiplicity)] pairs, sorted canonically by root."""
    out = []
    for r in roots_in_field(f, rng):
        lin = Polynomial(f.field, [-r, f.field.one])
        m, g = 0, f
        while True:
            q, rem = g.divmod(lin)
            if not rem.is_zero():
                break
            m, g = m + 1, q
        out.append((r, m))
    return out


def _collect_linear_roots(g: Polynomial, rng: random.Random, out: list) -> None:
    field = g.field
    d = g.degree
    if d <= 0:
        return
    if d == 1:
        g = g.monic()
        out.append(-g.coeffs[0])
        return
    if d == 2:
        # solve directly by the quadratic formula
        g = g.monic()
        b, c = g.coeffs[1], g.coeffs[0]
        disc = b * b - 4 * c
        rts = disc.sqrt()
        if rts is None:
            raise ArithmeticError("split part of polynomial failed to split")
        half = field(2).inverse()
        out.append((-b + rts[0]) * half)
        out.append((-b + rts[1]) * half)
        return
    q = field.order
    while True:
        u = Polynomial(
            field, [field.random_element(rng) for _ in range(d)] + [field.one]
        )
        h = u.pow_mod((q - 1) // 2, g) - Polynomial.one(field)
        w = g.gcd(h)
        if 0 < w.degree < d:
            _collect_linear_roots(w, rng, out)
            _collect_linear_roots(g.exact_div(w), rng, out)
            return


def equal_degree_factors(f: Polynomial, d: int, rng: random.Random) -> list:
    """Monic irreducible factors of f, where f is squarefree with all
    irreducible factors of degree exactly d."""
    field = f.field
    f = f.monic()
    if f.degree == d:
        return [f]
    if f.degree % d:
        raise ValueError("degree mismatch in equal degree factorization")
    q = field.order
    exponent = (q**d - 1) // 2
    work = [f]
    done = []
    while work:
        g = work.pop()
        if g.degree == d:
            done.append(g)
            continue
        while True:
            u = Polynomial(
                field,
                [field.random_element(rng) for _ in range(g.degree)] + [field.one],
            )
            h = u.pow_mod(exponent, g) - Polynomial.one(field)
            w = g.gcd(h)
            if 0 < w.degree < g.degree:
                work.append(w)
                work.append(g.exact_div(w))
                break
    done.sort(key=lambda h: tuple(c.canonical_key() for c in h.coeffs))
    return done


def squarefree_part(f: Polynomial) -> Polynomial:
    """f divided by gcd(f, f'), monic: each irreducible factor once."""
    g = f.gcd(f.derivative())
    f = f.monic()
    if g.degree <= 0:
        return f
    return f.exact_div(g)


# ---------------------------------------------------------------------------
# Symbolic points on y^2 = f(x) in F[x]/(K)
# ---------------------------------------------------------------------------


class FactorFound(Exception):
    """A denominator shared a factor with the quotient modulus K."""

    def __init__(self, factor: Polynomial):
        super().__init__(f"nontrivial factor of degree {factor.degree}")
        self.factor = factor


class QuotientPoint:
    """(a(x), b(x)*y) on y^2 = f(x), coordinates reduced mod K; or infinity."""

    __slots__ = ("a", "b", "inf")

    def __init__(self, a=None, b=None, inf: bool = False):
        self.a = a
        self.b = b
        self.inf = inf

    @staticmethod
    def infinity() -> "QuotientPoint":
        return QuotientPoint(inf=True)

    @staticmethod
    def generic(fE: Polynomial, K: Polynomial) -> "QuotientPoint":
        """The tautological point (x, y) reduced mod K."""
        return QuotientPoint(Polynomial.x(K.field) % K, Polynomial.one(K.field))

    def __eq__(self, other) -> bool:
        if self.inf or other.inf:
            return self.inf and other.inf
        return self.a == other.a and self.b == other.b

    def __repr__(self) -> str:
        return "Inf" if self.inf else f"({self.a}; ({self.b})*y)"


def _inv_mod(v: Polynomial, K: Polynomial) -> Polynomial:
    """Inverse of v mod K, raising FactorFound on a shared factor."""
    field = K.field
    r0, r1 = K, v % K
    s0, s1 = Polynomial.zero(field), Polynomial.one(field)
    if r1.is_zero():
        raise FactorFound(K.monic())
    while True:
        q, r = r0.divmod(r1)
        if r.is_zero():
            break
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
    if r1.degree > 0:
        raise FactorFound(r1.monic())
    return (s1 * r1.coeffs[0].inverse()) % K


def quotient_add(
    P: QuotientPoint, Q: QuotientPoint, fE: Polynomial, K: Polynomial
) -> QuotientPoint:
    if P.inf:
        return Q
    if Q.inf:
        return P
    d = (P.a - Q.a) % K
    if d.is_zero():
        s = (P.b + Q.b) % K
        if s.is_zero():
            return QuotientPoint.infinity()
        diff = (P.b - Q.b) % K
        if diff.is_zero():
            return quotient_double(P, fE, K)
        # same x but mixed signs of y across the factors of K
        g = K.gcd(diff)
        raise FactorFound(g if 0 < g.degree < K.degree else K.gcd(s))
    w = ((P.b - Q.b) * _inv_mod(d, K)) % K
    c2 = fE[2] if fE.degree >= 2 else fE.field.zero
    x3 = (w * w * fE - Polynomial.constant(fE.field, c2) - P.a - Q.a) % K
    y3 = (w * (P.a - x3) - P.b) % K
    return QuotientPoint(x3, y3)


def quotient_double(P: QuotientPoint, fE: Polynomial, K: Polynomial) -> QuotientPoint:
    if P.inf:
        return P
    field = fE.field
    den = (2 * P.b * fE) % K
    if den.is_zero():
        return QuotientPoint.infinity()
    w = (fE.derivative().evaluate_poly_mod(P.a, K) * _inv_mod(den, K)) % K
    c2 = fE[2] if fE.degree >= 2 else field.zero
    x3 = (w * w * fE - Polynomial.constant(field, c2) - P.a - P.a) % K
    y3 = (w * (P.a - x3) - P.b) % K
    return QuotientPoint(x3, y3)


def _evaluate_poly_mod(self: Polynomial, at: Polynomial, K: Polynomial) -> Polynomial:
    """self(at(x)) mod K by Horner."""
    acc = Polynomial.zero(self.field)
    for c in reversed(self.coeffs):
        acc = (acc * at) % K + Polynomial.constant(self.field, c)
    return acc % K


Polynomial.evaluate_poly_mod = _evaluate_poly_mod


def scalar_mul_in_quotient(
    P: QuotientPoint, n: int, fE: Polynomial, K: Polynomial
):
    """[n]P in E(F[x,y] / (y^2 - fE(x), K(x))).

    Returns the resulting QuotientPoint, or, when some denominator is
    not invertible mod K, the discovered nontrivial factor of K as a
    Polynomial (the caller may retry the computation modulo it).
    """
    try:
        if n < 0:
            P = QuotientPoint(P.a, (-P.b) % K) if not P.inf else P
            n = -n
        result = QuotientPoint.infinity()
        addend = P
        while n:
            if n & 1:
                result = quotient_add(result, addend, fE, K)
            n >>= 1
            if n:
                addend = quotient_double(addend, fE, K)
        return result
    except FactorFound as exc:
        return exc.factor


def frobenius_in_quotient(fE: Polynomial, K: Polynomial) -> QuotientPoint:
    """The image of the tautological point (x, y) under x -> x^q, y -> y^q."""
    field = fE.field
    q = field.order
    a = Polynomial.x(field).pow_mod(q, K)
    b = fE.pow_mod((q - 1) // 2, K)
    return QuotientPoint(a, b)


# x-only ladder in the quotient ring: projective (X : Z) with polynomial
# coordinates, no inversions.  Only valid for fE = x^3 + a x + b.


def xz_ladder_in_quotient(n: int, fE: Polynomial, K: Polynomial):
    """(X : Z) of [n](x, -) on y^2 = x^3 + ax + b, coordinates mod K.

    Montgomery ladder with the Brier-Joye x-only Weierstrass formulas;
    the difference point is the tautological (x : 1) throughout, so no
    inversions occur and no FactorFound can arise on this path.
    """
    if fE.degree != 3 or not fE[2].is_zero():
        raise ValueError("x-only quotient ladder needs short Weierstrass form")
    field = fE.field
    a_c = fE[1]
    b_c = fE[0]
    xP = Polynomial.x(field) % K
    one = Polynomial.one(field)

    def xdbl(X, Z):
        XX = (X * X) % K
        ZZ = (Z * Z) % K
        ZZZ = (ZZ * Z) % K
        t = (XX - ZZ.scale(a_c)) % K
        X2 = ((t * t) % K - ((X * ZZZ) % K).scale(8 * b_c)) % K
        inner = ((XX * X) % K + ((X * ZZ) % K).scale(a_c) + ZZZ.scale(b_c)) % K
        Z2 = ((Z * inner) % K).scale(4)
        return X2, Z2

    def xadd(X1, Z1, X2, Z2):
        A = (X1 * X2) % K
        B = (Z1 * Z2) % K
        C = (X1 * Z2) % K
        D = (X2 * Z1) % K
        t = (A - B.scale(a_c)) % K
        X3 = ((t * t) % K - ((B * (C + D)) % K).scale(4 * b_c)) % K
        u = (C - D) % K
        Z3 = (((u * u) % K) * xP) % K
        return X3, Z3

    if n < 0:
        n = -n  # x([n]P) = x([-n]P)
    if n == 0:
        return one, Polynomial.zero(field)
    R0 = (xP, one)
    R1 = xdbl(*R0)
    for bit in bin(n)[3:]:
        if bit == "1":
            R0 = xadd(R1[0], R1[1], R0[0], R0[1])
            R1 = xdbl(*R1)
        else:
            R1 = xadd(R0[0], R0[1], R1[0], R1[1])
            R0 = xdbl(*R0)
    return R0
