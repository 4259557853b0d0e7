"""Finite fields: prime fields F_p and extensions F_{p^r}.

Elements are immutable and carry a reference to their parent field.
Extension fields use a deterministic modulus (the lexicographically
smallest monic irreducible of the requested degree, coefficients
enumerated from the constant term upward), so two runs agree on the
representation of F_{p^r} without any negotiation.

Every field keeps a running work counter in base-field multiplication
units so callers can compare the cost of two computations.  The
convention: one modular multiplication costs 1, an exponentiation with
e-bit exponent costs 2e, an inversion costs 2*bitlen(p), and extension
field operations charge the schoolbook number of base multiplications.
"""

from __future__ import annotations

import random

__all__ = [
    "PrimeField",
    "ExtField",
    "PrimeFieldElement",
    "ExtFieldElement",
    "build_extension",
    "is_probable_prime",
]

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int, rounds: int = 32) -> bool:
    """Miller-Rabin primality test, deterministic bases plus random rounds."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    def witness(a: int) -> bool:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            return False
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                return False
        return True

    for a in _MR_BASES:
        if witness(a):
            return False
    rng = random.Random(n)
    for _ in range(rounds):
        if witness(rng.randrange(2, n - 1)):
            return False
    return True


# ---------------------------------------------------------------------------
# Dense polynomial kernels over Z/pZ, used internally by ExtField.
# Coefficient lists are constant-term first with no trailing zeros.
# ---------------------------------------------------------------------------


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _ptrim([c % p for c in out])


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv_lead % p
        if c:
            off = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[off + i] = (a[off + i] - c * mi) % p
        a.pop()
    return _ptrim(a)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _ppow_x(e: int, m: list[int], p: int) -> list[int]:
    """x^e mod (m, p) by square and multiply."""
    result = [1]
    base = _pmod([0, 1], m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def _pxgcd(a: list[int], b: list[int], p: int):
    """Returns (g, u) with u*a = g mod b, g monic."""
    r0, r1 = list(a), list(b)
    s0, s1 = [1], []
    while r1:
        # polynomial division step
        q = []
        rem = list(r0)
        dm = len(r1) - 1
        inv_lead = pow(r1[-1], -1, p)
        q = [0] * max(0, len(rem) - dm)
        while len(rem) - 1 >= dm and rem:
            c = rem[-1] * inv_lead % p
            off = len(rem) - 1 - dm
            q[off] = c
            for i, mi in enumerate(r1):
                rem[off + i] = (rem[off + i] - c * mi) % p
            rem.pop()
            _ptrim(rem)
        r0, r1 = r1, _ptrim(rem)
        qs1 = _pmul(q, s1, p) if s1 else []
        new_s = [
            ((s0[i] if i < len(s0) else 0) - (qs1[i] if i < len(qs1) else 0)) % p
            for i in range(max(len(s0), len(qs1)))
        ]
        s0, s1 = s1, _ptrim(new_s)
    if r0:
        inv = pow(r0[-1], -1, p)
        r0 = [c * inv % p for c in r0]
        s0 = [c * inv % p for c in s0]
    return r0, s0


def _is_irreducible(m: list[int], p: int, r: int) -> bool:
    """Rabin irreducibility test for a monic degree-r polynomial mod p."""
    if r == 1:
        return True
    factors = set()
    n = r
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors.add(d)
            n //= d
        d += 1
    if n > 1:
        factors.add(n)
    for s in factors:
        h = _ppow_x(p ** (r // s), m, p)
        # gcd(x^(p^(r/s)) - x, m) must be 1
        g = list(h)
        if len(g) < 2:
            g = g + [0] * (2 - len(g))
        g[1] = (g[1] - 1) % p
        if len(_pgcd(_ptrim(g), m, p)) - 1 != 0:
            return False
    h = _ppow_x(p**r, m, p)
    return h == [0, 1]


# ---------------------------------------------------------------------------
# Prime field
# ---------------------------------------------------------------------------


class PrimeField:
    """The field Z/pZ for a prime p > 3."""

    def __init__(self, p: int, check: bool = True):
        if check:
            if p <= 3:
                raise ValueError(f"prime field needs p > 3, got {p}")
            if not is_probable_prime(p):
                raise ValueError(f"{p} is not prime")
        self.p = p
        self.work = 0
        self._inv_cost = 2 * p.bit_length()
        self.zero = PrimeFieldElement(self, 0)
        self.one = PrimeFieldElement(self, 1)

    @property
    def order(self) -> int:
        return self.p

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def degree(self) -> int:
        return 1

    def base(self) -> "PrimeField":
        return self

    def __call__(self, v) -> "PrimeFieldElement":
        if isinstance(v, PrimeFieldElement):
            if v.field.p != self.p:
                raise ValueError("element from a different field")
            return PrimeFieldElement(self, v.val)
        return PrimeFieldElement(self, v % self.p)

    def random_element(self, rng: random.Random) -> "PrimeFieldElement":
        return PrimeFieldElement(self, rng.randrange(self.p))

    def from_str(self, s: str) -> "PrimeFieldElement":
        return PrimeFieldElement(self, int(s.strip(), 16) % self.p)

    def nonsquare(self) -> "PrimeFieldElement":
        """Deterministic smallest quadratic nonresidue."""
        for v in range(2, self.p):
            e = PrimeFieldElement(self, v)
            if not e.is_square():
                return e
        raise ArithmeticError("no nonsquare found")

    def reset_work(self) -> None:
        self.work = 0

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"F_{self.p}"


class PrimeFieldElement:
    __slots__ = ("field", "val")

    def __init__(self, field: PrimeField, val: int):
        self.field = field
        self.val = val

    def _coerce(self, other):
        if isinstance(other, PrimeFieldElement):
            return other
        if isinstance(other, int):
            return PrimeFieldElement(self.field, other % self.field.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElement(self.field, (self.val + o.val) % self.field.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElement(self.field, (self.val - o.val) % self.field.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElement(self.field, (o.val - self.val) % self.field.p)

    def __neg__(self):
        return PrimeFieldElement(self.field, -self.val % self.field.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        self.field.work += 1
        return PrimeFieldElement(self.field, self.val * o.val % self.field.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, e: int):
        f = self.field
        if e < 0:
            return self.inverse() ** (-e)
        f.work += 2 * max(1, e.bit_length())
        return PrimeFieldElement(f, pow(self.val, e, f.p))

    def inverse(self):
        f = self.field
        if self.val == 0:
            raise ZeroDivisionError("inverse of zero")
        f.work += f._inv_cost
        return PrimeFieldElement(f, pow(self.val, -1, f.p))

    def is_zero(self) -> bool:
        return self.val == 0

    def __bool__(self) -> bool:
        return self.val != 0

    def is_square(self) -> bool:
        if self.val == 0:
            return True
        return self ** ((self.field.p - 1) // 2) == self.field.one

    def sqrt(self):
        """Both square roots, smaller representative first, or None."""
        f = self.field
        if self.val == 0:
            return (f.zero, f.zero)
        if not self.is_square():
            return None
        p = f.p
        if p % 4 == 3:
            s = pow(self.val, (p + 1) // 4, p)
            f.work += 2 * p.bit_length()
        else:
            s = _tonelli_prime(self.val, p, f)
        r1, r2 = sorted((s, p - s))
        return (PrimeFieldElement(f, r1), PrimeFieldElement(f, r2))

    def frobenius(self, k: int = 1):
        return self

    def canonical_key(self):
        return self.val

    def to_str(self) -> str:
        return format(self.val, "x")

    def __int__(self) -> int:
        return self.val

    def __eq__(self, other) -> bool:
        if isinstance(other, PrimeFieldElement):
            return self.val == other.val and self.field.p == other.field.p
        if isinstance(other, int):
            return self.val == other % self.field.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.p, self.val))

    def __repr__(self) -> str:
        return f"{self.val}"


def _tonelli_prime(a: int, p: int, field: PrimeField) -> int:
    """Tonelli-Shanks for p = 1 mod 4; a must be a nonzero square."""
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    field.work += 6 * p.bit_length()
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t * t % p, 1
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
        field.work += m + 4
    return r


# ---------------------------------------------------------------------------
# Extension field
# ---------------------------------------------------------------------------


class ExtField:
    """F_{p^r} as F_p[x]/(m) with the deterministic smallest modulus."""

    def __init__(self, base: PrimeField, r: int, modulus: list[int]):
        self.base_field = base
        self.p = base.p
        self.r = r
        self.modulus = tuple(modulus)
        self.zero = ExtFieldElement(self, ())
        self.one = ExtFieldElement(self, (1,))
        self.gen = ExtFieldElement(self, (0, 1)) if r > 1 else self.one

    @property
    def order(self) -> int:
        return self.p**self.r

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def degree(self) -> int:
        return self.r

    @property
    def work(self) -> int:
        return self.base_field.work

    def base(self) -> PrimeField:
        return self.base_field

    def reset_work(self) -> None:
        self.base_field.reset_work()

    def _charge(self, units: int) -> None:
        self.base_field.work += units

    def __call__(self, v) -> "ExtFieldElement":
        if isinstance(v, ExtFieldElement):
            if v.field is self or (v.field.p == self.p and v.field.modulus == self.modulus):
                return ExtFieldElement(self, v.coeffs)
            raise ValueError("element from a different field")
        if isinstance(v, PrimeFieldElement):
            if v.field.p != self.p:
                raise ValueError("element from a different field")
            return ExtFieldElement(self, (v.val,) if v.val else ())
        if isinstance(v, int):
            v %= self.p
            return ExtFieldElement(self, (v,) if v else ())
        if isinstance(v, (tuple, list)):
            c = [int(x) % self.p for x in v]
            while c and c[-1] == 0:
                c.pop()
            if len(c) > self.r:
                c = _pmod(c, list(self.modulus), self.p)
            return ExtFieldElement(self, tuple(c))
        raise TypeError(f"cannot coerce {v!r}")

    def random_element(self, rng: random.Random) -> "ExtFieldElement":
        return self(tuple(rng.randrange(self.p) for _ in range(self.r)))

    def from_str(self, s: str) -> "ExtFieldElement":
        return self(tuple(int(part.strip(), 16) for part in s.split(",")))

    def element_in_base(self, e: "ExtFieldElement"):
        """The base-field value of e, or None if e is not in F_p."""
        if len(e.coeffs) > 1:
            return None
        return self.base_field(e.coeffs[0] if e.coeffs else 0)

    def nonsquare(self) -> "ExtFieldElement":
        """Deterministic smallest non-square in canonical enumeration order."""
        n = 1
        while True:
            coeffs, k = [], n
            while k:
                coeffs.append(k % self.p)
                k //= self.p
            e = self(tuple(coeffs))
            if not e.is_square():
                return e
            n += 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExtField)
            and other.p == self.p
            and other.modulus == self.modulus
        )

    def __hash__(self) -> int:
        return hash(("ExtField", self.p, self.modulus))

    def __repr__(self) -> str:
        return f"F_{self.p}^{self.r}"


class ExtFieldElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: ExtField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, ExtFieldElement):
            return other
        if isinstance(other, (int, PrimeFieldElement)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        a, b = self.coeffs, o.coeffs
        n = max(len(a), len(b))
        c = [( (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) ) % p for i in range(n)]
        while c and c[-1] == 0:
            c.pop()
        return ExtFieldElement(self.field, tuple(c))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __neg__(self):
        p = self.field.p
        return ExtFieldElement(self.field, tuple(-c % p for c in self.coeffs))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        f = self.field
        if not self.coeffs or not o.coeffs:
            return f.zero
        f._charge(len(self.coeffs) * len(o.coeffs))
        prod = _pmul(list(self.coeffs), list(o.coeffs), f.p)
        if len(prod) > f.r:
            f._charge((len(prod) - f.r) * f.r)
            prod = _pmod(prod, list(f.modulus), f.p)
        return ExtFieldElement(f, tuple(prod))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, e: int):
        f = self.field
        if e < 0:
            return self.inverse() ** (-e)
        result, base = f.one, self
        f._charge(2 * max(1, e.bit_length()) * f.r * f.r)
        ee = e
        while ee:
            if ee & 1:
                result = _mul_nocharge(result, base)
            base = _mul_nocharge(base, base)
            ee >>= 1
        return result

    def inverse(self):
        f = self.field
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero")
        f._charge(4 * f.r * f.r + f.base_field._inv_cost)
        g, u = _pxgcd(list(self.coeffs), list(f.modulus), f.p)
        if len(g) != 1:
            raise ZeroDivisionError("modulus not coprime; field is corrupt")
        return ExtFieldElement(f, tuple(_pmod(u, list(f.modulus), f.p)))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_square(self) -> bool:
        if not self.coeffs:
            return True
        return self ** ((self.field.order - 1) // 2) == self.field.one

    def sqrt(self):
        """Both square roots, smaller canonical key first, or None."""
        f = self.field
        if not self.coeffs:
            return (f.zero, f.zero)
        if not self.is_square():
            return None
        q = f.order
        if q % 4 == 3:
            s = self ** ((q + 1) // 4)
        else:
            s = _tonelli_generic(self, f)
        r1, r2 = sorted((s, -s), key=lambda e: e.canonical_key())
        return (r1, r2)

    def frobenius(self, k: int = 1):
        return self ** (self.field.p ** (k % self.field.r if self.field.r > 1 else 1))

    def canonical_key(self):
        c = self.coeffs
        return tuple(c[i] if i < len(c) else 0 for i in range(self.field.r))

    def to_str(self) -> str:
        c = self.canonical_key()
        return ",".join(format(v, "x") for v in c)

    def __eq__(self, other) -> bool:
        if isinstance(other, ExtFieldElement):
            return self.coeffs == other.coeffs and self.field.p == other.field.p
        if isinstance(other, (int, PrimeFieldElement)):
            o = self._coerce(other)
            return self.coeffs == o.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.modulus, self.coeffs))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return "(" + ",".join(str(c) for c in self.coeffs) + ")"


def _mul_nocharge(a: ExtFieldElement, b: ExtFieldElement) -> ExtFieldElement:
    f = a.field
    if not a.coeffs or not b.coeffs:
        return f.zero
    prod = _pmul(list(a.coeffs), list(b.coeffs), f.p)
    if len(prod) > f.r:
        prod = _pmod(prod, list(f.modulus), f.p)
    return ExtFieldElement(f, tuple(prod))


def _tonelli_generic(a: ExtFieldElement, f: ExtField) -> ExtFieldElement:
    q = f.order
    m0, s = q - 1, 0
    while m0 % 2 == 0:
        m0 //= 2
        s += 1
    z = f.nonsquare()
    m, c, t, r = s, z**m0, a**m0, a ** ((m0 + 1) // 2)
    while t != f.one:
        t2, i = t * t, 1
        while t2 != f.one:
            t2 = t2 * t2
            i += 1
        b = c ** (1 << (m - i - 1))
        m, c, t, r = i, b * b, t * b * b, r * b
    return r


def build_extension(field: PrimeField, r: int) -> ExtField | PrimeField:
    """F_{p^r} with the deterministic lexicographically smallest modulus.

    Degree 1 returns the base field itself.  The modulus is found by
    counting n = 0, 1, 2, ... and mapping n to the non-leading
    coefficient vector in base p (constant term = least significant
    digit), taking the first monic x^r + ... that is irreducible.
    """
    if r < 1:
        raise ValueError("extension degree must be >= 1")
    if r == 1:
        return field
    p = field.p
    n = 0
    while True:
        coeffs, k = [0] * r, n
        i = 0
        while k:
            coeffs[i] = k % p
            k //= p
            i += 1
        m = coeffs + [1]
        if _is_irreducible(m, p, r):
            return ExtField(field, r, m)
        n += 1
