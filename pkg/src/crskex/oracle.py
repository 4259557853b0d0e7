"""Brute-force ground truth for small instances.

Class numbers come from an exhaustive sweep over reduced binary
quadratic forms, ideal-class orders from Gauss composition, and orbit
facts from literal closure of a starting j-invariant under walk steps.
Everything here trades speed for independence: the only shared code
with the walk implementation is the step primitive that orbit closure
deliberately exercises.
"""

from __future__ import annotations

import math
import random

ENUMERATION_BOUND = 10**8
ORBIT_CLASS_BOUND = 10**4
ORBIT_FIELD_BOUND = 2**20


class QuadForm:
    """Positive definite integral binary quadratic form a x^2 + b xy + c y^2."""

    __slots__ = ("a", "b", "c")

    def __init__(self, a: int, b: int, c: int):
        if a <= 0 or b * b - 4 * a * c >= 0:
            raise ValueError(f"({a},{b},{c}) is not positive definite")
        self.a, self.b, self.c = a, b, c

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @staticmethod
    def principal(disc: int) -> "QuadForm":
        if disc % 4 == 0:
            return QuadForm(1, 0, -disc // 4)
        if disc % 4 == 1:
            return QuadForm(1, 1, (1 - disc) // 4)
        raise ValueError(f"{disc} is not a discriminant")

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if b < 0 and (abs(b) == a or a == c):
            return False
        return True

    def reduced(self) -> "QuadForm":
        a, b, c = self.a, self.b, self.c
        disc = self.discriminant
        while True:
            if a > c:
                a, b, c = c, -b, a
                continue
            if b > a or b <= -a:
                # shift b into (-a, a] preserving the class
                b = b % (2 * a)
                if b > a:
                    b -= 2 * a
                c = (b * b - disc) // (4 * a)
                continue
            break
        if b < 0 and (a == c or b == -a):
            b = -b
        return QuadForm(a, b, c)

    def inverse(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c).reduced()

    def compose(self, other: "QuadForm") -> "QuadForm":
        """Gauss composition, reduced.

        With s = (b1+b2)/2, g = gcd(a1, a2, s) = u a1 + v a2 + w s, the
        product ideal is g * [a1 a2 / g^2, (b3 + sqrt(D))/2] where
        b3 = b2 + 2 (a2/g) (v (b1-b2)/2 - w c2).
        """
        disc = self.discriminant
        if other.discriminant != disc:
            raise ValueError("cannot compose forms of different discriminants")
        a1, b1, _ = self.a, self.b, self.c
        a2, b2, c2 = other.a, other.b, other.c
        s = (b1 + b2) // 2
        n = (b1 - b2) // 2
        g1, u1, v1 = _xgcd(a1, a2)
        g, x, w = _xgcd(g1, s)
        v = x * v1
        a3 = (a1 * a2) // (g * g)
        b3 = (b2 + 2 * (a2 // g) * (v * n - w * c2)) % (2 * a3)
        c3 = (b3 * b3 - disc) // (4 * a3)
        return QuadForm(a3, b3, c3).reduced()

    def __pow__(self, e: int) -> "QuadForm":
        if e < 0:
            return self.inverse() ** (-e)
        out = QuadForm.principal(self.discriminant)
        base = self.reduced()
        while e:
            if e & 1:
                out = out.compose(base)
            base = base.compose(base)
            e >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuadForm):
            return NotImplemented
        f, g = self.reduced(), other.reduced()
        return (f.a, f.b, f.c) == (g.a, g.b, g.c)

    def __hash__(self) -> int:
        f = self.reduced()
        return hash((f.a, f.b, f.c))

    def __repr__(self) -> str:
        return f"QuadForm({self.a}, {self.b}, {self.c})"


def _xgcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def reduced_forms(disc: int) -> list:
    """All reduced forms of discriminant disc, by exhaustive sweep."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError(f"{disc} is not a negative discriminant")
    if -disc > ENUMERATION_BOUND:
        raise ValueError(f"|{disc}| exceeds the enumeration bound {ENUMERATION_BOUND}")
    out = []
    bmax = math.isqrt(-disc // 3)
    for b in range(abs(disc) % 2, bmax + 1, 2):
        m = (b * b - disc) // 4  # = a*c
        a = max(b, 1)
        while a * a <= m:
            if m % a == 0:
                c = m // a
                if math.gcd(a, b, c) == 1:  # class group = primitive classes
                    out.append(QuadForm(a, b, c))
                    if b != 0 and a != b and a != c:
                        out.append(QuadForm(a, -b, c))
            a += 1
    return out


def class_number(disc: int) -> int:
    return len(reduced_forms(disc))


def form_above(ell: int, disc: int) -> QuadForm:
    """A form (ell, b, c) of discriminant disc, if ell splits."""
    for b in range(2 * ell):
        if (b * b - disc) % (4 * ell) == 0:
            return QuadForm(ell, b, (b * b - disc) // (4 * ell))
    raise ValueError(f"{ell} is not represented: no square root of {disc} mod {4 * ell}")


def form_class_order(ell: int, disc: int) -> int:
    """Order of the class of a prime form above ell in the class group."""
    f = form_above(ell, disc).reduced()
    principal = QuadForm.principal(disc).reduced()
    acc = f
    order = 1
    while acc != principal:
        acc = acc.compose(f)
        order += 1
        if order > ENUMERATION_BOUND:
            raise RuntimeError("runaway composition; form arithmetic is broken")
    return order


def enumerate_orbit(params, rng: random.Random) -> dict:
    """Closure of j(E0) under every listed step, with per-ell cycles.

    Returns {"orbit": set of j, "cycles": {ell: list of cycles}} where
    each cycle is the list of j-invariants visited by repeated steps in
    the positive direction of that ell.
    """
    from .isogeny import walk_step_j

    if params.field.order > ORBIT_FIELD_BOUND:
        raise ValueError(f"field order exceeds the orbit bound 2^20")
    if class_number(params.delta_k) > ORBIT_CLASS_BOUND:
        raise ValueError(f"class number exceeds the orbit bound 10^4")
    directions = [(s.ell, 1) for s in params.steps] + [(s.ell, -1) for s in params.steps]
    start = params.e0_j()
    orbit = {start.canonical_key(): start}
    frontier = [start]
    while frontier:
        j = frontier.pop()
        for ell, sign in directions:
            nxt = walk_step_j(params, j, ell, sign, rng)
            key = nxt.canonical_key()
            if key not in orbit:
                orbit[key] = nxt
                frontier.append(nxt)
    cycles = {}
    for step in params.steps:
        ell = step.ell
        seen = set()
        ell_cycles = []
        for key in sorted(orbit):
            if key in seen:
                continue
            cycle = []
            j = orbit[key]
            while True:
                k = j.canonical_key()
                if k in seen:
                    break
                seen.add(k)
                cycle.append(j)
                j = walk_step_j(params, j, ell, 1, rng)
            ell_cycles.append(cycle)
        cycles[ell] = ell_cycles
    return {"orbit": set(orbit), "cycles": cycles}


def verify_params(params, rng: random.Random) -> dict:
    """Certify a toy parameter set against the form-class ground truth."""
    report = {"checks": [], "ok": True}

    def check(name, ok, detail=""):
        report["checks"].append((name, bool(ok), detail))
        if not ok:
            report["ok"] = False

    data = enumerate_orbit(params, rng)
    orbit = data["orbit"]
    h = class_number(params.delta_k)
    report["orbit_size"] = len(orbit)
    report["class_number"] = h
    check(
        "orbit size = class number",
        len(orbit) == h,
        f"orbit {len(orbit)}, h({params.delta_k}) = {h}",
    )
    for step in params.steps:
        lengths = sorted(len(c) for c in data["cycles"][step.ell])
        want = form_class_order(step.ell, params.delta_k)
        check(
            f"ell={step.ell} cycle length = form class order",
            all(n == want for n in lengths),
            f"cycles {lengths}, form order {want}",
        )
        check(
            f"ell={step.ell} cycles cover the orbit",
            sum(lengths) == len(orbit),
            f"sum {sum(lengths)} vs orbit {len(orbit)}",
        )
    return report


def format_report(report: dict) -> str:
    lines = []
    for name, ok, detail in report["checks"]:
        mark = "ok" if ok else "FAIL"
        lines.append(f"[{mark:>4}] {name}" + (f": {detail}" if detail else ""))
    lines.append("all checks passed" if report["ok"] else "verification FAILED")
    return "\n".join(lines)
