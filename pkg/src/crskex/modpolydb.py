"""Classical modular polynomial database.

Files store one integer coefficient per line as "[a,b] c" with a >= b;
the pair encodes c*(X^a Y^b + X^b Y^a) when a > b and c*X^a Y^a on the
diagonal, so symmetry is a property of the container, not the parser.
Zero coefficients are omitted and '#' starts a comment.  A manifest
lists shipped levels with content hashes.

Specializing Y = j(E) is the workhorse of every Elkies step, so the
mod-p reduction of the integer coefficients is cached per (level, field
order) behind a lock; repeated walks over the same field only pay for
the power table of j.
"""

from __future__ import annotations

import hashlib
import os
import threading
from pathlib import Path

from .poly import Polynomial


class ModPolyError(ValueError):
    pass


class ModularPolynomial:
    """Symmetric integer polynomial Phi_ell(X, Y) of degree ell+1."""

    __slots__ = ("level", "coefficients")

    def __init__(self, level: int, coefficients: dict):
        self.level = level
        self.coefficients = dict(coefficients)
        self._validate()

    def coefficient(self, a: int, b: int) -> int:
        if a < b:
            a, b = b, a
        return self.coefficients.get((a, b), 0)

    def _validate(self) -> None:
        ell = self.level
        for (a, b), c in self.coefficients.items():
            if a < b:
                raise ModPolyError(f"stored pair ({a},{b}) violates a >= b")
            if a > ell + 1 or b > ell + 1:
                raise ModPolyError(
                    f"exponent pair ({a},{b}) exceeds degree {ell + 1} for level {ell}"
                )
        if self.coefficient(ell + 1, 0) != 1:
            raise ModPolyError(
                f"level {ell} polynomial is not monic of degree {ell + 1} in X"
            )
        # Kronecker congruence: Phi_ell = (X^ell - Y)(X - Y^ell) mod ell
        expected = {
            (ell + 1, 0): 1 % ell,
            (ell, ell): -1 % ell,
            (1, 1): -1 % ell,
        }
        for key, c in self.coefficients.items():
            if c % ell != expected.get(key, 0):
                raise ModPolyError(
                    f"level {ell} fails the Kronecker congruence at {key}"
                )
        for key, want in expected.items():
            if self.coefficients.get(key, 0) % ell != want:
                raise ModPolyError(
                    f"level {ell} fails the Kronecker congruence at {key}"
                )

    def serialize(self) -> bytes:
        lines = []
        for (a, b) in sorted(self.coefficients, reverse=True):
            c = self.coefficients[(a, b)]
            if c:
                lines.append(f"[{a},{b}] {c}")
        return ("\n".join(lines) + "\n").encode()

    def __repr__(self) -> str:
        return f"ModularPolynomial(level={self.level}, terms={len(self.coefficients)})"


def load_modular_polynomial(level: int, source) -> ModularPolynomial:
    """Parse the "[a,b] c" line format from bytes or a binary stream."""
    if hasattr(source, "read"):
        data = source.read()
    else:
        data = source
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    coefficients = {}
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, _, tail = line.partition("]")
            if not head.startswith("[") or not tail:
                raise ValueError
            a_s, _, b_s = head[1:].partition(",")
            a, b = int(a_s), int(b_s)
            c = int(tail.strip())
        except ValueError:
            raise ModPolyError(f"line {lineno}: cannot parse {raw!r}") from None
        if a < 0 or b < 0:
            raise ModPolyError(f"line {lineno}: negative exponent in {raw!r}")
        key = (a, b) if a >= b else (b, a)
        if key in coefficients:
            raise ModPolyError(f"line {lineno}: duplicate pair {key}")
        if c:
            coefficients[key] = c
    return ModularPolynomial(level, coefficients)


_DATA_ENV = "CRSKEX_MODPOLY_DIR"


def _data_dir(data_dir=None) -> Path:
    if data_dir is not None:
        return Path(data_dir)
    env = os.environ.get(_DATA_ENV)
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "data" / "modpoly"


def available_levels(data_dir=None) -> list:
    base = _data_dir(data_dir)
    out = []
    for path in base.glob("phi*.txt"):
        stem = path.stem[3:]
        if stem.isdigit():
            out.append(int(stem))
    return sorted(out)


def verify_manifest(data_dir=None) -> dict:
    """Check every manifest entry's sha256; returns {level: path}."""
    base = _data_dir(data_dir)
    manifest = base / "manifest.txt"
    if not manifest.exists():
        raise ModPolyError(f"no manifest.txt in {base}")
    out = {}
    for lineno, raw in enumerate(manifest.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ModPolyError(f"manifest line {lineno}: expected 'level hash file'")
        level, digest, name = int(parts[0]), parts[1], parts[2]
        path = base / name
        if not path.exists():
            raise ModPolyError(f"manifest entry {name} missing from {base}")
        actual = hashlib.sha256(path.read_bytes()).hexdigest()
        if actual != digest:
            raise ModPolyError(f"{name}: sha256 mismatch")
        out[level] = path
    return out


_loaded: dict = {}
_reduced: dict = {}
_lock = threading.Lock()


def modular_polynomial(level: int, data_dir=None) -> ModularPolynomial:
    """Load a shipped level (cached process-wide)."""
    base = _data_dir(data_dir)
    key = (level, str(base))
    with _lock:
        if key in _loaded:
            return _loaded[key]
    path = base / f"phi{level}.txt"
    if not path.exists():
        raise ModPolyError(
            f"no modular polynomial of level {level} in {base}; "
            f"available: {available_levels(data_dir)}"
        )
    phi = load_modular_polynomial(level, path.read_bytes())
    if phi.level != level:
        raise ModPolyError(f"{path} does not contain level {level}")
    with _lock:
        _loaded[key] = phi
    return phi


def _reduced_rows(phi: ModularPolynomial, field) -> list:
    """Rows rows[a][b] = Phi coefficient of X^a Y^b reduced into field."""
    cache_key = (phi.level, field.p, getattr(field, "modulus", ()))
    with _lock:
        hit = _reduced.get(cache_key)
    if hit is not None:
        return hit
    n = phi.level + 2
    rows = [[field.zero for _ in range(n)] for _ in range(n)]
    for (a, b), c in phi.coefficients.items():
        v = field(c)
        rows[a][b] = rows[a][b] + v
        if a != b:
            rows[b][a] = rows[b][a] + v
    with _lock:
        _reduced[cache_key] = rows
    return rows


def specialize(phi: ModularPolynomial, j) -> Polynomial:
    """Phi_ell(X, j) as a monic univariate polynomial of degree ell+1."""
    field = j.field
    rows = _reduced_rows(phi, field)
    n = phi.level + 2
    jpow = [field.one]
    for _ in range(n - 1):
        jpow.append(jpow[-1] * j)
    out = []
    for a in range(n):
        row = rows[a]
        acc = field.zero
        for b in range(n):
            rb = row[b]
            if rb:
                acc = acc + rb * jpow[b]
        out.append(acc)
    return Polynomial(field, out)


def specialized(level: int, j, data_dir=None) -> Polynomial:
    return specialize(modular_polynomial(level, data_dir), j)
