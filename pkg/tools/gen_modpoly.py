#!/usr/bin/env python3
"""Generate classical modular polynomial data files.

Method: classical q-expansions.  With w = q^(1/l), the l+1 conjugate
functions are j(q^l) and j(zeta^i w) for i = 0..l-1.  Power sums of
the small orbit kill the roots of unity and are integer Laurent series
in q with pole at most 1 (P_m[k] = l * c_{kl} where c is the
coefficient array of j(w)^m), Newton's identities turn them into the
elementary symmetric functions s_k, and

    Phi_l(X, j(q)) = (X - j(q^l)) * sum_k (-1)^k s_k X^(l-k).

Each X-coefficient is a modular function holomorphic away from the
cusp, hence an integer polynomial in j, recovered by principal part
elimination against the powers of j(q).  Requires j(w)^m to w-index
l^2 + l for m <= l, the only expensive part.

This is a development-time tool: the package only ships and parses the
resulting files.  Runtime is a few minutes for all primes up to 47.

Usage: python3 tools/gen_modpoly.py [--max-level 47] [--out DIR]
"""

import argparse
import hashlib
import sys
import time
from pathlib import Path

try:
    from gmpy2 import mpz
except ImportError:  # slower, same results
    mpz = int


def eta_quotient_inverse_delta(T: int) -> list:
    """Coefficients of q/Delta = 1/prod(1-q^n)^24 up to index T."""
    # Euler function by pentagonal number theorem
    E = [mpz(0)] * (T + 1)
    E[0] = mpz(1)
    k = 1
    while True:
        n1 = k * (3 * k - 1) // 2
        n2 = k * (3 * k + 1) // 2
        if n1 > T and n2 > T:
            break
        s = mpz(-1) if k % 2 else mpz(1)
        if n1 <= T:
            E[n1] = s
        if n2 <= T:
            E[n2] = s
        k += 1

    def series_mul(a, b):
        out = [mpz(0)] * (T + 1)
        for i, ai in enumerate(a):
            if ai:
                for jj in range(0, min(T - i, len(b) - 1) + 1):
                    if b[jj]:
                        out[i + jj] += ai * b[jj]
        return out

    E2 = series_mul(E, E)
    E4 = series_mul(E2, E2)
    E8 = series_mul(E4, E4)
    E16 = series_mul(E8, E8)
    E24 = series_mul(E16, E8)
    # invert the unit series E24
    inv = [mpz(0)] * (T + 1)
    inv[0] = mpz(1)
    for n in range(1, T + 1):
        acc = mpz(0)
        for k in range(1, n + 1):
            if E24[k]:
                acc += E24[k] * inv[n - k]
        inv[n] = -acc
    return inv


def j_coefficients(T: int) -> list:
    """c[-1..T] of j(q) as a list with c[0] = coefficient of q^(-1)."""
    inv_delta = eta_quotient_inverse_delta(T + 1)
    # E4 = 1 + 240 sum sigma3(n) q^n
    sig3 = [mpz(0)] * (T + 2)
    for d in range(1, T + 2):
        d3 = mpz(d) ** 3
        for n in range(d, T + 2, d):
            sig3[n] += d3
    E4 = [mpz(1)] + [240 * sig3[n] for n in range(1, T + 2)]

    def series_mul(a, b, limit):
        out = [mpz(0)] * (limit + 1)
        for i, ai in enumerate(a):
            if ai and i <= limit:
                hi = min(limit - i, len(b) - 1)
                for jj in range(hi + 1):
                    if b[jj]:
                        out[i + jj] += ai * b[jj]
        return out

    E4c = series_mul(series_mul(E4, E4, T + 1), E4, T + 1)
    jq = series_mul(E4c, inv_delta, T + 1)  # this is q*j(q)
    # j = q^(-1) * jq: c[n] = jq[n+1] for n = -1..T
    assert jq[0] == 1 and jq[1] == 744
    return jq


def generate_phi(ell: int, progress=lambda s: None) -> dict:
    """Classical modular polynomial Phi_ell as {(a, b): coeff} with a >= b."""
    # Newton's identities recurse ell deep through convolutions against
    # pole-1 series, so s_k and P_m are carried on q^-1 .. q^(2ell+2);
    # extracting P_m costs j(w)^m to w-index ell*(2ell+3-m)
    lo, hi = -1, 2 * ell + 2
    T = ell * (2 * ell + 2)
    c = j_coefficients(T)  # c[i] = coefficient of w^(i-1)

    def cval(power_coeffs, idx, val_offset):
        """coefficient of w^idx in a series stored with valuation -val_offset."""
        pos = idx + val_offset
        if 0 <= pos < len(power_coeffs):
            return power_coeffs[pos]
        return mpz(0)

    # validity caps: P_m trusted to q^(2ell+3-m), s_k to q^(2ell+2-k);
    # each Newton level consumes one exponent through the pole at q^-1
    P = {}
    power = list(c)  # j^1 with valuation -1
    for m in range(1, ell + 1):
        if m > 1:
            progress(f"  j^{m}")
            Tm = ell * (2 * ell + 3 - m)  # later powers need less precision
            out = [mpz(0)] * (Tm + m + 1)  # valuation -m, top index Tm
            for i, ai in enumerate(power):  # exponent i - (m-1)
                if ai:
                    e1 = i - (m - 1)
                    top = Tm - e1 + 1  # c index limit so e1+e2 <= Tm
                    for jj in range(0, min(top, len(c) - 1) + 1):
                        if c[jj]:
                            out[e1 + (jj - 1) + m] += ai * c[jj]
            power = out
        P[m] = {k: ell * cval(power, k * ell, m) for k in range(lo, 2 * ell + 4 - m)}

    # Newton's identities: k*s_k = sum_{i=1..k} (-1)^(i-1) P_i s_{k-i}
    s = {0: {k: (mpz(1) if k == 0 else mpz(0)) for k in range(lo, 2 * ell + 3)}}
    for k in range(1, ell + 1):
        cap = 2 * ell + 2 - k
        acc = {kk: mpz(0) for kk in range(lo, cap + 1)}
        for i in range(1, k + 1):
            sign = 1 if i % 2 == 1 else -1
            for ka, va in P[i].items():
                if va:
                    for kb, vb in s[k - i].items():
                        if vb and lo <= ka + kb <= cap:
                            acc[ka + kb] += sign * va * vb
        for kk in acc:
            q, r = divmod(acc[kk], k)
            assert r == 0, "Newton identity division not exact"
            acc[kk] = q
        s[k] = acc

    # J = j(q^ell) on the window: exponents -ell, 0, ell (others exceed hi)
    J = {k: mpz(0) for k in range(lo, hi + 1)}
    for n in range(-1, hi // ell + 1):
        if lo <= n * ell <= hi:
            J[n * ell] = c[n + 1]

    # coefficient of X^a: (-1)^(ell+1-a) * (s_{ell+1-a} + J*s_{ell-a}),
    # as a Laurent series on q^-(ell+1) .. q^0; J[v] nonzero only at
    # v = -ell, 0, ell, ... so the product needs s on q^-1 .. q^ell only
    def coeff_series(a):
        k1 = ell + 1 - a
        k2 = ell - a
        out = {}
        for n in range(-(ell + 1), 1):
            acc = mpz(0)
            if 0 <= k1 <= ell:
                acc += s[k1].get(n, mpz(0))
            if 0 <= k2 <= ell:
                for m in range(-1, (n + hi) // ell + 1):  # J exponent m*ell
                    u = n - m * ell
                    if lo <= u <= hi:
                        acc += c[m + 1] * s[k2].get(u, mpz(0))
            sign = 1 if (ell + 1 - a) % 2 == 0 else -1
            out[n] = sign * acc
        return out

    # powers of j(q) for elimination; carried above q^0 because each
    # multiplication by j pulls one exponent down through the q^-1 pole
    jwin_lo, jwin_hi = -(ell + 1), ell + 1
    jpow = {0: {n: (mpz(1) if n == 0 else mpz(0)) for n in range(jwin_lo, jwin_hi + 1)}}
    jpow[1] = {n: (c[n + 1] if n >= -1 else mpz(0)) for n in range(jwin_lo, jwin_hi + 1)}
    for d in range(2, ell + 2):
        prev = jpow[d - 1]
        out = {n: mpz(0) for n in range(jwin_lo, jwin_hi + 1)}
        for n1, v1 in prev.items():
            if v1:
                for n2 in range(-1, jwin_hi - n1 + 1):
                    v2 = c[n2 + 1]
                    if v2 and jwin_lo <= n1 + n2:
                        out[n1 + n2] += v1 * v2
        jpow[d] = out

    coeffs = {}
    coeffs[(ell + 1, 0)] = 1
    for a in range(ell + 1):
        series = coeff_series(a)
        poly = {}
        for d in range(ell + 1, 0, -1):
            lead = series.get(-d, mpz(0))
            if lead:
                poly[d] = lead
                jp = jpow[d]
                for n in range(-(ell + 1), 1):
                    series[n] = series[n] - lead * jp.get(n, mpz(0))
        const = series.pop(0, mpz(0))
        if const:
            poly[0] = const
        for n, v in series.items():
            assert v == 0, f"residual series at X^{a}, q^{n}"
        for d, v in poly.items():
            if v:
                coeffs[(a, d)] = int(v)
    # symmetrize and keep a >= b
    sym = {}
    for (a, b), v in coeffs.items():
        key = (max(a, b), min(a, b))
        if key in sym:
            assert sym[key] == v, f"asymmetric at {key}: {sym[key]} vs {v}"
        else:
            sym[key] = v
    return sym


def kronecker_check(ell: int, coeffs: dict) -> None:
    """Phi_ell = (X^ell - Y)(X - Y^ell) mod ell."""
    # (X^ell - Y)(X - Y^ell) = X^(ell+1) - X^ell Y^ell - XY + Y^(ell+1)
    exp = {(ell + 1, 0): 1, (ell, ell): -1 % ell, (1, 1): -1 % ell}
    for key, v in coeffs.items():
        got = v % ell
        expect = exp.get(key, 0)
        assert got == expect, f"Kronecker mismatch at {key}: {got} != {expect}"
    for key, v in exp.items():
        assert coeffs.get(key, 0) % ell == v % ell, f"missing term {key}"


def write_phi(ell: int, coeffs: dict, outdir: Path) -> str:
    lines = [
        f"# classical modular polynomial of level {ell}",
        "# symmetric storage: '[a,b] c' with a >= b encodes c*(X^a Y^b + X^b Y^a),",
        "# or c*X^a Y^a when a = b; zero coefficients omitted",
        "# generated by tools/gen_modpoly.py (q-expansion power sums, Newton identities)",
    ]
    for (a, b) in sorted(coeffs, reverse=True):
        lines.append(f"[{a},{b}] {coeffs[(a, b)]}")
    body = "\n".join(lines) + "\n"
    path = outdir / f"phi{ell}.txt"
    path.write_text(body)
    return hashlib.sha256(body.encode()).hexdigest()


PHI2_KNOWN = {
    (3, 0): 1,
    (2, 2): -1,
    (2, 1): 1488,
    (2, 0): -162000,
    (1, 1): 40773375,
    (1, 0): 8748000000,
    (0, 0): -157464000000000,
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-level", type=int, default=47)
    ap.add_argument(
        "--out", type=Path, default=Path(__file__).resolve().parent.parent / "src/crskex/data/modpoly"
    )
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    levels = [n for n in range(2, args.max_level + 1) if all(n % d for d in range(2, n)) and n > 1]
    manifest = []
    for ell in levels:
        t0 = time.time()
        coeffs = generate_phi(ell)
        kronecker_check(ell, coeffs)
        if ell == 2:
            assert coeffs == PHI2_KNOWN, "Phi_2 does not match the textbook value"
        digest = write_phi(ell, coeffs, args.out)
        manifest.append((ell, digest))
        print(f"phi{ell}: {len(coeffs)} terms, {time.time()-t0:.1f}s", flush=True)
    man_lines = ["# level sha256 file"]
    for ell, digest in manifest:
        man_lines.append(f"{ell} {digest} phi{ell}.txt")
    (args.out / "manifest.txt").write_text("\n".join(man_lines) + "\n")
    print(f"wrote {len(manifest)} levels to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
