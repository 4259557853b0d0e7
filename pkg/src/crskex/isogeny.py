"""Horizontal isogeny steps and walks on ordinary curves.

Two step engines over the same direction semantics.  A Vélu step
samples an order-ell point over the extension where the target
eigenspace becomes rational, forms the kernel polynomial, and applies
Vélu's formulas; directions whose eigenspace is rational only on the
quadratic twist are routed there and twisted back (the eigenvalues of
Frobenius change sign under twisting).  An Elkies step works purely
over the base field through the modular polynomial: the kernel of the
target eigenvalue is cut out of the ell-division polynomial by gcds
against the Frobenius conditions, verified by a symbolic eigenvalue
check in F_q[x, y]/(K(x), y^2 - f(x)), and subsequent steps follow the
isogeny cycle by dividing the previous vertex out of the specialized
modular polynomial.

Kernel polynomials here always have degree (ell-1)/2: the product over
a half-set of the kernel, since x([i]Q) = x([-i]Q) and the point at
infinity carries no x-coordinate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .ec import (Curve, XPoint, curve_from_j, curve_order_ext,
                 division_polynomial, random_point, check_trace)
from .ff import build_extension
from .modpolydb import modular_polynomial, specialize
from .poly import (Polynomial, QuotientPoint, frobenius_in_quotient,
                   roots_with_multiplicity, scalar_mul_in_quotient,
                   xz_ladder_in_quotient)


class StepError(RuntimeError):
    """A step's preconditions were violated (parameter corruption)."""


@dataclass(frozen=True)
class IdealStep:
    """Directed walking recipe for one prime: the ideal (ell, pi - lam).

    lam is the eigenvalue of the direction walked, mu the other root of
    X^2 - tX + q mod ell.  r is the extension degree a Vélu step samples
    over; when use_twist is set the sampling happens on the quadratic
    twist (whose eigenvalues are -lam, -mu) in direction -lam.
    """

    ell: int
    lam: int
    mu: int
    r: int
    method: str  # "VV" | "VE" | "EE"
    twist_usable: bool
    use_twist: bool = False

    def __post_init__(self):
        if self.ell < 3:
            raise ValueError("walk primes are odd")
        if (self.lam - self.mu) % self.ell == 0:
            raise ValueError("eigenvalues must be distinct mod ell")


def order_mod(a: int, n: int) -> int:
    a %= n
    if a == 0:
        raise ValueError("not a unit")
    k, acc = 1, a
    while acc != 1:
        acc = acc * a % n
        k += 1
    return k


def twist_direction(s: IdealStep, q: int) -> IdealStep:
    """Remark-1 recipe: walk direction mu as -mu = 1/lam on the twist.

    Requires q = -1 mod ell so that mu = -1/lam; then ord(-mu) equals
    ord(lam) and the mu direction costs the same extension degree as
    the lam direction.
    """
    ell = s.ell
    if (q + 1) % ell != 0:
        raise StepError(f"q is not -1 mod {ell}: direction not twist-usable")
    nu = (-s.mu) % ell
    return IdealStep(
        ell=ell,
        lam=nu,
        mu=(-s.lam) % ell,
        r=order_mod(nu, ell),
        method=s.method,
        twist_usable=True,
        use_twist=True,
    )


def resolve_direction(ell: int, lam: int, mu: int, q: int, r_max=None) -> IdealStep:
    """Cheapest valid Vélu recipe for direction lam, twisting if better.

    A route is valid when the co-eigenvalue's order on the sampled curve
    does not divide r, so the cofactor multiple cannot land in the wrong
    eigenspace.  Falls back to the plain route (possibly invalid for
    Vélu but fine for Elkies bookkeeping) when nothing qualifies.
    """
    r_plain = order_mod(lam, ell)
    r_twist = order_mod(-lam % ell, ell)
    plain_ok = not _divides(order_mod(mu, ell), r_plain)
    twist_ok = not _divides(order_mod(-mu % ell, ell), r_twist)
    choices = []
    if plain_ok and (r_max is None or r_plain <= r_max):
        choices.append((r_plain, False))
    if twist_ok and (r_max is None or r_twist <= r_max):
        choices.append((r_twist, True))
    if not choices:
        return IdealStep(ell, lam, mu, r_plain, "EE", twist_ok, use_twist=False)
    r, use_twist = min(choices)
    return IdealStep(ell, lam, mu, r, "VV", twist_ok, use_twist=use_twist)


def _divides(a: int, b: int) -> bool:
    return b % a == 0


# -- kernel polynomials -------------------------------------------------


def kernel_poly_from_point(Q: XPoint, ell: int) -> Polynomial:
    """K(X) = prod_{i=1}^{(ell-1)/2} (X - x([i]Q)), descended to F_q.

    Q lives over an extension of the curve's field; the subgroup it
    generates must be Galois stable, which is exactly the statement
    that the coefficients land in the base field.  That is verified.
    """
    E = Q.curve
    ext = E.field
    d = (ell - 1) // 2
    xs = []
    for i in range(1, d + 1):
        R = Q.mul(i)
        if R.is_infinity():
            raise StepError(f"point does not have exact order {ell}")
        xs.append(R.x())
    K_ext = Polynomial.from_roots(ext, xs)
    base = getattr(ext, "base_field", None)
    if base is None:
        return K_ext
    coeffs = []
    for c in K_ext.coeffs:
        b = ext.element_in_base(c)
        if b is None:
            raise StepError("kernel is not rational: coefficients do not descend")
        coeffs.append(b)
    return Polynomial(base, coeffs)


def velu_from_kernel(E: Curve, K: Polynomial) -> Curve:
    """Image curve of the isogeny with kernel polynomial K (Vélu).

    For y^2 = x^3 + ax + b and kernel x-coordinates with power sums
    p1, p2, p3 over the half-set of size d:
        T = 6 p2 + 2 a d,  W = 10 p3 + 6 a p1 + 4 b d,
        E' : y^2 = x^3 + (a - 5T) x + (b - 7W).
    """
    if E.c2 != E.field.zero:
        raise ValueError("kernel-based step needs a short Weierstrass model")
    field = E.field
    a, b = E.c4, E.c6
    d = K.degree
    K = K.monic()
    s1 = -K[d - 1] if d >= 1 else field.zero
    s2 = K[d - 2] if d >= 2 else field.zero
    s3 = -K[d - 3] if d >= 3 else field.zero
    p1 = s1
    p2 = s1 * s1 - 2 * s2
    p3 = s1 * p2 - s2 * s1 + 3 * s3
    T = 6 * p2 + 2 * a * field(d)
    W = 10 * p3 + 6 * a * p1 + 4 * b * field(d)
    out = Curve.weierstrass(field, a - 5 * T, b - 7 * W)
    out.expected_trace = E.expected_trace
    return out


# -- Vélu steps ---------------------------------------------------------


def velu_step(E: Curve, s: IdealStep, rng: random.Random, stats=None) -> Curve:
    """One step in direction s.lam by torsion-point sampling (Alg. 6)."""
    ctx = _velu_context(E, s)
    return _velu_step_in_context(E, s, ctx, rng, stats)


def velu_walk(E: Curve, s: IdealStep, k: int, rng: random.Random, stats=None) -> Curve:
    """k Vélu steps; the extension and cofactor are computed once."""
    if k < 1:
        raise ValueError("walk length must be >= 1")
    ctx = _velu_context(E, s)
    for _ in range(k):
        E = _velu_step_in_context(E, s, ctx, rng, stats)
    return E


def _velu_context(E: Curve, s: IdealStep):
    if s.method not in ("VV", "VE"):
        raise StepError(f"ell={s.ell} is not Vélu-amenable (method {s.method})")
    q = E.field.order
    t = E.expected_trace
    if t is None:
        raise StepError("curve trace unknown; set expected_trace")
    t_w = -t if s.use_twist else t
    C_r = curve_order_ext(q, t_w, s.r)
    if C_r % s.ell != 0:
        raise StepError(f"ell={s.ell} does not divide C_{s.r}: bad classification")
    # strip every factor of ell: with ell^2 | C_r the group exponent can
    # divide C_r/ell, which would kill all samples
    cofactor = C_r
    while cofactor % s.ell == 0:
        cofactor //= s.ell
    lam_w = (-s.lam if s.use_twist else s.lam) % s.ell
    mu_w = (-s.mu if s.use_twist else s.mu) % s.ell
    # with both eigenspaces rational the cofactor multiple can land in
    # the wrong subgroup, so each sample must pass an eigenvalue check
    ambiguous = _divides(order_mod(mu_w, s.ell), s.r) and _divides(
        order_mod(lam_w, s.ell), s.r
    )
    ext = build_extension(E.field, s.r)
    return (ext, cofactor, lam_w, ambiguous)


def _velu_step_in_context(E, s, ctx, rng, stats=None):
    ext, cofactor, lam_w, ambiguous = ctx
    E_w = E.quadratic_twist() if s.use_twist else E
    E_r = E_w.base_extend(ext)
    trials = 0
    while True:
        trials += 1
        P = random_point(E_r, rng)
        if ambiguous:
            Q_aff = _exact_order_part(P.mul(cofactor), s.ell)
            if Q_aff is None:
                continue
            if not _is_eigen_point(Q_aff, lam_w):
                continue  # mixed subgroup or the co-eigenspace
            Q = XPoint.from_point(Q_aff)
            break
        Q = _exact_order_part(XPoint.from_point(P).mul(cofactor), s.ell)
        if Q is not None:
            break
    if stats is not None:
        stats["trials"] = stats.get("trials", 0) + trials
        stats["steps"] = stats.get("steps", 0) + 1
    K = kernel_poly_from_point(Q, s.ell)
    image_w = velu_from_kernel(E_w, K)
    image_w.expected_trace = E_w.expected_trace
    if s.use_twist:
        image = image_w.quadratic_twist()
        image.expected_trace = E.expected_trace
        return image
    return image_w


def _exact_order_part(Q, ell: int):
    """Reduce a point of ell-power order to exact order ell (None if O)."""
    if Q.is_infinity():
        return None
    for _ in range(64):
        R = Q.mul(ell)
        if R.is_infinity():
            return Q
        Q = R
    raise StepError(f"point order is not a power of {ell}: wrong C_r")


def _is_eigen_point(Q, lam: int) -> bool:
    """pi(Q) = [lam]Q, checked with full coordinates over the extension."""
    piQ = type(Q)(Q.curve, Q.x.frobenius(), Q.y.frobenius())
    return piQ == Q.mul(lam)


# -- Elkies steps -------------------------------------------------------


def _frobenius_x_condition(E: Curve, ell: int, lam: int) -> Polynomial:
    """gcd of psi_ell with the x-part of pi(Q) = +-[lam]Q.

    x([n]P) = x - psi_{n-1} psi_{n+1} / psi_n^2 expands, with the
    y-free division polynomial convention (even indexes store the y
    cofactor), to numerator N and denominator D below.  The gcd of
    psi_ell with (x^q - x) D + N collects exactly the x-coordinates of
    the eigenspaces of eigenvalue lam and -lam.
    """
    field = E.field
    q = field.order
    psi = division_polynomial(E, ell)
    n = lam % ell
    if n == 0:
        raise StepError("eigenvalue must be a unit mod ell")
    f = E.f_poly()
    pm = division_polynomial(E, n - 1) if n > 1 else Polynomial.one(field)
    pn = division_polynomial(E, n)
    pp = division_polynomial(E, n + 1)
    if n == 1:
        # x([1]Q) = x: condition reduces to x^q = x
        N = Polynomial.zero(field)
        D = Polynomial.one(field)
    elif n % 2 == 1:
        N = f * pm * pp
        D = pn * pn
    else:
        N = pm * pp
        D = f * pn * pn
    xq = Polynomial.x(field).pow_mod(q, psi)
    cond = (xq - Polynomial.x(field)) * D + N
    return psi.gcd(cond % psi)


def _frobenius_y_refine(E: Curve, G: Polynomial, ell: int, lam: int) -> Polynomial:
    """Cut ker(pi - lam) out of G by the y-coordinate condition.

    y([n]P)/y = psi_{2n} / (2 psi_n^4 y^... ) expands to Ny/Dy below;
    the kernel satisfies f^((q-1)/2) Dy = Ny mod K.
    """
    field = E.field
    q = field.order
    n = lam % ell
    f = E.f_poly()
    pn = division_polynomial(E, n)
    p2n = division_polynomial(E, 2 * n)
    pn2 = (pn * pn) % G
    pn4 = (pn2 * pn2) % G
    if n % 2 == 1:
        Dy = 2 * pn4
        Ny = p2n % G
    else:
        Dy = (2 * ((f * f) % G) * pn4) % G
        Ny = p2n % G
    fq = f.pow_mod((q - 1) // 2, G)
    cond = (fq * Dy - Ny) % G
    return G.gcd(cond)


def eigen_kernel_poly(E: Curve, ell: int, lam: int) -> Polynomial:
    """Kernel polynomial of ker(pi - lam) on E[ell], degree (ell-1)/2."""
    G = _frobenius_x_condition(E, ell, lam)
    d = (ell - 1) // 2
    if G.degree == d:
        K = G.monic()
    elif G.degree == 2 * d:
        # lam = -mu: the x-condition cannot separate the eigenspaces
        K = _frobenius_y_refine(E, G, ell, lam).monic()
        if K.degree != d:
            raise StepError(
                f"eigenvalue {lam} mod {ell}: y-refinement failed (degree {K.degree})"
            )
    else:
        raise StepError(
            f"ell={ell} is not Elkies here: eigenspace gcd has degree {G.degree}"
        )
    return K


def _verify_eigenvalue(E: Curve, K: Polynomial, ell: int, lam: int) -> bool:
    """Symbolic check pi(Q) = [lam]Q in F_q[x,y]/(K, y^2 - f)."""
    f = E.f_poly()
    n = lam % ell
    frob = frobenius_in_quotient(f, K)
    xq, fq = frob.a, frob.b
    lam_pt = scalar_mul_in_quotient(QuotientPoint.generic(f, K), n, f, K)
    if isinstance(lam_pt, Polynomial):
        raise StepError("unexpected kernel factor discovered during eigenvalue check")
    if lam_pt.inf:
        return False
    return lam_pt.a == xq and lam_pt.b == fq


def _verify_eigenvalue_x_only(E: Curve, K: Polynomial, ell: int, lam: int) -> bool:
    """x-line check pi(Q) = +-[lam]Q; valid discriminator iff mu != -lam."""
    field = E.field
    q = field.order
    f = E.f_poly()
    X, Z = xz_ladder_in_quotient(lam % ell, f, K)
    xq = Polynomial.x(field).pow_mod(q, K)
    return ((xq * Z) % K) == (X % K)


def elkies_first_step(E: Curve, s: IdealStep, rng: random.Random):
    """First Elkies step (Alg. 3): returns j in direction s.lam.

    Finds the two rational roots of Phi_ell(X, j(E)), constructs the
    lam-eigenspace kernel, confirms the eigenvalue on the symbolic
    order-ell point, and returns the Vélu image's j-invariant.
    """
    field = E.field
    ell = s.ell
    j = E.j_invariant()
    phi = specialize(modular_polynomial(ell), j)
    roots = roots_with_multiplicity(phi, rng)
    total = sum(m for _, m in roots)
    if total != 2:
        raise StepError(
            f"Phi_{ell}(X, j) has {total} rational roots counting multiplicity; "
            "ell is not an Elkies prime for this curve"
        )
    if len(roots) == 1:
        # both directions land on the same vertex
        return roots[0][0]
    K = eigen_kernel_poly(E, ell, s.lam)
    if (s.lam + s.mu) % ell != 0:
        ok = _verify_eigenvalue_x_only(E, K, ell, s.lam)
    else:
        ok = _verify_eigenvalue(E, K, ell, s.lam)
    if not ok:
        other = eigen_kernel_poly(E, ell, s.mu)
        if (s.lam + s.mu) % ell != 0:
            swapped = _verify_eigenvalue_x_only(E, other, ell, s.lam)
        else:
            swapped = _verify_eigenvalue(E, other, ell, s.lam)
        if not swapped:
            raise StepError("neither kernel matches the requested eigenvalue")
        K = other
    j_out = velu_from_kernel(E, K).j_invariant()
    if all(j_out != r for r, _ in roots):
        raise StepError("Vélu image is not a root of the modular polynomial")
    return j_out


def elkies_next_step(s: IdealStep, j0, j1, rng: random.Random):
    """Continue along the cycle (Alg. 4): the unique new root.

    P = Phi_ell(X, j1) / (X - j0) has exactly one rational root, the
    next vertex.  Short cycles come out right through multiplicity:
    on a 2-cycle j0 is a double root of Phi_ell(X, j1) and dividing one
    copy leaves j0 itself as the unique root.
    """
    field = j0.field
    phi = specialize(modular_polynomial(s.ell), j1)
    lin = Polynomial(field, [-j0, field.one])
    quot, rem = phi.divmod(lin)
    if not rem.is_zero():
        raise StepError("j0 is not adjacent to j1: exact division failed")
    roots = roots_with_multiplicity(quot, rng)
    if len(roots) != 1:
        raise StepError(
            f"expected a unique next vertex, found {len(roots)} rational roots: "
            "cycle structure violated"
        )
    return roots[0][0]


def elkies_walk(E: Curve, s: IdealStep, k: int, rng: random.Random) -> Curve:
    """k Elkies steps in direction s.lam (Alg. 5), back to a curve.

    After walking on j-invariants, reconstructs a curve with the walk's
    trace t (not -t) via check_trace and twisting.
    """
    if k < 1:
        raise ValueError("walk length must be >= 1")
    t = E.expected_trace
    if t is None:
        raise StepError("curve trace unknown; set expected_trace")
    j_prev = E.j_invariant()
    j_cur = elkies_first_step(E, s, rng)
    for _ in range(k - 1):
        j_prev, j_cur = j_cur, elkies_next_step(s, j_prev, j_cur, rng)
    return curve_on_component(j_cur, E.field, t, rng)


def curve_on_component(j, field, t: int, rng: random.Random) -> Curve:
    """A curve with invariant j and trace exactly t (not -t)."""
    E, twist = curve_from_j(j, field)
    if check_trace(E, t, rng):
        E.expected_trace = t
        return E
    if not check_trace(twist, t, rng):
        raise StepError(f"neither j = {j.to_str()} component has trace {t}")
    twist.expected_trace = t
    return twist


def kernel_poly_from_adjacent_j(E: Curve, j1, ell: int, rng: random.Random):
    """Kernel of the ell-isogeny E -> E' with j(E') = j1.

    Both eigenspace kernels of E[ell] are built and matched by their
    Vélu image.  Returns one polynomial normally; when both directions
    give the same image j (a degenerate tiny cycle) both kernels are
    returned as a list and the caller disambiguates by eigenvalue.
    """
    t = E.expected_trace
    if t is None:
        raise StepError("curve trace unknown; set expected_trace")
    q = E.field.order
    pair = eigenvalue_pair(t, q, ell)
    if pair is None:
        raise StepError(f"ell={ell} is not Elkies for trace {t}")
    lam, mu = pair
    K_lam = eigen_kernel_poly(E, ell, lam)
    K_mu = eigen_kernel_poly(E, ell, mu)
    j_lam = velu_from_kernel(E, K_lam).j_invariant()
    j_mu = velu_from_kernel(E, K_mu).j_invariant()
    if j_lam == j1 and j_mu == j1:
        return [K_lam, K_mu]
    if j_lam == j1:
        return K_lam
    if j_mu == j1:
        return K_mu
    raise StepError("j1 is not adjacent to E over the base field")


def eigenvalue_pair(t: int, q: int, ell: int):
    """Roots (lam, mu) of X^2 - tX + q mod ell, or None if not Elkies.

    Returned in a deterministic order: lam is the smaller residue.
    """
    sols = [x for x in range(1, ell) if (x * x - t * x + q) % ell == 0]
    if len(sols) != 2:
        return None
    return sols[0], sols[1]


def walk_step_j(params, j, ell: int, sign: int, rng: random.Random):
    """One step on j-invariants in direction sign for prime ell.

    Used by the brute-force orbit oracle: reconstructs the right curve
    component, then steps by whichever engine the direction supports.
    """
    step = params.step_for(ell, sign)
    E = curve_on_component(j, params.field, params.t, rng)
    if step.method in ("VV", "VE"):
        return velu_step(E, step, rng).j_invariant()
    return elkies_first_step(E, step, rng)
