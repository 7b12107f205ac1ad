"""Hypergeometric polynomials, the Pade identity, and the dihedral families.

The generating pair A_nu/B_nu is kept in two forms: coefficient polynomials
in the spectator variable x (one polynomial per power of y), and specialized
exact series at a rational x.  The binomial factor (1-x)^nu is always the
formal series at x = 0, so every identity check here is exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    IdentityFailure,
    InconsistentG2,
    PoleError,
    PreconditionViolation,
    SingularityError,
)
from .series import ExactSeries, binomial

Q = Fraction


# ------------------------------------------------------------------ 2F1


def hyper_2f1(a, b, c, order: int) -> ExactSeries:
    """Truncated expansion of 2F1(a, b; c; x); exact rational coefficients.

    Terminates early when a or b is a nonpositive integer.  Raises PoleError
    if c reaches a nonpositive integer while the numerator factors are still
    alive.
    """
    if order < 1:
        raise PreconditionViolation("order must be >= 1")
    a, b, c = Q(a), Q(b), Q(c)
    cs = [Q(1)]
    term = Q(1)
    for k in range(order - 1):
        na, nb, nc = a + k, b + k, c + k
        if na == 0 or nb == 0:
            break
        if nc == 0:
            raise PoleError(
                f"lower parameter {c} hits a nonpositive integer at k={k} "
                "before the series terminates"
            )
        term = term * na * nb / (nc * (k + 1))
        cs.append(term)
    return ExactSeries(cs, order)


def hyper_2f1_poly(params, order: int) -> ExactSeries:
    """Spec-facing wrapper taking an (a, b, c) triple."""
    a, b, c = params
    return hyper_2f1(a, b, c, order)


# ------------------------------------------------------- the Pade identity


@dataclass(frozen=True)
class PadeReport:
    m: int
    n: int
    nu: Fraction
    remainder_valuation: int
    leading_coefficient: Fraction
    expected_coefficient: Fraction


def pade_identity_check(m: int, n: int, nu, order: int | None = None) -> PadeReport:
    """Expand P - (1-x)^nu * Q and verify it vanishes through x^(m+n).

    P = 2F1(-nu-n, -m; -m-n; x) and Q = 2F1(nu-m, -n; -m-n; x); the
    x^(m+n+1) coefficient must equal (-1)^m C(n+nu, m+n+1) / C(m+n, m).
    """
    nu = Q(nu)
    if order is None:
        order = m + n + 2
    if order < m + n + 2:
        raise PreconditionViolation("order must be at least m+n+2")
    p = hyper_2f1(-nu - n, -m, -m - n, order)
    q = hyper_2f1(nu - m, -n, -m - n, order)
    lhs = p - ExactSeries.binomial_series(nu, order, sign=-1) * q
    for j in range(m + n + 1):
        if lhs.coeffs[j] != 0:
            raise IdentityFailure(
                f"remainder has nonzero coefficient {lhs.coeffs[j]} at x^{j}",
                power=j,
            )
    lead = lhs.coeffs[m + n + 1]
    expected = (-1) ** m * binomial(n + nu, m + n + 1) / binomial(m + n, m)
    if lead != expected:
        raise IdentityFailure(
            f"leading coefficient {lead} != expected {expected}", power=m + n + 1
        )
    val = m + n + 1 if lead != 0 else order
    return PadeReport(m, n, nu, val, lead, expected)


# ------------------------------------------------------- dihedral functions


def dihedral_coefficient_polys(nu, order: int) -> list[list[Fraction]]:
    """x-coefficient polynomials of A_nu: entry n is the y^n coefficient,
    as a list of Fractions indexed by the power of x (degree <= n)."""
    nu = Q(nu)
    polys = []
    for n in range(order):
        # c = -2n is safe: the -n upper parameter terminates at degree n,
        # before the lower parameter can reach zero (and at n=0 no term
        # beyond the constant is ever computed).
        f = hyper_2f1(-nu - n, -n, -2 * n, n + 1)
        scale = math.comb(2 * n, n)
        polys.append([scale * c for c in f.coeffs])
    return polys


def _specialize(polys: Sequence[Sequence[Fraction]], x) -> ExactSeries:
    x = Q(x)
    return ExactSeries([sum((c * x**j for j, c in enumerate(p)), Q(0)) for p in polys])


@dataclass(frozen=True)
class DihedralPair:
    nu: Fraction
    x_value: Fraction
    A: ExactSeries
    B: ExactSeries


def dihedral_generators(nu, x, order: int) -> DihedralPair:
    """A_nu and B_nu = A_(-nu) as exact y-series at rational x."""
    nu = Q(nu)
    a = _specialize(dihedral_coefficient_polys(nu, order), x)
    b = _specialize(dihedral_coefficient_polys(-nu, order), x)
    return DihedralPair(nu, Q(x), a, b)


def bivariate_diagonal(nu, x, total_order: int) -> list[Fraction]:
    """Diagonal y^n z^n coefficients of (1-xy)^nu / (1-y-z+xyz).

    Independent oracle for the generating identity: the reciprocal factor is
    expanded by the recurrence r[i][j] = r[i-1][j] + r[i][j-1] - x*r[i-1][j-1].
    """
    nu, x = Q(nu), Q(x)
    T = total_order
    r = [[Q(0)] * (T + 1) for _ in range(T + 1)]
    r[0][0] = Q(1)
    for i in range(T + 1):
        for j in range(T + 1):
            if i == j == 0:
                continue
            acc = Q(0)
            if i > 0:
                acc += r[i - 1][j]
            if j > 0:
                acc += r[i][j - 1]
            if i > 0 and j > 0:
                acc -= x * r[i - 1][j - 1]
            r[i][j] = acc
    out = []
    half = T // 2
    for n in range(half + 1):
        acc = Q(0)
        for j in range(n + 1):
            acc += binomial(nu, j) * (-x) ** j * r[n - j][n]
        out.append(acc)
    return out


def dihedral_ode_residual(f: ExactSeries, nu, x) -> ExactSeries:
    """(1-4y+2xy+x^2y^2) f'' + 3(x^2 y + x - 2) f' + x^2 (1-nu^2) f.

    Truncated two orders below f; the zero series certifies f as a solution.
    """
    if f.order < 3:
        raise PreconditionViolation("f must be truncated to order >= 3")
    nu, x = Q(nu), Q(x)
    n = f.order - 2
    f2 = f.differentiate().differentiate()
    f1 = f.differentiate().truncate(n)
    quad = ExactSeries([1, -4 + 2 * x, x * x], n)
    lin = ExactSeries([3 * (x - 2), 3 * x * x], n)
    return quad * f2 + lin * f1 + (x * x * (1 - nu * nu)) * f.truncate(n)


def companion_values(nu: float, x: float, y: complex) -> tuple[complex, complex]:
    """The two closed-form solutions cos/sin(nu*arccos(.))/sqrt(quadratic).

    Principal branches of arccos and the square root (cut along the negative
    real axis), matching the y -> 0 limits of the series solutions.
    """
    quad = 1 - 4 * y + 2 * x * y + (x * y) ** 2
    if abs(quad) < 1e-12:
        raise SingularityError(f"quadratic vanishes at y={y}")
    arg = (x * x * y + x - 2) / (2 * cmath.sqrt(1 - x))
    theta = cmath.acos(arg)
    root = cmath.sqrt(quad)
    return cmath.cos(nu * theta) / root, cmath.sin(nu * theta) / root


# ------------------------------------------------------------- log family


@dataclass(frozen=True)
class LogFamily:
    A: ExactSeries
    B: ExactSeries
    H: list[complex]
    eta: complex


def log_family(x, order: int) -> LogFamily:
    """The nu -> 0 limit family.

    For the specialization x = 2 (variable twisted to z): A = (1-4z^2)^(-1/2)
    with integer coefficients, B = -2 A arcsin(2z), eta = pi, H = B - pi*A as
    a float series.  For general rational x: the y-variable pair with
    A = (1-4y+2xy+x^2y^2)^(-1/2), B = 2 A log(1 - x(1+xy-sqrt(...))/2) and
    eta = log(1-x).
    """
    if order < 2:
        raise PreconditionViolation("order must be >= 2")
    x = Q(x)
    if x == 2:
        a = ExactSeries(
            [
                binomial(Q(-1, 2), n // 2) * (-4) ** (n // 2) if n % 2 == 0 else Q(0)
                for n in range(order)
            ],
            order,
        )
        arc = [Q(0)] * order
        for n in range(1, order, 2):
            m = (n - 1) // 2
            arc[n] = Q(math.comb(2 * m, m), 4**m * (2 * m + 1)) * 2**n
        b = -2 * a * ExactSeries(arc, order)
        eta = math.pi
        h = [float(b.coeffs[k]) - eta * float(a.coeffs[k]) for k in range(order)]
        return LogFamily(a, b, h, eta)
    delta2 = ExactSeries([1, -4 + 2 * x, x * x], order)
    a = ExactSeries.binomial_series(Q(-1, 2), order).compose(delta2 - 1)
    # inner = 1 - x*(1 + x*y - sqrt(delta2))/2
    inner = (
        ExactSeries.one(order)
        - Q(1, 2) * x * (ExactSeries([1, x], order) - delta2.sqrt())
    )
    b = 2 * a * inner.log()
    eta = cmath.log(complex(1 - x)) if x > 1 else math.log(float(1 - x))
    h = [float(b.coeffs[k]) - eta * complex(a.coeffs[k]) for k in range(order)]
    return LogFamily(a, b, h, eta)


# ------------------------------------------------------------ Catalan family


@dataclass(frozen=True)
class CatalanFamily:
    A: ExactSeries
    B: ExactSeries
    C_reduced: ExactSeries  # g(t) with C = sqrt(t) * g(t), t = 1 + 16x
    g2_by_index: list
    g2: object  # PadicApprox


def catalan_operator_residual(f: ExactSeries) -> ExactSeries:
    """L f  with  L = x(1+16x)^2 d^2/dx^2 + (1+16x)^2 d/dx - 4."""
    if f.order < 3:
        raise PreconditionViolation("f must be truncated to order >= 3")
    n = f.order - 2
    sq = ExactSeries([1, 32, 256], n)
    xsq = ExactSeries([0, 1, 32, 256], n)
    return (
        xsq * f.differentiate().differentiate()
        + sq * f.differentiate().truncate(n)
        - 4 * f.truncate(n)
    )


def catalan_reduced_c_residual(g: ExactSeries) -> ExactSeries:
    """16 t(t-1) g'' + 16(2t-1) g' + 4 g; zero iff sqrt(t)*g(t) solves L F = 0."""
    n = g.order - 2
    tt = ExactSeries([0, -16, 16], n)
    lin = ExactSeries([-16, 32], n)
    return tt * g.differentiate().differentiate() + lin * g.differentiate().truncate(
        n
    ) + 4 * g.truncate(n)


def catalan_family(order: int, prec: int = 64, consistency_bits: int = 10):
    """The 2-adic Catalan system: explicit solutions and the Apery-limit fit.

    Returns exact series A (homogeneous solution), B (the normalized solution
    of L F = 1+16x with B(0)=0, B'(0)=1, denominator type [1..n]^2), the
    reduced series of the second homogeneous solution C = sqrt(1+16x) g(1+16x),
    and the 2-adic Catalan constant G2 solved from D = B - (G2/2) A, where D is
    the explicit inhomogeneous solution expanded 2-adically.  Consistency of
    G2 across coefficient indices is enforced modulo 2^consistency_bits.
    """
    from .padiczeta import PadicApprox  # local import to avoid a cycle

    if order < 4:
        raise PreconditionViolation("order must be >= 4")
    root = ExactSeries.binomial_series(Q(1, 2), order).compose(
        ExactSeries([0, 16], order)
    )
    f21 = hyper_2f1(Q(1, 2), Q(1, 2), 1, order)
    a = root * ExactSeries(
        [f21.coeffs[k] * (-16) ** k for k in range(order)], order
    )
    # B: power-series solution of the inhomogeneous equation
    b = [Q(0)] * (order + 1)
    b[1] = Q(1)
    for m in range(1, order):
        rhs = Q(16) if m == 1 else Q(0)
        val = rhs - (32 * m * m - 4) * b[m]
        if m >= 2:
            val -= 256 * (m - 1) * (m - 1) * b[m - 1]
        b[m + 1] = val / ((m + 1) * (m + 1))
    bser = ExactSeries(b[:order], order)
    g_reduced = hyper_2f1(Q(1, 2), Q(1, 2), 1, order)

    # D coefficients 2-adically: D = -(1/4) sum_m c_m (1+16x)^(m+1) with
    # c_m = (m!)^2 / ((3/2)_m)^2, and v2(c_m) = 4m - 2*s2(m) -> infinity,
    # so truncating the m-sum once v2(c_m) clears the target is exact
    # modulo 2^target.
    target = prec + 8
    cms = []
    m = 0
    cm = Q(1)
    while _v2_fraction(cm) <= target + 4:
        cms.append(cm)
        cm = cm * (m + 1) * (m + 1) / (Q(2 * m + 3, 2) ** 2)
        m += 1
    dcoeffs = []
    for n in range(order):
        acc = Q(0)
        for mm, c in enumerate(cms):
            if mm + 1 < n:
                continue
            acc += c * math.comb(mm + 1, n)
        dcoeffs.append(Q(-1, 4) * acc * 16**n)

    g2_by_index = []
    for n in range(order):
        an = a.coeffs[n]
        if an == 0:
            continue
        num = PadicApprox.from_fraction(2 * (bser.coeffs[n] - dcoeffs[n]), abs_prec=target)
        g2_by_index.append((n, num / PadicApprox.from_fraction(an, abs_prec=target)))
    for (n1, v1), (n2, v2_) in zip(g2_by_index, g2_by_index[1:]):
        if not v1.agrees_with(v2_, consistency_bits):
            raise InconsistentG2(
                f"G2 from coefficients {n1} and {n2} disagree modulo "
                f"2^{consistency_bits}: {v1} vs {v2_}"
            )
    return CatalanFamily(a, bser, g_reduced, g2_by_index, g2_by_index[-1][1])


def _v2_fraction(q: Fraction) -> int:
    if q == 0:
        return 10**9
    num, den = q.numerator, q.denominator
    v = 0
    while num % 2 == 0:
        num //= 2
        v += 1
    while den % 2 == 0:
        den //= 2
        v -= 1
    return v
