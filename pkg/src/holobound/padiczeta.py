"""2-adic zeta machinery.

Hauptmodul q-expansion and its reversion, 2-stabilized Eisenstein series,
zeta_2(1+2k) by two independent routes (a Kummer limit through exact
Bernoulli values, and extraction from the overconvergence decay of an
Eisenstein product), coefficient denominator-type measurements, and the
exhaustive small-height inequality scan.

The prime is fixed to 2 throughout: divisor sums skip even divisors and the
Euler factor is (1 - 2^-s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (
    InsufficientPrecision,
    PreconditionViolation,
    RouteDisagreement,
    TypeViolation,
)
from .series import ExactSeries, check_denominator_type

Q = Fraction

_ZERO_VAL = 10**9  # sentinel valuation for zero-at-precision


def v2_int(n: int) -> int:
    if n == 0:
        return _ZERO_VAL
    return (n & -n).bit_length() - 1


def v2_fraction(q: Fraction) -> int:
    if q == 0:
        return _ZERO_VAL
    return v2_int(q.numerator) - v2_int(q.denominator)


class PadicApprox:
    """A 2-adic number 2^valuation * unit with unit known modulo 2^prec.

    ``unit`` is odd (zero only for the zero-at-precision element, which
    carries its absolute precision in ``valuation``).  Arithmetic tracks
    precision pessimistically.
    """

    __slots__ = ("valuation", "unit", "prec", "exact_value")

    def __init__(self, valuation: int, unit: int, prec: int, exact_value=None):
        if unit == 0:
            self.valuation = valuation  # absolute precision of the zero
            self.unit = 0
            self.prec = 0
        else:
            if prec < 1:
                raise PreconditionViolation("prec must be >= 1 for nonzero values")
            unit %= 1 << prec
            if unit % 2 == 0:
                raise PreconditionViolation("unit part must be odd")
            self.valuation = valuation
            self.unit = unit
            self.prec = prec
        self.exact_value = exact_value

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_fraction(cls, q, rel_prec: int | None = None, abs_prec: int | None = None):
        q = Q(q)
        if rel_prec is None and abs_prec is None:
            raise PreconditionViolation("need rel_prec or abs_prec")
        if q == 0:
            return cls(abs_prec if abs_prec is not None else rel_prec, 0, 0, Q(0))
        v = v2_fraction(q)
        if rel_prec is None:
            rel_prec = abs_prec - v
            if rel_prec < 1:
                return cls(abs_prec, 0, 0, None)  # indistinguishable from 0
        # strip the 2-power into the valuation
        num, den = q.numerator, q.denominator
        if v >= 0:
            num >>= v
        else:
            den >>= -v
        mod = 1 << rel_prec
        unit = (num % mod) * pow(den % mod, -1, mod) % mod
        return cls(v, unit, rel_prec, q)

    @classmethod
    def zero(cls, abs_prec: int):
        return cls(abs_prec, 0, 0, Q(0))

    # -- views ------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def abs_prec(self) -> int:
        return self.valuation if self.is_zero() else self.valuation + self.prec

    def v2(self) -> int:
        """Valuation; for zero-at-precision only a lower bound is known."""
        return self.valuation if not self.is_zero() else _ZERO_VAL

    def digit_string(self, max_digits: int = 64) -> str:
        """Binary digits of the unit part, least significant first."""
        if self.is_zero():
            return "0"
        bits = min(self.prec, max_digits)
        return "".join(str((self.unit >> i) & 1) for i in range(bits))

    def __repr__(self):
        if self.is_zero():
            return f"PadicApprox(0 mod 2^{self.valuation})"
        return f"PadicApprox(2^{self.valuation} * {self.unit} mod 2^{self.prec})"

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "PadicApprox":
        """Lift an exact rational to a precision that never limits self."""
        if isinstance(other, PadicApprox):
            return other
        q = Q(other)
        if q == 0:
            return PadicApprox.zero(self.abs_prec + 8)
        v = v2_fraction(q)
        return PadicApprox.from_fraction(q, rel_prec=max(self.abs_prec - v + 8, 1))

    def _as_shifted(self, base: int, mod_bits: int) -> int:
        """Integer congruent to self / 2^base modulo 2^mod_bits."""
        if self.is_zero():
            return 0
        shift = self.valuation - base
        return (self.unit << shift) % (1 << mod_bits)

    def __add__(self, other):
        other = self._coerce(other)
        ap = min(self.abs_prec, other.abs_prec)
        base = min(self.valuation if not self.is_zero() else ap,
                   other.valuation if not other.is_zero() else ap)
        bits = ap - base
        if bits <= 0:
            return PadicApprox.zero(ap)
        m = (self._as_shifted(base, bits) + other._as_shifted(base, bits)) % (1 << bits)
        if m == 0:
            return PadicApprox.zero(ap)
        v = v2_int(m)
        return PadicApprox(base + v, m >> v, bits - v)

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicApprox(self.valuation, (1 << self.prec) - self.unit, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        return self + (-other)

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            # 0 * x known modulo 2^(abs + v(x)) at best; be pessimistic
            zp = self if self.is_zero() else other
            nz = other if self is zp else self
            return PadicApprox.zero(zp.valuation + (nz.v2() if not nz.is_zero() else 0))
        prec = min(self.prec, other.prec)
        return PadicApprox(
            self.valuation + other.valuation,
            (self.unit * other.unit) % (1 << prec),
            prec,
        )

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero-at-precision")
        if self.is_zero():
            return PadicApprox.zero(self.valuation - other.valuation)
        prec = min(self.prec, other.prec)
        mod = 1 << prec
        return PadicApprox(
            self.valuation - other.valuation,
            (self.unit * pow(other.unit, -1, mod)) % mod,
            prec,
        )

    # -- comparisons --------------------------------------------------------

    def diff_valuation(self, other) -> int:
        """v2(self - other); _ZERO_VAL-capped when indistinguishable."""
        d = self - other
        return d.v2() if not d.is_zero() else d.valuation

    def agrees_with(self, other, bits: int) -> bool:
        """True iff self == other modulo 2^bits (absolute)."""
        d = self - other
        if d.is_zero():
            if d.valuation < bits:
                raise InsufficientPrecision(
                    f"agreement modulo 2^{bits} undecidable at precision 2^{d.valuation}"
                )
            return True
        return d.valuation >= bits


# ------------------------------------------------------------------ Bernoulli

AKIYAMA_TANIGAWA_CUTOFF = 320


@lru_cache(maxsize=8)
def bernoulli_akiyama_tanigawa(n_max: int) -> tuple:
    """B_0 .. B_n_max by the Akiyama-Tanigawa recurrence (B_1 = -1/2)."""
    a = []
    out = []
    for m in range(n_max + 1):
        a.append(Q(1, m + 1))
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    if n_max >= 1:
        out[1] = -out[1]
    return tuple(out)


@lru_cache(maxsize=None)
def bernoulli_exact(n: int) -> Fraction:
    """Exact Bernoulli number B_n.

    Small indices come from the Akiyama-Tanigawa table; isolated large even
    indices from mpmath's zeta-based exact bernfrac (the two backends are
    cross-checked over their overlap in the test suite).
    """
    if n < 0:
        raise PreconditionViolation("Bernoulli index must be >= 0")
    if n <= AKIYAMA_TANIGAWA_CUTOFF:
        return bernoulli_akiyama_tanigawa(AKIYAMA_TANIGAWA_CUTOFF)[n]
    if n % 2 == 1:
        return Q(0)
    from mpmath import bernfrac

    p, q = bernfrac(n)
    return Q(int(p), int(q))


def zeta_star_at_negative(j: int) -> Fraction:
    """zeta*(1-2j) = (1 - 2^(2j-1)) * zeta(1-2j) exactly, for j >= 1."""
    if j < 1:
        raise PreconditionViolation("j must be >= 1")
    zeta_val = -bernoulli_exact(2 * j) / (2 * j)
    return (1 - (1 << (2 * j - 1))) * zeta_val


# ------------------------------------------------------------ q-expansions


@dataclass(frozen=True)
class QExpansion:
    """Series with its constant term split off (the constant may be 2-adic)."""

    constant: object  # Fraction or PadicApprox
    tail: ExactSeries  # zero constant term
    weight: int | None
    var: str = "q"

    @property
    def order(self):
        return self.tail.order


def hauptmodul(order: int) -> QExpansion:
    """x(q) = q * prod_(n>=1) (1+q^n)^24, truncated."""
    if order < 5:
        raise PreconditionViolation("order must be >= 5")
    prod = ExactSeries.one(order)
    for n in range(1, order):
        factor = [Q(0)] * order
        for i in range(0, order, n):
            k = i // n
            if k > 24:
                break
            factor[i] = Q(math.comb(24, k))
        prod = prod * ExactSeries(factor, order)
    x = ExactSeries([Q(0)] + list(prod.coeffs[: order - 1]), order)
    return QExpansion(Q(0), x, None, "q")


def q_of_x(order: int) -> QExpansion:
    """Formal inverse of the Hauptmodul: q = x - 24x^2 + 852x^3 - ..."""
    x = hauptmodul(order).tail
    return QExpansion(Q(0), x.reversion(), None, "x")


def _odd_divisor_power_sum(n: int, e: int) -> Fraction:
    acc = Q(0)
    for d in range(1, n + 1):
        if n % d == 0 and d % 2 == 1:
            acc += Q(d) ** e
    return acc


def eisenstein_star(k: int, order: int, zeta_const=None) -> QExpansion:
    """2-stabilized Eisenstein q-expansion of weight 2k.

    Constant term zeta_2(1-2k)/2: computed exactly (via the Euler-deprived
    zeta at a negative odd integer) for k > 0, and taken from ``zeta_const``
    (= zeta_2(1-2k), rational truncation or PadicApprox) for k < 0.  The
    q^n coefficient is the sum of d^(2k-1) over odd divisors d of n.
    """
    if k == 0:
        raise PreconditionViolation("weight must be nonzero")
    if k > 0:
        const = zeta_star_at_negative(k) / 2
    else:
        if zeta_const is None:
            raise PreconditionViolation(
                "negative weight needs the zeta_2 constant supplied"
            )
        const = (
            zeta_const / 2
            if isinstance(zeta_const, PadicApprox)
            else Q(zeta_const) / 2
        )
    tail = ExactSeries(
        [Q(0)] + [_odd_divisor_power_sum(n, 2 * k - 1) for n in range(1, order)],
        order,
    )
    return QExpansion(const, tail, 2 * k, "q")


def eisenstein_star_in_x(k: int, order: int, zeta_const=None) -> QExpansion:
    """Same series through the formal substitution q = q(x)."""
    e = eisenstein_star(k, order, zeta_const)
    qx = q_of_x(order).tail
    return QExpansion(e.constant, e.tail.compose(qx), e.weight, "x")


# ------------------------------------------------------------ two-route zeta


@lru_cache(maxsize=None)
def _route_a_values(k: int, bern_index_cap: int):
    """Raw Kummer-limit approximants zeta*(1+2(k - 2^t)) with their t indices."""
    out = []
    t = 1
    while (1 << t) <= k:
        t += 1
    while 2 * ((1 << t) - k) <= bern_index_cap:
        j = (1 << t) - k
        out.append((t, zeta_star_at_negative(j)))
        t += 1
    return out


def zeta2_route_a(k: int, T: int, bern_index_cap: int = 40000, accel_levels: int = 6):
    """The Kummer-congruence route with extrapolation acceleration.

    The raw approximants A_t = zeta*(1+2(k-2^t)) converge 2-adically with one
    additional matched bit per step.  Since the error is analytic in the
    weight increment -2^(t+1), Romberg elimination with node ratio 2 (the
    divisors 2^j - 1 are odd, so the elimination is exact 2-adically) turns
    the t-range into roughly (levels+1)*t matched bits.  The claimed
    precision is the measured valuation of the difference of the two deepest
    extrapolants; it is a lower bound in practice.

    Returns (value, measured_bits, raw_t_list, raw_stabilities).
    """
    vals = _route_a_values(k, bern_index_cap)
    if len(vals) < 3:
        raise InsufficientPrecision("route A needs at least three approximants")
    ts = [t for t, _ in vals]
    raw = [v for _, v in vals]
    raw_stab = [v2_fraction(b - a) for a, b in zip(raw, raw[1:])]
    levels = min(accel_levels, len(raw) - 2)
    col = raw
    prev_top = None
    for j in range(1, levels + 1):
        col = [
            (Q(1 << j) * col[i] - col[i + 1]) / ((1 << j) - 1)
            for i in range(len(col) - 1)
        ]
        prev_top = col[-2] if len(col) >= 2 else prev_top
    if len(col) < 2:
        raise InsufficientPrecision("not enough nodes after extrapolation")
    measured = v2_fraction(col[-1] - col[-2])
    value = PadicApprox.from_fraction(col[-1], abs_prec=measured)
    return value, measured, ts, raw_stab


def zeta2_route_b(k: int, T: int, max_terms: int = 64):
    """Overconvergence extraction: with P = E*_2k(x) and K = P * E'_-2k(x),
    the x^n coefficient of the true product c*P + K has 2-adic valuation
    growing like 12n, so c_n := -K_n / P_n converges to c = zeta_2(1+2k)/2.
    Returns (2*c as PadicApprox, per-step agreement valuations)."""
    n_max = max(3, (T + 14) // 12 + 2)
    while True:
        if n_max > max_terms:
            raise InsufficientPrecision(
                f"route B did not reach 2^{T} within {max_terms} coefficients"
            )
        order = n_max + 2
        p = eisenstein_star_in_x(k, order)
        eprime = eisenstein_star_in_x(-k, order, zeta_const=Q(0)).tail
        pfull = ExactSeries([p.constant] + list(p.tail.coeffs[1:]), order)
        kser = pfull * eprime
        cands = []
        for n in range(1, order):
            if pfull.coeffs[n] == 0:
                continue
            cands.append(-kser.coeffs[n] / pfull.coeffs[n])
        agreements = [v2_fraction(b - a) for a, b in zip(cands, cands[1:])]
        if agreements and agreements[-1] >= T:
            value = PadicApprox.from_fraction(2 * cands[-1], abs_prec=agreements[-1] + 1)
            return value, agreements
        n_max += max(2, (T - (agreements[-1] if agreements else 0) + 11) // 12)


_zeta2_cache: dict = {}


def zeta2(k: int, T: int, bern_index_cap: int = 70000) -> PadicApprox:
    """zeta_2(1+2k) known modulo 2^T (times 2^valuation).

    Negative k: exact rational (the classical equality with the 2-deprived
    zeta value).  Positive k: route B is the production path; route A (the
    Kummer limit) independently validates it, and disagreement is fatal.
    """
    if k == 0:
        raise PreconditionViolation("k must be nonzero")
    key = (k, T, bern_index_cap)
    if key in _zeta2_cache:
        return _zeta2_cache[key]
    if k < 0:
        exact = zeta_star_at_negative(-k)
        out = PadicApprox.from_fraction(exact, rel_prec=T)
        out.exact_value = exact
        _zeta2_cache[key] = out
        return out
    val_b, _ = zeta2_route_b(k, T)
    val_a, measured_a, _, _ = zeta2_route_a(k, T, bern_index_cap)
    check_bits = min(T, measured_a)
    if not val_b.agrees_with(val_a, check_bits):
        raise RouteDisagreement(
            f"zeta_2(1+2*{k}): Kummer route and overconvergence route disagree "
            f"modulo 2^{check_bits}"
        )
    out = PadicApprox(val_b.valuation, val_b.unit, min(val_b.prec, T))
    _zeta2_cache[key] = out
    return out


# ------------------------------------------------- type and growth reporting


@dataclass(frozen=True)
class HReport:
    k: int
    order: int
    integrality_ok: bool
    denominator_type_ok: bool
    h_valuations: list
    min_v2_slack: int
    growth_ratio: float  # |K_n|^(1/n) estimate of archimedean coefficient growth


def h_series_and_types(k: int, order: int, T: int | None = None) -> HReport:
    """Builds E*_2k(x) and E'_-2k(x) and checks the three coefficient claims:
    integrality of the weight-2k series past its constant, the [1..(2k+1)n]
    denominator type of the negative-weight tail, and v2 >= -12n growth of
    the overconvergent product's coefficients."""
    if order < 10:
        raise PreconditionViolation("order must be >= 10")
    if k < 1:
        raise PreconditionViolation("k must be a positive integer")
    p = eisenstein_star_in_x(k, order + 2)
    for n in range(1, order + 1):
        if p.tail.coeffs[n].denominator != 1:
            raise TypeViolation(
                f"weight-{2*k} series has non-integer coefficient at x^{n}", index=n
            )
    # The type statistic of the negative-weight tail is 2k+1, realized as the
    # (2k+1)-fold bracket product [1..n]^(2k+1) (the single sloped bracket
    # [1..(2k+1)n] is provably too small already at n = 3).
    eprime = eisenstein_star_in_x(-k, order + 2, zeta_const=Q(0)).tail
    ok, bad = check_denominator_type(eprime, [1] * (2 * k + 1), e=0, N=order)
    if not ok:
        raise TypeViolation(
            f"negative-weight tail fails the [1..n]^{2*k+1} type at x^{bad}",
            index=bad,
        )
    # 2-adic growth of the overconvergent product H = c*P + K
    n_v2 = min(order, 12)
    t_needed = T if T is not None else 12 * n_v2 + 24
    c = zeta2(k, t_needed) / PadicApprox.from_fraction(2, rel_prec=t_needed)
    pfull = ExactSeries([p.constant] + list(p.tail.coeffs[1:]), order + 2)
    kser = pfull * eprime
    h_vals = []
    slack = 10**9
    for n in range(1, n_v2 + 1):
        hn = c * PadicApprox.from_fraction(
            pfull.coeffs[n], rel_prec=t_needed
        ) + PadicApprox.from_fraction(kser.coeffs[n], rel_prec=t_needed)
        v = hn.v2() if not hn.is_zero() else hn.valuation
        h_vals.append((n, v))
        if v < -12 * n:
            raise TypeViolation(
                f"H coefficient at x^{n} has v2 = {v} < {-12*n}", index=n
            )
        slack = min(slack, v - (-12 * n))
    n_g = order
    growth = abs(float(kser.coeffs[n_g])) ** (1.0 / n_g) if kser.coeffs[n_g] else 0.0
    return HReport(k, order, True, True, h_vals, slack, growth)


# ------------------------------------------------------------- the 5-scan


@dataclass(frozen=True)
class ScanReport:
    max_height: int
    kappa: int
    precision_bits: int
    zeta_valuation: int
    exceptions: list
    reverified: bool


def zeta5_inequality_scan(max_height: int, kappa: int = 20) -> ScanReport:
    """Enumerate coprime (p, q), max(|p|, |q|) <= max_height, and return all
    pairs violating |zeta_2(5) - p/q|_2 > max(|p|, |q|)^(-kappa).

    Any exception is re-verified at doubled precision before being reported.
    """
    if max_height > 1000:
        raise PreconditionViolation("max_height beyond the desk-scale budget")
    T = math.ceil(kappa * math.log2(max(max_height, 2))) + 8
    z = zeta2(2, T)

    def violations(z_val, bits):
        out = []
        for q in range(1, max_height + 1):
            for p in range(-max_height, max_height + 1):
                if math.gcd(abs(p), q) != 1:
                    continue
                h = max(abs(p), q)
                bound = kappa * math.log2(h) if h > 1 else 0.0
                diff = z_val - Q(p, q)
                v = diff.v2() if not diff.is_zero() else diff.valuation
                # violation: |zeta - p/q|_2 <= H^-kappa, i.e. v >= bound
                if v >= bound:
                    out.append((p, q, v))
        return out

    exc = violations(z, T)
    reverified = False
    if exc:
        z2x = zeta2(2, 2 * T)
        exc = [e for e in violations(z2x, 2 * T) if e[:2] in {x[:2] for x in exc}]
        reverified = True
    return ScanReport(max_height, kappa, T, z.v2(), exc, reverified or not exc)
