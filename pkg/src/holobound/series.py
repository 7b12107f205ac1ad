"""Exact rational arithmetic: truncated power series, lcm tables, denominator types.

Everything in this module is exact (``fractions.Fraction`` coefficients) and
immutable after construction.  Truncation orders are explicit everywhere:
an ``ExactSeries`` of order N knows its coefficients for powers 0..N-1 and
nothing beyond, and every operation truncates its result to the minimum
order at which all inputs are known.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PreconditionViolation, ShapeError

Q = Fraction

_lcm_table = [1, 1]  # lcm_upto(0) == lcm_upto(1) == 1


def lcm_upto(n: int) -> int:
    """lcm(1, 2, ..., n), memoized; 1 for n in {0, 1}."""
    if n < 0:
        raise PreconditionViolation("lcm_upto requires n >= 0")
    while len(_lcm_table) <= n:
        k = len(_lcm_table)
        _lcm_table.append(math.lcm(_lcm_table[-1], k))
    return _lcm_table[n]


def binomial(a, k: int) -> Fraction:
    """Generalized binomial coefficient C(a, k) for rational or integer a."""
    if k < 0:
        return Q(0)
    a = Q(a)
    num = Q(1)
    for i in range(k):
        num *= a - i
    return num / math.factorial(k)


class ExactSeries:
    """Truncated formal power series with Fraction coefficients.

    ``coeffs[n]`` is the coefficient of x^n; ``len(coeffs) == order`` and
    arithmetic never reads beyond the truncation order.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = [Q(c) for c in coeffs]
        if order is None:
            order = len(cs)
        if order < len(cs):
            cs = cs[:order]
        elif order > len(cs):
            cs.extend(Q(0) for _ in range(order - len(cs)))
        self.coeffs = tuple(cs)
        self.order = order

    # -- construction helpers ------------------------------------------------

    @classmethod
    def zero(cls, order: int) -> "ExactSeries":
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> "ExactSeries":
        return cls([1], order)

    @classmethod
    def identity(cls, order: int) -> "ExactSeries":
        return cls([0, 1], order)

    @classmethod
    def monomial(cls, c, n: int, order: int) -> "ExactSeries":
        cs = [Q(0)] * order
        if n < order:
            cs[n] = Q(c)
        return cls(cs, order)

    @classmethod
    def binomial_series(cls, exponent, order: int, sign: int = 1) -> "ExactSeries":
        """(1 + sign*x)^exponent as a formal binomial series."""
        e = Q(exponent)
        cs = [Q(1)]
        for n in range(1, order):
            cs.append(cs[-1] * (e - (n - 1)) / n * sign)
        return cls(cs, order)

    # -- basics --------------------------------------------------------------

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        tail = ", ..." if self.order > 6 else ""
        return f"ExactSeries([{head}{tail}], order={self.order})"

    def __eq__(self, other):
        if not isinstance(other, ExactSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.order))

    def __getitem__(self, n: int) -> Fraction:
        if n >= self.order:
            raise PreconditionViolation(
                f"coefficient {n} requested beyond truncation order {self.order}"
            )
        return self.coeffs[n]

    def truncate(self, order: int) -> "ExactSeries":
        if order > self.order:
            raise PreconditionViolation(
                f"cannot promote series of order {self.order} to order {order}"
            )
        return ExactSeries(self.coeffs[:order], order)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None for the zero truncation."""
        for n, c in enumerate(self.coeffs):
            if c != 0:
                return n
        return None

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ExactSeries):
            other = ExactSeries([Q(other)], self.order)
        n = min(self.order, other.order)
        return ExactSeries([self.coeffs[i] + other.coeffs[i] for i in range(n)], n)

    __radd__ = __add__

    def __neg__(self):
        return ExactSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        if not isinstance(other, ExactSeries):
            other = ExactSeries([Q(other)], self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ExactSeries):
            c = Q(other)
            return ExactSeries([c * a for a in self.coeffs], self.order)
        n = min(self.order, other.order)
        out = [Q(0)] * n
        for i, a in enumerate(self.coeffs[:n]):
            if a == 0:
                continue
            for j in range(n - i):
                b = other.coeffs[j]
                if b != 0:
                    out[i + j] += a * b
        return ExactSeries(out, n)

    __rmul__ = __mul__

    def differentiate(self) -> "ExactSeries":
        if self.order < 1:
            raise PreconditionViolation("cannot differentiate an order-0 truncation")
        return ExactSeries(
            [self.coeffs[n] * n for n in range(1, self.order)], self.order - 1
        )

    def integrate(self) -> "ExactSeries":
        """Antiderivative with zero constant term; order grows by one."""
        return ExactSeries(
            [Q(0)] + [self.coeffs[n] / (n + 1) for n in range(self.order)],
            self.order + 1,
        )

    def compose(self, inner: "ExactSeries") -> "ExactSeries":
        """self(inner(x)); inner must have zero constant term."""
        if inner.order > 0 and inner.coeffs[0] != 0:
            raise PreconditionViolation(
                "compose: inner series has nonzero constant term"
            )
        n = min(self.order, inner.order)
        inner = inner.truncate(n)
        acc = ExactSeries.zero(n)
        for c in reversed(self.coeffs[:n]):
            acc = acc * inner + c
        return acc

    def reciprocal(self) -> "ExactSeries":
        if self.order == 0 or self.coeffs[0] == 0:
            raise PreconditionViolation("reciprocal: constant term vanishes")
        n = self.order
        inv0 = 1 / self.coeffs[0]
        out = [inv0] + [Q(0)] * (n - 1)
        for m in range(1, n):
            s = Q(0)
            for i in range(1, m + 1):
                s += self.coeffs[i] * out[m - i]
            out[m] = -inv0 * s
        return ExactSeries(out, n)

    def __truediv__(self, other):
        if isinstance(other, ExactSeries):
            return self * other.reciprocal()
        return self * (1 / Q(other))

    def reversion(self) -> "ExactSeries":
        """Compositional inverse g with self(g(x)) = x + O(x^order).

        Lagrange inversion: [x^n] g = (1/n) [x^(n-1)] (x/f)^n.
        """
        if self.order < 2 or self.coeffs[0] != 0:
            raise PreconditionViolation("reversion: constant term must vanish")
        if self.coeffs[1] == 0:
            raise PreconditionViolation("reversion: linear term must not vanish")
        n = self.order
        w = ExactSeries(self.coeffs[1:], n - 1)  # f/x, unit constant term
        u = w.reciprocal()
        out = [Q(0), Q(0)] + [Q(0)] * (n - 2)
        p = ExactSeries.one(n - 1)
        for k in range(1, n):
            p = p * u
            out[k] = p.coeffs[k - 1] / k
        return ExactSeries(out, n)

    def power(self, k: int) -> "ExactSeries":
        if k < 0:
            return self.reciprocal().power(-k)
        out = ExactSeries.one(self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def sqrt(self) -> "ExactSeries":
        """Square root with constant term +sqrt(c0); c0 must be a rational square."""
        if self.order == 0 or self.coeffs[0] == 0:
            raise PreconditionViolation("sqrt: constant term vanishes")
        c0 = self.coeffs[0]
        r0 = Q(math.isqrt(c0.numerator), math.isqrt(c0.denominator))
        if r0 * r0 != c0:
            raise PreconditionViolation("sqrt: constant term is not a rational square")
        # (c0 + t)^(1/2) = r0 * (1 + t/c0)^(1/2)
        t = (self - c0) / c0
        half = ExactSeries.binomial_series(Q(1, 2), self.order)
        return r0 * half.compose(t)

    def log(self) -> "ExactSeries":
        """log(self) for unit constant term, by term-wise integration of f'/f."""
        if self.order == 0 or self.coeffs[0] != 1:
            raise PreconditionViolation("log requires constant term 1")
        quot = self.differentiate() * self.reciprocal().truncate(self.order - 1)
        return quot.integrate().truncate(self.order)

    def evaluate(self, x):
        """Numeric Horner evaluation (float/complex)."""
        acc = 0j if isinstance(x, complex) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + (c.numerator / c.denominator)
        return acc


# -- denominator types -------------------------------------------------------


class DenominatorType:
    """Staircase matrix of bracket slopes, with optional integration exponents.

    Each column j must look like 0 = b[0][j] = ... = b[u_j-1][j] < b[u_j][j]
    = ... = b[m-1][j]; u_j counts the leading zero rows.
    """

    __slots__ = ("b_matrix", "u_indices", "e_vector", "m", "r")

    def __init__(self, b_matrix: Sequence[Sequence], e_vector=None):
        rows = [tuple(Q(x) for x in row) for row in b_matrix]
        if not rows:
            raise ShapeError("empty matrix")
        m = len(rows)
        r = len(rows[0])
        if any(len(row) != r for row in rows):
            raise ShapeError("ragged matrix")
        if any(x < 0 for row in rows for x in row):
            raise ShapeError("negative entry")
        u = []
        for j in range(r):
            col = [rows[i][j] for i in range(m)]
            uj = 0
            while uj < m and col[uj] == 0:
                uj += 1
            top = col[uj] if uj < m else None
            for i in range(uj, m):
                if col[i] != top:
                    raise ShapeError(
                        f"column {j} is not a staircase: nonzero block not constant"
                    )
            u.append(uj)
        self.b_matrix = tuple(rows)
        self.u_indices = tuple(u)
        self.m = m
        self.r = r
        if e_vector is not None:
            e_vector = tuple(int(e) for e in e_vector)
            if len(e_vector) != m or any(e < 0 for e in e_vector):
                raise ShapeError("e_vector must hold one nonnegative integer per row")
        self.e_vector = e_vector

    def row_sums(self):
        return [sum(row, Q(0)) for row in self.b_matrix]

    def column_tops(self):
        out = []
        for j, uj in enumerate(self.u_indices):
            out.append(self.b_matrix[-1][j] if uj < self.m else Q(0))
        return out


def tau(b: DenominatorType) -> Fraction:
    """Weighted row-sum statistic (1/m^2) * sum (2i-1) sigma_i.

    Evaluates both the row-sum form and the closed form
    sigma_m - (1/m^2) * sum u_j^2 b_j and insists they agree exactly.
    """
    if not isinstance(b, DenominatorType):
        b = DenominatorType(b)
    m = b.m
    sig = b.row_sums()
    row_form = sum(((2 * (i + 1) - 1) * sig[i] for i in range(m)), Q(0)) / (m * m)
    tops = b.column_tops()
    closed = sig[-1] - sum(
        (Q(b.u_indices[j] ** 2) * tops[j] for j in range(b.r)), Q(0)
    ) / (m * m)
    if row_form != closed:
        raise ShapeError(
            f"tau forms disagree ({row_form} vs {closed}); staircase invariant broken"
        )
    return row_form


def check_denominator_type(f: ExactSeries, b_row, e: int = 0, N: int | None = None):
    """Is coeff_n * n^e * prod_j lcm(1..floor(b_j*n)) integral for 1 <= n <= N?

    Returns (ok, first_failing_index).  Fractional b_j*n is floored, reading
    the bracket [1, ..., b*n] as [1, ..., floor(b*n)].
    """
    if N is None:
        N = f.order - 1
    if N > f.order - 1:
        raise PreconditionViolation(
            f"check to N={N} exceeds truncation order {f.order}"
        )
    slopes = [Q(b) for b in b_row]
    for n in range(1, N + 1):
        c = f.coeffs[n]
        if c == 0:
            continue
        val = c * (n ** e)
        for bj in slopes:
            val *= lcm_upto(int(bj * n))  # Fraction floors toward zero here
        if val.denominator != 1:
            return False, n
    return True, None
