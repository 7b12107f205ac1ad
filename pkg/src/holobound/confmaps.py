"""Entire multivalent maps, circle/lune Hauptmodul templates, and scalings.

Every map fixes 0 and (before scaling) has expansion z + O(z^2).  Evaluation
is available in plain complex form and in log-polar form (log-magnitude and
phase), the latter mandatory for the growth-order-1/2 maps at large radii
where the plain value would overflow.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, NonConvergence, PreconditionViolation
from .series import ExactSeries

Q = Fraction


def _is_rationalizable(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return True
    if isinstance(x, float):
        return x == round(x, 12) and Fraction(x).limit_denominator(10**9) == Fraction(x)
    return False


class AnalyticMap:
    """A closed-form analytic map template, evaluable on the closed disc.

    kinds: 'identity', 'psi', 'phi', 'mobius_circle_x', 'lune_x', 'scaled',
    'custom_series'.
    """

    def __init__(self, kind, alpha=None, beta=None, u_branch=None, inner=None,
                 R=None, coeffs=None):
        self.kind = kind
        self.alpha = complex(alpha) if alpha is not None else None
        self.beta = complex(beta) if beta is not None else None
        self.inner = inner
        self.R = float(R) if R is not None else None
        self.coeffs = list(coeffs) if coeffs is not None else None
        if kind == "phi":
            a, b = self.alpha, self.beta
            self.u = complex(u_branch) if u_branch is not None else cmath.atanh(
                cmath.sqrt(a / b)
            )
            self.tanh_u = cmath.tanh(self.u)
            self._c0 = a / (2.0 * cmath.sinh(self.u) ** 2)
            self._cosh2u = cmath.cosh(2.0 * self.u)
            self._slope = -self.u * self.tanh_u / a  # xi(z) = u^2 + slope*z
        elif kind == "psi":
            a, b = self.alpha, self.beta
            self._s = cmath.sqrt(a) * cmath.sqrt(b)
            self._A = -((cmath.sqrt(b) - cmath.sqrt(a)) ** 2) / 4.0
            self._B = -((cmath.sqrt(b) + cmath.sqrt(a)) ** 2) / 4.0
            self._const = (a + b) / 2.0

    def cache_key(self):
        if self.kind == "scaled":
            return ("scaled", self.R, self.inner.cache_key())
        if self.kind == "custom_series":
            return ("custom_series", tuple(self.coeffs))
        return (self.kind, self.alpha, self.beta,
                getattr(self, "u", None))

    # -- evaluation -----------------------------------------------------

    def log_polar(self, z):
        """(log|m(z)|, arg-ish phase) on an array of points; never overflows."""
        z = np.asarray(z, dtype=np.complex128)
        if self.kind == "identity":
            with np.errstate(divide="ignore"):
                return np.log(np.abs(z)), np.angle(z)
        if self.kind == "scaled":
            return self.inner.log_polar(self.R * z)
        if self.kind == "custom_series":
            val = self._horner(z)
            with np.errstate(divide="ignore"):
                return np.log(np.abs(val)), np.angle(val)
        if self.kind == "psi":
            v = z / self._s
            terms_l = np.stack(
                [
                    np.log(abs(self._A)) + v.real if abs(self._A) else v.real - np.inf,
                    np.log(abs(self._B)) - v.real if abs(self._B) else -v.real - np.inf,
                    np.full(z.shape, math.log(abs(self._const)) if self._const else -np.inf),
                ]
            )
            terms_p = np.stack(
                [
                    cmath.phase(self._A) + v.imag,
                    cmath.phase(self._B) - v.imag,
                    np.full(z.shape, cmath.phase(self._const) if self._const else 0.0),
                ]
            )
            m = terms_l.max(axis=0)
            s = (np.exp(terms_l - m) * np.exp(1j * terms_p)).sum(axis=0)
            with np.errstate(divide="ignore"):
                return m + np.log(np.abs(s)), np.angle(s)
        if self.kind == "phi":
            xi = self.u * self.u + self._slope * z
            w = 2.0 * np.sqrt(xi)  # cosh is even: branch of the root is moot
            m = np.abs(w.real)
            wt = np.where(w.real >= 0, w, -w)
            bracket = self._cosh2u * np.exp(-m) - 0.5 * (
                np.exp(wt - m) + np.exp(-wt - m)
            )
            with np.errstate(divide="ignore"):
                return (
                    math.log(abs(self._c0)) + m + np.log(np.abs(bracket)),
                    cmath.phase(self._c0) + np.angle(bracket),
                )
        if self.kind in ("mobius_circle_x", "lune_x"):
            qpt = self._inner_point(z)
            if np.any(np.abs(qpt) >= 1.0 - 1e-12):
                raise DomainError("composed q-point on or outside the unit circle")
            return _kernels.hauptmodul_logpolar(qpt)
        raise PreconditionViolation(f"unknown map kind {self.kind}")

    def _inner_point(self, z):
        if self.kind == "mobius_circle_x":
            return z / (2.0 * z + 3.0)
        # lune: (29/63) * (1 + z - sqrt(1 - (82/841) z + z^2))
        p = 1.0 - (82.0 / 841.0) * z + z * z
        return (29.0 / 63.0) * (1.0 + z - np.sqrt(p))

    def _horner(self, z):
        acc = np.zeros_like(z)
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    def eval(self, z):
        """Plain complex value; valid while |m(z)| stays below ~1e300."""
        scalar = np.isscalar(z) or getattr(z, "shape", None) == ()
        arr = np.asarray([z] if scalar else z, dtype=np.complex128)
        la, ph = self.log_polar(arr)
        out = np.exp(la) * np.exp(1j * ph)
        return complex(out[0]) if scalar else out.reshape(np.shape(z))

    def log_abs(self, z):
        """log|m(z)| computed stably; never overflows."""
        scalar = np.isscalar(z) or getattr(z, "shape", None) == ()
        arr = np.asarray([z] if scalar else z, dtype=np.complex128)
        la, _ = self.log_polar(arr)
        return float(la[0]) if scalar else la.reshape(np.shape(z))

    # -- series and size --------------------------------------------------

    def series(self, order: int):
        """Taylor coefficients at 0: an ExactSeries when the data is rational,
        otherwise a list of complex floats."""
        if order < 2:
            raise PreconditionViolation("order must be >= 2")
        if self.kind == "identity":
            return ExactSeries.identity(order)
        if self.kind == "custom_series":
            return list(self.coeffs[:order]) + [0j] * (order - len(self.coeffs))
        if self.kind == "scaled":
            inner = self.inner.series(order)
            if isinstance(inner, ExactSeries) and _is_rationalizable(self.R):
                rq = Fraction(self.R)
                return ExactSeries(
                    [inner.coeffs[n] * rq**n for n in range(order)], order
                )
            cs = inner.coeffs if isinstance(inner, ExactSeries) else inner
            return [complex(c) * self.R**n for n, c in enumerate(cs)]
        if self.kind == "psi":
            s2 = self.alpha * self.beta
            apb = self.alpha + self.beta
            if _is_rationalizable_pair(s2, apb):
                s2q, apbq = Fraction(s2.real), Fraction(apb.real)
                cs = [Q(0)] * order
                for n in range(1, order):
                    m, odd = divmod(n, 2)
                    if odd:
                        cs[n] = Q(1) / (s2q**m * math.factorial(n))
                    else:
                        cs[n] = -apbq / 2 / (s2q ** (m - 1) * math.factorial(n)) / s2q
                return ExactSeries(cs, order)
            cs = [0j] * order
            for n in range(1, order):
                m, odd = divmod(n, 2)
                if odd:
                    cs[n] = 1.0 / (s2**m * math.factorial(n))
                else:
                    cs[n] = -apb / 2.0 / (s2**m * math.factorial(n))
            return cs
        if self.kind == "phi":
            g = [self._cosh2u, cmath.sinh(2 * self.u) / self.u]
            xi0 = self.u * self.u
            for k in range(order):
                g.append(
                    (g[k] - (k + 1) * (k + 0.5) * g[k + 1]) / (xi0 * (k + 2) * (k + 1))
                )
            return [0j] + [
                -self._c0 * g[n] * self._slope**n for n in range(1, order)
            ]
        if self.kind in ("mobius_circle_x", "lune_x"):
            from .padiczeta import hauptmodul

            xq = hauptmodul(order).tail
            return xq.compose(self._inner_series(order))
        raise PreconditionViolation(f"unknown map kind {self.kind}")

    def _inner_series(self, order: int) -> ExactSeries:
        if self.kind == "mobius_circle_x":
            cs = [Q(0)] * order
            for n in range(1, order):
                cs[n] = Q((-2) ** (n - 1), 3**n)
            return ExactSeries(cs, order)
        p = ExactSeries([1, Q(-82, 841), 1], order)
        return Q(29, 63) * (ExactSeries([1, 1], order) - p.sqrt())

    @property
    def size(self) -> float:
        """Conformal size |m'(0)| including any scaling factor."""
        if self.kind == "identity":
            return 1.0
        if self.kind == "scaled":
            return self.R * self.inner.size
        if self.kind in ("psi", "phi"):
            return 1.0
        if self.kind == "mobius_circle_x":
            return 1.0 / 3.0
        if self.kind == "lune_x":
            return 14.0 / 29.0
        return abs(complex(self.coeffs[1])) if len(self.coeffs) > 1 else 0.0

    def log_size(self) -> float:
        if self.kind == "scaled":
            return math.log(self.R) + self.inner.log_size()
        return math.log(self.size)

    def __repr__(self):
        if self.kind == "scaled":
            return f"scaled({self.inner!r}, R={self.R})"
        if self.kind in ("psi", "phi"):
            return f"{self.kind}(alpha={self.alpha}, beta={self.beta})"
        return self.kind


def _is_rationalizable_pair(s2: complex, apb: complex) -> bool:
    return (
        abs(s2.imag) == 0.0
        and abs(apb.imag) == 0.0
        and _is_rationalizable(s2.real)
        and _is_rationalizable(apb.real)
    )


# -- constructors ---------------------------------------------------------


def identity_map() -> AnalyticMap:
    return AnalyticMap("identity")


def psi_map(alpha, beta) -> AnalyticMap:
    return AnalyticMap("psi", alpha=alpha, beta=beta)


def phi_map(alpha, beta, u_branch=None) -> AnalyticMap:
    return AnalyticMap("phi", alpha=alpha, beta=beta, u_branch=u_branch)


def mobius_circle_map() -> AnalyticMap:
    return AnalyticMap("mobius_circle_x")


def lune_map() -> AnalyticMap:
    return AnalyticMap("lune_x")


def scaled_map(inner: AnalyticMap, R) -> AnalyticMap:
    if R <= 0:
        raise PreconditionViolation("scaling radius must be positive")
    return AnalyticMap("scaled", inner=inner, R=R)


def series_map(coeffs: Sequence) -> AnalyticMap:
    return AnalyticMap("custom_series", coeffs=coeffs)


# -- spec-facing functional wrappers --------------------------------------


def eval_map(m: AnalyticMap, z):
    return m.eval(z)


def eval_log_abs(m: AnalyticMap, z):
    return m.log_abs(z)


def series_at_zero(m: AnalyticMap, order: int):
    return m.series(order)


def conformal_size(m: AnalyticMap) -> float:
    return m.size


# -- iterated-quadratic oracle ---------------------------------------------


def _fcompose(f, g):
    """Compose float/complex coefficient lists (inner constant term 0)."""
    n = min(len(f), len(g))
    acc = [0j] * n
    for c in reversed(f[:n]):
        # acc = acc * g + c
        new = [0j] * n
        for i, a in enumerate(acc):
            if a == 0:
                continue
            for j, b in enumerate(g[:n]):
                if i + j < n and b != 0:
                    new[i + j] += a * b
        new[0] += c
        acc = new
    return acc


def phi_by_iteration(alpha, beta, depth: int, order: int, tol: float = 1e-9):
    """Overconvergence-resolving map by iterating h(z) = z - z^2/(4 beta).

    Each step resolves the order-2 point at the current outer singularity
    and replaces the pair (alpha, beta) by the preimages of alpha; the
    composite converges to the closed-form map with the principal branch of
    u.  Serves as the independent series oracle.
    """
    if depth < 1:
        raise PreconditionViolation("depth must be >= 1")
    a, b = complex(alpha), complex(beta)
    comp = [0j, 1 + 0j] + [0j] * (order - 2)
    prev = None
    for _ in range(depth):
        h = [0j, 1 + 0j, -1.0 / (4.0 * b)] + [0j] * (order - 3)
        prev = comp
        comp = _fcompose(comp, h)
        root = cmath.sqrt(1.0 - a / b)
        a, b = 2.0 * b * (1.0 - root), 2.0 * b * (1.0 + root)
    if prev is not None:
        err = max(abs(x - y) for x, y in zip(comp, prev))
        if err > tol:
            raise NonConvergence(
                f"iterated maps still moving by {err:.3e} at depth {depth}"
            )
    return comp
