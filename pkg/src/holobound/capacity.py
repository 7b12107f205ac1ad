"""Torus quadrature for the capacity double integral and circle sup-norms.

The double average of log|phi(z)-phi(w)| is taken over two size-n grids
offset by half a step from one another (and by a quarter step from the real
axis, so template tangency points are never sampled).  The diagonal factor
log|z-w| contributes exactly log(2)/n to the grid mean, so a single 1/n
Richardson step (2 I_n - I_(n/2)) removes the leading error entirely; the
difference of the two finest levels is reported as the error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .confmaps import AnalyticMap
from .errors import NonFiniteSample, PreconditionViolation

Q = Fraction

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BCResult:
    value: float
    error_estimate: float
    levels: tuple  # ((n, mean I_n), (n/2, mean I_(n/2)))
    rotations: int = 1
    rotation_spread: float = 0.0


@dataclass(frozen=True)
class SupResult:
    value: float
    arg_theta: float


@dataclass
class PlaceLedger:
    """Per-place data: archimedean (map, weight) pairs and the
    nonarchimedean log-radius bookkeeping."""

    archimedean: list = field(default_factory=list)
    nonarch_log_radius_sum: float = 0.0
    per_prime_log_radii: dict | None = None

    def __post_init__(self):
        if self.per_prime_log_radii is not None:
            total = sum(self.per_prime_log_radii.values())
            if abs(total - self.nonarch_log_radius_sum) > 1e-9 * max(
                1.0, abs(total)
            ):
                raise PreconditionViolation(
                    "nonarch_log_radius_sum inconsistent with per-prime entries"
                )


def _grid_log_polar(m: AnalyticMap, n: int, offset: float, rot: float):
    theta = 2.0 * math.pi * (np.arange(n) + offset) / n + rot
    return m.log_polar(np.exp(1j * theta))


def _level_mean(m: AnalyticMap, n: int, rot: float = 0.0) -> float:
    la, pa = _grid_log_polar(m, n, 0.25, rot)
    lb, pb = _grid_log_polar(m, n, 0.75, rot)
    mean, bad = _kernels.pairwise_log_abs_diff_mean(la, pa, lb, pb)
    if bad:
        raise NonFiniteSample(f"{bad} non-finite samples at grid_n={n}")
    return mean


def bost_charles_integral(m: AnalyticMap, grid_n: int, rotations: int = 8) -> BCResult:
    """Double torus average of log|m(z) - m(w)|.

    Offset grids never sample the diagonal; that term contributes exactly
    log(2)/n to the grid mean, removed by the 1/n Richardson step
    2 I_n - I_(n/2).  Since the average is rotation invariant, the estimate
    is additionally averaged over a deterministic golden-angle family of
    sub-cell grid rotations, which suppresses the sampling noise of
    templates whose boundary phase is locally unresolved.
    """
    if grid_n < 64 or grid_n & (grid_n - 1):
        raise PreconditionViolation("grid_n must be a power of two, >= 64")
    if rotations < 1:
        raise PreconditionViolation("rotations must be >= 1")
    fine, half, extrap = [], [], []
    for k in range(rotations):
        rot = ((k * _GOLDEN) % 1.0) * 2.0 * math.pi / grid_n
        i_fine = _level_mean(m, grid_n, rot)
        i_half = _level_mean(m, grid_n // 2, rot)
        fine.append(i_fine)
        half.append(i_half)
        extrap.append(2.0 * i_fine - i_half)
    value = sum(extrap) / rotations
    mean_fine = sum(fine) / rotations
    mean_half = sum(half) / rotations
    spread = (
        math.sqrt(sum((v - value) ** 2 for v in extrap) / (rotations - 1))
        if rotations > 1
        else 0.0
    )
    err = max(abs(mean_fine - mean_half), 2.0 * spread / math.sqrt(rotations))
    return BCResult(
        value,
        err,
        ((grid_n, mean_fine), (grid_n // 2, mean_half)),
        rotations,
        spread,
    )


_bc_cache: dict = {}


def bost_charles_cached(m: AnalyticMap, grid_n: int, rotations: int = 8) -> BCResult:
    key = (m.cache_key(), grid_n, rotations)
    if key not in _bc_cache:
        _bc_cache[key] = bost_charles_integral(m, grid_n, rotations)
    return _bc_cache[key]


def sup_log_on_circle(m: AnalyticMap, grid_n: int) -> SupResult:
    """Maximum of log|m| over the unit circle: dense offset sampling plus
    golden-section refinement around the top three local maxima."""
    if grid_n < 256:
        raise PreconditionViolation("grid_n must be >= 256")
    theta = 2.0 * math.pi * (np.arange(grid_n) + 0.25) / grid_n
    la, _ = m.log_polar(np.exp(1j * theta))
    if not np.all(np.isfinite(la)):
        raise NonFiniteSample("non-finite sample on the circle")
    is_max = (la >= np.roll(la, 1)) & (la >= np.roll(la, -1))
    candidates = np.argsort(la[is_max])[-3:]
    peak_idx = np.nonzero(is_max)[0][candidates]
    step = 2.0 * math.pi / grid_n

    def f(t):
        return float(m.log_polar(np.array([np.exp(1j * t)]))[0][0])

    best_v, best_t = -math.inf, 0.0
    for idx in peak_idx:
        a = theta[idx] - step
        b = theta[idx] + step
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        fc, fd = f(c), f(d)
        for _ in range(60):
            if fc > fd:
                b, d, fd = d, c, fc
                c = b - _GOLDEN * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + _GOLDEN * (b - a)
                fd = f(d)
            if b - a < 1e-13:
                break
        t = 0.5 * (a + b)
        v = f(t)
        if v > best_v:
            best_v, best_t = v, t % (2.0 * math.pi)
    return SupResult(best_v, best_t)


def padic_ledger_for_root(r: int) -> PlaceLedger:
    """Nonarchimedean log-radius ledger for the index-r binomial system:
    log R_p = -(v_p(r) log p + log p/(p-1)) at p | r, zero elsewhere."""
    if r < 1:
        raise PreconditionViolation("r must be >= 1")
    per_prime = {}
    rem = r
    p = 2
    while rem > 1:
        if rem % p == 0:
            vp = 0
            while rem % p == 0:
                rem //= p
                vp += 1
            per_prime[p] = -(vp * math.log(p) + math.log(p) / (p - 1))
        p += 1 if p == 2 else 2
    total = sum(per_prime.values())
    return PlaceLedger([], total, per_prime)
