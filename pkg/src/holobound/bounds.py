"""Holonomy-quotient assembly: numerators, denominators, feasibility, and
irrationality-exponent thresholds.

A Scenario collects per-place data (archimedean maps or published constants,
the nonarchimedean log-radius ledger, the approximation places with their
convergence radii), the denominator-type statistic, and the level counts.
The evaluator returns the quotient

    numerator   = sum of torus double integrals (or circle sup-norms)
                  + sum of nonarchimedean log-radii
    denominator = sum of log conformal sizes + nonarch log-radii
                  - tau - tau_sharp - coupling(kappa)

where the exponent coupling, in the Cauchy-Schwarz form
sum_u log(1/rho_u) - (sum kappa_u - E)^2 / (sum kappa_u^2/log(1/rho_u)),
vanishes as kappa -> infinity and reduce exactly to the plain quotient when
the approximation set S is empty.  The proportionality-convenience shape
(gamma in place of the level counts) is the same plug-in with E = 1-gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .capacity import bost_charles_cached, sup_log_on_circle
from .confmaps import AnalyticMap
from .errors import NanInput, NoThreshold, PreconditionViolation
from .series import DenominatorType, tau as tau_statistic

Q = Fraction

SOLVE = "solve"


@dataclass(frozen=True)
class ArchPlace:
    """One archimedean place: either a map to integrate or published
    constants (bc_value / sup_value, log_size) consumed as-is."""

    label: str = "inf"
    map: AnalyticMap | None = None
    bc_value: float | None = None
    sup_value: float | None = None
    log_size: float | None = None
    weight: float = 1.0


@dataclass(frozen=True)
class SPlace:
    """One approximation place: its convergence-radius cost and exponent."""

    label: str
    log_rho_inv: float
    kappa: object = SOLVE  # float or "solve"


@dataclass(frozen=True)
class Scenario:
    name: str
    m: int
    arch: tuple = ()
    nonarch_log_radius_sum: float = 0.0
    tau_value: object = 0  # Fraction/float or DenominatorType
    tau_sharp: object = 0
    m_nu: tuple | None = None  # per-level counts; E = sum(nu m_nu)/m
    gamma: object = None  # convenience shape; E = 1 - gamma
    s_places: tuple = ()
    numerator_mode: str = "bc"  # or "sup"
    grid_n: int = 1024
    rotations: int = 8
    target_m: int | None = None

    def exponent_mean(self) -> float:
        """E = sum nu m_nu / m, or 1 - gamma in the convenience shape."""
        if self.m_nu is not None:
            if sum(self.m_nu) != self.m:
                raise PreconditionViolation("m_nu must sum to m")
            return float(sum(nu * c for nu, c in enumerate(self.m_nu))) / self.m
        if self.gamma is not None:
            g = float(self.gamma)
            if not 0 < g <= 1:
                raise PreconditionViolation("gamma must lie in (0, 1]")
            return 1.0 - g
        raise PreconditionViolation("scenario needs m_nu or gamma")

    def tau_total(self) -> float:
        t = self.tau_value
        if isinstance(t, DenominatorType):
            t = tau_statistic(t)
        return float(t) + float(self.tau_sharp)


@dataclass(frozen=True)
class BoundReport:
    numerator: float
    denominator: float
    bound: float | None
    feasible: bool
    side_condition_ok: bool
    kappa_threshold: float | None = None
    numerator_error: float = 0.0
    details: dict = field(default_factory=dict)


def _numerator_terms(s: Scenario):
    total = 0.0
    err = 0.0
    details = {}
    for place in s.arch:
        if s.numerator_mode == "sup":
            if place.sup_value is not None:
                total += place.weight * place.sup_value
            else:
                sup = sup_log_on_circle(place.map, max(256, s.grid_n))
                total += place.weight * sup.value
                details[f"sup_argmax[{place.label}]"] = sup.arg_theta
                details[f"sup[{place.label}]"] = sup.value
        else:
            if place.bc_value is not None:
                total += place.weight * place.bc_value
            else:
                bc = bost_charles_cached(place.map, s.grid_n, s.rotations)
                total += place.weight * bc.value
                err += place.weight * bc.error_estimate
                details[f"bc[{place.label}]"] = bc.value
    total += s.nonarch_log_radius_sum
    return total, err, details


def _log_size_sum(s: Scenario) -> float:
    total = 0.0
    for place in s.arch:
        if place.log_size is not None:
            total += place.weight * place.log_size
        else:
            total += place.weight * place.map.log_size()
    return total + s.nonarch_log_radius_sum


def _coupling(s: Scenario, kappas: dict) -> float:
    """The subtracted exponent term: sum log(1/rho) - (sum kappa - E)^2 /
    (sum kappa^2 / log(1/rho)); zero when S is empty."""
    if not s.s_places:
        return 0.0
    e = s.exponent_mean()
    sum_rho = sum(p.log_rho_inv for p in s.s_places)
    sum_kappa = sum(kappas[p.label] for p in s.s_places)
    sum_ratio = sum(
        kappas[p.label] ** 2 / p.log_rho_inv for p in s.s_places if p.log_rho_inv > 0
    )
    if sum_ratio == 0:
        return sum_rho
    return sum_rho - (sum_kappa - e) ** 2 / sum_ratio


def _side_condition(s: Scenario, kappas: dict) -> bool:
    if not s.s_places:
        return True
    e = s.exponent_mean()
    sum_kappa = sum(kappas[p.label] for p in s.s_places)
    if sum_kappa <= e:
        return False
    sum_ratio = sum(
        kappas[p.label] ** 2 / p.log_rho_inv for p in s.s_places if p.log_rho_inv > 0
    )
    lim = sum_ratio / (sum_kappa - e)
    return all(
        kappas[p.label] <= p.log_rho_inv * lim + 1e-12 for p in s.s_places
    )


def evaluate_bound(s: Scenario, kappa_override=None) -> BoundReport:
    """Assemble the quotient at fixed exponents (or with S dropped when none
    are given).  An infeasible (nonpositive) denominator is reported, not
    raised."""
    kappas = {}
    for p in s.s_places:
        k = p.kappa
        if k == SOLVE:
            if kappa_override is None:
                raise PreconditionViolation(
                    f"place {p.label} has no fixed exponent; use kappa_threshold"
                )
            k = kappa_override
        kappas[p.label] = float(k)
    for label, k in kappas.items():
        if math.isnan(k):
            raise NanInput(f"kappa at place {label} is NaN")
    numerator, num_err, details = _numerator_terms(s)
    if math.isnan(numerator):
        raise NanInput("numerator is NaN")
    denominator = _log_size_sum(s) - s.tau_total() - _coupling(s, kappas)
    feasible = denominator > 0
    return BoundReport(
        numerator=numerator,
        denominator=denominator,
        bound=numerator / denominator if feasible else None,
        feasible=feasible,
        side_condition_ok=_side_condition(s, kappas),
        numerator_error=num_err,
        details=details,
    )


def limit_report(s: Scenario) -> BoundReport:
    """The kappa -> infinity limit: the plain quotient with S dropped."""
    return evaluate_bound(replace(s, s_places=()))


def kappa_threshold(s: Scenario, target_m: int | None = None, rel_tol: float = 1e-6):
    """Infimum kappa* with bound(kappa) < target_m for every kappa >= kappa*.

    Single unknown exponent, found by bisection; the quadrature error of the
    numerator is propagated linearly into an interval around kappa*.
    """
    target = target_m if target_m is not None else s.target_m
    if target is None:
        raise PreconditionViolation("no target_m given")
    solves = [p for p in s.s_places if p.kappa == SOLVE]
    if len(solves) != 1:
        raise PreconditionViolation("exactly one place must have kappa='solve'")
    lim = limit_report(s)
    if not lim.feasible or lim.bound >= target:
        raise NoThreshold(
            f"limiting bound {lim.bound if lim.feasible else 'infeasible'} "
            f"does not beat target {target}"
        )

    def ok(kappa: float) -> bool:
        rep = evaluate_bound(s, kappa_override=kappa)
        return rep.feasible and rep.bound < target

    lo = s.exponent_mean() + 1e-9
    hi = max(4.0 * lo, 4.0)
    grow = 0
    while not ok(hi):
        hi *= 2.0
        grow += 1
        if grow > 240:
            raise NoThreshold("no finite threshold found")
    if ok(lo):
        hi = lo  # already below target arbitrarily close to E
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    kappa_star = hi

    base = evaluate_bound(s, kappa_override=kappa_star)
    interval = _propagate_numerator_error(s, target, kappa_star, base)
    report = BoundReport(
        numerator=base.numerator,
        denominator=base.denominator,
        bound=base.bound,
        feasible=base.feasible,
        side_condition_ok=base.side_condition_ok,
        kappa_threshold=kappa_star,
        numerator_error=base.numerator_error,
        details=base.details,
    )
    return kappa_star, interval, report


def _propagate_numerator_error(s, target, kappa_star, base) -> tuple:
    """Linear propagation of the numerator quadrature error into kappa*."""
    err = base.numerator_error
    if err == 0.0:
        return (kappa_star, kappa_star)
    # threshold condition: numerator/target = denominator(kappa*); perturb
    # the numerator by +-err and resolve the quadratic in 1/kappa.
    e = s.exponent_mean()
    p = sum(pl.log_rho_inv for pl in s.s_places)
    d_inf = _log_size_sum(s) - s.tau_total()
    out = []
    for sign in (-1.0, 1.0):
        a = d_inf - (base.numerator + sign * err) / target
        # coupling at kappa: p*E(2k-E)/k^2 = a  (single place)
        disc = (e * p) ** 2 - a * e * e * p
        if a <= 0 or disc < 0:
            out.append(float("inf"))
            continue
        out.append((e * p + math.sqrt(disc)) / a)
    return (min(out[0], out[1]), max(out[0], out[1]))


def optimal_q(s: Scenario, epsilon: float = 0.0):
    """The quadratic minimizer q = (sum(kappa_u - eps) - E) m / sum((kappa_u
    - eps)^2 / log rho_u^-1), with the per-place chi values."""
    if not s.s_places:
        raise PreconditionViolation("optimal_q needs a nonempty S")
    if all(p.log_rho_inv == 0 for p in s.s_places):
        raise ZeroDivisionError("all rho_u = 1: the quadratic degenerates")
    e = s.exponent_mean()
    num = sum(float(p.kappa) - epsilon for p in s.s_places) - e
    den = sum(
        (float(p.kappa) - epsilon) ** 2 / p.log_rho_inv
        for p in s.s_places
        if p.log_rho_inv > 0
    )
    q = num * s.m / den
    chis = {
        p.label: (float(p.kappa) - epsilon) * q / p.log_rho_inv
        if p.log_rho_inv > 0
        else 0.0
        for p in s.s_places
    }
    return q, chis
