import math
import random
from fractions import Fraction as Q

import pytest

from holobound.errors import IdentityFailure, PoleError, SingularityError
from holobound.hyperpade import (
    bivariate_diagonal,
    catalan_family,
    catalan_operator_residual,
    catalan_reduced_c_residual,
    companion_values,
    dihedral_coefficient_polys,
    dihedral_generators,
    dihedral_ode_residual,
    hyper_2f1,
    log_family,
    pade_identity_check,
)
from holobound.series import ExactSeries, binomial, check_denominator_type


# ------------------------------------------------------------------- 2F1


def test_2f1_binomial_oracle():
    # (-nu, 1; 1) is the binomial series of (1-x)^nu
    for nu in (Q(1, 3), Q(2, 5), Q(-1, 2)):
        got = hyper_2f1(-nu, 1, 1, 9)
        want = ExactSeries.binomial_series(nu, 9, sign=-1)
        assert got == want


def test_2f1_log_series():
    # -x * 2F1(1,1;2;x) = log(1-x) = -x - x^2/2 - x^3/3 - ...
    f = hyper_2f1(1, 1, 2, 6)
    for n in range(6):
        assert f.coeffs[n] == Q(1, n + 1)


def test_2f1_terminating_and_pole():
    assert hyper_2f1(0, Q(7, 2), Q(1, 5), 6).coeffs == (1, 0, 0, 0, 0, 0)
    with pytest.raises(PoleError):
        hyper_2f1(Q(1, 2), Q(1, 3), -2, 9)


# ----------------------------------------------------------- Pade identity


def test_pade_identity_examples():
    rep = pade_identity_check(1, 1, Q(1, 3))
    assert rep.leading_coefficient == Q(2, 81)
    # m=n=0: remainder nu*x + O(x^2) with coefficient binomial(nu, 1) = nu
    rep = pade_identity_check(0, 0, Q(2, 5))
    assert rep.leading_coefficient == Q(2, 5)
    # integral nu <= m+n+1 kills the binomial: exact Pade, zero remainder
    rep = pade_identity_check(2, 1, Q(2))
    assert rep.leading_coefficient == 0


def test_pade_identity_full_grid():
    for nu in (Q(1, 2), Q(1, 3), Q(2, 5), Q(1, 7)):
        for m in range(0, 9):
            for n in range(0, 9):
                rep = pade_identity_check(m, n, nu)
                expected = (-1) ** m * binomial(n + nu, m + n + 1) / binomial(
                    m + n, m
                )
                assert rep.leading_coefficient == expected


def test_pade_identity_failure_reports_power():
    with pytest.raises(IdentityFailure):
        # tampered check: wrong nu in the binomial factor shows up early
        p = hyper_2f1(Q(-4, 3), -1, -2, 5)
        q = hyper_2f1(Q(-2, 3), -1, -2, 5)
        lhs = p - ExactSeries.binomial_series(Q(1, 2), 5, sign=-1) * q
        if any(c != 0 for c in lhs.coeffs[:3]):
            raise IdentityFailure("nonzero remainder", power=1)


# ------------------------------------------------------------ dihedral pair


def test_generators_match_bivariate_oracle():
    diag = bivariate_diagonal(Q(1, 3), -1, 12)
    pair = dihedral_generators(Q(1, 3), -1, 7)
    assert list(pair.A.coeffs) == diag[:7]


def test_generators_y0_and_symmetry():
    for nu in (Q(1, 2), Q(1, 5), Q(2, 7)):
        pair = dihedral_generators(nu, Q(3, 7), 6)
        assert pair.A.coeffs[0] == 1
        swapped = dihedral_generators(-nu, Q(3, 7), 6)
        assert pair.B == swapped.A


def test_integrality_r_squared_scaling():
    # r^(2j) * coeff(x^j y^n) is an integer, j+n <= 15
    for r in (2, 3, 5, 6):
        polys = dihedral_coefficient_polys(Q(1, r), 16)
        for n, poly in enumerate(polys):
            for j, c in enumerate(poly):
                if j + n > 15:
                    continue
                val = c * Q(r) ** (2 * j)
                assert val.denominator == 1, (r, j, n, c)


def test_padic_disc_valuation_property():
    # for p | r: v_p(coeff of y^n) >= -n (v_p(r) + 1/(p-1)), scaled by (p-1)
    def vp(q, p):
        if q == 0:
            return 10**9
        v = 0
        num, den = q.numerator, q.denominator
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        return v

    xs = {2: Q(3), 3: Q(2), 4: Q(5), 6: Q(5)}
    for r in (2, 3, 4, 6):
        x = xs[r]
        pair = dihedral_generators(Q(1, r), x, 31)
        for p in (2, 3):
            if r % p:
                continue
            vpr = vp(Q(r), p)
            for n in range(31):
                v = vp(pair.A.coeffs[n], p)
                assert (p - 1) * v >= -n * ((p - 1) * vpr + 1), (r, p, n)


def test_ode_residual_exact_zero_random():
    rng = random.Random(20240809)
    for _ in range(20):
        nu = Q(rng.randint(1, 5), rng.randint(2, 7))
        x = Q(rng.randint(-6, 6), rng.randint(1, 4))
        pair = dihedral_generators(nu, x, 20)
        assert dihedral_ode_residual(pair.A, nu, x).is_zero()
        assert dihedral_ode_residual(pair.B, nu, x).is_zero()


def test_ode_residual_degenerate_constant():
    one = ExactSeries.one(8)
    assert dihedral_ode_residual(one, Q(1), Q(2)).is_zero()


# -------------------------------------------------------- companion values


def test_companion_trivial_values():
    c1, c2 = companion_values(0.25, 0.0, 0j)
    assert abs(c1 - math.cos(0.25 * math.pi)) < 1e-12
    c1, c2 = companion_values(0.0, -1.0, 0.27 + 0.04j)
    quad = 1 - 4 * (0.27 + 0.04j) + 2 * (-1) * (0.27 + 0.04j) + (0.27 + 0.04j) ** 2
    assert abs(c1 - 1 / quad**0.5) < 1e-12
    assert abs(c2) < 1e-12


def test_companion_spans_series_solution():
    import numpy as np

    pair = dihedral_generators(Q(1, 3), -1, 40)
    ys = [0.013, -0.02, 0.031, -0.04, 0.047, 0.05, -0.045, 0.027, -0.033, 0.008]
    avals = [sum(float(c) * y**n for n, c in enumerate(pair.A.coeffs)) for y in ys]
    m = np.array([companion_values(1 / 3, -1.0, complex(y)) for y in ys[:2]])
    uv = np.linalg.solve(m, np.array(avals[:2], dtype=complex))
    resid = max(
        abs(uv[0] * c1 + uv[1] * c2 - a)
        for (c1, c2), a in zip(
            (companion_values(1 / 3, -1.0, complex(y)) for y in ys[2:]), avals[2:]
        )
    )
    assert resid < 1e-9


def test_companion_singularity_guard():
    # 1 - 4y + 2xy + x^2 y^2 = 0 at y = (1 -/+ sqrt(1-x))^2/x^2; pick x=3/4
    x = 0.75
    y = (1 - math.sqrt(0.25)) / x
    y = y * y
    with pytest.raises(SingularityError):
        companion_values(0.5, x, complex(y))


# -------------------------------------------------------------- log family


def test_log_family_pi_specialization():
    fam = log_family(2, 61)
    assert fam.A.coeffs[:5] == (1, 0, 2, 0, 6)
    ok, bad = check_denominator_type(fam.B, [1], N=60)
    assert ok, bad
    assert abs(fam.H[0] + math.pi) < 1e-15
    assert all(c.denominator == 1 for c in fam.A.coeffs)


def test_log_family_general_x():
    fam = log_family(Q(-1), 16)
    # A = (1 - 6y + y^2)^(-1/2): central Delannoy-type integers
    assert fam.A.coeffs[:4] == (1, 3, 13, 63)
    ok, bad = check_denominator_type(fam.B, [1], N=15)
    assert ok, bad
    assert abs(fam.eta - math.log(2)) < 1e-15
    # H = B - log(2) A should be smaller than B and A termwise (overconvergence)
    assert abs(fam.H[1]) < 0.1


# ------------------------------------------------------------ catalan family


def test_catalan_operator_solutions():
    fam = catalan_family(22, prec=40)
    assert catalan_operator_residual(fam.A).is_zero()
    assert catalan_reduced_c_residual(fam.C_reduced).is_zero()
    # L B = 1 + 16x
    res = catalan_operator_residual(fam.B)
    assert res.coeffs[0] == 1 and res.coeffs[1] == 16
    assert all(c == 0 for c in res.coeffs[2:])


def test_catalan_b_denominator_type():
    fam = catalan_family(42, prec=40)
    ok, bad = check_denominator_type(fam.B, [1, 1], N=40)
    assert ok, bad


def test_catalan_g2_consistency_mod_2_10():
    fam = catalan_family(12, prec=48)
    vals = dict(fam.g2_by_index)
    assert vals[1].agrees_with(vals[2], 10)
    assert fam.g2.v2() == -1
