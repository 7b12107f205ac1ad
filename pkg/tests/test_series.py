import math
import random
from fractions import Fraction as Q

import pytest

from holobound.errors import PreconditionViolation, ShapeError
from holobound.series import (
    DenominatorType,
    ExactSeries,
    binomial,
    check_denominator_type,
    lcm_upto,
    tau,
)


# ---------------------------------------------------------------- lcm tables


def lcm_fold(n):
    # independent oracle: plain fold of pairwise lcm over 1..n
    out = 1
    for k in range(1, n + 1):
        out = math.lcm(out, k)
    return out


def test_lcm_upto_small_values():
    assert lcm_upto(0) == 1
    assert lcm_upto(1) == 1
    assert lcm_upto(5) == lcm_fold(5) == 60
    assert lcm_upto(10) == lcm_fold(10) == 2520


def test_lcm_upto_matches_fold_oracle():
    for n in range(65):
        assert lcm_upto(n) == lcm_fold(n)


def test_lcm_upto_divisibility_and_prime_powers():
    for n in range(1, 65):
        v = lcm_upto(n)
        for k in range(1, n + 1):
            assert v % k == 0
        # no prime power exceeding n divides the lcm
        for p in (2, 3, 5, 7, 11, 13):
            e = 0
            while v % p == 0:
                v //= p
                e += 1
            assert p**e <= n or e == 0
            v = lcm_upto(n)


# ---------------------------------------------------------------- series ring


def rand_series(rng, order, den=6):
    return ExactSeries(
        [Q(rng.randint(-8, 8), rng.randint(1, den)) for _ in range(order)], order
    )


def test_ring_axioms_randomized():
    rng = random.Random(20240811)
    for _ in range(25):
        a = rand_series(rng, 16)
        b = rand_series(rng, 16)
        c = rand_series(rng, 16)
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a


def test_compose_identity_is_identity():
    rng = random.Random(7)
    f = rand_series(rng, 12)
    z = ExactSeries.identity(12)
    assert f.compose(z) == f


def test_compose_precondition():
    f = ExactSeries([1, 2, 3], 3)
    g = ExactSeries([1, 1], 2)
    with pytest.raises(PreconditionViolation):
        f.compose(g)


def test_reciprocal_binomial_oracle():
    # multiply((1-4z^2)^(-1/2), (1-4z^2)^(1/2)) == 1 to order 20,
    # both factors produced by the independent binomial-series oracle.
    order = 20

    def binom_pow(expo):
        cs = [Q(0)] * order
        for k in range(0, order, 2):
            cs[k] = binomial(expo, k // 2) * (-4) ** (k // 2)
        return ExactSeries(cs, order)

    a = binom_pow(Q(-1, 2))
    b = binom_pow(Q(1, 2))
    prod = a * b
    assert prod.coeffs[0] == 1
    assert all(c == 0 for c in prod.coeffs[1:])
    # and the reciprocal agrees with the oracle series
    assert a.reciprocal() == b


def test_reversion_known_coefficients():
    # reversion of x - 24x^2 + 852x^3 - 35744x^4 + ... composed back
    # gives the identity through order 4
    f = ExactSeries([0, 1, -24, 852, -35744, 0], 6)
    g = f.reversion()
    back = f.compose(g)
    assert back.coeffs[:5] == (Q(0), Q(1), Q(0), Q(0), Q(0))


def test_reversion_round_trip_random():
    rng = random.Random(99)
    f = ExactSeries(
        [0, 1] + [Q(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(10)], 12
    )
    g = f.reversion()
    assert f.compose(g).coeffs[:11] == ExactSeries.identity(12).coeffs[:11]
    assert g.compose(f).coeffs[:11] == ExactSeries.identity(12).coeffs[:11]


def test_no_silent_order_promotion():
    f = ExactSeries([1, 2], 2)
    with pytest.raises(PreconditionViolation):
        f[5]
    with pytest.raises(PreconditionViolation):
        f.truncate(7)
    g = ExactSeries([1, 2, 3, 4], 4)
    assert (f * g).order == 2
    assert (f + g).order == 2


def test_differentiate_integrate():
    f = ExactSeries([5, 1, Q(1, 2), Q(1, 3)], 4)
    assert f.differentiate() == ExactSeries([1, 1, 1], 3)
    assert f.differentiate().integrate() == ExactSeries([0, 1, Q(1, 2), Q(1, 3)], 4)


def test_log_and_sqrt():
    order = 14
    # log(1/(1-x)) = sum x^n / n
    geo = ExactSeries([1] * order, order)
    lg = geo.log()
    assert lg.coeffs[0] == 0
    for n in range(1, order):
        assert lg.coeffs[n] == Q(1, n)
    # sqrt((1+x)^2) == 1+x
    sq = ExactSeries([1, 2, 1], order)
    assert sq.sqrt().coeffs[:3] == (Q(1), Q(1), Q(0))


# ---------------------------------------------------------------- tau


def test_tau_published_value_zeta_case():
    # single column (0,5,5,5,5,5): tau = 35/36 * 5 = 175/36
    b = DenominatorType([[0], [5], [5], [5], [5], [5]])
    assert tau(b) == Q(175, 36)
    assert tau(b) == Q(35, 36) * 5


def test_tau_zero_matrix():
    b = DenominatorType([[0, 0], [0, 0], [0, 0]])
    assert tau(b) == 0


def test_tau_pi_system_k3():
    # m = k+1 = 4 rows, columns b_j = 1/j with u_j = j leading zeros:
    # H_3 - 3/(2*4) = 11/6 - 3/8 = 35/24 by direct evaluation of the closed form
    k = 3
    m = k + 1
    rows = []
    for i in range(m):
        rows.append([Q(1, j) if i >= j else Q(0) for j in range(1, k + 1)])
    got = tau(DenominatorType(rows))
    assert got == Q(11, 6) - Q(3, 8) == Q(35, 24)


def test_tau_rejects_bad_staircase():
    with pytest.raises(ShapeError):
        DenominatorType([[1], [0], [1]])
    with pytest.raises(ShapeError):
        DenominatorType([[0], [1], [2]])


def rand_staircase(rng, m, r):
    rows = [[Q(0)] * r for _ in range(m)]
    for j in range(r):
        uj = rng.randint(0, m)
        top = Q(rng.randint(1, 9), rng.randint(1, 3))
        for i in range(uj, m):
            rows[i][j] = top
    return rows


def test_tau_monotone_under_domination():
    rng = random.Random(4242)
    for _ in range(60):
        m, r = rng.randint(1, 6), rng.randint(1, 4)
        lo = rand_staircase(rng, m, r)
        hi = [row[:] for row in lo]
        # dominate entrywise while preserving staircase: raise one column block
        j = rng.randrange(r)
        bump = Q(rng.randint(0, 4))
        for i in range(m):
            if hi[i][j] != 0:
                hi[i][j] += bump
        t_lo = tau(DenominatorType(lo))
        t_hi = tau(DenominatorType(hi))
        assert t_hi >= t_lo


# ------------------------------------------------- denominator type checking


def arcsin_b_series(order):
    # B(z) = -2 * (1-4z^2)^(-1/2) * arcsin(2z), exact
    a = ExactSeries(
        [
            binomial(Q(-1, 2), n // 2) * (-4) ** (n // 2) if n % 2 == 0 else Q(0)
            for n in range(order)
        ],
        order,
    )
    arc = [Q(0)] * order
    for n in range(order):
        if n % 2 == 1:
            m = (n - 1) // 2
            arc[n] = Q(math.comb(2 * m, m), (4**m) * (2 * m + 1)) * 2**n
    return -2 * a * ExactSeries(arc, order)


def test_check_denominator_type_piformula_series():
    b = arcsin_b_series(61)
    ok, bad = check_denominator_type(b, [1], e=0, N=60)
    assert ok, f"first failure at {bad}"


def test_check_denominator_type_exponential_fails_at_4():
    f = ExactSeries([Q(1, math.factorial(n)) for n in range(11)], 11)
    ok, bad = check_denominator_type(f, [1], e=0, N=10)
    assert not ok
    assert bad == 4  # 1/24 * lcm(1..4) = 12/24 = 1/2


def test_check_denominator_type_integers_pass():
    rng = random.Random(5)
    f = ExactSeries([rng.randint(-99, 99) for _ in range(30)], 30)
    for b_row in ([], [1], [Q(1, 2), 3]):
        ok, _ = check_denominator_type(f, b_row, e=2, N=29)
        assert ok


def test_check_denominator_type_monotone_in_b():
    # if the check passes for b, it passes for any entrywise-larger b'
    rng = random.Random(6)
    for _ in range(20):
        f = ExactSeries(
            [Q(rng.randint(-20, 20), lcm_upto(rng.randint(1, n + 1)))
             for n in range(15)],
            15,
        )
        b = [Q(rng.randint(0, 2)), Q(rng.randint(0, 3), 2)]
        ok, _ = check_denominator_type(f, b, N=14)
        if ok:
            bigger = [x + Q(rng.randint(0, 2)) for x in b]
            ok2, _ = check_denominator_type(f, bigger, N=14)
            assert ok2


def test_check_requires_enough_coefficients():
    f = ExactSeries([1, 1], 2)
    with pytest.raises(PreconditionViolation):
        check_denominator_type(f, [1], N=10)
