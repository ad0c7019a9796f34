"""Tests for the arithmetic substrate: series algebra, Legendre machinery,
quadrature, and exact zeta/beta values."""

import random
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from pwextremal.mpcore import (
    ExactPolynomial,
    PrecisionContext,
    TruncatedLaurentSeries,
    UsageError,
    alternating_halfinteger_tail,
    bernoulli_fraction,
    beta_int,
    beta_numeric,
    clenshaw_legendre,
    default_guard,
    euler_number,
    gauss_legendre_integrate,
    integrate_adaptive,
    legendre_derivative,
    legendre_eval,
    legendre_pair,
    richardson_doubling,
    series_add,
    series_exp0,
    series_from_coeffs,
    series_log1p,
    series_multiply,
    series_pow_int,
    series_reciprocal,
    series_rescale_variable,
    series_scale,
    zeta_int,
    zeta_numeric,
)


@pytest.fixture(autouse=True)
def _fixed_precision():
    with mp.workdps(40):
        yield


def test_context_basics():
    ctx = PrecisionContext(digits=30, guard=20)
    assert ctx.working_dps == 50
    assert ctx.certify_dps == 70
    with ctx.working():
        assert mp.dps == 50
    x = ctx.parse("0.1")
    with ctx.working():
        assert abs(x - mpf(1) / 10) < mpf(10) ** -45


def test_context_rejects_nonpositive():
    with pytest.raises(UsageError):
        PrecisionContext(digits=0, guard=5)


def test_default_guard_floor():
    assert default_guard(1) == 15
    assert default_guard(1000) == 18
    assert default_guard(64, 200) == 15 + 2 + 20


def test_multiply_difference_of_squares():
    f = series_from_coeffs([1, 1])
    g = series_from_coeffs([1, -1])
    h = series_multiply(f, g, 3)
    assert h.low == 0
    assert h.coeffs[0] == 1
    assert h.coeffs[1] == 0
    assert h.coeffs[2] == -1


def test_multiply_low_exponents_add():
    f = TruncatedLaurentSeries(low=-1, coeffs=[mpf(1)])
    g = TruncatedLaurentSeries(low=1, coeffs=[mpf(1)])
    h = series_multiply(f, g, 1)
    assert h.low == 0
    assert h.coeffs == [mpf(1)]


def test_multiply_parity_algebra():
    even = series_from_coeffs([1, 0, 2], parity="even")
    odd = TruncatedLaurentSeries(low=1, coeffs=[mpf(3), mpf(0), mpf(5)], parity="odd")
    assert series_multiply(even, even, 5).parity == "even"
    assert series_multiply(odd, odd, 5).parity == "even"
    assert series_multiply(even, odd, 5).parity == "odd"
    anon = series_from_coeffs([1, 1])
    assert series_multiply(even, anon, 5).parity == "none"


def test_multiply_rejects_mixed_precision():
    f = series_from_coeffs([1, 1])
    with mp.workdps(60):
        g = series_from_coeffs([1, -1])
    with pytest.raises(UsageError):
        series_multiply(f, g, 3)


def test_multiply_associative_commutative_bitwise():
    rng = random.Random(7)
    coeffs = lambda: [mpf(rng.uniform(-1, 1)) for _ in range(6)]
    f = series_from_coeffs(coeffs())
    g = series_from_coeffs(coeffs())
    h = series_from_coeffs(coeffs())
    T = 6
    ab = series_multiply(f, g, T)
    ba = series_multiply(g, f, T)
    assert ab.coeffs == ba.coeffs
    left = series_multiply(series_multiply(f, g, T), h, T)
    right = series_multiply(f, series_multiply(g, h, T), T)
    for x, y in zip(left.coeffs, right.coeffs):
        assert abs(x - y) <= mpf(10) ** -(mp.dps - 8) * (1 + abs(x))


def test_parity_violation_rejected():
    with pytest.raises(UsageError):
        series_from_coeffs([1, 2, 3], parity="even")


def test_log1p_mercator():
    f = TruncatedLaurentSeries(low=1, coeffs=[mpf(1)])
    L = series_log1p(f, 3)
    assert L.low == 1
    assert L.coeffs[0] == 1
    assert abs(L.coeffs[1] + mpf(1) / 2) < mpf(10) ** -35
    assert abs(L.coeffs[2] - mpf(1) / 3) < mpf(10) ** -35


def test_log1p_substitution():
    f = TruncatedLaurentSeries(low=2, coeffs=[mpf(-1)], parity="even")
    L = series_log1p(f, 6)
    # -z^2 - z^4/2 - z^6/3
    assert L.coefficient(2) == -1
    assert abs(L.coefficient(4) + mpf(1) / 2) < mpf(10) ** -35
    assert abs(L.coefficient(6) + mpf(1) / 3) < mpf(10) ** -35
    assert L.coefficient(3) == 0
    assert L.parity == "even"


def test_log1p_rejects_constant_term():
    f = series_from_coeffs([1, 1])
    with pytest.raises(UsageError):
        series_log1p(f, 4)


def test_exp_log_roundtrip_random():
    rng = random.Random(2024)
    for trial in range(5):
        T = rng.randrange(8, 33)
        coeffs = [mpf(rng.uniform(-1, 1)) for _ in range(T - 1)]
        f = TruncatedLaurentSeries(low=1, coeffs=coeffs)
        back = series_exp0(series_log1p(f, T), T)
        assert back.coeffs[0] == 1
        for e in range(1, T):
            diff = abs(back.coefficient(e) - f.coefficient(e))
            assert diff < mpf(10) ** -(mp.dps - T), (trial, e)


def test_reciprocal_and_pow():
    f = series_from_coeffs([1, 1])  # 1 + z
    r = series_reciprocal(f, 5)
    for e in range(5):
        assert abs(r.coefficient(e) - (-1) ** e) < mpf(10) ** -35
    sq = series_pow_int(f, 2, 4)
    assert sq.coeffs[:3] == [mpf(1), mpf(2), mpf(1)]
    prod = series_multiply(f, r, 5)
    assert prod.coeffs[0] == 1
    for e in range(1, 5):
        assert abs(prod.coefficient(e)) < mpf(10) ** -35


def test_reciprocal_keeps_even_parity():
    f = series_from_coeffs([2, 0, 1, 0, 3], parity="even")
    r = series_reciprocal(f, 5)
    assert r.parity == "even"
    assert r.coefficient(1) == 0


def test_rescale_variable():
    f = series_from_coeffs([1, 1, 1])
    g = series_rescale_variable(f, mpf(2))
    assert g.coeffs == [mpf(1), mpf(2), mpf(4)]


def test_add_and_scale():
    f = series_from_coeffs([1, 2])
    g = TruncatedLaurentSeries(low=-1, coeffs=[mpf(5)])
    s = series_add(f, g)
    assert s.low == -1
    assert s.coefficient(-1) == 5
    assert s.coefficient(0) == 1
    assert series_scale(f, 3).coeffs == [mpf(3), mpf(6)]


def test_evaluate_laurent():
    f = TruncatedLaurentSeries(low=-1, coeffs=[mpf(2), mpf(0), mpf(1)])
    assert abs(f.evaluate(mpf(2)) - (1 + 2)) < mpf(10) ** -35
    with pytest.raises(UsageError):
        f.evaluate(0)


def test_legendre_values():
    assert legendre_eval(0, mpf("0.3")) == 1
    for n in range(11):
        assert legendre_eval(n, mpf(1)) == 1
    p2 = legendre_eval(2, mpf("0.5"))
    assert abs(p2 + mpf("0.125")) < mpf(10) ** -35


def test_legendre_bonnet_residual():
    rng = random.Random(11)
    for _ in range(20):
        x = mpf(rng.uniform(-1, 1))
        for n in (1, 5, 17, 60, 199):
            pn, pn_minus = legendre_pair(n, x)
            pn_plus = legendre_eval(n + 1, x)
            resid = (n + 1) * pn_plus - (2 * n + 1) * x * pn + n * pn_minus
            assert abs(resid) < mpf(10) ** -(mp.dps - 6)


def test_legendre_derivative_endpoints():
    for n in (1, 2, 7):
        assert legendre_derivative(n, mpf(1)) == mpf(n * (n + 1)) / 2
        want = mpf((-1) ** (n + 1)) * n * (n + 1) / 2
        assert legendre_derivative(n, mpf(-1)) == want


def test_clenshaw_matches_direct():
    rng = random.Random(3)
    coeffs = [mpf(rng.uniform(-2, 2)) for _ in range(12)]
    x = mpf("0.37")
    direct = sum(c * legendre_eval(k, x) for k, c in enumerate(coeffs))
    assert abs(clenshaw_legendre(coeffs, x) - direct) < mpf(10) ** -(mp.dps - 6)


def test_zeta_exact_values():
    assert zeta_int(-1) == Fraction(-1, 12)
    assert zeta_int(-2) == Fraction(0)
    assert zeta_int(0) == Fraction(-1, 2)
    rational, power = zeta_int(2)
    assert rational == Fraction(1, 6)
    assert power == 2
    rational4, power4 = zeta_int(4)
    assert rational4 == Fraction(1, 90)
    assert power4 == 4
    with pytest.raises(UsageError):
        zeta_int(1)


def test_zeta_numeric_branch_certified():
    v1 = zeta_int(3)
    with mp.workdps(80):
        v2 = zeta_int(3)
    assert abs(v1 - v2) < mpf(10) ** -38
    # continuation branch for real s
    assert abs(zeta_numeric(mpf("2.5")) - mp.zeta(mpf("2.5"))) == 0


def test_beta_values():
    assert beta_int(0) == Fraction(1, 2)
    assert beta_int(-1) == Fraction(0)
    assert beta_int(-2) == Fraction(-1, 2)
    b1 = beta_int(1)
    assert abs(b1 - mp.pi / 4) < mpf(10) ** -38
    # Catalan's constant as a spot check of the numeric branch
    assert abs(beta_int(2) - mp.catalan) < mpf(10) ** -38
    assert abs(beta_numeric(mpf(2)) - mp.catalan) < mpf(10) ** -38


def test_bernoulli_euler_tables():
    assert bernoulli_fraction(0) == 1
    assert bernoulli_fraction(1) == Fraction(-1, 2)
    assert bernoulli_fraction(12) == Fraction(-691, 2730)
    assert euler_number(0) == 1
    assert euler_number(2) == -1
    assert euler_number(4) == 5
    assert euler_number(6) == -61
    assert euler_number(10) == -50521
    assert euler_number(7) == 0


def test_gauss_legendre_examples():
    one = gauss_legendre_integrate(lambda x: mpf(1), 0, 1, 6)
    assert abs(one - 1) < mpf(10) ** -(mp.dps - 4)
    odd = gauss_legendre_integrate(lambda x: x ** 3, -1, 1, 2)
    assert abs(odd) < mpf(10) ** -(mp.dps - 4)
    sine = gauss_legendre_integrate(mp.sin, 0, mp.pi, 20)
    assert abs(sine - 2) < mpf(10) ** -30


def test_gauss_legendre_polynomial_exactness():
    # rule with n nodes integrates degree 2n-1 exactly
    for n in (2, 5, 8):
        deg = 2 * n - 1
        val = gauss_legendre_integrate(lambda x: x ** deg + x ** (deg - 1), -1, 1, n)
        exact = mpf(2) / deg  # odd top power integrates to 0
        assert abs(val - exact) < mpf(10) ** -(mp.dps - 5)


def test_gauss_legendre_rejects_bad_interval():
    with pytest.raises(UsageError):
        gauss_legendre_integrate(lambda x: x, 1, 1, 4)


def test_integrate_adaptive():
    val, err = integrate_adaptive(mp.cos, 0, 1, mpf(10) ** -30)
    assert abs(val - mp.sin(1)) < mpf(10) ** -28
    assert err < mpf(10) ** -30


def test_alternating_halfinteger_tail_matches_bruteforce():
    w = mpf(3)
    for n_start in (4, 5, 40):
        brute = mpf(0)
        for m in range(n_start + 1, n_start + 4001):
            term = mpf(2 * m + 1) / 2
            brute += (-1) ** (m + 1) * term ** (-w)
        # pair the remaining alternating tail crudely
        closed = alternating_halfinteger_tail(w, n_start)
        assert abs(closed - brute) < mpf(10) ** -9, n_start


def test_alternating_halfinteger_tail_at_one():
    # w = 1 sits on the removable Hurwitz singularity; check the digamma
    # branch against a paired brute-force sum
    with mp.workdps(30):
        for n_start in (4, 5):
            brute = mpf(0)
            for m in range(n_start + 1, n_start + 200001):
                brute += (-1) ** (m + 1) / (mpf(2 * m + 1) / 2)
            closed = alternating_halfinteger_tail(mpf(1), n_start)
            # partial alternating sum is within half the first dropped term
            gap = abs(closed - brute)
            assert gap < mpf(1) / (2 * (n_start + 200001)), n_start


def test_richardson_doubling():
    # S(N) = 1 + 1/N + 1/N^2
    values = [1 + mpf(1) / n + mpf(1) / n ** 2 for n in (8, 16, 32, 64)]
    assert abs(richardson_doubling(values) - 1) < mpf(10) ** -20


def test_exact_polynomial():
    p = ExactPolynomial({(0, 0): Fraction(1)})
    q = p.mul_lambda().scale(Fraction(-2)).add(p.mul_bsq())
    assert q.terms == {(0, 1): Fraction(-2), (1, 0): Fraction(1)}
    assert not q.mul_lambda().scale(Fraction(1, 3)).is_integral()
    assert q.is_integral()
    val = q.evaluate(mpf(4), mpf("0.5"))
    assert abs(val - (4 - 1)) < mpf(10) ** -30
    # zero coefficients are dropped on construction
    r = ExactPolynomial({(1, 1): Fraction(0), (0, 0): Fraction(2)})
    assert (1, 1) not in r.terms
