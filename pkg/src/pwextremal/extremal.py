"""Reconstruction of the extremal function from its spectral constants.

Given the converged constants (see :mod:`pwextremal.spectral`), this module
rebuilds the two functions everything else is made of:

* the entire factor F (normalized F(0) = 1, F'(0) = L1) whose alternately
  signed zeros carry all the structure, via the coefficient recursion of
  its second-order differential equation;
* the even minimizer itself, F(z) F(-z), via its own three-term relation,
  cross-checked against the Cauchy product of the factor with its
  reflection.

On top of the Taylor models sit the zero pipeline (offset expansion
tau_n = n + 1/2 - rho(1/(n+1/2)), Newton refinement against the factor
series, an arctangent fixed-point refinement) and residual checkers for
the differential equations, the quadratic Wronskian relation, and the
reflection identity, plus two independent reconstructions of the central
constant from the zeros alone.

A note on precision.  The coefficient recursions are badly unstable: the
parasitic solution grows factorially while the wanted one decays
factorially, so coefficients at order T cost roughly 2 log10(T!) extra
digits of the inputs a and lambda.  The constants object certifies only
its requested digits, which is nowhere near enough for deep recursions;
operations here therefore re-solve the spectral root at whatever elevated
precision the requested order demands (warm-started from the certified
bracket, cached per problem) before running a recursion.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from mpmath import mp, mpf

from .mpcore import (
    TruncatedLaurentSeries,
    UsageError,
    alternating_halfinteger_tail,
    beta_numeric,
    richardson_doubling,
    series_derivative,
    series_exp0,
    series_from_coeffs,
    series_log1p,
    series_multiply,
    series_reciprocal,
    series_scale,
)
from .spectral import (
    ExtremalConstants,
    SolverError,
    _ladder_root,
    build_matrix,
    ground_eigenpair,
)


# ----------------------------------------------------------------------
# precision bookkeeping for the unstable recursions


def _log10_factorial(n: int) -> mpf:
    return mp.loggamma(n + 1) / mp.log(10)


def _factor_recursion_loss(ab, T: int) -> int:
    """Decimal digits destroyed by the factor recursion up to order T.

    The parasitic branch of the three-term recursion grows like T!/a^T
    while the true coefficients decay like b^T/T!; the quotient
    (T!)^2/(ab)^T measures how far an initial relative perturbation of the
    inputs is amplified relative to the answer.
    """
    with mp.workdps(25):
        loss = 2 * _log10_factorial(T) - T * mp.log10(mpf(ab))
        return max(0, int(loss) + 1)


def _extremal_recursion_loss(a, T: int) -> int:
    """Same estimate for the even three-term relation (T powers of z^2)."""
    with mp.workdps(25):
        loss = (
            T * mp.log10(mpf(2))
            + _log10_factorial(2 * T + 1)
            + _log10_factorial(2 * T)
            - 2 * T * mp.log10(mpf(a) * mp.pi)
        )
        return max(0, int(loss) + 1)


# ----------------------------------------------------------------------
# refined spectral frames
#
# Cache key is a short prefix of the root, so distinct constants objects
# for the same underlying problem share refinements.  Re-solves are
# floored at 512 digits: one generous ladder run covers every moderate
# request instead of several slightly different ones.

_frame_cache: dict = {}
_frame_lock = threading.Lock()


def refined_spectral_frame(consts: ExtremalConstants, need_dps: int):
    """(a_star, lambda) in the b=1 frame, good to at least need_dps decimals.

    Within the certification of `consts` the stored values are returned;
    beyond it the side-condition root is re-solved at elevated precision
    over a bracket of width 2*10^-(digits-3) around the certified root,
    with the truncation ladder restarted from the certified matrix size.
    """
    if need_dps <= consts.digits_certified:
        return consts.a_star, consts.lambda_star
    with mp.workdps(30):
        key = mp.nstr(consts.a_star, 15)
    bucket = max(512, 64 * ((need_dps + 63) // 64))
    with _frame_lock:
        hit = _frame_cache.get(key)
        if hit is not None and hit[0] >= need_dps:
            return hit[1], hit[2]
    digits = consts.digits_certified
    with mp.workdps(bucket + 14):
        half = mpf(10) ** (-(digits - 3))
        bracket = (consts.a_star - half, consts.a_star + half)
        a_root, pair, _n, _wd = _ladder_root(
            bucket, consts.N, bracket, guard=12, n_cap=1 << 17
        )
    with _frame_lock:
        hit = _frame_cache.get(key)
        if hit is None or hit[0] < bucket:
            _frame_cache[key] = (bucket, a_root, pair.lam)
    return a_root, pair.lam


# ----------------------------------------------------------------------
# Taylor models


@dataclass
class TaylorModel:
    """Truncated Taylor expansion of one of the reconstructed functions.

    which is 'factor' for the alternately-zeroed entire factor (arbitrary
    (a, b, lambda) frames included) and 'extremal' for the even minimizer.
    digits is the accuracy target the coefficients were built to support;
    the series itself is stored at the much higher internal precision the
    recursion needed.
    """

    which: str
    coeffs: TruncatedLaurentSeries
    a: mpf
    b: mpf
    lam: mpf
    digits: int

    def evaluate(self, z):
        return self.coeffs.evaluate(z)


def _factor_coefficients(a, b, lam, T: int):
    """c_0..c_T from a(n+1) c_{n+1} = (n(n+1) - lam) c_n + b^2 c_{n-2}.

    Raises SolverError when the growth envelope |c_n| n! / b^n leaves a
    polynomial corridor, which is the fingerprint of the parasitic branch
    taking over (rounding noise, or an eigenvalue supplied with too few
    digits).
    """
    coeffs = [mpf(1), -lam / a]
    b2 = b * b
    fact = mpf(1)
    bpow = mpf(1)
    cap = None
    for n in range(1, T):
        nxt = (n * (n + 1) - lam) * coeffs[n]
        if n >= 2:
            nxt += b2 * coeffs[n - 2]
        coeffs.append(nxt / (a * (n + 1)))
        fact *= n + 1
        bpow *= b
        env = abs(coeffs[n + 1]) * fact / (bpow * b)
        if n <= 6:
            cap = env if cap is None else max(cap, env)
        elif env > 100 * max(cap, mpf(1)) * mpf(n + 1) ** 6:
            raise SolverError(
                "factor recursion left its growth envelope at order %d; "
                "the working precision or the eigenvalue precision is too low"
                % (n + 1)
            )
    return coeffs


def taylor_eigenfunction(a, b, lam, T: int, digits: int) -> TaylorModel:
    """Factor-type eigenfunction Taylor model for an arbitrary (a, b, lambda).

    The caller is responsible for supplying lambda with enough digits: the
    recursion needs roughly digits + 2 log10(T!) - T log10(ab) true digits
    of the eigenvalue, and a breach is reported, not repaired (there is
    nothing to re-solve for a frame this routine knows nothing about).
    """
    if T < 2:
        raise UsageError("T must be at least 2")
    with mp.workdps(30):
        if mpf(a) <= 0 or mpf(b) <= 0:
            raise UsageError("a and b must be positive")
        ab_est = mpf(a) * mpf(b)
    need = digits + _factor_recursion_loss(ab_est, T) + 30
    # conversions happen inside the working-precision block so that
    # high-precision inputs are not rounded at the ambient precision
    with mp.workdps(need):
        a = mpf(a)
        b = mpf(b)
        lam = mpf(lam)
        series = TruncatedLaurentSeries(
            low=0, coeffs=_factor_coefficients(a, b, lam, T), parity="none"
        )
    return TaylorModel(which="factor", coeffs=series, a=a, b=b, lam=lam, digits=digits)


def taylor_factor(consts: ExtremalConstants, T: int, digits: int = None) -> TaylorModel:
    """Taylor model of the entire factor in its own frame (b = pi/2).

    Coefficients start 1, L1, L1^2/2 + 2 L1 C, ...; the spectral root is
    re-solved internally at the precision the order T requires, and the
    recursion is retried at escalated precision if the growth envelope
    still trips.
    """
    if T < 2:
        raise UsageError("T must be at least 2")
    digits = digits if digits is not None else consts.digits_certified
    with mp.workdps(25):
        ab = mpf(consts.a_star)  # the product a*b is frame-invariant
    need = digits + _factor_recursion_loss(ab, T) + 30
    last_exc = None
    for _attempt in range(3):
        a1, lam = refined_spectral_frame(consts, need)
        try:
            with mp.workdps(need):
                a = 2 * a1 / mp.pi
                b = mp.pi / 2
                series = TruncatedLaurentSeries(
                    low=0, coeffs=_factor_coefficients(a, b, lam, T), parity="none"
                )
            return TaylorModel(
                which="factor", coeffs=series, a=a, b=b, lam=lam, digits=digits
            )
        except SolverError as exc:
            last_exc = exc
            need += need // 2 + 64
    raise SolverError(
        "factor recursion failed after precision escalation"
    ) from last_exc


def taylor_extremal(
    consts: ExtremalConstants, T: int, digits: int = None, cross_check: bool = True
) -> TaylorModel:
    """Even minimizer as a series in z (parity even, T powers of z^2).

    Built from the three-term relation solved forward,

        u_{n+1} = ((n(n+1) - lam) u_n + 2 b^2 n/(2n+1) u_{n-1})
                  * 2(2n+1) / (a^2 (n+1)),

    and, unless disabled, cross-checked coefficient by coefficient against
    the product of the factor with its reflection; disagreement beyond the
    accuracy target signals precision loss and raises.
    """
    if T < 2:
        raise UsageError("T must be at least 2")
    digits = digits if digits is not None else consts.digits_certified
    with mp.workdps(25):
        ab = mpf(consts.a_star)
        a_phi = 2 * ab / mp.pi
    loss = _extremal_recursion_loss(a_phi, T)
    if cross_check:
        loss = max(loss, _factor_recursion_loss(ab, 2 * T))
    need = digits + loss + 30
    a1, lam = refined_spectral_frame(consts, need)
    with mp.workdps(need):
        a = 2 * a1 / mp.pi
        b = mp.pi / 2
        a2 = a * a
        b2 = b * b
        u = [mpf(1), -2 * lam / a2]
        for n in range(1, T):
            nxt = (n * (n + 1) - lam) * u[n] + 2 * b2 * u[n - 1] * n / (2 * n + 1)
            u.append(nxt * (2 * (2 * n + 1)) / (a2 * (n + 1)))
        coeffs = [mpf(0)] * (2 * T + 1)
        for n in range(T + 1):
            coeffs[2 * n] = u[n]
        series = TruncatedLaurentSeries(low=0, coeffs=coeffs, parity="even")
        if cross_check:
            alphas = _factor_coefficients(a, b, lam, 2 * T)
            plus = TruncatedLaurentSeries(low=0, coeffs=alphas, parity="none")
            minus = TruncatedLaurentSeries(
                low=0,
                coeffs=[(-1) ** k * alphas[k] for k in range(len(alphas))],
                parity="none",
            )
            prod = series_multiply(plus, minus, 2 * T + 1)
            tol = mpf(10) ** (-(digits + 5))
            worst = max(
                abs(series.coeffs[k] - prod.coefficient(k)) for k in range(2 * T + 1)
            )
            if worst > tol:
                raise SolverError(
                    "three-term and product routes disagree by %s" % mp.nstr(worst, 5)
                )
    return TaylorModel(
        which="extremal", coeffs=series, a=a, b=b, lam=lam, digits=digits
    )


# ----------------------------------------------------------------------
# alternating odd power sums over the zeros, read off the reciprocal


def eigenfunction_odd_sums(model: TaylorModel, M: int):
    """First M odd-power sums S(1), S(3), ... for an even model.

    With psi the even model and Theta = -(a/2) z^{-1} / psi, the Laurent
    coefficient of Theta at exponent 2m-1 is exactly the alternating sum
    S(2m-1) = sum_n (-1)^n tau_n^{-(2m-1)} over the unsigned zero
    parameters (S(1) is the classical first-derivative constant L1 < 0).
    """
    if model.which != "extremal":
        raise UsageError("odd sums are read off the even model")
    if 2 * M > model.coeffs.high:
        raise UsageError("model order too small for %d odd sums" % M)
    with mp.workdps(model.coeffs.dps):
        recip = series_reciprocal(model.coeffs, 2 * M + 1)
        return [-(model.a / 2) * recip.coefficient(2 * m) for m in range(1, M + 1)]


def theta_series(model: TaylorModel, M: int) -> TruncatedLaurentSeries:
    """Laurent series -(a/2) z^{-1} / psi(z) truncated at exponent 2M - 1.

    Its z^{-1} coefficient is -a/2 (the summation-formula weight) and the
    positive odd coefficients are the alternating power sums.
    """
    if model.which != "extremal":
        raise UsageError("theta_series needs the even model")
    if 2 * M > model.coeffs.high:
        raise UsageError("model order too small for exponent %d" % (2 * M - 1))
    with mp.workdps(model.coeffs.dps):
        recip = series_reciprocal(model.coeffs, 2 * M + 1)
        scaled = series_scale(recip, -model.a / 2)
        return TruncatedLaurentSeries(
            low=-1, coeffs=scaled.coeffs, parity="odd", dps=scaled.dps
        )


def alternating_sums_odd(consts: ExtremalConstants, M: int, digits: int = None):
    """Alternating odd power sums over the zero parameters, orders 1..2M-1."""
    if M < 1:
        raise UsageError("M must be at least 1")
    digits = digits if digits is not None else consts.digits_certified
    model = taylor_extremal(consts, M + 2, digits=digits, cross_check=False)
    return eigenfunction_odd_sums(model, M)


# ----------------------------------------------------------------------
# offset expansion of the zeros


def offset_coefficients(consts: ExtremalConstants, M: int, digits: int = None):
    """a_1..a_M in tau_n = n + 1/2 - sum_m a_m (n+1/2)^{-m}.

    Lagrange inversion on all-real data: with G(w) = 1/(2C)
    + sum_k 2 S(2k-1) w^k / (2k-1) built from the alternating odd sums,
    the m-th offset coefficient for odd m is (-1)^{(m+1)/2} [w^{(m+1)/2}]
    G(w)^m / (2 C m pi^{m+1}); even entries vanish by the symmetry of the
    zero counting function and are returned as exact zeros.  The odd
    entries are provably nonnegative, so a negative value beyond roundoff
    raises.
    """
    if M < 1:
        raise UsageError("M must be at least 1")
    digits = digits if digits is not None else consts.digits_certified
    K = (M + 1) // 2 + 1
    wd = digits + M + 40
    sums = alternating_sums_odd(consts, K, digits=wd)
    a_ref, _lam = refined_spectral_frame(consts, wd)
    with mp.workdps(wd):
        C = mp.pi / (4 * a_ref)
        g = [1 / (2 * C)]
        for k in range(1, K + 1):
            g.append(2 * sums[k - 1] / (2 * k - 1))
        G = series_from_coeffs(g)
        out = []
        power = G
        tol = mpf(10) ** (-(digits + 5))
        for m in range(1, M + 1):
            if m % 2:
                j = (m + 1) // 2
                val = power.coefficient(j) * (-1) ** j / (2 * C * m * mp.pi ** (m + 1))
                if val < -tol:
                    raise SolverError(
                        "offset coefficient %d negative beyond roundoff: %s"
                        % (m, mp.nstr(val, 5))
                    )
                out.append(val if val > 0 else mpf(0))
            else:
                out.append(mpf(0))
            if m < M:
                power = series_multiply(power, G, K + 1)
    return out


def rho_series_value(rho_coeffs, x):
    """rho(x) = sum_m a_m x^m by Horner."""
    acc = mpf(0)
    for a_m in reversed(rho_coeffs):
        acc = acc * x + a_m
    return acc * x


def rho_tail_bound(M: int, x):
    """Bound on the dropped tail of rho past order M at argument x.

    Nonnegative coefficients summing against 2^m to at most 1/2 give
    a_m <= 2^{-m-1}, hence a tail below (x/2)^{M+1} / (2 (1 - x/2)).
    """
    x = mpf(x)
    if not (0 < x < 2):
        raise UsageError("tail bound valid for 0 < x < 2")
    r = x / 2
    return r ** (M + 1) / (2 * (1 - r))


# ----------------------------------------------------------------------
# the zero model


@dataclass
class ZeroModel:
    """Offset-series description of the zeros with a refined head.

    rho_coeffs are the offset coefficients a_1..a_M; refined holds
    tau_1..tau_n0 polished by Newton against the factor series; beyond the
    crossover n0 the plain series value is certified by the geometric tail
    bound to the model's digits.
    """

    rho_coeffs: list
    refined: list
    n0: int
    digits: int

    @property
    def M(self) -> int:
        return len(self.rho_coeffs)


def tau_series(model: ZeroModel, n: int):
    """Raw offset-series value of tau_n (no refined head, no certification)."""
    if n < 1:
        raise UsageError("n must be at least 1")
    X = mpf(2 * n + 1) / 2
    return X - rho_series_value(model.rho_coeffs, 1 / X)


def tau(model: ZeroModel, n: int):
    """n-th zero parameter tau_n; the factor vanishes at (-1)^{n+1} tau_n."""
    if n < 1:
        raise UsageError("n must be at least 1")
    if n <= model.n0:
        return model.refined[n - 1]
    X = mpf(2 * n + 1) / 2
    bound = rho_tail_bound(model.M, 1 / X)
    if bound >= mpf(10) ** (-model.digits):
        raise UsageError(
            "series tail bound %s too large at n=%d; increase M"
            % (mp.nstr(bound, 3), n)
        )
    return tau_series(model, n)


def zeros_unsigned(model: ZeroModel, count: int):
    """tau_1..tau_count, refined head first, certified series beyond."""
    return [tau(model, n) for n in range(1, count + 1)]


def zeros_signed(model: ZeroModel, count: int):
    """The factor's actual zeros (-1)^{n+1} tau_n for n = 1..count."""
    return [(-1) ** (n + 1) * tau(model, n) for n in range(1, count + 1)]


def _truncation_order(radius, target_exponent: int) -> int:
    """Smallest T with (pi/2 * radius)^T / T! below 10^-target_exponent."""
    with mp.workdps(25):
        x = mp.pi * mpf(radius) / 2
        logterm = mpf(0)
        T = 1
        while True:
            logterm += mp.log10(x) - mp.log10(T)
            if logterm < -target_exponent and T >= 4:
                return T
            T += 1
            if T > 100000:
                raise SolverError(
                    "no practical truncation order for radius %s" % radius
                )


def _cancellation_digits(radius) -> int:
    """Headroom digits for evaluating the factor at |z| <= radius.

    Horner partial sums peak near e^{b |z|}; the extra working digits
    cover the cancellation down to the O(1)-or-smaller function values.
    """
    with mp.workdps(25):
        return int(mp.pi / 2 * mpf(radius) / mp.log(10)) + 2


def refine_zeros_newton(consts: ExtremalConstants, n0: int, seeds=None, digits: int = None):
    """Newton-polished tau_1..tau_n0 against the factor's Taylor series.

    Seeds default to offset-series values from a small model (they land
    well inside the Newton basins).  The factor order is chosen so the
    Taylor truncation at the largest zero sits below the evaluation noise
    floor, including the exponential cancellation headroom.
    """
    if n0 < 1:
        raise UsageError("n0 must be at least 1")
    digits = digits if digits is not None else consts.digits_certified
    if seeds is None:
        rho = offset_coefficients(consts, 21, digits=min(digits, 30))
        with mp.workdps(digits + 15):
            seeds = [
                mpf(2 * n + 1) / 2 - rho_series_value(rho, mpf(2) / (2 * n + 1))
                for n in range(1, n0 + 1)
            ]
    radius = float(seeds[-1]) + 1
    cancel = _cancellation_digits(radius)
    T = _truncation_order(radius, digits + cancel + 10)
    factor = taylor_factor(consts, T, digits=digits + 10)
    deriv = series_derivative(factor.coeffs)
    out = []
    for n in range(1, n0 + 1):
        sign = 1 if n % 2 else -1
        with mp.workdps(digits + cancel + 20):
            t = mpf(seeds[n - 1])
            tol = mpf(10) ** (-(digits + 5))
            prev_step = None
            for _ in range(80):
                w = sign * t
                step = factor.coeffs.evaluate(w) / (sign * deriv.evaluate(w))
                t -= step
                if abs(step) <= tol:
                    break
                if (
                    prev_step is not None
                    and abs(step) > 4 * prev_step
                    and abs(step) > mpf("1e-3")
                ):
                    raise SolverError("Newton diverging at zero %d" % n)
                prev_step = abs(step)
            else:
                raise SolverError("Newton did not converge at zero %d" % n)
            out.append(t)
    return out


def build_zero_model(
    consts: ExtremalConstants, M: int = None, n0: int = None, digits: int = None
) -> ZeroModel:
    """Offset coefficients plus a Newton-refined head.

    The crossover n0 defaults to the smallest index whose series tail
    bound clears the digit target with one spare order of magnitude.
    """
    digits = digits if digits is not None else consts.digits_certified
    if M is None:
        M = int(digits / 1.23) + 2
    rho = offset_coefficients(consts, M, digits=digits)
    if n0 is None:
        n0 = 1
        while rho_tail_bound(M, mpf(2) / (2 * n0 + 1)) >= mpf(10) ** (-(digits + 1)):
            n0 += 1
            if n0 > 64:
                raise UsageError(
                    "series order M=%d cannot certify any practical crossover" % M
                )
    with mp.workdps(digits + 15):
        seeds = [
            mpf(2 * n + 1) / 2 - rho_series_value(rho, mpf(2) / (2 * n + 1))
            for n in range(1, n0 + 1)
        ]
    refined = refine_zeros_newton(consts, n0, seeds=seeds, digits=digits)
    return ZeroModel(rho_coeffs=rho, refined=refined, n0=n0, digits=digits)


# ----------------------------------------------------------------------
# resummed tails of alternating zero-power sums
#
# tau_m = (m + 1/2)(1 - x rho(x)) at x = 1/(m + 1/2), so tau_m^{-s}
# expands into shifted half-integer powers with the binomial-series
# coefficients of (1 - x rho(x))^{-s}; the alternating lattice tails then
# resum exactly through Hurwitz zeta differences.


def binomial_tail_expansion(rho_coeffs, s, K: int):
    """Coefficients e_0..e_K of (1 - x rho(x))^{-s} as a series in x."""
    xrho = [mpf(0), mpf(0)] + [mpf(c) for c in rho_coeffs]
    f = series_from_coeffs([-c for c in xrho[1 : K + 1]], low=1)
    expanded = series_exp0(series_scale(series_log1p(f, K + 1), -mpf(s)), K + 1)
    return [expanded.coefficient(k) for k in range(K + 1)]


def alternating_tau_tail(model: ZeroModel, s, n_start: int, target_exponent: int):
    """sum_{m > n_start} (-1)^{m+1} tau_m^{-s} to 10^-target_exponent.

    Zeros between n_start and an analytic cut are summed explicitly from
    the model; past the cut the binomial expansion of the offset form is
    resummed with Hurwitz zeta differences.  The cut is pushed out until
    both the expansion truncation and the model's own tail floor clear the
    target.
    """
    s_val = mpf(s)
    if s_val < 1:
        raise UsageError("tail exponent must be at least 1")
    tol = mpf(10) ** (-target_exponent)
    K = model.M
    cut = n_start
    while True:
        X = mpf(2 * cut + 3) / 2
        expansion_floor = X ** (-(s_val + K))
        model_floor = rho_tail_bound(model.M, 1 / X) * X ** (-s_val) * (1 + s_val / X)
        if expansion_floor < tol and model_floor < tol:
            break
        cut += 8
        if cut > n_start + 8192:
            raise UsageError("offset model too short for the requested tail accuracy")
    explicit = mpf(0)
    for m in range(n_start + 1, cut + 1):
        term = tau(model, m) ** (-s_val)
        explicit += term if m % 2 else -term
    e = binomial_tail_expansion(model.rho_coeffs, s_val, K)
    resummed = mpf(0)
    for k in range(K + 1):
        if e[k] == 0:
            continue
        resummed += e[k] * alternating_halfinteger_tail(s_val + k, cut)
        if k >= 2 and abs(e[k]) * X ** (-(s_val + k)) < tol:
            break
    return explicit + resummed


# ----------------------------------------------------------------------
# fixed-point refinement


def refine_zeros_fixed_point(
    consts: ExtremalConstants,
    zeros,
    sweeps: int,
    model: ZeroModel = None,
    sweep_log: list = None,
):
    """Jacobi sweeps of the arctangent fixed-point map

        tau_n <- n + 1/2 - (2/pi) sum_m (-1)^{m+1}
                 arctan(1 / (2 pi C tau_n tau_m)),

    over the supplied increasing head tau_1..tau_N; the sum over m runs
    explicitly through the head and analytically (offset model plus
    Hurwitz resummation) beyond it.  When sweep_log is a list, the l1
    displacement of each sweep is appended to it; ratios of successive
    entries estimate the contraction factor.
    """
    if sweeps < 1:
        raise UsageError("sweeps must be positive")
    if not zeros:
        raise UsageError("empty zero list")
    digits = consts.digits_certified
    model = model if model is not None else build_zero_model(consts, digits=digits)
    Nz = len(zeros)
    with mp.workdps(digits + 25):
        current = [mpf(t) for t in zeros]
        for i in range(1, Nz):
            if current[i] <= current[i - 1]:
                raise UsageError("zeros must be the increasing head tau_1..tau_N")
        C = mpf(consts.C)
        two_pi_c = 2 * mp.pi * C
        tol_exp = digits + 5
        tol = mpf(10) ** (-tol_exp)
        r = 1 / (two_pi_c * current[0] * (mpf(2 * Nz + 3) / 2))
        J = 0
        term = r
        while term > tol:
            J += 1
            term *= r * r
            if J > 400:
                raise SolverError("arctangent tail expansion does not converge")
        tails = [
            alternating_tau_tail(model, 2 * j + 1, Nz, tol_exp) for j in range(J + 1)
        ]
        for _sweep in range(sweeps):
            new = []
            for n in range(1, Nz + 1):
                q = 1 / (two_pi_c * current[n - 1])
                acc = mpf(0)
                for m in range(1, Nz + 1):
                    t = mp.atan(q / current[m - 1])
                    acc += t if m % 2 else -t
                qpow = q
                for j in range(J + 1):
                    acc += (-1) ** j * qpow * tails[j] / (2 * j + 1)
                    qpow *= q * q
                new.append(mpf(2 * n + 1) / 2 - 2 / mp.pi * acc)
            if sweep_log is not None:
                sweep_log.append(sum(abs(new[i] - current[i]) for i in range(Nz)))
            current = new
    return current


def fixed_point_contraction_bound(
    consts: ExtremalConstants, model: ZeroModel, terms: int = 2000
):
    """Upper bound for the l1 operator norm of the fixed-point map's Jacobian.

    Differentiating the map and bounding every zero from below by tau_1
    gives

        16 C tau_1 / (4 pi^2 C^2 tau_1^4 + 1)
        + sum_{m>=2} 8 C tau_1 / (4 pi^2 C^2 tau_1^2 tau_m^2 + 1),

    with the remainder past `terms` bounded by an integral comparison.  A
    value below 1/2 certifies the sweeps contract near the solution.
    """
    with mp.workdps(consts.digits_certified + 10):
        C = mpf(consts.C)
        t1 = tau(model, 1)
        base = 4 * mp.pi ** 2 * C ** 2 * t1 ** 2
        total = 16 * C * t1 / (base * t1 ** 2 + 1)
        for m in range(2, terms + 1):
            tm = tau(model, m)
            total += 8 * C * t1 / (base * tm * tm + 1)
        total += 8 * C * t1 / base / terms
    return total


# ----------------------------------------------------------------------
# residual checks


def _disk_grid(radius, count: int = 20):
    """Deterministic spread of nonzero sample points in the closed disk."""
    pts = []
    rads = [mpf(radius) * mpf(k) / 10 for k in (2, 4, 6, 8, 10)]
    per = max(1, count // len(rads))
    for i, r in enumerate(rads):
        for j in range(per):
            theta = 2 * mp.pi * (j + mpf(i) / 5 + mpf(3) / 17) / per
            pts.append(r * mp.exp(mp.mpc(0, 1) * theta))
    return pts[:count]


def check_ode_residual(consts: ExtremalConstants, points=None, digits: int = None):
    """Worst residual of the factor's second-order equation

        z^2 F'' + (2z - 1/(2C)) F' + (pi^2 z^2 / 4 + L1/(2C)) F

    over the sample points (default: 20 points in |z| <= 5)."""
    digits = digits if digits is not None else consts.digits_certified
    with mp.workdps(digits + 30):
        if points is None:
            points = _disk_grid(5)
        radius = max(abs(z) for z in points)
    cancel = _cancellation_digits(radius)
    T = _truncation_order(radius, digits + cancel + 10)
    factor = taylor_factor(consts, T, digits=digits + 10)
    d1 = series_derivative(factor.coeffs)
    d2 = series_derivative(d1)
    with mp.workdps(digits + cancel + 25):
        drift = factor.a  # 1/(2C) in this frame
        lam_term = factor.lam  # L1/(2C) equals minus the eigenvalue
        pi2 = mp.pi ** 2
        worst = mpf(0)
        for z in points:
            val = (
                z * z * d2.evaluate(z)
                + (2 * z - drift) * d1.evaluate(z)
                + (pi2 * z * z / 4 - lam_term) * factor.coeffs.evaluate(z)
            )
            worst = max(worst, abs(val))
    return worst


def check_extremal_ode_residual(consts: ExtremalConstants, points=None, digits: int = None):
    """Worst residual of the third-order equation for the even minimizer.

    Evaluated in the singularity-cleared form (multiplied through by z^4):

        z^4 p''' + 6 z^3 p''
        + (pi^2 z^4 + (6 + 2 L1/C) z^2 - 1/(4 C^2)) p'
        + (2 pi^2 z^3 + (2 L1/C) z) p,

    which vanishes identically for the true function; z = 0 is excluded
    (the cleared form is trivial there).
    """
    digits = digits if digits is not None else consts.digits_certified
    with mp.workdps(digits + 30):
        if points is None:
            points = _disk_grid(5)
        points = [z for z in points if z != 0]
        radius = max(abs(z) for z in points)
    cancel = 2 * _cancellation_digits(radius)
    Tz = _truncation_order(2 * float(radius), digits + cancel + 10)
    T = Tz // 2 + 4
    ext = taylor_extremal(consts, T, digits=digits + 10, cross_check=False)
    d1 = series_derivative(ext.coeffs)
    d2 = series_derivative(d1)
    d3 = series_derivative(d2)
    with mp.workdps(digits + cancel + 25):
        C = 1 / (2 * ext.a)
        l1_over_c = -2 * ext.lam  # L1/C = -2 lambda
        pi2 = mp.pi ** 2
        worst = mpf(0)
        for z in points:
            z2 = z * z
            val = (
                z2 * z2 * d3.evaluate(z)
                + 6 * z2 * z * d2.evaluate(z)
                + (pi2 * z2 * z2 + (6 + 2 * l1_over_c) * z2 - 1 / (4 * C * C))
                * d1.evaluate(z)
                + (2 * pi2 * z2 * z + 2 * l1_over_c * z) * ext.coeffs.evaluate(z)
            )
            worst = max(worst, abs(val))
    return worst


def check_quadratic_relation(consts: ExtremalConstants, points=None, digits: int = None):
    """Worst deviation of z^2 (F'(z)F(-z) + F'(-z)F(z)) - F(z)F(-z)/(2C)
    from its constant value -1/(2C) (default: 20 points in |z| <= 3)."""
    digits = digits if digits is not None else consts.digits_certified
    with mp.workdps(digits + 30):
        if points is None:
            points = _disk_grid(3)
        radius = max(abs(z) for z in points)
    cancel = _cancellation_digits(radius)
    T = _truncation_order(radius, digits + cancel + 10)
    factor = taylor_factor(consts, T, digits=digits + 10)
    d1 = series_derivative(factor.coeffs)
    with mp.workdps(digits + cancel + 25):
        drift = factor.a
        worst = mpf(0)
        for z in points:
            fp = factor.coeffs.evaluate(z)
            fm = factor.coeffs.evaluate(-z)
            val = z * z * (d1.evaluate(z) * fm + d1.evaluate(-z) * fp)
            val -= drift * fp * fm
            worst = max(worst, abs(val + drift))
    return worst


def zero_curvature_residual(consts: ExtremalConstants, n: int = 1, digits: int = None):
    """Residual of tau_n^2 F''(w) = (2 (-1)^n tau_n + 1/(2C)) F'(w) at the
    n-th zero w = (-1)^{n+1} tau_n (the quadratic relation differentiated
    and restricted to a zero, where it closes without the function term).
    """
    digits = digits if digits is not None else consts.digits_certified
    zs = refine_zeros_newton(consts, n, digits=digits)
    radius = float(zs[-1]) + 1
    cancel = _cancellation_digits(radius)
    T = _truncation_order(radius, digits + cancel + 10)
    factor = taylor_factor(consts, T, digits=digits + 10)
    d1 = series_derivative(factor.coeffs)
    d2 = series_derivative(d1)
    with mp.workdps(digits + cancel + 20):
        t = zs[n - 1]
        w = (-1) ** (n + 1) * t
        lhs = t * t * d2.evaluate(w)
        rhs = (2 * (-1) ** n * t + factor.a) * d1.evaluate(w)
    return abs(lhs - rhs)


def _reflection_terms(factor: TaylorModel, C, z):
    """The two reflected components e^{-+ i pi z/2} F(+-i/(2 pi C z))."""
    i = mp.mpc(0, 1)
    w = 1 / (2 * mp.pi * C * z)
    g_plus = mp.exp(-i * mp.pi * z / 2) * factor.coeffs.evaluate(i * w)
    g_minus = mp.exp(i * mp.pi * z / 2) * factor.coeffs.evaluate(-i * w)
    return g_plus, g_minus


def _self_dual_circle(C, count: int, offset: int):
    """Points on |z| = 1/sqrt(2 pi C), where z and the reflected argument
    1/(2 pi C z) share the same modulus."""
    r = 1 / mp.sqrt(2 * mp.pi * C)
    return [
        r * mp.exp(mp.mpc(0, 1) * 2 * mp.pi * (j + mpf(offset) / 100) / count)
        for j in range(count)
    ]


def check_functional_equation(consts: ExtremalConstants, points=None, digits: int = None):
    """Worst residual of the reflection identity

        F(z) e^{1/(4Cz)} = [e^{i pi/4 - i pi z/2} F(i/(2 pi C z))
                            + e^{-i pi/4 + i pi z/2} F(-i/(2 pi C z))]
                           / (2 sqrt(pi C) z)

    at the sample points (default: 20 points on the self-dual circle)."""
    digits = digits if digits is not None else consts.digits_certified
    T = _truncation_order(0.6, digits + 25)
    factor = taylor_factor(consts, T, digits=digits + 10)
    with mp.workdps(digits + 25):
        C = 1 / (2 * factor.a)
        if points is None:
            points = _self_dual_circle(C, 20, 37)
        i = mp.mpc(0, 1)
        e_plus = mp.exp(i * mp.pi / 4)
        e_minus = mp.exp(-i * mp.pi / 4)
        norm = 2 * mp.sqrt(mp.pi * C)
        worst = mpf(0)
        for z in points:
            lhs = factor.coeffs.evaluate(z) * mp.exp(1 / (4 * C * z))
            g_plus, g_minus = _reflection_terms(factor, C, z)
            rhs = (e_plus * g_plus + e_minus * g_minus) / (norm * z)
            worst = max(worst, abs(lhs - rhs))
    return worst


def fit_reflection_coefficients(consts: ExtremalConstants, points=None, digits: int = None):
    """Least-squares fit of the two reflection constants.

    Writes z F(z) e^{1/(4Cz)} = k_plus e^{-i pi z/2} F(i/(2 pi C z))
    + k_minus e^{+i pi z/2} F(-i/(2 pi C z)) and solves the 2x2 complex
    normal equations over the sample points.  At the true constants the
    fit returns k_pm = e^{+-i pi/4} / sqrt(4 pi C).
    """
    digits = digits if digits is not None else consts.digits_certified
    T = _truncation_order(0.6, digits + 25)
    factor = taylor_factor(consts, T, digits=digits + 10)
    with mp.workdps(digits + 25):
        C = 1 / (2 * factor.a)
        if points is None:
            points = _self_dual_circle(C, 24, 41)
        m00 = m01 = m11 = rhs0 = rhs1 = mp.mpc(0)
        for z in points:
            y = z * factor.coeffs.evaluate(z) * mp.exp(1 / (4 * C * z))
            g_plus, g_minus = _reflection_terms(factor, C, z)
            m00 += mp.conj(g_plus) * g_plus
            m01 += mp.conj(g_plus) * g_minus
            m11 += mp.conj(g_minus) * g_minus
            rhs0 += mp.conj(g_plus) * y
            rhs1 += mp.conj(g_minus) * y
        m10 = mp.conj(m01)
        det = m00 * m11 - m01 * m10
        k_plus = (rhs0 * m11 - m01 * rhs1) / det
        k_minus = (m00 * rhs1 - m10 * rhs0) / det
    return k_plus, k_minus


# ----------------------------------------------------------------------
# the summation identity


@dataclass
class SummationReport:
    """Outcome of a summation-formula check: the measured defect, the
    certified bound on the omitted tail, and how many zeros were summed."""

    defect: mpf
    tail_bound: mpf
    zeros_used: int


def summation_check(
    consts: ExtremalConstants,
    f,
    f_prime_0,
    a_param,
    zeros,
    decay_constant,
    decay_power: int = 4,
    tolerance=None,
) -> SummationReport:
    """Defect of a f'(0) = sum_mu (f(mu) - f(-mu)) over the signed zeros.

    The test function must be entire of exponential type at most pi and
    integrable on the line, with |f(x)| <= decay_constant |x|^{-decay_power}
    beyond the covered range; decay_power below 4 is rejected because the
    omitted tail would not certify below any useful tolerance.
    """
    if decay_power < 4:
        raise UsageError("slow-decay test function rejected (need |f| = O(x^-4))")
    if not zeros:
        raise UsageError("empty zero list")
    with mp.workdps(max(mp.dps, consts.digits_certified + 10)):
        total = mp.fsum(f(mu) - f(-mu) for mu in zeros)
        defect = abs(mpf(a_param) * mpf(f_prime_0) - total)
        X = max(abs(mpf(z)) for z in zeros)
        tail = (
            2
            * mpf(decay_constant)
            * (X ** (1 - decay_power) / (decay_power - 1) + X ** (-decay_power))
        )
    if tolerance is not None and tail > mpf(tolerance):
        raise UsageError(
            "tail bound %s exceeds the requested tolerance; supply more zeros"
            % mp.nstr(tail, 3)
        )
    return SummationReport(defect=defect, tail_bound=tail, zeros_used=len(zeros))


# ----------------------------------------------------------------------
# companion eigenfunction systems at other drift values
#
# The ground eigenvector at drift a (b = 1 frame) is also the coefficient
# list of an entire eigenfunction in the spherical-Bessel basis: with
# alternating signs it gives the factor-like function whose positive
# zeros fill the odd rungs of the system's ladder, and with plain signs
# its reflection, whose positive zeros fill the even rungs.  At the
# extremal drift these are exactly pi/2 times the tau ladder; at other
# drifts they provide the second zero system of the summation identity.


def _bessel_j_ladder(x, M: int):
    """Spherical Bessel values (j_{-1}, [j_0, ..., j_M]) at x > 0.

    Upward recurrence is used in the oscillatory regime x > M + 4 where it
    is stable; below that the sequence is generated by downward recurrence
    from a damped seed and normalized through j_0 (Miller's device), which
    avoids the factorial contamination of upward steps at small argument.
    """
    jm1 = mp.cos(x) / x
    j0 = mp.sin(x) / x
    if x > M + 4:
        js = [j0]
        prev, cur = jm1, j0
        for m in range(M):
            nxt = (2 * m + 1) / x * cur - prev
            js.append(nxt)
            prev, cur = cur, nxt
        return jm1, js
    start = M + 20 + int(x)
    hi = mpf(0)
    cur = mpf(10) ** (-40)
    tail = [cur]
    for m in range(start, 0, -1):
        hi, cur = cur, (2 * m + 1) / x * cur - hi
        tail.append(cur)
    tail.reverse()
    scale = j0 / tail[0]
    return jm1, [tail[m] * scale for m in range(M + 1)]


def _eigen_bessel_coefficients(a, digits: int):
    """Ground eigenvector at drift a, truncated where its decay clears
    the digit target with room to spare."""
    wd = digits + 50
    cut = mpf(10) ** (-(digits + 20))
    N = max(96, 3 * digits)
    with mp.workdps(wd):
        pair = ground_eigenpair(build_matrix(N, mpf(a)))
        xi = []
        for v in pair.xi:
            if len(xi) > 4 and abs(v) < cut:
                break
            xi.append(v)
        if len(xi) > N // 2:
            raise SolverError(
                "eigenvector at a=%s does not decay; cannot truncate" % mp.nstr(a, 8)
            )
    return xi


def _bessel_series_eval(xi, alternate: bool, x):
    """Value and derivative of sum_m (+-1)^m xi_m j_m at x."""
    M = len(xi) - 1
    jm1, js = _bessel_j_ladder(x, M)
    val = mpf(0)
    der = mpf(0)
    for m in range(M + 1):
        c = -xi[m] if (alternate and m % 2) else xi[m]
        val += c * js[m]
        der += c * ((js[m - 1] if m else jm1) - (m + 1) / x * js[m])
    return val, der


def _bessel_zero_ladder(xi, alternate: bool, count: int, digits: int):
    """First `count` positive zeros of the Bessel-series eigenfunction.

    The head is located by a sign-change scan; after two zeros are known
    the next seed is linear continuation (consecutive zeros approach a pi
    spacing) and safeguarded Newton finishes.  Loss of monotonicity or a
    non-converging step reports a solver failure rather than bad zeros.
    """
    target = mpf(10) ** (-(digits + 5))
    zeros = []

    def refine(seed, lo, hi):
        r = seed
        for _ in range(80):
            v, d = _bessel_series_eval(xi, alternate, r)
            step = v / d
            r -= step
            if r <= lo or r >= hi:
                r = (lo + hi) / 2
            if abs(step) < target:
                return r
        raise SolverError("Newton stalled near %s" % mp.nstr(seed, 8))

    step = mpf(2) / 5
    x = step
    pv, _ = _bessel_series_eval(xi, alternate, x)
    while len(zeros) < min(count, 3) and x < 40:
        x += step
        v, _ = _bessel_series_eval(xi, alternate, x)
        if v == 0:
            zeros.append(x)
        elif v * pv < 0:
            zeros.append(refine(x - step / 2, x - step, x))
        pv = v
    if len(zeros) < min(count, 3):
        raise SolverError("zero scan found no ladder head at this drift")
    while len(zeros) < count:
        gap = zeros[-1] - zeros[-2]
        seed = zeros[-1] + gap
        nxt = refine(seed, zeros[-1] + gap / 2, seed + gap / 2)
        if nxt <= zeros[-1]:
            raise SolverError("zero ladder lost monotonicity")
        zeros.append(nxt)
    return zeros[:count]


def summation_system(a, count: int, digits: int = 20):
    """Drift weight and signed zero set of the eigenfunction system at
    matrix drift a, rescaled from the b = 1 frame to exponential type pi/2.

    Returns (a_param, zeros) ready for :func:`summation_check`: positive
    entries are the scaled zeros of the alternating Bessel series, negative
    entries the reflected zeros of its companion, merged in increasing
    absolute value.  They must interleave; a collision or an inversion is
    reported as a solver failure.  At the extremal drift the result
    reproduces 1/(2C) and the signed tau ladder.
    """
    if count < 2:
        raise UsageError("count must be at least 2")
    with mp.workdps(digits + 30):
        a = mpf(a)
        if not (0 < a < mpf(3) / 2):
            raise UsageError("summation_system requires 0 < a < 3/2")
        xi = _eigen_bessel_coefficients(a, digits)
        half = count // 2 + 2
        plus = _bessel_zero_ladder(xi, True, half, digits)
        minus = _bessel_zero_ladder(xi, False, half, digits)
        merged = sorted(
            [(t, 1) for t in plus] + [(t, -1) for t in minus], key=lambda p: p[0]
        )
        for (t1, s1), (t2, s2) in zip(merged, merged[1:]):
            if s1 == s2:
                raise SolverError("zero ladders do not interleave at a=%s" % a)
        scale = 2 / mp.pi
        out = [s * scale * t for t, s in merged[:count]]
        return a * scale, out


def constant_from_zeros_alternating(consts: ExtremalConstants, M: int = None):
    """The central constant from 1/C = 2 + 4 sum_n (-1)^n (n + 1/2 - tau_n).

    The alternating sum collapses through the offset expansion to
    sum_m a_m 2^m (beta(m) - 1) with Dirichlet beta, so no zeros are
    evaluated at all; the remainder past M is below 3^-M / 4.
    """
    digits = consts.digits_certified
    if M is None:
        M = int((digits + 7) / 0.477) + 2
    rho = offset_coefficients(consts, M, digits=digits)
    with mp.workdps(digits + 25):
        total = mpf(0)
        for m in range(1, M + 1):
            a_m = rho[m - 1]
            if a_m == 0:
                continue
            total += a_m * mpf(2) ** m * (beta_numeric(m) - 1)
        return 1 / (2 + 4 * total)


def constant_wallis_product(
    consts: ExtremalConstants, model: ZeroModel = None, base: int = 64, levels: int = 8
):
    """The central constant from the product (1/2) prod_n tau_n^2 / (n(n+1)).

    Partial products converge only like c/N, so they are sampled at
    doubling N and Richardson-extrapolated across `levels` doublings.
    """
    model = model if model is not None else build_zero_model(consts)
    digits = consts.digits_certified
    with mp.workdps(digits + 15):
        partials = []
        prod = mpf(1) / 2
        n = 1
        for stop in (base * 2 ** k for k in range(levels)):
            while n <= stop:
                t = tau(model, n)
                prod *= t * t / (n * (n + 1))
                n += 1
            partials.append(prod)
        return richardson_doubling(partials)
