"""Fourier side of the extremal reconstruction.

The even extremal function (type pi, value 1 at the origin) has a real,
even Fourier transform supported on (-pi, pi).  In the normalized
frequency u = xi / pi the transform is computed two independent ways:

* a series in powers of (1 - u) whose n-th coefficient is built from
  the (n-1)-st Taylor coefficient of the square of the entire factor,
  converging on the whole band including the endpoints;

* an even Legendre expansion whose coefficients come straight from the
  ground eigenvector, through the triangular change of basis between
  even monomials and spherical Bessel functions.

Agreement of the two is one of the strongest end-to-end checks in the
package, since they consume different spectral data (Taylor recursion
versus eigenvector) and different basis machinery.

Everything here stays inside the band.  The transform convention is
F(xi) = integral f(x) exp(-i xi x) dx, so the value at u = 0 is the
integral of the function and the normalized mean over the band is 1.
"""

from dataclasses import dataclass

from mpmath import mp, mpf

from .mpcore import UsageError, clenshaw_legendre, series_multiply
from .spectral import ExtremalConstants, SolverError, build_matrix, ground_eigenpair
from .extremal import (
    fit_reflection_coefficients,
    refined_spectral_frame,
    taylor_factor,
)


@dataclass
class BandTransform:
    """Transform of the even extremal function on its band.

    coeffs[n] multiplies (1 - u)^n for n >= 1 (entry 0 is unused and
    kept at zero); value(u) is a Horner evaluation in t = 1 - u.  The
    series terminates at u = 1 by construction, so the endpoint value
    there is exactly zero; vanishing at u = -1 is a nontrivial property
    of the coefficients and is checked, not imposed.
    """

    coeffs: list
    C: mpf
    digits: int

    @property
    def terms(self) -> int:
        return len(self.coeffs) - 1


def _transform_terms(digits: int, C) -> int:
    """Smallest series order with a certified sub-target tail on the band.

    The n-th coefficient is bounded by pi^n / (C^n (n-1)! n!) and the
    evaluation point satisfies |1 - u| <= 2, absorbed into the bound.
    """
    with mp.workdps(25):
        ratio = 2 * mp.pi / mpf(C)
        target = mpf(10) ** (-(digits + 12))
        term = mp.pi
        n = 1
        while n < 400:
            if term < target and n >= 8:
                return n
            n += 1
            term *= ratio / (n * (n - 1))
    raise SolverError("transform series did not reach the tail target")


def build_band_transform(
    consts: ExtremalConstants, terms: int = None, digits: int = None
) -> BandTransform:
    """Series for the transform in powers of (1 - u), u the frequency / pi.

    The n-th coefficient is pi / (n! (2C)^n) times the (n-1)-st Taylor
    coefficient of the squared factor, assembled at a working precision
    that keeps the requested digits after the factorial weights.
    """
    digits = digits if digits is not None else consts.digits_certified
    a1, _lam = refined_spectral_frame(consts, digits + 35)
    with mp.workdps(digits + 35):
        C = mp.pi / (4 * a1)
    N = terms if terms is not None else _transform_terms(digits, C)
    if N < 2:
        raise UsageError("terms must be at least 2")
    factor = taylor_factor(consts, N + 1, digits=digits + 12)
    with mp.workdps(factor.coeffs.dps):
        squared = series_multiply(factor.coeffs, factor.coeffs, N)
    with mp.workdps(digits + 35):
        coeffs = [mpf(0)]
        weight = mpf(1)
        for n in range(1, N + 1):
            weight /= 2 * C * n
            coeffs.append(mp.pi * squared.coefficient(n - 1) * weight)
    return BandTransform(coeffs=coeffs, C=C, digits=digits)


def transform_value(model: BandTransform, u, digits: int = None):
    """Evaluate the band transform at normalized frequency u (Horner)."""
    wd = max(model.digits, digits or 0) + 20
    with mp.workdps(wd):
        t = 1 - mp.mpmathify(u)
        acc = mp.mpf(0)
        for n in range(model.terms, 0, -1):
            acc = (acc + model.coeffs[n]) * t
        return acc


def parseval_defect(model: BandTransform):
    """|normalized band mean - 1|; the mean equals the value at the origin.

    Term-wise integration of (1 - u)^n over the band gives 2^{n+1}/(n+1),
    so the defect is computed exactly from the coefficients with no
    quadrature involved.
    """
    with mp.workdps(model.digits + 20):
        total = mp.fsum(
            model.coeffs[n] * mpf(2) ** (n + 1) / (n + 1)
            for n in range(1, model.terms + 1)
        )
        return abs(total / 2 - 1)


# ----------------------------------------------------------------------
# Legendre representation from the ground eigenvector


def _double_factorial_log10(n: int) -> float:
    import math

    return (
        math.lgamma(n + 1) - math.lgamma((n - 1) // 2 + 1) - ((n - 1) // 2) * math.log(2)
    ) / math.log(10)


def legendre_band_coefficients(
    consts: ExtremalConstants, pairs: int = None, digits: int = None
) -> list:
    """Even Legendre coefficients of the band transform, from the eigenvector.

    Rescaling the even extremal function to exponential type 1 makes its
    transform live on (-1, 1); expanding the plane wave in Legendre
    polynomials turns the Taylor coefficients (which the ground
    eigenvector gives in closed form) into spherical-Bessel expansion
    coefficients by a triangular system, and those are, up to alternating
    signs, exactly the Legendre coefficients of the transform.

    Returns the full list d_0, 0, d_2, 0, ... suitable for Clenshaw
    evaluation; d_0 = 1 holds identically (the normalized band mean).
    The forward substitution runs at two working precisions and the kept
    coefficients must agree to the certified digits.
    """
    digits = digits if digits is not None else consts.digits_certified
    K = pairs if pairs is not None else digits // 3 + 8
    if K < 2:
        raise UsageError("pairs must be at least 2")
    if K > 64:
        raise UsageError("pairs beyond 64 exceeds the supported range")
    # precision budget: the triangular substitution multiplies by (4m+1)!!
    # while the incoming terms carry (2C/pi)^m, and the bracket cancels
    # down to the final coefficient size
    amplify = max(
        _double_factorial_log10(4 * m + 1) - m * 0.46 for m in range(1, K + 1)
    )
    wd = digits + int(amplify) + 35
    first = _legendre_forward(consts, K, wd)
    second = _legendre_forward(consts, K, wd + 48)
    tol = mpf(10) ** (-(digits + 5))
    with mp.workdps(wd):
        worst = max(abs(a - b) for a, b in zip(first, second))
        if worst > tol:
            raise SolverError(
                "legendre coefficients unstable between precisions (%s)"
                % mp.nstr(worst, 3)
            )
        if abs(first[-1]) > tol or abs(first[-3]) > tol:
            raise SolverError("legendre tail has not converged; increase pairs")
    return second


def _legendre_forward(consts: ExtremalConstants, K: int, wd: int) -> list:
    """One forward-substitution pass at working precision wd."""
    a1, lam = refined_spectral_frame(consts, wd)
    N = max(192, wd + 64)
    with mp.workdps(wd):
        pair = ground_eigenpair(build_matrix(N, a1), lambda_seed=lam)
        if pair.residual > mpf(10) ** (-(wd - 10)):
            raise SolverError("eigenpair residual too large for the transform")
        C = mp.pi / (4 * a1)
        scale = -2 * C / mp.pi
        bessel_coeffs = []
        for m in range(K + 1):
            taylor_m = pair.xi[m] * scale ** m / (2 * m + 1)
            acc = taylor_m
            for k in range(m):
                j = m - k
                acc -= (
                    bessel_coeffs[k]
                    * (-1) ** j
                    / (mpf(2) ** j * mp.factorial(j) * mp.fac2(2 * m + 2 * k + 1))
                )
            bessel_coeffs.append(acc * mp.fac2(4 * m + 1))
        out = []
        for k in range(K + 1):
            out.append((-1) ** k * bessel_coeffs[k])
            out.append(mpf(0))
        out.pop()
        return out


def legendre_band_value(coeffs: list, u):
    """Clenshaw evaluation of a Legendre coefficient list at u."""
    return clenshaw_legendre(coeffs, u)


# ----------------------------------------------------------------------
# endpoint reflection constants


def endpoint_reflection_constants(consts: ExtremalConstants, digits: int = None):
    """The two complex endpoint constants of the factor's reflection law.

    Computed by least squares against the functional equation (nothing
    is assumed about their closed form); they must come out as complex
    conjugates on the quarter diagonals with
    k_plus^2 - k_minus^2 = i / (2 pi C) and
    k_plus e^{i pi/4} + k_minus e^{-i pi/4} = 0.
    """
    return fit_reflection_coefficients(consts, digits=digits)


# ----------------------------------------------------------------------
# even-window basis


def window_basis_fit(model: BandTransform, K: int, digits: int = None):
    """Least-squares fit of the transform onto (1 - u^2)^n, n = 1..K.

    Returns (coefficients, residual) where the residual is the largest
    reconstruction error over an independent uniform grid on [0, 1];
    evenness makes the negative half redundant.  Low K gives the classic
    short window ansatz whose quality is measured, not assumed; K around
    half the certified digits reaches the precision floor.
    """
    if K < 1:
        raise UsageError("K must be at least 1")
    if K > 40:
        raise UsageError("K beyond 40 exceeds the supported range")
    digits = digits if digits is not None else model.digits
    points = max(3 * K, 48)
    wd = digits + 3 * K + 40
    with mp.workdps(wd):
        nodes = [mp.cos(mp.pi * (2 * i + 1) / (4 * points)) for i in range(points)]
        A = mp.matrix(points, K)
        b = mp.matrix(points, 1)
        for i, u in enumerate(nodes):
            t = 1 - u * u
            power = mpf(1)
            for n in range(K):
                power *= t
                A[i, n] = power
            b[i] = transform_value(model, u, digits=digits + 10)
        solution, _qr_residual = mp.qr_solve(A, b)
        coeffs = [solution[n] for n in range(K)]
        worst = mpf(0)
        for j in range(65):
            u = mpf(j) / 64
            t = 1 - u * u
            fit = mpf(0)
            power = mpf(1)
            for n in range(K):
                power *= t
                fit += coeffs[n] * power
            worst = max(worst, abs(fit - transform_value(model, u, digits=digits + 10)))
    return coeffs, worst


def window_basis_coefficients(
    model: BandTransform, K: int, max_residual=None
) -> list:
    """Coefficient list of the (1 - u^2)^n fit; see window_basis_fit.

    When max_residual is given, a reconstruction residual above it is
    reported as a solver failure (the detector for an ill-conditioned or
    under-resolved fit).
    """
    coeffs, residual = window_basis_fit(model, K)
    if max_residual is not None and residual > mpf(max_residual):
        raise SolverError(
            "window basis fit residual %s exceeds %s"
            % (mp.nstr(residual, 3), mp.nstr(mpf(max_residual), 3))
        )
    return coeffs
