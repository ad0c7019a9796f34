"""Tridiagonal spectral solver for the extremal constants.

The extremal constant C and the companion value L1 (the derivative of the
entire factor at the origin) are obtained from a one-parameter family of
tridiagonal eigenproblems.  In the b=1 frame the operator acts on Legendre
coefficients through the infinite tridiagonal matrix with row m

    sub(m) = -a m/(2m-1),   diag(m) = m(m+1),   super(m) = a (m+1)/(2m+3),

and the solver's job is:

1. for a truncation size N and coupling a, find the smallest eigenvalue and
   its eigenvector (normalized so the leading entry is 1);
2. root-find on a so that the alternating Legendre-endpoint sum
   S = sum_n (-1)^{floor((n-1)/2)} xi_n vanishes (this is the phase
   condition selecting the extremal eigenfunction);
3. double N until the root stabilizes, then convert: C = pi/(4a) and
   L1 = -2 C lambda.

Truncation error decays superexponentially (the eigenvector entries die
off faster than any geometric sequence), so the ladder stabilizes at small
N even for high digit counts.

All numeric kernels here run under the ambient mpmath precision; only
solve_constants manages PrecisionContext objects itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from mpmath import mp, mpf

from .mpcore import PrecisionContext, UsageError, decimal_truncated, default_guard


class SolverError(RuntimeError):
    """Numerical failure: residual bound or certification not reached."""


# ----------------------------------------------------------------------
# matrix construction


@dataclass
class TridiagonalSystem:
    """Truncated (N+1)x(N+1) tridiagonal matrix in the b=1 frame."""

    N: int
    a: mpf

    def __post_init__(self):
        if self.N < 2:
            raise UsageError("N must be at least 2")
        self.a = mpf(self.a)

    def sub(self, m: int) -> mpf:
        """Entry (m, m-1), defined for 1 <= m <= N."""
        return -self.a * m / (2 * m - 1)

    def diag(self, m: int) -> mpf:
        return mpf(m * (m + 1))

    def sup(self, m: int) -> mpf:
        """Entry (m, m+1), defined for 0 <= m <= N-1."""
        return self.a * (m + 1) / (2 * m + 3)


def build_matrix(N: int, a) -> TridiagonalSystem:
    return TridiagonalSystem(N=N, a=mpf(a))


@dataclass
class EigenPair:
    lam: mpf
    xi: list
    residual: mpf = field(default_factory=lambda: mpf(0))


# ----------------------------------------------------------------------
# characteristic-polynomial machinery
#
# The leading principal minors p_k(lambda) of (T_N - lambda I) satisfy
#   p_k = (diag(k) - lambda) p_{k-1} - sub(k) sup(k-1) p_{k-2}.
# Only signs and the Newton ratio p/p' are needed, so both recurrences are
# rescaled each step to dodge overflow.


def _det_sign(sys: TridiagonalSystem, lam) -> int:
    p_prev = mpf(1)
    p = sys.diag(0) - lam
    for k in range(1, sys.N + 1):
        p, p_prev = (sys.diag(k) - lam) * p - sys.sub(k) * sys.sup(k - 1) * p_prev, p
        scale = max(abs(p), abs(p_prev))
        if scale > mpf(10) ** 100:
            p /= scale
            p_prev /= scale
    if p == 0:
        return 0
    return 1 if p > 0 else -1


def _det_newton_ratio(sys: TridiagonalSystem, lam):
    """Returns p_N / p_N' at lam, jointly rescaled."""
    p_prev, p = mpf(1), sys.diag(0) - lam
    q_prev, q = mpf(0), mpf(-1)  # derivatives in lambda
    for k in range(1, sys.N + 1):
        c = sys.diag(k) - lam
        offd = sys.sub(k) * sys.sup(k - 1)
        p_next = c * p - offd * p_prev
        q_next = c * q - p - offd * q_prev
        p_prev, p, q_prev, q = p, p_next, q, q_next
        scale = max(abs(p), abs(p_prev), abs(q), abs(q_prev))
        if scale > mpf(10) ** 100:
            p /= scale
            p_prev /= scale
            q /= scale
            q_prev /= scale
    if q == 0:
        raise SolverError("zero derivative in Newton polish")
    return p / q


def _bisect_eigenvalue(sys: TridiagonalSystem, lo, hi, coarse_dps: int = 30):
    """Bracket one eigenvalue by sign bisection of the characteristic minor.

    Runs at a coarse precision: the bracket only feeds a Newton polish.
    """
    with mp.workdps(coarse_dps):
        lo = mpf(lo)
        hi = mpf(hi)
        s_lo = _det_sign(sys, lo)
        s_hi = _det_sign(sys, hi)
        if s_lo == 0:
            return lo, lo
        if s_hi == 0:
            return hi, hi
        if s_lo == s_hi:
            raise SolverError("no sign change in eigenvalue bracket")
        for _ in range(90):
            mid = (lo + hi) / 2
            s_mid = _det_sign(sys, mid)
            if s_mid == 0:
                return mid, mid
            if s_mid == s_lo:
                lo = mid
            else:
                hi = mid
            if hi - lo < mpf(10) ** -20:
                break
        return lo, hi


def _newton_eigenvalue(sys: TridiagonalSystem, seed, lo=None, hi=None):
    lam = mpf(seed)
    tol = mpf(10) ** (-(mp.dps - 2))
    for _ in range(120):
        step = _det_newton_ratio(sys, lam)
        lam -= step
        if lo is not None and (lam < lo - 1 or lam > hi + 1):
            raise SolverError("Newton left the localization interval")
        if abs(step) <= tol * max(1, abs(lam)):
            lam -= _det_newton_ratio(sys, lam)
            return lam
    raise SolverError("eigenvalue Newton did not converge")


# ----------------------------------------------------------------------
# inverse iteration


def _tridiag_lu_solve(dl, d, du, rhs):
    """Solve a tridiagonal system by LU with partial pivoting.

    dl, d, du are the sub/main/super diagonals (lengths n-1, n, n-1).
    A second superdiagonal can fill in when rows swap.
    """
    n = len(d)
    dl = list(dl)
    d = list(d)
    du = list(du) + [mpf(0)]
    du2 = [mpf(0)] * n
    x = list(rhs)
    tiny = mpf(10) ** (-(2 * mp.dps + 50))
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] == 0:
                d[i] = tiny
            m = dl[i] / d[i]
            d[i + 1] -= m * du[i]
            x[i + 1] -= m * x[i]
        else:
            m = d[i] / dl[i]
            d[i] = dl[i]
            tmp = d[i + 1]
            d[i + 1] = du[i] - m * tmp
            du[i] = tmp
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -m * du[i + 1]
            x[i], x[i + 1] = x[i + 1], x[i] - m * x[i + 1]
    if d[n - 1] == 0:
        d[n - 1] = tiny
    x[n - 1] = x[n - 1] / d[n - 1]
    if n >= 2:
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i]
    return x


def _apply(sys: TridiagonalSystem, v):
    n = sys.N + 1
    out = []
    for m in range(n):
        acc = sys.diag(m) * v[m]
        if m > 0:
            acc += sys.sub(m) * v[m - 1]
        if m < n - 1:
            acc += sys.sup(m) * v[m + 1]
        out.append(acc)
    return out


def ground_eigenpair(
    sys: TridiagonalSystem,
    lambda_seed=None,
    residual_slack: int = 5,
) -> EigenPair:
    """Smallest eigenpair of the truncated system, normalized xi[0] = 1.

    The eigenvalue sits in [0, a/3].  It is bracketed by sign bisection of
    the characteristic minors at coarse precision (skipped when a seed from
    a nearby solve is supplied), polished by Newton on the minor recurrence
    at the ambient precision, and the eigenvector is recovered by inverse
    iteration with a pivoted tridiagonal LU solve.
    """
    if not (0 < sys.a < mpf(3) / 2):
        raise UsageError("ground_eigenpair requires 0 < a < 3/2")
    margin = (2 - sys.a - sys.a / 3) / 4
    lo, hi = mpf(0), sys.a / 3 + margin
    lam = None
    if lambda_seed is not None:
        try:
            lam = _newton_eigenvalue(sys, mpf(lambda_seed), lo, hi)
        except SolverError:
            lam = None  # stale seed; fall back to bisection
    if lam is None:
        blo, bhi = _bisect_eigenvalue(sys, lo, hi)
        lam = _newton_eigenvalue(sys, (blo + bhi) / 2, lo, hi)

    n = sys.N + 1
    dl = [sys.sub(m) for m in range(1, n)]
    d = [sys.diag(m) - lam for m in range(n)]
    du = [sys.sup(m) for m in range(n - 1)]
    v = [mpf(1)] * n
    target = mpf(10) ** (-(mp.dps - residual_slack))
    best = None
    for sweep in range(6):
        v = _tridiag_lu_solve(dl, d, du, v)
        big = max(abs(c) for c in v)
        v = [c / big for c in v]
        xi = [c / v[0] for c in v]
        tv = _apply(sys, xi)
        scale = max(abs(c) for c in xi)
        resid = max(abs(tv[m] - lam * xi[m]) for m in range(n)) / scale
        if best is None or resid < best.residual:
            best = EigenPair(lam=lam, xi=xi, residual=resid)
        if resid <= target and sweep >= 1:
            break
    if best.residual > target:
        raise SolverError(
            "inverse iteration residual %s exceeds %s; raise the working precision"
            % (mp.nstr(best.residual, 5), mp.nstr(target, 5))
        )
    return best


def assert_ground_invariants(pair: EigenPair, a) -> None:
    """Ground-state sanity for 0 < a < 3/2: localization and positivity.

    Positivity can only be resolved for entries above the inverse-iteration
    noise floor; the far tail decays below the attainable residual and its
    computed signs carry no information.
    """
    if not (0 <= pair.lam <= mpf(a) / 3):
        raise SolverError("ground eigenvalue escaped [0, a/3]")
    floor = 10 * pair.residual * max(abs(x) for x in pair.xi)
    for n, x in enumerate(pair.xi):
        if x <= 0 and abs(x) > floor:
            raise SolverError("ground eigenvector entry %d is not positive" % n)


# ----------------------------------------------------------------------
# the a-dependent side condition and its root


def legendre_condition(pair: EigenPair) -> mpf:
    """S = sum_n (-1)^{floor((n-1)/2)} xi_n (sign pattern -,+,+,-,-,+,...).

    The extremal parameter a is the root of S(a) = 0: vanishing of this
    alternating endpoint sum is the phase condition picking out the
    eigenfunction whose zeros interlace correctly.
    """
    total = mpf(0)
    for n, x in enumerate(pair.xi):
        if ((n - 1) // 2) % 2:
            total -= x
        else:
            total += x
    return total


def _condition_value(N: int, a, lambda_seed=None):
    sys = build_matrix(N, a)
    pair = ground_eigenpair(sys, lambda_seed=lambda_seed)
    return legendre_condition(pair), pair


def _solve_root_for_N(
    N: int,
    bracket,
    digits_goal: int,
    lambda_seed=None,
    a_seed=None,
):
    """Root of S(a) = 0 for one truncation size, at the ambient precision.

    Bisection narrows the bracket to about 1e-3, then a bracket-safeguarded
    secant finishes.  A seed pair (a, lambda) from a previous truncation
    skips most of the bisection work.
    """
    lo, hi = mpf(bracket[0]), mpf(bracket[1])
    s_lo, pair_lo = _condition_value(N, lo, lambda_seed)
    s_hi, pair_hi = _condition_value(N, hi, pair_lo.lam)
    if s_lo == 0:
        return lo, pair_lo
    if s_hi == 0:
        return hi, pair_hi
    if (s_lo > 0) == (s_hi > 0):
        raise SolverError("side condition does not change sign on the bracket")

    seed = pair_lo.lam
    if a_seed is not None and lo < a_seed < hi:
        # trust but verify: shrink the bracket around the seed if signs allow
        width = mpf(10) ** (-3)
        cand_lo, cand_hi = a_seed - width, a_seed + width
        if cand_lo > lo and cand_hi < hi:
            v_lo, p_lo = _condition_value(N, cand_lo, seed)
            v_hi, p_hi = _condition_value(N, cand_hi, p_lo.lam)
            if v_lo != 0 and v_hi != 0 and (v_lo > 0) != (v_hi > 0):
                lo, hi, s_lo, s_hi = cand_lo, cand_hi, v_lo, v_hi
                seed = p_hi.lam
    while hi - lo > mpf(10) ** (-3):
        mid = (lo + hi) / 2
        s_mid, pair_mid = _condition_value(N, mid, seed)
        seed = pair_mid.lam
        if s_mid == 0:
            return mid, pair_mid
        if (s_mid > 0) == (s_lo > 0):
            lo, s_lo = mid, s_mid
        else:
            hi, s_hi = mid, s_mid

    # secant with bracket safeguard
    x0, f0 = lo, s_lo
    x1, f1 = hi, s_hi
    pair_best = None
    tol = mpf(10) ** (-(digits_goal + 8))
    for _ in range(200):
        if f1 == f0:
            x2 = (lo + hi) / 2
        else:
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
            if not (lo < x2 < hi):
                x2 = (lo + hi) / 2
        f2, pair2 = _condition_value(N, x2, seed)
        seed = pair2.lam
        pair_best = pair2
        if f2 == 0 or abs(x2 - x1) <= tol:
            return x2, pair2
        if (f2 > 0) == (s_lo > 0):
            lo, s_lo = x2, f2
        else:
            hi, s_hi = x2, f2
        x0, f0, x1, f1 = x1, f1, x2, f2
    raise SolverError("secant iteration did not converge")


# ----------------------------------------------------------------------
# public results


@dataclass
class ExtremalConstants:
    """Converged constants plus the spectral data behind them.

    C is the extremal constant; L1 the derivative at 0 of the entire
    factor; a_star = pi/(4C) the root of the side condition in the b=1
    frame; lambda_star = -L1/(2C) the ground eigenvalue (frame-invariant);
    xi the ground eigenvector at a_star, normalized xi[0] = 1.
    """

    C: mpf
    L1: mpf
    a_star: mpf
    lambda_star: mpf
    xi: list
    N: int
    digits_certified: int
    ctx: PrecisionContext

    def to_json_dict(self) -> dict:
        d = self.digits_certified
        with self.ctx.working():
            return {
                "C": decimal_truncated(self.C, d),
                "L1": decimal_truncated(self.L1, d),
                "a_star": decimal_truncated(self.a_star, d),
                "lambda_star": decimal_truncated(self.lambda_star, d),
                "N": self.N,
                "digits_certified": d,
            }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _ladder_root(digits: int, initial_N: int, bracket, guard: int, n_cap: int):
    """Run the (N, precision) ladder; returns (a, pair, N, working_dps)."""
    ctx = PrecisionContext(digits=digits, guard=guard)
    stop = mpf(10) ** (-(digits + 5))
    prev_a = None
    prev = None
    N = initial_N
    with ctx.working():
        while N <= n_cap:
            a_seed = prev_a
            lam_seed = prev.lam if prev is not None else None
            a_root, pair = _solve_root_for_N(
                N, bracket, digits, lambda_seed=lam_seed, a_seed=a_seed
            )
            assert_ground_invariants(pair, a_root)
            if prev_a is not None and abs(a_root - prev_a) <= stop:
                return a_root, pair, N, ctx.working_dps
            prev_a, prev = a_root, pair
            N *= 2
    raise SolverError("truncation ladder exhausted at N=%d without stabilizing" % n_cap)


def solve_constants(
    digits: int,
    initial_N: int = 64,
    bracket=("1.44", "1.46"),
    guard: Optional[int] = None,
    n_cap: int = 4096,
) -> ExtremalConstants:
    """Compute the extremal constants certified to `digits` decimals.

    Runs the truncation ladder twice, at guard and 2*guard extra digits,
    and demands agreement of C to the requested digits before reporting.
    """
    if digits < 10:
        raise UsageError("digits must be at least 10")
    if guard is None:
        guard = default_guard(max(initial_N * 4, 1000))

    runs = []
    for g in (guard, 2 * guard):
        a_root, pair, N, wdps = _ladder_root(digits, initial_N, bracket, g, n_cap)
        with mp.workdps(wdps):
            C = mp.pi / (4 * a_root)
            L1 = -2 * C * pair.lam
        runs.append((a_root, pair, N, wdps, C, L1))

    (a1, pair1, N1, w1, C1, L11), (a2, pair2, N2, w2, C2, L12) = runs
    with mp.workdps(w2):
        disagreement = abs(C1 - C2)
        allowed = mpf(10) ** (-(digits + 1))
        if disagreement > allowed:
            raise SolverError(
                "certification failed: runs at guard %d and %d disagree by %s"
                % (guard, 2 * guard, mp.nstr(disagreement, 5))
            )
    ctx = PrecisionContext(digits=digits, guard=2 * guard)
    return ExtremalConstants(
        C=C2,
        L1=L12,
        a_star=a2,
        lambda_star=pair2.lam,
        xi=pair2.xi,
        N=N2,
        digits_certified=digits,
        ctx=ctx,
    )


def eigenvalue_table(a, k_max: int, N: int) -> list:
    """The k_max+1 smallest eigenvalues, each localized in its own interval.

    Interval for lambda_k: [k(k+1) - ka/(2k-1), k(k+1) + (k+1)a/(2k+3)];
    the intervals are pairwise disjoint for 0 < a < 3/2, and each contains
    exactly one eigenvalue of the truncation.
    """
    a = mpf(a)
    if not (0 < a < mpf(3) / 2):
        raise UsageError("eigenvalue_table requires 0 < a < 3/2")
    if N < 4 * max(k_max, 1):
        raise UsageError("N should comfortably exceed k_max")
    sys = build_matrix(N, a)
    intervals = []
    for k in range(k_max + 1):
        lo = mpf(k * (k + 1)) - (a * k / (2 * k - 1) if k else mpf(0))
        hi = mpf(k * (k + 1)) + a * (k + 1) / (2 * k + 3)
        intervals.append((lo, hi))
    for (lo1, hi1), (lo2, hi2) in zip(intervals, intervals[1:]):
        if hi1 >= lo2:
            raise UsageError("localization intervals overlap; parameters misused")
    out = []
    for k, (lo, hi) in enumerate(intervals):
        blo, bhi = _bisect_eigenvalue(sys, lo, hi)
        lam = _newton_eigenvalue(sys, (blo + bhi) / 2, lo, hi)
        out.append(lam)
    return out
