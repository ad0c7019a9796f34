"""Command-line front end.

Four commands cover the package surface: ``constants`` prints the
certified constants, ``zeros`` tabulates the zero ladder, ``verify`` runs
named identity suites and sets the exit code from their outcome, and
``export`` writes coefficient tables of the series representations.

Output conventions.  The payload goes to stdout, or to --out when given;
numeric content is serialized as decimal strings (truncated, so every
printed digit is a true digit), and a payload rerun with the same
parameters is byte-identical.  Each run also emits a manifest recording
the command, parameters, and output files: as a ``.manifest.json``
sidecar in file mode, as one line on stderr otherwise (the manifest
carries a timestamp, which is why it never shares the payload channel).

Exit codes: 0 on success and on a verify run whose theorem-backed checks
all pass; 1 on solver or certification failure, or on any failed check;
2 on usage errors.  Conjecture probes are report-only and never affect
the exit code.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone

from mpmath import mp, mpf

from .extremal import (
    build_zero_model,
    check_extremal_ode_residual,
    check_functional_equation,
    check_ode_residual,
    check_quadratic_relation,
    offset_coefficients,
    summation_check,
    summation_system,
    tau,
    taylor_extremal,
    taylor_factor,
    zero_curvature_residual,
    zeros_signed,
)
from .fourier import (
    build_band_transform,
    endpoint_reflection_constants,
    legendre_band_coefficients,
    legendre_band_value,
    parseval_defect,
    transform_value,
    window_basis_coefficients,
)
from .lseries import (
    brute_force_value,
    check_integrality,
    check_Lodd,
    check_residue_identity,
    check_symmetry_conjecture,
    l_series,
)
from .mpcore import UsageError, decimal_truncated
from .spectral import SolverError, solve_constants

SUITES = (
    "ode",
    "functional",
    "quadratic",
    "summation",
    "fourier",
    "lseries",
    "conjectures",
    "all",
)

EXPORT_TARGETS = (
    "taylor-phi",
    "taylor-Phi",
    "rho",
    "h",
    "c-basis",
    "legendre",
    "lvalues",
)


# ----------------------------------------------------------------------
# report rows


def _entry(name: str, parameters: dict, discrepancy, bound) -> dict:
    disc = abs(discrepancy)
    return {
        "check": name,
        "parameters": parameters,
        "discrepancy": mp.nstr(disc, 10),
        "bound": mp.nstr(bound, 8),
        "status": "pass" if disc <= bound else "fail",
    }


def _bound(args, cap: int, drop: int):
    """Pass threshold 10^-E: the flag when given, else a digit-scaled cap."""
    if args.tolerance_exponent is not None:
        e = args.tolerance_exponent
    else:
        e = max(2, min(cap, args.digits - drop))
    return mpf(10) ** (-e)


def _zero_model(consts, cache: dict):
    if "zeros" not in cache:
        cache["zeros"] = build_zero_model(consts)
    return cache["zeros"]


# ----------------------------------------------------------------------
# verification suites


def _suite_ode(consts, args, cache):
    b = _bound(args, 20, 10)
    return [
        _entry(
            "factor-ode",
            {"points": 20, "radius": 5},
            check_ode_residual(consts),
            b,
        ),
        _entry(
            "minimizer-ode",
            {"points": 20, "radius": 5},
            check_extremal_ode_residual(consts),
            b,
        ),
    ]


def _suite_functional(consts, args, cache):
    b = _bound(args, 20, 10)
    return [
        _entry(
            "reflection-equation",
            {"points": 20, "circle": "self-dual"},
            check_functional_equation(consts),
            b,
        )
    ]


def _suite_quadratic(consts, args, cache):
    b = _bound(args, 20, 10)
    return [
        _entry(
            "quadratic-first-integral",
            {"points": 20, "radius": 3},
            check_quadratic_relation(consts),
            b,
        ),
        _entry(
            "zero-curvature",
            {"n": 1},
            zero_curvature_residual(consts, 1),
            b,
        ),
    ]


def _test_function(x):
    # odd, exponential type pi, |f(x)| <= (5/pi)^5 x^-4 beyond the origin
    if x == 0:
        return mpf(0)
    u = mp.pi * x / 5
    return x * (mp.sin(u) / u) ** 5


def _suite_summation(consts, args, cache):
    count = args.count
    slack = mpf(10) ** (
        -(args.tolerance_exponent if args.tolerance_exponent is not None else 10)
    )
    model = _zero_model(consts, cache)
    out = []
    with mp.workdps(args.digits + 15):
        decay = (mpf(5) / mp.pi) ** 5
        mu1 = zeros_signed(model, count)
        a1 = 2 * mpf(consts.a_star) / mp.pi
        rep = summation_check(consts, _test_function, 1, a1, mu1, decay)
        out.append(
            _entry(
                "summation-extremal",
                {"zeros": count, "tail_bound": mp.nstr(rep.tail_bound, 8)},
                rep.defect,
                rep.tail_bound + slack,
            )
        )
        a2, mu2 = summation_system(mpf(1), count, digits=20)
        rep2 = summation_check(consts, _test_function, 1, a2, mu2, decay)
        out.append(
            _entry(
                "summation-second-system",
                {
                    "zeros": count,
                    "matrix_drift": "1.0",
                    "tail_bound": mp.nstr(rep2.tail_bound, 8),
                },
                rep2.defect,
                rep2.tail_bound + slack,
            )
        )
    return out


def _suite_fourier(consts, args, cache):
    d = args.digits
    band = build_band_transform(consts)
    leg = legendre_band_coefficients(consts)
    with mp.workdps(d + 25):
        grid = [mpf(k) / 5 - 1 for k in range(11)]
        route = max(
            abs(transform_value(band, u) - legendre_band_value(leg, u)) for u in grid
        )
        edge = max(abs(transform_value(band, 1)), abs(transform_value(band, -1)))
        mean = parseval_defect(band)
        k_plus, k_minus = endpoint_reflection_constants(consts)
        C = mpf(consts.C)
        i = mp.mpc(0, 1)
        kdev = max(
            abs(k_plus ** 2 - k_minus ** 2 - i / (2 * mp.pi * C)),
            abs(k_plus * mp.exp(i * mp.pi / 4) + k_minus * mp.exp(-i * mp.pi / 4)),
            abs(abs(k_plus) - 1 / mp.sqrt(4 * mp.pi * C)),
        )
    return [
        _entry(
            "transform-route-agreement",
            {"grid_points": 11, "terms": band.terms},
            route,
            _bound(args, 15, 15),
        ),
        _entry("band-edge-vanishing", {"u": "+-1"}, edge, _bound(args, 20, 10)),
        _entry("band-mean", {}, mean, _bound(args, 20, 10)),
        _entry(
            "endpoint-reflection-constants",
            {"relations": 3},
            kdev,
            _bound(args, 25, 5),
        ),
    ]


def _suite_lseries(consts, args, cache):
    model = _zero_model(consts, cache)
    out = []
    out.extend(check_Lodd(consts, model, 3))
    out.extend(check_residue_identity(consts, model, 3))
    with mp.workdps(args.digits + 25):
        plus2 = l_series(consts, model, "plus", 2)
        minus1 = l_series(consts, model, "minus", 1)
        C = mpf(consts.C)
        disc = abs(plus2.value + 4 * C * minus1.value)
    out.append(_entry("even-odd-bridge", {"s": 2}, disc, _bound(args, 25, 5)))
    brute_bound = mpf(10) ** (
        -(args.tolerance_exponent if args.tolerance_exponent is not None else 12)
    )
    for kind in ("plus", "minus"):
        value, _err = brute_force_value(consts, model, kind, 3, n_terms=600)
        cont = l_series(consts, model, kind, 3)
        with mp.workdps(args.digits + 25):
            disc = abs(value - cont.value)
        out.append(
            _entry(
                "brute-vs-continuation",
                {"kind": kind, "s": 3, "terms": 600},
                disc,
                brute_bound,
            )
        )
    return out


def _suite_conjectures(consts, args, cache):
    model = _zero_model(consts, cache)
    out = list(check_symmetry_conjecture(consts, model, 3))
    depth = args.terms if args.terms is not None else 200
    out.append(check_integrality(depth))
    return out


_SUITE_RUNNERS = {
    "ode": _suite_ode,
    "functional": _suite_functional,
    "quadratic": _suite_quadratic,
    "summation": _suite_summation,
    "fourier": _suite_fourier,
    "lseries": _suite_lseries,
    "conjectures": _suite_conjectures,
}


# ----------------------------------------------------------------------
# command handlers: each returns (payload text, exit code)


def _cmd_constants(args):
    consts = solve_constants(args.digits)
    return json.dumps(consts.to_json_dict(), indent=2) + "\n", 0


def _cmd_zeros(args):
    consts = solve_constants(args.digits)
    model = build_zero_model(consts)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "tau_n", "method"])
    with mp.workdps(args.digits + 15):
        for n in range(1, args.count + 1):
            writer.writerow(
                [
                    n,
                    decimal_truncated(tau(model, n), args.digits),
                    "newton" if n <= model.n0 else "series",
                ]
            )
    return buf.getvalue(), 0


def _cmd_verify(args):
    consts = solve_constants(args.digits)
    names = [s for s in SUITES if s != "all"] if args.suite == "all" else [args.suite]
    cache = {}
    checks = []
    for name in names:
        checks.extend(_SUITE_RUNNERS[name](consts, args, cache))
    failed = sum(1 for c in checks if c.get("status") == "fail")
    payload = {
        "suite": args.suite,
        "digits": args.digits,
        "checks": checks,
        "failed": failed,
        "passed": failed == 0,
    }
    return json.dumps(payload, indent=2) + "\n", 0 if failed == 0 else 1


def _series_export(consts, args):
    """Dense coefficient list (index 0 upward) for the series targets."""
    what = args.what
    terms = args.terms
    if what == "taylor-phi":
        n = terms if terms is not None else 24
        model = taylor_extremal(consts, max(2, n // 2 + 1))
        return "series", [model.coeffs.coefficient(k) for k in range(n + 1)]
    if what == "taylor-Phi":
        n = terms if terms is not None else 24
        model = taylor_factor(consts, max(2, n))
        return "series", [model.coeffs.coefficient(k) for k in range(n + 1)]
    if what == "rho":
        m_top = terms if terms is not None else int(args.digits / 1.23) + 2
        rho = offset_coefficients(consts, m_top)
        return "series", [mpf(0)] + rho
    if what == "h":
        band = build_band_transform(consts, terms=terms)
        return "basis", list(band.coeffs)
    if what == "c-basis":
        band = build_band_transform(consts)
        k_top = terms if terms is not None else max(1, args.digits // 2)
        return "basis", [mpf(0)] + window_basis_coefficients(band, k_top)
    if what == "legendre":
        # the pair count is a convergence knob, not a row count: compute at
        # the natural depth and trim, widening only when more rows are asked
        leg = legendre_band_coefficients(consts)
        if terms is not None:
            if len(leg) < terms + 1:
                leg = legendre_band_coefficients(consts, pairs=(terms + 2) // 2)
            leg = leg[: terms + 1]
        return "basis", leg
    raise UsageError("unknown export target %r" % what)


def _cmd_export(args):
    consts = solve_constants(args.digits)
    if args.what == "lvalues":
        model = build_zero_model(consts)
        top = args.terms if args.terms is not None else 6
        values = []
        for s in range(1, top + 1):
            for kind in ("minus", "plus"):
                values.append(l_series(consts, model, kind, s).to_json_dict())
        if args.format == "json":
            payload = {"table": "lvalues", "digits": args.digits, "values": values}
            return json.dumps(payload, indent=2) + "\n", 0
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["kind", "s", "is_pole", "value", "residue", "error_bound"])
        for v in values:
            writer.writerow(
                [
                    v["kind"],
                    v["s"],
                    v["is_pole"],
                    v.get("value", ""),
                    v.get("residue", ""),
                    v["error_bound"],
                ]
            )
        return buf.getvalue(), 0

    key, coeffs = _series_export(consts, args)
    with mp.workdps(args.digits + 15):
        strings = [decimal_truncated(c, args.digits) for c in coeffs]
    label = {"h": "h", "c-basis": "c", "legendre": "legendre"}.get(args.what, args.what)
    if args.format == "json":
        payload = {key: label, "digits": args.digits, "coeffs": strings}
        return json.dumps(payload, indent=2) + "\n", 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "coefficient"])
    for n, s in enumerate(strings):
        writer.writerow([n, s])
    return buf.getvalue(), 0


_HANDLERS = {
    "constants": _cmd_constants,
    "zeros": _cmd_zeros,
    "verify": _cmd_verify,
    "export": _cmd_export,
}


# ----------------------------------------------------------------------
# wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pwx",
        description="Constants, zeros, verification suites, and series exports "
        "for the band-limited L1 extremal problem.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument(
            "--digits",
            type=int,
            default=30,
            help="certified decimal digits, minimum 10 (default 30)",
        )
        p.add_argument(
            "--out",
            default=None,
            help="write the payload to this file (with a .manifest.json sidecar) "
            "instead of stdout",
        )

    p = sub.add_parser("constants", help="compute the certified constants")
    common(p)

    p = sub.add_parser("zeros", help="CSV table of the zero ladder")
    p.add_argument(
        "--count", type=int, default=32, help="number of zeros (default 32)"
    )
    common(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument(
        "--suite",
        choices=SUITES,
        default="all",
        help="which checks to run (default all)",
    )
    p.add_argument(
        "--tolerance-exponent",
        dest="tolerance_exponent",
        type=int,
        default=None,
        help="override residual pass thresholds to 10^-E "
        "(certified-bound checks keep their own bounds)",
    )
    p.add_argument(
        "--count",
        type=int,
        default=10000,
        help="zeros per summation system (default 10000)",
    )
    p.add_argument(
        "--terms",
        type=int,
        default=None,
        help="integrality scan depth for the conjecture suite (default 200)",
    )
    common(p)

    p = sub.add_parser("export", help="write a coefficient table")
    p.add_argument("what", choices=EXPORT_TARGETS)
    p.add_argument(
        "--terms",
        type=int,
        default=None,
        help="highest coefficient index (default: a per-target natural length)",
    )
    p.add_argument(
        "--format",
        choices=("json", "csv"),
        default="json",
        help="payload format (default json)",
    )
    common(p)

    return parser


def _manifest(args) -> dict:
    skip = {"command", "out"}
    parameters = {
        k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None
    }
    return {
        "command": args.command,
        "parameters": parameters,
        "digits": args.digits,
        "outputs": [args.out] if args.out else [],
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _emit(args, payload: str) -> None:
    manifest = _manifest(args)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
        with open(args.out + ".manifest.json", "w") as fh:
            fh.write(json.dumps(manifest, indent=2) + "\n")
    else:
        sys.stdout.write(payload)
        print(json.dumps(manifest), file=sys.stderr)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.digits < 10:
        parser.error("--digits must be at least 10")
    if getattr(args, "count", None) is not None and args.count < 1:
        parser.error("--count must be positive")
    if getattr(args, "terms", None) is not None and args.terms < 1:
        parser.error("--terms must be positive")
    try:
        payload, code = _HANDLERS[args.command](args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except SolverError as exc:
        print("solver failure: %s" % exc, file=sys.stderr)
        return 1
    _emit(args, payload)
    return code
