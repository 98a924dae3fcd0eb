"""Command-line surface: spec ingestion, computations, verification, reports.

Exit codes: 0 success, 1 invariant or verdict failure, 2 invalid spec or
arguments, 3 numerical failure.  Reports are JSON documents; scan and fit
diagnostics go to CSV.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time

import numpy as np

from . import calibration as calib
from . import diastasis as dia
from . import entropy as ent
from . import rigidity, specs, verify
from .errors import DomainError, InvalidSpec, SpecError, ToolkitError
from .specs import MetricSpec


def _parse_spec(text: str) -> MetricSpec:
    if text.startswith("hyperbolic"):
        if ":" in text:
            _, _, dim = text.partition(":")
            try:
                return specs.hyperbolic_spec(int(dim))
            except ValueError as exc:
                raise InvalidSpec(f"bad built-in spec {text!r}") from exc
        return specs.hyperbolic_spec(1, name="hyperbolic")
    return specs.load_spec(text)


def _parse_vector(text: str, dim: int) -> np.ndarray:
    try:
        parts = [complex(part.strip().replace("i", "j")) for part in text.split(",")]
    except ValueError as exc:
        raise DomainError(f"cannot parse point {text!r}") from exc
    v = np.zeros(dim, dtype=complex)
    if len(parts) > dim:
        raise DomainError(f"point {text!r} has more than dim={dim} components")
    v[: len(parts)] = parts
    return v


def _parse_window(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise DomainError(f"--window expects 'a,b', got {text!r}") from exc
    return a, b


def _parse_floats(text: str, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise InvalidSpec(f"{what} expects comma-separated numbers, got {text!r}") from exc


def _parse_complex_scalar(text: str, what: str) -> complex:
    try:
        return complex(text.replace("i", "j"))
    except ValueError as exc:
        raise DomainError(f"{what} expects a complex number, got {text!r}") from exc


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float) and (obj != obj):  # NaN -> null for strict JSON
        return None
    return obj


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="spec JSON file or built-in 'hyperbolic:N'")
    common.add_argument("--out", help="write the JSON run report here")
    common.add_argument("--csv", help="write CSV diagnostics here")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument("--seed", type=int, default=1234, help="RNG seed for sampled checks")
    common.add_argument("--window", default=None, help="fit window 'r_lo,r_hi'")
    common.add_argument("--quiet", action="store_true")
    common.add_argument("--no-timestamp", action="store_true", help="omit timestamp (reproducible reports)")

    parser = argparse.ArgumentParser(
        prog="kahler-entropy",
        description="Diastasis, calibration and entropy computations for "
        "rotation-invariant Kahler metrics on the unit ball.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", parents=[common], help="diastasis / metric / distance at points")
    p_eval.add_argument("--z", required=True, help="point, comma-separated complex components")
    p_eval.add_argument("--w", default=None, help="second point (default origin)")

    sub.add_parser("calibration", parents=[common], help="sup of the diastasis gradient norm")

    p_entropy = sub.add_parser("entropy", parents=[common], help="entropy estimates")
    p_entropy.add_argument("--kind", choices=["diastatic", "volume"], required=True)
    p_entropy.add_argument("--method", choices=["asymptotic", "cutoff", "growth"], default="asymptotic")

    p_check = sub.add_parser("check", parents=[common], help="comparison and invariance checks")
    p_check.add_argument(
        "--which", choices=["lower-bound", "scaling", "basepoint", "bcg-proxy"], required=True
    )
    p_check.add_argument("--lam", type=float, default=4.0, help="scaling factor for --which scaling")
    p_check.add_argument("--lambdas", default="0.5,1,2", help="lambda list for bcg-proxy")
    p_check.add_argument("--r0", type=float, default=0.9, help="coordinate-ball radius")
    p_check.add_argument("--w1", default="0", help="first base point (basepoint check)")
    p_check.add_argument("--w2", default="0.3", help="second base point (basepoint check)")
    p_check.add_argument("--c-exp", type=float, default=1.5, help="exponent c (basepoint check)")
    p_check.add_argument("--r-cutoffs", default="0.9,0.99,0.999", help="cutoff radii (basepoint check)")

    p_scan = sub.add_parser("scan", parents=[common], help="entropy scan over a poly-perturbation family")
    p_scan.add_argument("--family", required=True, help="comma-separated a_1 values")
    p_scan.add_argument("--n", type=int, default=1, help="complex dimension")
    p_scan.add_argument("--r0", type=float, default=0.9)

    p_table = sub.add_parser("table", parents=[common], help="model-case entropy table per dimension")
    p_table.add_argument("--hyperbolic", action="store_true", required=True)
    p_table.add_argument("--n-range", default="1..3", help="dimension range A..B")

    sub.add_parser("verify", parents=[common], help="full invariant battery; nonzero exit on failure")
    return parser


def _emit_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _need_spec(args) -> MetricSpec:
    if not args.spec:
        raise InvalidSpec(f"subcommand {args.command!r} requires --spec")
    return _parse_spec(args.spec)


def _fit_kwargs(args) -> dict:
    kw = {}
    if args.window:
        kw["window"] = _parse_window(args.window)
    return kw


def _cmd_eval(args, report):
    spec = _need_spec(args)
    specs.ensure_positive(spec)
    z = _parse_vector(args.z, spec.dim)
    w = _parse_vector(args.w, spec.dim) if args.w is not None else np.zeros(spec.dim, dtype=complex)
    kernel = dia.polarize_radial(spec)
    m = specs.metric_tensor(spec, z)
    result = {
        "kind": "eval",
        "z": _jsonable(z),
        "w": _jsonable(w),
        "potential_z": float(specs.potential_radial(spec, float(np.vdot(z, z).real))),
        "diastasis": dia.diastasis_eval(kernel, z, w),
        "distance": dia.distance(spec, z, w),
        "metric_det_z": m.det,
        "grad_norm": calib.grad_norm(spec, kernel, z, w),
    }
    report["results"].append(result)
    return 0, [f"diastasis {result['diastasis']!r}  distance {result['distance']!r}"]


def _cmd_calibration(args, report):
    spec = _need_spec(args)
    est = ent.cached_calibration(spec)
    report["results"].append({"kind": "calibration", **_jsonable(est)})
    return 0, [f"calibration constant {est.value!r} +/- {est.error!r}"]


def _cmd_entropy(args, report):
    spec = _need_spec(args)
    lines = []
    if args.method == "growth":
        if args.kind != "volume":
            raise InvalidSpec("--method growth applies to --kind volume only")
        est = ent.volume_entropy_growth(spec)
        report["results"].append(est.to_record())
        lines.append(f"volume entropy (growth) {est.value!r} +/- {est.error!r}")
    elif args.method == "cutoff":
        est = ent.cutoff_bisection(spec, mode=args.kind)
        if args.kind == "diastatic":
            cal = ent.cached_calibration(spec)
            ent_est = ent.EntropyEstimate(
                quantity="diastatic_entropy",
                value=cal.value * est.value,
                error=abs(cal.value) * est.error + cal.error * abs(est.value),
                method="cutoff_bisection",
                spec_name=spec.name,
                details={"calibration": cal.value, "exponent": est.value},
            )
            report["results"].append(est.to_record())
            report["results"].append(ent_est.to_record())
            lines.append(f"exponent {est.value!r}  entropy {ent_est.value!r}")
            est = ent_est
        else:
            report["results"].append(est.to_record())
            lines.append(f"volume entropy {est.value!r} +/- {est.error!r}")
    else:
        fit_kw = _fit_kwargs(args)
        if args.kind == "diastatic":
            if fit_kw:
                fit = ent.asymptotic_exponent_fit(spec, mode="diastatic", **fit_kw)
                exp_est = ent.critical_exponent(fit)
                cal = ent.cached_calibration(spec)
                est = ent.EntropyEstimate(
                    quantity="diastatic_entropy",
                    value=cal.value * exp_est.value,
                    error=abs(cal.value) * exp_est.error + cal.error * abs(exp_est.value),
                    method="asymptotic_fit",
                    spec_name=spec.name,
                    details={"calibration": cal.value, "exponent": exp_est.value},
                )
                report["results"].append(exp_est.to_record())
            else:
                est = ent.diastatic_entropy(spec)
        else:
            if fit_kw:
                fit = ent.asymptotic_exponent_fit(spec, mode="volume", **fit_kw)
                est = ent.critical_exponent(fit)
            else:
                est = ent.volume_entropy_integral(spec)
        report["results"].append(est.to_record())
        lines.append(f"{est.quantity} {est.value!r} +/- {est.error!r}")
    if args.csv:
        fit = ent.asymptotic_exponent_fit(spec, mode=args.kind, **_fit_kwargs(args))
        _emit_csv(args.csv, ["r", "u", "log_density", "profile"], [list(row) for row in fit.diagnostics])
    return 0, lines


def _cmd_check(args, report):
    spec = _need_spec(args)
    tol = args.tol
    if args.which == "lower-bound":
        cmp_report = rigidity.lower_bound_check(spec)
        report["results"].append({"kind": "lower_bound", **_jsonable(cmp_report)})
        ok = cmp_report.verdict == "holds"
        return (0 if ok else 1), [
            f"ent_d {cmp_report.ent_d.value!r}  ent_v {cmp_report.ent_v.value!r}  "
            f"margin {cmp_report.margin!r}  verdict {cmp_report.verdict}"
            if cmp_report.ent_d
            else f"verdict {cmp_report.verdict}: {cmp_report.failure}"
        ]
    if args.which == "scaling":
        rep = rigidity.scaling_law_check(spec, args.lam, tol=tol or 0.02)
        report["results"].append({"kind": "scaling", **_jsonable(rep)})
        return (0 if rep.passed else 1), [
            f"lambda {rep.lam}: ratios d={rep.ratio_d!r} v={rep.ratio_v!r} expected {rep.expected!r}"
        ]
    if args.which == "basepoint":
        w1 = _parse_complex_scalar(args.w1, "--w1")
        w2 = _parse_complex_scalar(args.w2, "--w2")
        cutoffs = _parse_floats(args.r_cutoffs, "--r-cutoffs")
        rep = ent.basepoint_sandwich_check(spec, w1=w1, w2=w2, c=args.c_exp, r_list=cutoffs)
        report["results"].append({"kind": "basepoint", **_jsonable(rep)})
        return (0 if rep.passed else 1), [
            f"R={row.r_cutoff}: ratio {row.ratio!r} bound {row.bound!r} {'ok' if row.ok else 'VIOLATED'}"
            for row in rep.rows
        ]
    # bcg-proxy
    lambdas = _parse_floats(args.lambdas, "--lambdas")
    rep = rigidity.bcg_proxy_scan(spec, lambdas=lambdas, r0=args.r0, tol=tol or 0.03)
    report["results"].append({"kind": "bcg_proxy", **_jsonable(rep)})
    lines = [f"lam={row.lam}: F={row.functional!r}" for row in rep.rows]
    lines.append(f"spread {rep.spread!r} (tol {rep.tolerance})")
    return (0 if rep.passed else 1), lines


def _cmd_scan(args, report):
    params = _parse_floats(args.family, "--family")
    rows = rigidity.minimality_scan(params, n=args.n, r0=args.r0)
    report["results"].append(
        {
            "kind": "minimality_scan",
            "note": "coordinate-ball volume proxy; heuristic, no quotient claim",
            "rows": [_jsonable(row) for row in rows],
        }
    )
    if args.csv:
        _emit_csv(args.csv, rigidity.SCAN_CSV_HEADER, [row.csv_values() for row in rows])
    lines = [
        f"a1={row.param:+.4g}: ent_d={row.ent_d!r} ent_v={row.ent_v!r} {row.verdict}" for row in rows
    ]
    return 0, lines or ["empty family: header-only output"]


def _cmd_table(args, report):
    lo, _, hi = args.n_range.partition("..")
    try:
        n_lo, n_hi = int(lo), int(hi or lo)
    except ValueError as exc:
        raise InvalidSpec(f"bad --n-range {args.n_range!r}") from exc
    lines = [f"{'n':>3} {'X':>12} {'c*':>12} {'ent_d':>12} {'ent_v':>12}"]
    rows = []
    for n in range(n_lo, n_hi + 1):
        spec = specs.hyperbolic_spec(n)
        cal = ent.cached_calibration(spec)
        est_fit, _ = ent.diastatic_exponent(spec)
        ed = ent.diastatic_entropy(spec)
        ev = ent.volume_entropy_integral(spec)
        rows.append(
            {
                "n": n,
                "calibration": cal.value,
                "exponent": est_fit.value,
                "ent_d": ed.value,
                "ent_v": ev.value,
            }
        )
        lines.append(
            f"{n:>3} {cal.value:>12.6f} {est_fit.value:>12.6f} {ed.value:>12.6f} {ev.value:>12.6f}"
        )
    report["results"].append({"kind": "hyperbolic_table", "rows": rows})
    if args.csv:
        _emit_csv(
            args.csv,
            ["n", "calibration", "c_star", "ent_d", "ent_v"],
            [[r["n"], repr(r["calibration"]), repr(r["exponent"]), repr(r["ent_d"]), repr(r["ent_v"])] for r in rows],
        )
    return 0, lines


def _cmd_verify(args, report):
    spec = _need_spec(args)
    ent.clear_caches()
    battery = verify.run_battery(spec, seed=args.seed)
    report["results"].append({"kind": "verify", **_jsonable(battery)})
    lines = [
        f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}" for r in battery.results
    ]
    lines.append(f"battery {'PASSED' if battery.passed else 'FAILED'} ({len(battery.results)} checks)")
    return (0 if battery.passed else 1), lines


_COMMANDS = {
    "eval": _cmd_eval,
    "calibration": _cmd_calibration,
    "entropy": _cmd_entropy,
    "check": _cmd_check,
    "scan": _cmd_scan,
    "table": _cmd_table,
    "verify": _cmd_verify,
}


def run_command(argv) -> tuple[dict, int]:
    """Parse argv, run the subcommand, return (report dict, exit code)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    report: dict = {
        "command": " ".join(argv),
        "spec": None,
        "results": [],
        "diagnostics": [],
        "status": 0,
    }
    if not args.no_timestamp:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    lines: list[str] = []
    try:
        if args.spec:
            report["spec"] = _parse_spec(args.spec).to_dict()
        status, lines = _COMMANDS[args.command](args, report)
    except SpecError as exc:
        report["diagnostics"].append({"error": type(exc).__name__, "message": str(exc)})
        status = 2
    except ToolkitError as exc:
        report["diagnostics"].append({"error": type(exc).__name__, "message": str(exc)})
        status = 3
    report["status"] = status
    if not args.quiet:
        for line in lines:
            print(line)
        for diag in report["diagnostics"]:
            print(f"error {diag['error']}: {diag['message']}", file=sys.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return report, status


def main(argv=None) -> int:
    report, status = run_command(sys.argv[1:] if argv is None else argv)
    return status


if __name__ == "__main__":
    sys.exit(main())
