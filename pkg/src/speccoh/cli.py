"""Command-line interface.

Verbs: ``simulate`` writes synthetic panels, ``test`` runs one independence
test on a panel file, ``calibrate-beta`` solves for the coupling matching a
dependence target, and the experiment verbs (``type1``, ``power``, ``roc``,
``gumbel-fit``, ``bartlett-gap``) run the Monte Carlo studies and write JSON
reports plus plot-ready CSV tables.

Exit codes: 0 success, 1 invalid input (including usage errors), 2 numerical
or calibration failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .errors import (
    CalibrationFailure,
    DegenerateSpectrum,
    InvalidInput,
    NumericalFailure,
    Unsupported,
)
from .experiments import (
    BARTLETT_GAP,
    EXPERIMENTS,
    GUMBEL_FIT,
    POWER,
    ROC,
    TYPE1,
    Alternative,
    ExperimentConfig,
    ExperimentReport,
    SizeTriple,
    run_experiment,
)
from .io import BINARY_FORMAT, FORMATS, read_panel, write_panel
from .lss import (
    STAT_MSSC,
    STATISTIC_KINDS,
    calibrate_threshold_mc,
    statistic_value,
)
from .mssc import TestReport, mssc_test
from .simulate import (
    H0,
    H1_GLOBAL,
    H1_LOCAL,
    VARIANTS,
    Ar1Spec,
    RngStream,
    calibrate_beta,
    simulate_panel,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors map to exit code 1, not argparse's 2
        raise InvalidInput(message)


def _add_common_experiment_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--ladder", required=True, help="semicolon-separated N,B,M triples")
    sub.add_argument("--alpha", type=float, default=0.05)
    sub.add_argument("--theta", type=float, default=0.5)
    sub.add_argument("--reps", type=int, default=2000)
    sub.add_argument("--calibration-reps", type=int, default=None)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--parallel", type=int, default=1)
    sub.add_argument(
        "--statistics",
        default=STAT_MSSC,
        help=f"comma-separated subset of {', '.join(STATISTIC_KINDS)}",
    )
    sub.add_argument("--config", default=None, help="JSON config file; overrides other flags")
    sub.add_argument("--out", default=None, help="write the JSON report (and a CSV sibling) here")


def _add_alternative_flags(sub: argparse.ArgumentParser) -> None:
    group = sub.add_mutually_exclusive_group(required=False)
    group.add_argument("--h1loc", type=float, metavar="COUPLING", default=None)
    group.add_argument("--h1glob", type=float, metavar="R_TARGET", default=None)


def _build_parser() -> _Parser:
    parser = _Parser(prog="speccoh", description=__doc__)
    subs = parser.add_subparsers(dest="verb", required=True)

    sim = subs.add_parser("simulate", help="write a synthetic panel to disk")
    sim.add_argument("--series", type=int, required=True)
    sim.add_argument("--samples", type=int, required=True)
    sim.add_argument("--theta", type=float, default=0.5)
    sim.add_argument("--coupling", type=float, default=0.0)
    sim.add_argument("--variant", choices=VARIANTS, default=H0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.add_argument("--format", choices=FORMATS, default=BINARY_FORMAT)

    test = subs.add_parser("test", help="run one independence test on a panel file")
    test.add_argument("--input", required=True)
    test.add_argument("--format", choices=FORMATS, default=BINARY_FORMAT)
    test.add_argument("--span", type=int, required=True)
    test.add_argument("--alpha", type=float, default=0.05)
    test.add_argument("--statistic", choices=STATISTIC_KINDS, default=STAT_MSSC)
    test.add_argument(
        "--null-theta",
        type=float,
        default=None,
        help="AR coefficient of the null model used to calibrate eigenvalue statistics",
    )
    test.add_argument("--calibration-reps", type=int, default=500)
    test.add_argument("--seed", type=int, default=0)
    test.add_argument("--parallel", type=int, default=1)
    test.add_argument("--out", default=None)

    calb = subs.add_parser("calibrate-beta", help="coupling matching a dependence target")
    calb.add_argument("--series", type=int, required=True)
    calb.add_argument("--theta", type=float, default=0.5)
    calb.add_argument("--variant", choices=(H1_LOCAL, H1_GLOBAL), default=H1_GLOBAL)
    calb.add_argument("--r-target", type=float, required=True)
    calb.add_argument("--out", default=None)

    for verb, needs_alt in ((TYPE1, False), (POWER, True), (ROC, True), (GUMBEL_FIT, False), (BARTLETT_GAP, False)):
        sub = subs.add_parser(verb.replace("_", "-"), help=f"run the {verb} experiment")
        _add_common_experiment_flags(sub)
        if needs_alt:
            _add_alternative_flags(sub)
    return parser


def _parse_ladder(text: str) -> tuple[SizeTriple, ...]:
    triples = []
    for chunk in text.split(";"):
        parts = chunk.strip().split(",")
        if len(parts) != 3:
            raise InvalidInput(f"ladder entry {chunk!r} is not an N,B,M triple")
        try:
            n, b, m = (int(p) for p in parts)
        except ValueError as exc:
            raise InvalidInput(f"ladder entry {chunk!r}: {exc}") from exc
        triples.append(SizeTriple(n, b, m))
    return tuple(triples)


def _experiment_config(args: argparse.Namespace, experiment: str) -> ExperimentConfig:
    if args.config is not None:
        raw = json.loads(Path(args.config).read_text())
        raw.setdefault("experiment", experiment)
        return ExperimentConfig.from_dict(raw)
    alternative = Alternative()
    if getattr(args, "h1loc", None) is not None:
        alternative = Alternative(kind=H1_LOCAL, coupling=args.h1loc)
    elif getattr(args, "h1glob", None) is not None:
        alternative = Alternative(kind=H1_GLOBAL, dependence_target=args.h1glob)
    return ExperimentConfig(
        experiment=experiment,
        ladder=_parse_ladder(args.ladder),
        alpha=args.alpha,
        theta=args.theta,
        alternative=alternative,
        n_reps=args.reps,
        calibration_reps=args.calibration_reps,
        seed=args.seed,
        parallelism=args.parallel,
        statistics=tuple(s.strip() for s in args.statistics.split(",") if s.strip()),
    )


def _report_csv_rows(report: ExperimentReport) -> tuple[list[str], list[list]]:
    experiment = report.config["experiment"]
    if experiment in (TYPE1, POWER):
        header = ["N", "B", "M", "statistic", "rejection_rate", "threshold", "n_reps"]
        rows = [[r[h] for h in header] for r in report.results]
    elif experiment == ROC:
        header = ["N", "B", "M", "statistic", "fpr", "tpr"]
        rows = []
        for r in report.results:
            for fpr, tpr in r["points"]:
                rows.append([r["N"], r["B"], r["M"], r["statistic"], fpr, tpr])
    elif experiment == GUMBEL_FIT:
        header = ["N", "B", "M", "value", "ecdf", "ks_distance"]
        rows = []
        for r in report.results:
            for value, ecdf in r["cdf"]:
                rows.append([r["N"], r["B"], r["M"], value, ecdf, r["ks_distance"]])
    else:  # bartlett_gap
        header = ["N", "B", "M", "numerator_gap_median", "denominator_gap_median", "n_reps"]
        rows = [[r[h] for h in header] for r in report.results]
    return header, rows


def _write_report(report: ExperimentReport, out: str | None) -> None:
    if out is None:
        return
    path = Path(out)
    path.write_text(report.to_json() + "\n")
    header, rows = _report_csv_rows(report)
    with open(path.with_suffix(".csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def test_file(
    path: str,
    fmt: str,
    span: int,
    alpha: float,
    statistic: str = STAT_MSSC,
    null_theta: float | None = None,
    calibration_reps: int = 500,
    seed: int = 0,
    parallelism: int = 1,
) -> TestReport:
    """Run one independence test on a panel stored on disk.

    The maximum-coherence test uses its closed-form threshold.  The
    eigenvalue statistics have no usable closed-form null law, so they need a
    null model to calibrate against: ``null_theta`` names the AR coefficient
    of the independent model used for the Monte Carlo threshold.
    """
    panel = read_panel(path, fmt)
    if statistic == STAT_MSSC:
        return mssc_test(panel, span, alpha)
    if statistic not in STATISTIC_KINDS:
        raise InvalidInput(f"unknown statistic kind {statistic!r}")
    if null_theta is None:
        raise InvalidInput(f"{statistic} needs --null-theta to calibrate its threshold")
    model = Ar1Spec(panel.num_series, null_theta, 0.0, H0)
    calibrated = calibrate_threshold_mc(
        model,
        panel.num_samples,
        span,
        statistic,
        alpha,
        calibration_reps,
        seed,
        parallelism,
    )
    value = statistic_value(panel, span, statistic)
    return TestReport(
        statistic=value,
        threshold=calibrated.kappa,
        reject=value > calibrated.kappa,
        config={
            "num_samples": panel.num_samples,
            "span": span,
            "num_series": panel.num_series,
            "alpha": alpha,
            "statistic": statistic,
            "null_theta": null_theta,
            "calibration_reps": calibration_reps,
            "calibration_seed": seed,
        },
    )


def _test_report_json(report: TestReport) -> dict:
    return {
        "statistic": report.statistic,
        "threshold": report.threshold,
        "reject": report.reject,
        "p_value": report.p_value,
        "argmax": list(report.argmax) if report.argmax is not None else None,
        "config": report.config,
    }


def _cmd_simulate(args) -> int:
    spec = Ar1Spec(args.series, args.theta, args.coupling, args.variant)
    panel = simulate_panel(spec, args.samples, RngStream(args.seed))
    write_panel(panel, args.out, args.format)
    print(f"wrote {args.series}x{args.samples} panel to {args.out} ({args.format})")
    return 0


def _cmd_test(args) -> int:
    report = test_file(
        args.input,
        args.format,
        args.span,
        args.alpha,
        statistic=args.statistic,
        null_theta=args.null_theta,
        calibration_reps=args.calibration_reps,
        seed=args.seed,
        parallelism=args.parallel,
    )
    decision = "REJECT independence" if report.reject else "no evidence against independence"
    print(f"{args.statistic}: statistic={report.statistic:.6g} threshold={report.threshold:.6g}")
    if report.p_value is not None:
        print(f"p-value={report.p_value:.4g}")
    if report.argmax is not None:
        i, j, nu = report.argmax
        print(f"largest coherence between series {i} and {j} at frequency {nu:.6g}")
    print(decision)
    if args.out:
        Path(args.out).write_text(json.dumps(_test_report_json(report), sort_keys=True, indent=2) + "\n")
    return 0


def _cmd_calibrate_beta(args) -> int:
    beta = calibrate_beta(args.series, args.theta, args.variant, args.r_target)
    print(f"coupling={beta:.10g}")
    if args.out:
        payload = {
            "num_series": args.series,
            "theta": args.theta,
            "variant": args.variant,
            "r_target": args.r_target,
            "coupling": beta,
        }
        Path(args.out).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def _cmd_experiment(args, experiment: str) -> int:
    config = _experiment_config(args, experiment)
    report = run_experiment(config)
    _write_report(report, args.out)
    for row in report.results:
        summary = {
            k: row[k]
            for k in ("N", "B", "M", "statistic", "rejection_rate", "ks_distance",
                      "numerator_gap_median", "denominator_gap_median")
            if k in row
        }
        print(json.dumps(summary, sort_keys=True))
    if report.timing:
        print(f"wall time: {report.timing['wall_seconds']:.1f}s", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verb == "simulate":
            return _cmd_simulate(args)
        if args.verb == "test":
            return _cmd_test(args)
        if args.verb == "calibrate-beta":
            return _cmd_calibrate_beta(args)
        experiment = args.verb.replace("-", "_")
        if experiment in EXPERIMENTS:
            return _cmd_experiment(args, experiment)
        raise InvalidInput(f"unknown verb {args.verb!r}")
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, CalibrationFailure, DegenerateSpectrum, Unsupported) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
