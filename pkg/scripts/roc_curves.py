#!/usr/bin/env python3
"""ROC curves of the three tests under one alternative at one size triple.

Writes plot-ready (fpr, tpr) points per statistic; the published figure uses
(N, M, B) = (2846, 290, 580), which is heavy on a laptop, so the default here
is one ladder step down.
"""

import argparse
from pathlib import Path

from speccoh.experiments import Alternative, ExperimentConfig, SizeTriple, run_roc
from speccoh.cli import _write_report
from speccoh.lss import STAT_LSS_FROBENIUS, STAT_LSS_LOGDET, STAT_MSSC


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--triple", default="1901,420,210", help="N,B,M")
    ap.add_argument("--alternative", choices=("h1loc", "h1glob"), default="h1loc")
    ap.add_argument("--coupling", type=float, default=0.1)
    ap.add_argument("--r-target", type=float, default=0.01)
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--theta", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=20260808)
    ap.add_argument("--parallel", type=int, default=2)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    n, b, m = (int(x) for x in args.triple.split(","))
    if args.alternative == "h1loc":
        alternative = Alternative(kind="h1loc", coupling=args.coupling)
    else:
        alternative = Alternative(kind="h1glob", dependence_target=args.r_target)
    config = ExperimentConfig(
        experiment="roc",
        ladder=(SizeTriple(n, b, m),),
        theta=args.theta,
        alternative=alternative,
        n_reps=args.reps,
        seed=args.seed,
        parallelism=args.parallel,
        statistics=(STAT_LSS_FROBENIUS, STAT_LSS_LOGDET, STAT_MSSC),
    )
    report = run_roc(config)
    out = args.out or f"out/roc_{args.alternative}.json"
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    _write_report(report, out)
    for row in report.results:
        pts = row["points"]
        area = sum(
            (pts[i + 1][0] - pts[i][0]) * (pts[i + 1][1] + pts[i][1]) / 2
            for i in range(len(pts) - 1)
        )
        print(f"{row['statistic']:<14} AUC={area:.3f} ({len(pts)} points)")


if __name__ == "__main__":
    main()
