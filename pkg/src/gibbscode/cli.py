"""Command-line experiment runner.

    gibbscode <experiment> --config cfg.json --out outdir [--threads N]

where <experiment> is one of corr-decay, gexit-curve, de-curve, bounds,
duality-check, berretti-check, limits.  The config file is a single JSON
document (the experiment field may be omitted; the subcommand wins).
Outputs <experiment>.csv and <experiment>.json in the output directory.
Exit code 0 iff all assertions of a check-type experiment pass.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .experiments import EXPERIMENTS, ExperimentConfig, emit, run_experiment


def build_parser():
    parser = argparse.ArgumentParser(prog="gibbscode",
                                     description="sparse-graph decoding lab")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=1)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    with open(args.config) as fh:
        doc = json.load(fh)
    doc["experiment"] = args.experiment
    cfg = ExperimentConfig.from_json(doc)
    result = run_experiment(cfg, threads=args.threads)
    os.makedirs(args.out, exist_ok=True)
    emit(result, "csv", os.path.join(args.out, f"{args.experiment}.csv"))
    emit(result, "json", os.path.join(args.out, f"{args.experiment}.json"))
    if result.passed is not None:
        print(f"{args.experiment}: {'PASS' if result.passed else 'FAIL'}")
        return 0 if result.passed else 1
    print(f"{args.experiment}: wrote {len(result.rows)} rows")
    return 0


if __name__ == "__main__":
    sys.exit(main())
