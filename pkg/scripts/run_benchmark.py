#!/usr/bin/env python3
"""Run the standard synthetic benchmark: three learners over the LED / SEA /
RBF stream families with the literature-recommended hyperparameters
(grace period 200, delta 1e-5, Gaussian estimator with 100 bins, tiebreak
grid 0.05..0.20), then emit the per-run records, the per-tiebreak relative
table against VFDT, and the accuracy/size curve files.

Example:
    python scripts/run_benchmark.py --out results/ --n 200000 --seeds 1 2 3
"""
import argparse
import json
import sys
from pathlib import Path

from streamtree.experiment import (
    ExperimentConfig,
    RESULTS_FILE,
    export_curves,
    load_records,
    relative_metrics,
    run_experiment,
    write_relative_csv,
)


def benchmark_config(n, seeds, tiebreaks, repetitions, leaf_prediction, workers):
    return {
        "streams": [
            {"name": "led_0", "type": "led", "noise": 0.0, "n": n},
            {"name": "led_10", "type": "led", "noise": 0.10, "n": n},
            {"name": "led_20", "type": "led", "noise": 0.20, "n": n},
            {"name": "sea", "type": "sea", "n": n},
            {"name": "rbf_10", "type": "rbf", "n_attrs": 10, "n_classes": 2, "n": n},
            {"name": "rbf_50", "type": "rbf", "n_attrs": 50, "n_classes": 2, "n": n},
        ],
        "algorithms": ["vfdt", "svfdt-i", "svfdt-ii"],
        "tiebreaks": tiebreaks,
        "delta": 1e-5,
        "grace_period": 200,
        "numeric_bins": 100,
        "leaf_prediction": leaf_prediction,
        "seeds": seeds,
        "repetitions": repetitions,
        "snapshot_every": max(1, n // 20),
        "workers": workers,
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--n", type=int, default=200_000, help="instances per stream")
    parser.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    parser.add_argument("--tiebreaks", type=float, nargs="+",
                        default=[0.05, 0.10, 0.15, 0.20])
    parser.add_argument("--repetitions", type=int, default=1,
                        help="repeated runs per cell for timing statistics")
    parser.add_argument("--leaf-prediction", choices=("mc", "nb"), default="mc")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    out = Path(args.out)
    raw = benchmark_config(args.n, args.seeds, args.tiebreaks, args.repetitions,
                           args.leaf_prediction, args.workers)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(raw, indent=2), encoding="utf-8")

    config = ExperimentConfig.from_dict(raw)
    results = run_experiment(config, out)
    print(f"{len(results)} runs -> {out / RESULTS_FILE}")

    records = load_records(out / RESULTS_FILE)
    write_relative_csv(relative_metrics(records), out / "relative.csv")
    print(f"relative table -> {out / 'relative.csv'}")

    curve_paths = export_curves(records, out / "curves")
    print(f"{len(curve_paths)} curve files -> {out / 'curves'}")

    for row in relative_metrics(records):
        print(
            f"tau={row['tiebreak']:g} {row['algorithm']}: "
            f"rel_acc={row['relative_accuracy']:.3f} "
            f"rel_size={row['relative_size']:.3f} "
            f"rel_time={row['relative_time']:.3f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
