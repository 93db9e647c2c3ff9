"""Benchmark harness: algorithm x tiebreak x seed grids over configured streams.

``run`` executes a declarative JSON config and writes one JSON record per
run (results.jsonl) plus an aggregate CSV (summary.csv); ``relative``
produces the candidate/baseline ratio table; ``curves`` exports per-run
(instances_seen, accuracy, node_count) series for plotting.

Exit codes: 0 success, 1 configuration error, 2 I/O or data-format error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .core import ConfigError
from .evaluation import RunResult, prequential_run
from .streams import RNG_ALGORITHM, CsvColumn, CsvStream, LedStream, RbfStream, SeaStream
from .svfdt import StrictHoeffdingTree
from .tree import HoeffdingTree, TreeConfig

ALGORITHMS = ("vfdt", "svfdt-i", "svfdt-ii")
WORKERS_ENV = "STREAMTREE_WORKERS"

RESULTS_FILE = "results.jsonl"
SUMMARY_FILE = "summary.csv"
SUMMARY_COLUMNS = (
    "stream,algorithm,tiebreak,runs,accuracy_mean,kappa_m_mean,nodes_mean,"
    "time_mean_s,time_std_s"
)
CURVE_HEADER = "instances_seen,accuracy,node_count"

# Final-record fields excluded from determinism comparisons.
TIME_FIELDS = ("elapsed_train_seconds",)


def make_learner(name: str, schema, config: TreeConfig):
    if name == "vfdt":
        return HoeffdingTree(schema, config)
    if name == "svfdt-i":
        return StrictHoeffdingTree(schema, config, variant=1)
    if name == "svfdt-ii":
        return StrictHoeffdingTree(schema, config, variant=2)
    raise ConfigError(f"unknown algorithm {name!r} (expected one of {ALGORITHMS})")


@dataclass(frozen=True)
class StreamSpec:
    """Declarative description of one stream; ``build(seed)`` instantiates it."""

    name: str
    type: str
    params: dict = field(default_factory=dict)

    @staticmethod
    def from_dict(raw: dict) -> "StreamSpec":
        if "type" not in raw:
            raise ConfigError("stream entry is missing the 'type' field")
        params = dict(raw)
        kind = params.pop("type")
        name = params.pop("name", None) or kind
        if kind not in ("led", "sea", "rbf", "csv"):
            raise ConfigError(f"unknown stream type {kind!r} in stream {name!r}")
        return StreamSpec(name, kind, params)

    def build(self, seed: int):
        p = dict(self.params)
        try:
            if self.type == "led":
                return LedStream(
                    noise=p.pop("noise", 0.0),
                    irrelevant=p.pop("irrelevant", 17),
                    n=p.pop("n"),
                    seed=seed,
                    **p,
                )
            if self.type == "sea":
                kwargs = {}
                if "thresholds" in p:
                    kwargs["thresholds"] = tuple(p.pop("thresholds"))
                if "block_size" in p:
                    kwargs["block_size"] = p.pop("block_size")
                return SeaStream(
                    n=p.pop("n"), noise=p.pop("noise", 0.10), seed=seed, **kwargs, **p
                )
            if self.type == "rbf":
                kwargs = {}
                if "deviation_range" in p:
                    kwargs["deviation_range"] = tuple(p.pop("deviation_range"))
                return RbfStream(
                    n_attrs=p.pop("n_attrs", 10),
                    n_classes=p.pop("n_classes", 2),
                    n_centroids=p.pop("n_centroids", 50),
                    n=p.pop("n"),
                    seed=seed,
                    **kwargs,
                    **p,
                )
            # csv
            columns = [
                CsvColumn(
                    c["name"],
                    c["kind"],
                    tuple(c["values"]) if c.get("values") else None,
                )
                for c in p.pop("columns")
            ]
            return CsvStream(
                p.pop("path"),
                columns,
                tuple(p.pop("classes")),
                has_header=p.pop("header", False),
            )
        except KeyError as exc:
            raise ConfigError(
                f"stream {self.name!r} is missing required field {exc.args[0]!r}"
            ) from None
        except TypeError as exc:
            raise ConfigError(f"stream {self.name!r}: {exc}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    streams: tuple[StreamSpec, ...]
    algorithms: tuple[str, ...] = ALGORITHMS
    tiebreaks: tuple[float, ...] = (0.05, 0.10, 0.15, 0.20)
    delta: float = 1e-5
    grace_period: int = 200
    leaf_prediction: str = "mc"
    numeric_bins: int = 100
    merit_range: str = "unit"
    seeds: tuple[int, ...] = (1,)
    repetitions: int = 1
    snapshot_every: int = 10000
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.streams:
            raise ConfigError("config needs at least one stream")
        if not self.algorithms:
            raise ConfigError("config needs at least one algorithm")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {algo!r} (expected one of {ALGORITHMS})")
        if any(t < 0 for t in self.tiebreaks):
            raise ConfigError("tiebreak values must be >= 0")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if not self.seeds:
            raise ConfigError("config needs at least one seed")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        # Fail fast on bad learner hyperparameters.
        self.tree_config(self.tiebreaks[0])

    @staticmethod
    def from_dict(raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        try:
            streams = tuple(StreamSpec.from_dict(s) for s in raw.pop("streams"))
        except KeyError:
            raise ConfigError("config is missing the 'streams' field") from None
        known = {
            "algorithms",
            "tiebreaks",
            "delta",
            "grace_period",
            "leaf_prediction",
            "numeric_bins",
            "merit_range",
            "seeds",
            "repetitions",
            "snapshot_every",
            "workers",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        for key in ("algorithms", "tiebreaks", "seeds"):
            if key in raw:
                raw[key] = tuple(raw[key])
        return ExperimentConfig(streams=streams, **raw)

    def tree_config(self, tiebreak: float) -> TreeConfig:
        return TreeConfig(
            grace_period=self.grace_period,
            delta=self.delta,
            tiebreak=tiebreak,
            leaf_prediction=self.leaf_prediction,
            numeric_bins=self.numeric_bins,
            merit_range=self.merit_range,
        )

    def config_hash(self) -> str:
        canonical = json.dumps(
            {
                "streams": [
                    {"name": s.name, "type": s.type, "params": s.params}
                    for s in self.streams
                ],
                "algorithms": self.algorithms,
                "tiebreaks": self.tiebreaks,
                "delta": self.delta,
                "grace_period": self.grace_period,
                "leaf_prediction": self.leaf_prediction,
                "numeric_bins": self.numeric_bins,
                "merit_range": self.merit_range,
                "seeds": self.seeds,
                "repetitions": self.repetitions,
                "snapshot_every": self.snapshot_every,
            },
            sort_keys=True,
            default=list,
        )
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    return ExperimentConfig.from_dict(raw)


def run_id(stream: str, algorithm: str, tiebreak: float, seed: int, repetition: int) -> str:
    return f"{stream}__{algorithm}__tau{tiebreak:g}__seed{seed}__rep{repetition}"


def _execute_run(config: ExperimentConfig, spec: StreamSpec, algorithm: str,
                 tiebreak: float, seed: int, repetition: int, cfg_hash: str) -> RunResult:
    stream = spec.build(seed)
    learner = make_learner(algorithm, stream.schema, config.tree_config(tiebreak))
    metadata = {
        "run_id": run_id(spec.name, algorithm, tiebreak, seed, repetition),
        "stream": spec.name,
        "stream_type": spec.type,
        "stream_params": spec.params,
        "algorithm": algorithm,
        "tiebreak": tiebreak,
        "delta": config.delta,
        "grace_period": config.grace_period,
        "leaf_prediction": config.leaf_prediction,
        "numeric_bins": config.numeric_bins,
        "merit_range": config.merit_range,
        "seed": seed,
        "repetition": repetition,
        "rng": RNG_ALGORITHM,
        "config_hash": cfg_hash,
    }
    return prequential_run(
        learner, stream, snapshot_every=config.snapshot_every, metadata=metadata
    )


def run_experiment(config: ExperimentConfig, output_dir) -> list[RunResult]:
    """Execute the full grid; write results.jsonl and summary.csv under output_dir."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg_hash = config.config_hash()
    tasks = [
        (spec, algorithm, tiebreak, seed, repetition)
        for spec in config.streams
        for algorithm in config.algorithms
        for tiebreak in config.tiebreaks
        for seed in config.seeds
        for repetition in range(1, config.repetitions + 1)
    ]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_execute_run, config, *task, cfg_hash) for task in tasks]
            results = [f.result() for f in futures]  # keeps the deterministic task order
    else:
        results = [_execute_run(config, *task, cfg_hash) for task in tasks]

    with open(out / RESULTS_FILE, "w", encoding="utf-8") as handle:
        for result in results:
            handle.write(json.dumps(record_dict(result), sort_keys=True) + "\n")
    _write_summary(results, out / SUMMARY_FILE)
    return results


def record_dict(result: RunResult) -> dict:
    final = result.final
    return {
        **result.metadata,
        "instances_seen": final.instances_seen,
        "accuracy": final.accuracy,
        "kappa_m": final.kappa_m,
        "node_count": final.node_count,
        "leaf_count": final.leaf_count,
        "elapsed_train_seconds": final.elapsed_train_seconds,
        "snapshots": [
            [s.instances_seen, s.accuracy, s.kappa_m, s.node_count, s.leaf_count,
             s.elapsed_train_seconds]
            for s in result.snapshots
        ],
    }


def _write_summary(results: list[RunResult], path) -> None:
    groups: dict[tuple, list[RunResult]] = {}
    for result in results:
        meta = result.metadata
        key = (meta["stream"], meta["algorithm"], meta["tiebreak"])
        groups.setdefault(key, []).append(result)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(SUMMARY_COLUMNS + "\n")
        for (stream, algorithm, tiebreak), group in groups.items():
            times = [r.final.elapsed_train_seconds for r in group]
            handle.write(
                f"{stream},{algorithm},{tiebreak:g},{len(group)},"
                f"{statistics.fmean(r.final.accuracy for r in group):.6f},"
                f"{statistics.fmean(r.final.kappa_m for r in group):.6f},"
                f"{statistics.fmean(r.final.node_count for r in group):.2f},"
                f"{statistics.fmean(times):.4f},"
                f"{statistics.stdev(times) if len(times) > 1 else 0.0:.4f}\n"
            )


class PairingError(ValueError):
    """Baseline and candidate result sets do not cover the same runs."""


def relative_metrics(records: list[dict], baseline: str = "vfdt") -> list[dict]:
    """Candidate/baseline ratio table in the style of a per-tiebreak summary.

    Ratios are computed per (stream, seed, repetition) pair and averaged
    over all of them for each (algorithm, tiebreak).  A baseline value of
    zero yields a None ratio (excluded from the mean).
    """
    by_key: dict[tuple, dict] = {}
    for rec in records:
        key = (rec["algorithm"], rec["stream"], rec["tiebreak"], rec["seed"],
               rec["repetition"])
        by_key[key] = rec
    candidates = sorted({r["algorithm"] for r in records} - {baseline})
    if not any(r["algorithm"] == baseline for r in records):
        raise PairingError(f"no runs found for baseline {baseline!r}")
    missing = []
    rows = []
    tiebreaks = sorted({r["tiebreak"] for r in records})
    pair_keys = sorted(
        {(r["stream"], r["seed"], r["repetition"]) for r in records if r["algorithm"] == baseline}
    )
    metrics = ("accuracy", "kappa_m", "node_count", "elapsed_train_seconds")
    for tiebreak in tiebreaks:
        for algorithm in candidates:
            ratios: dict[str, list[float]] = {m: [] for m in metrics}
            for stream, seed, repetition in pair_keys:
                base = by_key.get((baseline, stream, tiebreak, seed, repetition))
                cand = by_key.get((algorithm, stream, tiebreak, seed, repetition))
                if base is None or cand is None:
                    missing.append((algorithm, stream, tiebreak, seed, repetition))
                    continue
                for metric in metrics:
                    if base[metric]:
                        ratios[metric].append(cand[metric] / base[metric])
            rows.append(
                {
                    "tiebreak": tiebreak,
                    "algorithm": algorithm,
                    "relative_accuracy": _mean_or_none(ratios["accuracy"]),
                    "relative_kappa_m": _mean_or_none(ratios["kappa_m"]),
                    "relative_size": _mean_or_none(ratios["node_count"]),
                    "relative_time": _mean_or_none(ratios["elapsed_train_seconds"]),
                }
            )
    if missing:
        listing = ", ".join(
            f"{a}/{s}/tau={t:g}/seed={sd}/rep={r}" for a, s, t, sd, r in missing[:20]
        )
        raise PairingError(f"missing baseline/candidate pairs: {listing}")
    return rows


def _mean_or_none(values: list[float]):
    return statistics.fmean(values) if values else None


def write_relative_csv(rows: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(
            "tiebreak,algorithm,relative_accuracy,relative_kappa_m,"
            "relative_size,relative_time\n"
        )
        for row in rows:
            cells = [f"{row['tiebreak']:g}", row["algorithm"]] + [
                "" if row[k] is None else f"{row[k]:.6f}"
                for k in ("relative_accuracy", "relative_kappa_m", "relative_size",
                          "relative_time")
            ]
            handle.write(",".join(cells) + "\n")


def export_curves(records: list[dict], output_dir) -> list[Path]:
    """One CSV per run: instances_seen, accuracy, node_count."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for rec in records:
        path = out / f"curve__{rec['run_id']}.csv"
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(CURVE_HEADER + "\n")
            for seen, accuracy, _kappa, nodes, _leaves, _t in rec["snapshots"]:
                handle.write(f"{seen},{accuracy!r},{nodes}\n")
        paths.append(path)
    return paths


def load_records(path) -> list[dict]:
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamtree",
        description="Hoeffding-tree stream benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute an experiment config")
    run_p.add_argument("--config", required=True, help="path to the JSON experiment config")
    run_p.add_argument("--output-dir", default="results", help="directory for result files")
    run_p.add_argument("--seed", type=int, action="append", default=None,
                       help="override config seeds (repeatable)")
    run_p.add_argument("--streams", default=None,
                       help="comma-separated stream names to keep")
    run_p.add_argument("--algorithms", default=None,
                       help="comma-separated algorithm names to keep")
    run_p.add_argument("--workers", type=int, default=None,
                       help=f"worker threads (default: ${WORKERS_ENV} or 1)")

    rel_p = sub.add_parser("relative", help="candidate/baseline ratio table")
    rel_p.add_argument("--results", required=True, help="path to results.jsonl")
    rel_p.add_argument("--baseline", default="vfdt")
    rel_p.add_argument("--output", default=None, help="CSV output path (default: stdout)")

    cur_p = sub.add_parser("curves", help="export per-run accuracy/size curves")
    cur_p.add_argument("--results", required=True, help="path to results.jsonl")
    cur_p.add_argument("--output-dir", default="curves")
    return parser


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    from dataclasses import replace

    if args.seed:
        config = replace(config, seeds=tuple(args.seed))
    if args.streams:
        wanted = {s.strip() for s in args.streams.split(",") if s.strip()}
        keep = tuple(s for s in config.streams if s.name in wanted)
        unknown = wanted - {s.name for s in config.streams}
        if unknown:
            raise ConfigError(f"unknown stream names in filter: {sorted(unknown)}")
        config = replace(config, streams=keep)
    if args.algorithms:
        wanted = {a.strip() for a in args.algorithms.split(",") if a.strip()}
        unknown = wanted - set(config.algorithms)
        if unknown:
            raise ConfigError(f"unknown algorithms in filter: {sorted(unknown)}")
        config = replace(config, algorithms=tuple(a for a in config.algorithms if a in wanted))
    workers = args.workers if args.workers is not None else default_workers()
    config = replace(config, workers=workers)
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            if not os.path.exists(args.config):
                print(f"error: config file not found: {args.config}", file=sys.stderr)
                return 2
            config = _apply_overrides(load_config(args.config), args)
            results = run_experiment(config, args.output_dir)
            print(f"wrote {len(results)} runs to {args.output_dir}/{RESULTS_FILE}")
            return 0
        if args.command == "relative":
            rows = relative_metrics(load_records(args.results))
            if args.output:
                write_relative_csv(rows, args.output)
                print(f"wrote {len(rows)} rows to {args.output}")
            else:
                for row in rows:
                    print(row)
            return 0
        if args.command == "curves":
            paths = export_curves(load_records(args.results), args.output_dir)
            print(f"wrote {len(paths)} curve files to {args.output_dir}")
            return 0
    except (ConfigError, PairingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:  # malformed data files (csv/json parse problems)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
