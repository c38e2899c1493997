"""Command-line entry point: run experiments, validate configs, list kinds.

Result CSVs are a pure function of (config bytes, root seed, artifact
version): trials are keyed to streams by index and reduced in index
order, so the worker count cannot change any byte.  Run metadata that
does vary (wall clock, worker count) lives in the JSON sidecar only.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass

from .config_io import ConfigError, load_config
from .experiments import KINDS, ResultRow, run_experiment

ARTIFACT_VERSION = "0.1.0"

CSV_HEADER = "experiment,sweep_value,estimate,stderr,reference,z_score,passed,seed,trials"


@dataclass(frozen=True)
class RunManifest:
    config_path: str
    root_seed: int
    worker_count: int
    output_dir: str
    artifact_version: str
    wall_clock_seconds: float


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def rows_to_csv(rows: list[ResultRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    r.experiment,
                    _fmt(r.sweep_value),
                    _fmt(r.estimate),
                    _fmt(r.stderr),
                    _fmt(r.reference),
                    _fmt(r.z_score),
                    "true" if r.passed else "false",
                    str(r.seed),
                    str(r.trials),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_results(rows: list[ResultRow], manifest: RunManifest, raw_config: dict, csv_path: str) -> None:
    """CSV of rows plus a JSON sidecar holding the manifest and config."""
    _atomic_write(csv_path, rows_to_csv(rows))
    sidecar = {"manifest": asdict(manifest), "config": raw_config}
    _atomic_write(os.path.splitext(csv_path)[0] + ".json", json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("ZEROCELL_SEED")
    if env is not None:
        return int(env)
    return 0


def _cmd_run(args) -> int:
    try:
        cfg, raw = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    seed = _resolve_seed(args)
    if args.seed is None and "rootSeed" in raw and os.environ.get("ZEROCELL_SEED") is None:
        seed = int(raw["rootSeed"])
    workers = args.workers or os.cpu_count() or 1
    os.makedirs(args.out, exist_ok=True)
    start = time.monotonic()
    try:
        rows = run_experiment(cfg, seed, workers)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    manifest = RunManifest(
        config_path=os.path.abspath(args.config),
        root_seed=seed,
        worker_count=workers,
        output_dir=os.path.abspath(args.out),
        artifact_version=ARTIFACT_VERSION,
        wall_clock_seconds=time.monotonic() - start,
    )
    stem = os.path.splitext(os.path.basename(args.config))[0]
    csv_path = os.path.join(args.out, stem + ".csv")
    try:
        write_results(rows, manifest, raw, csv_path)
    except OSError as exc:
        print(f"error writing {csv_path}: {exc}", file=sys.stderr)
        return 1
    n_failed = sum(not r.passed for r in rows)
    for r in rows:
        status = "pass" if r.passed else "FAIL"
        print(f"[{status}] {r.experiment} sweep={r.sweep_value:g} estimate={r.estimate:.6g} reference={r.reference:.6g}")
    print(f"wrote {csv_path} ({len(rows)} rows, {n_failed} failed)")
    return 0 if n_failed == 0 else 2


def _cmd_validate(args) -> int:
    try:
        load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    print("ok")
    return 0


def _cmd_list(_args) -> int:
    for kind in KINDS:
        print(kind)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zerocell", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config and write CSV results")
    p_run.add_argument("--config", required=True, help="experiment config JSON")
    p_run.add_argument("--seed", type=int, default=None, help="root seed (fallback: ZEROCELL_SEED, config rootSeed, 0)")
    p_run.add_argument("--workers", type=int, default=None, help="worker processes (default: available parallelism)")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=_cmd_validate)

    p_list = sub.add_parser("list-experiments", help="print the experiment kinds")
    p_list.set_defaults(func=_cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
