"""Command-line entry point: ``lisout --preset fig3 --out results/``.

Exit codes: 0 success, 2 bad configuration or preset, 3 output not writable.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .asymptotics import outage_probability, write_report
from .config import ConfigError, SystemConfig, format_config, load_config
from .presets import DELTA, PRESETS, run_preset
from .scenario import Scenario

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lisout", description="LIS uplink sum-rate and outage experiments.")
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--preset", default="custom", help=f"one of {', '.join(PRESETS)} (default custom)")
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--trials", type=int, help="override the configured trial count")
    p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def _cell(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(path: Path, columns, rows, fmt: str) -> Path:
    if fmt == "csv":
        path = path.with_suffix(".csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            w.writerows([_cell(v) for v in row] for row in rows)
    else:
        path = path.with_suffix(".json")
        records = [
            {c: (None if isinstance(v, float) and math.isnan(v) else v) for c, v in zip(columns, row)}
            for row in rows
        ]
        path.write_text(json.dumps({"columns": list(columns), "rows": records}, indent=1) + "\n")
    return path


def manifest_text(config: SystemConfig, preset: str) -> str:
    # comment lines keep the file loadable by load_config
    return f"# lisout {__version__}\n# preset = {preset}\n" + format_config(config)


def emit(result, config: SystemConfig, out: Path, fmt: str) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    manifest = out / "manifest.cfg"
    manifest.write_text(manifest_text(config, result.name))
    written.append(manifest)
    cfg_dir = out / "configs"
    cfg_dir.mkdir(exist_ok=True)
    for name, cfg in result.configs.items():
        path = cfg_dir / f"{name}.cfg"
        path.write_text(format_config(cfg))
        written.append(path)
    for table, (columns, rows) in result.tables.items():
        written.append(write_table(out / f"{result.name}_{table}", columns, rows, fmt))
    return written


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else SystemConfig()
        changes = {}
        if args.seed is not None:
            changes["seed"] = args.seed
        if args.trials is not None:
            changes["trials"] = args.trials
        config = config.replace(**changes) if changes else config
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; choose from {', '.join(PRESETS)}", "preset")
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1", "workers")
    except ConfigError as exc:
        print(f"lisout: configuration error ({exc.key or 'config'}): {exc}", file=sys.stderr)
        return EXIT_CONFIG

    result = run_preset(args.preset, config, workers=args.workers)
    try:
        written = emit(result, config, args.out, args.format)
        if args.preset == "custom":
            scen = Scenario(config)
            dist = scen.distribution()
            path = args.out / "custom_units.csv"
            write_report(path, scen.unit_asymptotics(), dist, outage_probability(dist, delta=DELTA))
            written.append(path)
    except OSError as exc:
        print(f"lisout: cannot write results: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
