"""``simulate`` command: run a sweep described by a config file, write CSV."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .experiments import NORMALIZATION, ConfigError, parse_config, run_sweep, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="simulate",
        description="Compare G-IDNC and LG-IDNC decoding delay under lossy feedback.",
    )
    ap.add_argument("--config", required=True, type=Path, help="key = value sweep file")
    ap.add_argument("--out", required=True, type=Path, help="CSV output path")
    ap.add_argument("--seed", type=int, help="root seed (overrides the config)")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes")
    ap.add_argument("--trace", action="store_true", help="log every recovery round to stderr")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.trace else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        spec = parse_config(args.config.read_text())
    except OSError as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG

    if args.trace:
        # Trace lines are emitted by the episode loop; keep it in-process.
        spec = replace(spec, trace=True)
    try:
        result = run_sweep(spec, jobs=1 if args.trace else args.jobs)
        write_csv(result, args.out)
        meta = {
            "normalization": NORMALIZATION,
            "seed": spec.seed,
            "iterations": spec.iterations,
            "halfwidth": spec.halfwidth,
            "qrule": spec.qrule,
            "axis": spec.axis,
            "feedback": "decode" if spec.feedback_on_decode else "reception",
        }
        Path(str(args.out) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    except Exception as exc:  # noqa: BLE001 - surfaced as exit code 2
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
