"""Command-line entry point.

Exit codes: 0 every checked cell passed, 1 some cell failed,
2 inconclusive (too many skipped points), 3 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from .errors import ConfigError, LplabError
from .harness import (
    SUITE_IDS,
    SUITE_SUMMARY,
    SweepConfig,
    default_config,
    run_suite,
)
from .norms import (
    DyadicAnnulusDecomposition,
    lp_norm,
    weighted_sobolev_sum,
    y_dual_norm,
    y_norm,
)
from .families import instantiate_family
from .grid import GridSpec, save_field
from .report import FAIL, INCONCLUSIVE, PASS, write_outputs

_EXIT = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lplab",
        description="Measure the constants in dyadic commutator and "
        "weighted-embedding inequalities on periodic grids.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--suite", help="suite id (see list-suites)")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config entry, e.g. params.eps=0.25 or seed=7",
        )
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--grid-n", type=int, default=None)
        p.add_argument("--grid-N", type=int, default=None, dest="grid_samples")
        p.add_argument("--grid-L", type=float, default=None)

    p_verify = sub.add_parser("verify", help="run one suite against its verdict")
    common(p_verify)
    p_sweep = sub.add_parser(
        "sweep", help="run a suite from an explicit config file"
    )
    common(p_sweep)
    p_norms = sub.add_parser(
        "norms", help="norm tables (norm_id, params, value, tail) for a family"
    )
    common(p_norms)
    p_k = sub.add_parser(
        "kernel-check", help="shell-mass decay check for a kernel"
    )
    common(p_k)
    sub.add_parser("list-suites", help="print the suite ids and what they check")
    return parser


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_override(cfg_dict: dict, item: str) -> None:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not KEY=VALUE")
    key, value = item.split("=", 1)
    path = key.split(".")
    node = cfg_dict
    for part in path[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override path {key!r} crosses a non-object")
    node[path[-1]] = _parse_value(value)


def _load_config(args) -> SweepConfig:
    if args.config:
        path = Path(args.config)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"malformed JSON in {path} (line {exc.lineno}, col {exc.colno}): "
                f"{exc.msg}"
            ) from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    else:
        raw = {}
    suite = args.suite or raw.get("suite")
    if args.command == "kernel-check" and suite is None:
        suite = "kernel-hypothesis"
    if suite is None:
        raise ConfigError("no suite given (use --suite or a config file)")
    raw["suite"] = suite
    base = default_config(suite).to_dict()
    # config file entries override the shipped defaults field by field
    merged = dict(base)
    for key in ("grid", "params", "tolerances"):
        if key in raw:
            section = dict(base.get(key, {}))
            section.update(raw[key])
            merged[key] = section
    for key in ("family", "seed"):
        if key in raw:
            merged[key] = raw[key]
    for item in args.set:
        _apply_override(merged, item)
    if args.seed is not None:
        merged["seed"] = args.seed
    grid = dict(merged["grid"])
    if args.grid_n is not None:
        grid["n"] = args.grid_n
    if args.grid_samples is not None:
        grid["N"] = args.grid_samples
    if args.grid_L is not None:
        grid["L"] = args.grid_L
    merged["grid"] = grid
    return SweepConfig.from_dict(merged)


def _norm_table(cfg: SweepConfig, outdir: Path, verbose: int) -> int:
    members = instantiate_family(cfg.grid, cfg.family, cfg.seed)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "norms.csv"
    dec = DyadicAnnulusDecomposition(cfg.grid)
    with open(path, "w", newline="") as fh:
        fh.write("# columns: norm_id, params, value, tail_estimate\n")
        writer = csv.writer(fh)
        writer.writerow(["norm_id", "params", "value", "tail_estimate"])
        for name, f in members:
            for p in (1, 2, math.inf):
                writer.writerow(
                    [f"l{p}", f"member={name}", repr(lp_norm(f, p)), ""]
                )
            for gamma in (0.0, 0.5):
                for d in (0.0, 1.0):
                    val, tail = y_norm(f, gamma, d, with_tail=True)
                    writer.writerow(
                        [
                            "y_norm",
                            f"member={name} gamma={gamma} d={d}",
                            repr(val),
                            repr(tail),
                        ]
                    )
                    writer.writerow(
                        [
                            "y_dual_norm",
                            f"member={name} gamma={gamma} d={d}",
                            repr(y_dual_norm(f, gamma, d)),
                            "",
                        ]
                    )
                    wval, wtail = weighted_sobolev_sum(
                        f, gamma, d, with_tail=True
                    )
                    writer.writerow(
                        [
                            "weighted_sobolev_sum",
                            f"member={name} gamma={gamma} d={d}",
                            repr(wval),
                            repr(wtail),
                        ]
                    )
            save_field(f, outdir / f"field-{name}.csv")
    if verbose:
        print(f"wrote {path}", file=sys.stderr)
    print(f"norm table for {len(members)} members -> {path}")
    print(f"annulus range m in [{dec.m_min}, {dec.m_max}]")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list-suites":
        for sid in SUITE_IDS:
            print(f"{sid:18s} {SUITE_SUMMARY[sid]}")
        return 0

    try:
        cfg = _load_config(args)
        outdir = Path(args.out) if args.out else Path("lplab-out") / cfg.suite
        if args.command == "norms":
            return _norm_table(cfg, outdir, args.verbose)
        if args.verbose:
            print(
                f"running {cfg.suite} on n={cfg.grid.n} N={cfg.grid.N} "
                f"L={cfg.grid.L} seed={cfg.seed}",
                file=sys.stderr,
            )
        report = run_suite(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except LplabError as exc:
        print(f"error while running {args.suite or 'suite'}: {exc}", file=sys.stderr)
        return 3

    paths = write_outputs(report, outdir)
    if args.verbose:
        for p in paths:
            print(f"wrote {p}", file=sys.stderr)
    print(f"{report.suite}: {report.verdict} ({len(report.records)} records, "
          f"{report.skips.get('count', 0)} skipped) -> {outdir}")
    return _EXIT.get(report.verdict, 3)


if __name__ == "__main__":
    sys.exit(main())
