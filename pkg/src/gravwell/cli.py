"""Command-line interface.

    gravwell run <config-file> [--n N] [--order K] [--t-final T] [--output DIR] [--seed S]
    gravwell suite <directory> [--output DIR]
    gravwell list-cases

Config files are flat `key = value` text: `#` starts a comment, booleans are
true/false, arrays are comma-separated.  `case` selects a registry entry;
other keys override its defaults.  Threshold lines of the form
`require_max.<metric> = 1e-12` or `require_min.<metric> = 2.6` are checked
against the report and decide the exit code (0 iff all pass).
`GRAVWELL_THREADS` caps how many suite cases run in parallel.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys

from .cases import REGISTRY, CaseConfig, make_config
from .harness import RunReport, check_thresholds, run_case

CONFIG_FIELDS = {f for f in CaseConfig.__dataclass_fields__} - {"case", "params", "grids"}


def parse_scalar(text: str):
    text = text.strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def parse_config_text(text: str) -> dict:
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if "," in value:
            out[key] = [parse_scalar(v) for v in value.split(",") if v.strip()]
        else:
            out[key] = parse_scalar(value)
    return out


def config_from_dict(raw: dict, overrides: dict | None = None) -> CaseConfig:
    raw = dict(raw)
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    case = raw.pop("case", None)
    if case is None:
        raise ValueError("config must set `case = <id>`")
    thresholds = {"max": {}, "min": {}}
    kwargs = {}
    params = {}
    for key, value in raw.items():
        if key.startswith("require_max."):
            thresholds["max"][key[len("require_max."):]] = float(value)
        elif key.startswith("require_min."):
            thresholds["min"][key[len("require_min."):]] = float(value)
        elif key.startswith("params."):
            params[key[len("params."):]] = value
        elif key == "grids":
            kwargs["grids"] = tuple(int(v) for v in (value if isinstance(value, list) else [value]))
        elif key in CONFIG_FIELDS:
            kwargs[key] = value
        else:
            raise ValueError(f"unknown config key {key!r}")
    if params:
        kwargs["params"] = {**REGISTRY[case].defaults.get("params", {}), **params}
    cfg = make_config(case, **kwargs)
    return cfg, thresholds


def run_config_file(path: str, overrides: dict | None = None) -> RunReport:
    with open(path) as f:
        raw = parse_config_text(f.read())
    cfg, thresholds = config_from_dict(raw, overrides)
    report = run_case(cfg)
    report.thresholds = thresholds
    report.passed = check_thresholds(report)
    report_path = os.path.join(cfg.output, cfg.case, "report.json")
    with open(report_path, "w") as f:
        f.write(report.to_json())
    return report


def _suite_worker(args):
    path, overrides = args
    try:
        report = run_config_file(path, overrides)
        return path, report.passed, None
    except Exception as exc:  # surfaced with case context
        return path, False, f"{type(exc).__name__}: {exc}"


def main(argv=None):
    parser = argparse.ArgumentParser(prog="gravwell", description="well-balanced Euler-with-gravity solver")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one case from a config file")
    run_p.add_argument("config")
    suite_p = sub.add_parser("suite", help="run every config in a directory")
    suite_p.add_argument("directory")
    sub.add_parser("list-cases", help="print the case registry")

    for p in (run_p, suite_p):
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--order", type=int, default=None)
        p.add_argument("--t-final", dest="t_final", type=float, default=None)
        p.add_argument("--output", default=None)
        p.add_argument("--seed", type=int, default=None)

    args = parser.parse_args(argv)

    if args.command == "list-cases":
        width = max(len(k) for k in REGISTRY)
        for name in sorted(REGISTRY):
            print(f"{name:<{width}}  {REGISTRY[name].description}")
        return 0

    overrides = {
        "n": args.n,
        "order": args.order,
        "t_final": args.t_final,
        "output": args.output,
        "seed": args.seed,
    }

    if args.command == "run":
        report = run_config_file(args.config, overrides)
        status = "PASS" if report.passed else "FAIL"
        print(f"[{status}] {report.case}  ({report.wallclock:.2f}s)  metrics: {len(report.metrics)}")
        for name, bound in report.thresholds.get("max", {}).items():
            print(f"    {name} = {report.metrics.get(name)!r} (require <= {bound})")
        for name, bound in report.thresholds.get("min", {}).items():
            print(f"    {name} = {report.metrics.get(name)!r} (require >= {bound})")
        return 0 if report.passed else 1

    configs = sorted(
        os.path.join(args.directory, f)
        for f in os.listdir(args.directory)
        if f.endswith((".cfg", ".txt"))
    )
    if not configs:
        print(f"no .cfg/.txt configs in {args.directory}", file=sys.stderr)
        return 2
    workers = int(os.environ.get("GRAVWELL_THREADS", "0")) or min(len(configs), os.cpu_count() or 1)
    all_ok = True
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        for path, ok, error in pool.map(_suite_worker, [(c, overrides) for c in configs]):
            tag = "PASS" if ok else "FAIL"
            msg = f" ({error})" if error else ""
            print(f"[{tag}] {os.path.basename(path)}{msg}")
            all_ok &= ok
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
