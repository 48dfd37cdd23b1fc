"""Command-line entry point: ``iceberg {synth,compute,hhi,validate,plotdata}``.

Settings come from an optional JSON config file (``--config``) and are then
overridden by any flags given.  Exit status is 0 on success, 1 for input or
validation errors, 2 for anything unexpected; errors are printed to stderr as
one JSON object.
"""

import argparse
import json
import logging
import sys
from dataclasses import fields, replace
from pathlib import Path

from .errors import InputError
from .pipeline import RunConfig, run_compute, run_hhi, run_plotdata, run_validate
from .synth import SynthConfig, generate

log = logging.getLogger("iceberg")


def _tier_sizes(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated integers")
    return tuple(int(p) for p in parts)


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--output", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--data", help="dataset directory laid out like `synth` output")
    for name in ("taxonomy", "tools", "employment", "geography", "state-metrics",
                 "transitions", "external-tiers", "scopes"):
        run.add_argument(f"--{name}", help=f"{name.replace('-', ' ')} CSV")
    run.add_argument("--scope", dest="surface_scope",
                     help="scope treated as the Surface (visible) scope; default 'surface'")
    run.add_argument("--weight-policy")
    run.add_argument("--reduction", choices=("max", "boolean"))
    run.add_argument("--tau", type=float, help="boolean reduction threshold")
    run.add_argument("--workers", type=int)
    sel = run.add_mutually_exclusive_group()
    sel.add_argument("--threshold", type=float, help="select pairs with similarity >= this")
    sel.add_argument("--percentile", type=float, help="select this top fraction of pairs")
    run.add_argument("--tier-sizes", type=_tier_sizes, help="leading,emerging,aspiring")

    parser = argparse.ArgumentParser(prog="iceberg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic dataset")
    p.add_argument("--seed", type=int)
    for f in fields(SynthConfig):
        if f.name != "seed" and f.type is int:
            p.add_argument(f"--{f.name.replace('_', '-')}", type=int, dest=f.name)
    p.add_argument("--density", type=float)

    for name, help_ in (("compute", "exposures and regional indices"),
                        ("hhi", "industry concentration per state"),
                        ("validate", "similarity recall, tier agreement, regressions"),
                        ("plotdata", "plot-ready CSV tables")):
        sub.add_parser(name, parents=[common, run], help=help_)
    return parser


def _synth_config(args):
    raw = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise InputError(f"{args.config}: config file not found") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.config}: invalid JSON ({exc})") from None
    names = {f.name for f in fields(SynthConfig)}
    output = raw.pop("output", None)
    unknown = sorted(set(raw) - names)
    if unknown:
        raise InputError(f"unknown synth config keys {unknown}")
    for key in ("wage_range", "employment_range"):
        if key in raw:
            raw[key] = tuple(raw[key])
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            raw[name] = value
    if output is not None and args.config:
        output = str(Path(args.config).parent / output)
    return SynthConfig(**raw), args.output or output or "synth_data"


def _run_config(args):
    if args.config:
        cfg = RunConfig.from_file(args.config)
    else:
        cfg = RunConfig()
    if args.data:
        base = RunConfig.from_data_dir(args.data)
        cfg = replace(cfg, **{k: getattr(base, k) for k in (
            "taxonomy", "tools", "employment", "geography", "state_metrics",
            "transitions", "external_tiers")})
    overrides = {}
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = value
    return replace(cfg, **overrides)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            config, out = _synth_config(args)
            ds = generate(config, out)
            print(ds.directory)
        else:
            cfg = _run_config(args)
            runner = {"compute": run_compute, "hhi": run_hhi, "validate": run_validate,
                      "plotdata": run_plotdata}[args.command]
            result = runner(cfg)
            paths = result.values() if isinstance(result, dict) else [result]
            for p in paths:
                print(p)
    except InputError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(json.dumps({"error": type(exc).__name__, "message": str(exc),
                          "internal": True}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
