"""Command-line front end.

Every subcommand prints exactly one JSON line on stdout. Exit status is 0
on success, 1 when a computation fails and 2 for usage or configuration
errors. Diagnostics go to stderr.
"""

import argparse
import copy
import json
import logging
import os
import sys

from .errors import ConfigError, Quasi1DError
from .presets import PRESETS, list_presets
from .scenario import apply_overrides, load_config, merge_documents, run_scenario

OUT_ENV = "QUASI1D_OUT"

# analyses each subcommand runs, and the one inserted when none is configured
SUBCOMMANDS = {
    "spectrum": (("spectrum", "fano", "beer_lambert", "nonmarkov"), "spectrum"),
    "modes": (("modes",), "modes"),
    "dynamics": (("dynamics",), "dynamics"),
    "eit": (("eit",), "eit"),
    "greens": (("greens",), "greens"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser():
    parser = _Parser(prog="quasi1d", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=f"run the {name} analyses of a scenario")
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", help="scenario JSON file")
        src.add_argument("--preset", choices=list_presets(), help="named preset scenario")
        p.add_argument("--out", default=os.environ.get(OUT_ENV),
                       help=f"output directory (default: ${OUT_ENV}, then the config's)")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="dotted-path override, repeatable")
        p.add_argument("--threads", type=int, default=1, help="worker cap")
        if name == "greens":
            p.add_argument("--omega", type=float, help="probe frequency for the map")
    sub.add_parser("presets", help="list the preset catalog")
    return parser


def _emit(payload):
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    sys.stdout.flush()


def _fail(status, kind, operation, message):
    sys.stderr.write(f"quasi1d: {operation}: {message}\n")
    _emit({"status": "error", "kind": kind, "operation": operation, "message": message})
    return status


def _run(args):
    analyses, default = SUBCOMMANDS[args.command]
    doc = {"preset": args.preset} if args.preset else args.config
    overrides = list(args.overrides)
    if getattr(args, "omega", None) is not None:
        overrides.append(("analyses.greens.omega", args.omega))
    config = load_config(doc, _with_default(doc, overrides, analyses, default))
    if args.threads < 1:
        raise ConfigError("--threads must be at least 1", "threads")
    result = run_scenario(config, args.out, args.threads, analyses)
    _emit(dict(result.summary(), command=args.command))
    return 0


def _with_default(doc, overrides, analyses, default):
    """Add an empty entry for the main analysis when the scenario has none."""
    raw = doc
    if isinstance(doc, str):
        try:
            with open(doc) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return overrides  # load_config reports it
    probe = copy.deepcopy(raw)
    if isinstance(probe, dict) and "preset" in probe and probe["preset"] in PRESETS:
        probe = merge_documents(PRESETS[probe.pop("preset")], probe)
    try:
        probe = apply_overrides(probe, overrides)
    except ConfigError:
        return overrides
    present = probe.get("analyses", {}) if isinstance(probe, dict) else {}
    if isinstance(present, dict) and not any(a in present for a in analyses):
        return list(overrides) + [(f"analyses.{default}", {})]
    return overrides


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return _fail(2, "usage", "cli", str(exc))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(name)s: %(message)s")
    if args.command == "presets":
        catalog = {name: PRESETS[name].get("name", "") for name in list_presets()}
        _emit({"status": "ok", "command": "presets", "presets": catalog})
        return 0
    try:
        return _run(args)
    except ConfigError as exc:
        return _fail(2, "config", exc.operation, str(exc))
    except Quasi1DError as exc:
        return _fail(1, "computation", exc.operation, str(exc))
    except OSError as exc:
        return _fail(1, "io", "write_output", str(exc))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
