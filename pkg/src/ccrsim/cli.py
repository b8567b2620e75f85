"""Command line entry point.

Exit codes: 0 success, 1 parse/expand error, 2 planning/profile error,
3 scene warnings under --strict.
"""

from __future__ import annotations

import argparse
import contextlib
import sys

from . import motion, output, scene as scene_mod, scheduler
from .errors import (EvalError, ExpandError, LexError, ParseError,
                     PlanningError, ProfileError, SceneError)
from .expander import compile_source

EXIT_OK = 0
EXIT_SCRIPT_ERROR = 1
EXIT_PLAN_ERROR = 2
EXIT_WARNINGS = 3


def _build_argparser():
    ap = argparse.ArgumentParser(prog="ccrsim",
                                 description="CCRScript interpreter and headless simulator")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="simulate a script and write outputs")
    run.add_argument("script", help="path to a .ccr script")
    run.add_argument("--dt", type=float, default=0.02,
                     help="sampling step in seconds (default 0.02)")
    run.add_argument("--trace", metavar="PATH",
                     help="write a newline-delimited trace ('-' for stdout)")
    run.add_argument("--svg", metavar="PATH", help="write an SVG scene rendering")
    run.add_argument("--report", metavar="PATH",
                     help="write a timing report ('-' for stdout)")
    run.add_argument("--config", metavar="PATH",
                     help="speed parameter config file (key = value lines)")
    run.add_argument("--strict", action="store_true",
                     help="exit with code 3 when scene warnings are produced")
    check = sub.add_parser("check", help="parse and plan a script, write nothing")
    check.add_argument("script", help="path to a .ccr script")
    check.add_argument("--config", metavar="PATH",
                       help="speed parameter config file (key = value lines)")
    return ap


@contextlib.contextmanager
def _sink(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _load(args):
    try:
        with open(args.script, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as err:
        print(f"error: cannot read {args.script}: {err}", file=sys.stderr)
        return None, None, EXIT_SCRIPT_ERROR
    params = motion.SpeedParams()
    turn_radius = motion.DEFAULT_MIN_TURN_RADIUS
    if args.config:
        try:
            params, turn_radius = motion.load_config(args.config)
        except (OSError, ValueError) as err:
            print(f"error: bad config: {err}", file=sys.stderr)
            return None, None, EXIT_SCRIPT_ERROR
    try:
        stream = compile_source(source)
    except (LexError, ParseError, EvalError, ExpandError) as err:
        print(f"{args.script}:{err}", file=sys.stderr)
        return None, None, EXIT_SCRIPT_ERROR
    return stream, (params, turn_radius), EXIT_OK


def _simulate(args, stream, params, turn_radius):
    try:
        scn = scene_mod.build_scene(stream)
    except SceneError as err:
        print(f"{args.script}:{err}", file=sys.stderr)
        return None, None, EXIT_SCRIPT_ERROR
    try:
        timeline = scheduler.simulate(stream, params, turn_radius)
    except (PlanningError, ProfileError) as err:
        print(f"{args.script}:{err}", file=sys.stderr)
        return None, None, EXIT_PLAN_ERROR
    return scn, timeline, EXIT_OK


def run_cli(argv=None) -> int:
    args = _build_argparser().parse_args(argv)
    stream, config, code = _load(args)
    if code != EXIT_OK:
        return code
    params, turn_radius = config
    scn, timeline, code = _simulate(args, stream, params, turn_radius)
    if code != EXIT_OK:
        return code
    for note in timeline.notes:
        print(f"note: {note}", file=sys.stderr)
    if args.command == "check":
        return EXIT_OK
    warnings = scene_mod.scan_timeline(scn, timeline, args.dt)
    for warning in warnings:
        print(warning.describe(), file=sys.stderr)
    try:
        if args.trace:
            with _sink(args.trace) as fh:
                output.write_trace(timeline, args.dt, fh)
        if args.report:
            with _sink(args.report) as fh:
                output.write_report(timeline, fh)
        if args.svg:
            with _sink(args.svg) as fh:
                fh.write(output.render_svg(scn, timeline, stream.robots, args.dt))
    except OSError as err:
        print(f"error: cannot write output: {err}", file=sys.stderr)
        return EXIT_SCRIPT_ERROR
    if args.strict and warnings:
        return EXIT_WARNINGS
    return EXIT_OK


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
