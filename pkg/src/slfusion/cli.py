"""Command-line entry point.

Exit codes: 0 ok, 1 input error, 2 fusion error, 3 table mismatch.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import table
from .core import is_dogmatic
from .dirichlet import DogmaticLimit, evidence_to_opinion, opinion_to_evidence
from .errors import InputError, SLError
from .files import (
    dumps,
    evidence_document,
    load_evidence,
    load_opinions,
    opinions_document,
)
from .fusion import OPERATORS, FusionOptions, fuse

log = logging.getLogger("slfusion")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FUSION = 2
EXIT_TABLE = 3


def _report_input_error(exc: InputError):
    for problem in exc.problems:
        print(f"error: {problem}", file=sys.stderr)


def _write(text: str, output):
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def parse_weights(spec: str | None, actors) -> dict[int, float] | None:
    """``"A1=0.2,A2=0.8"`` -> {position: weight}."""
    if not spec:
        return None
    out = {}
    for item in spec.split(","):
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or not name:
            raise InputError(f"bad --weights entry {item!r}; expected ACTOR=WEIGHT")
        if name not in actors:
            raise InputError(f"--weights names unknown actor {name!r}")
        try:
            weight = float(value)
        except ValueError:
            raise InputError(f"--weights value for {name!r} is not a number") from None
        if not weight >= 0.0:
            raise InputError(f"--weights value for {name!r} must be >= 0")
        out[actors.index(name)] = weight
    return out


def cmd_fuse(input_path, operator, output=None, weights=None) -> int:
    try:
        data = load_opinions(input_path)
        raw = parse_weights(weights, list(data.actors))
        opts = FusionOptions()
        if raw is not None:
            if not any(is_dogmatic(op) for op in data.opinions):
                log.warning("--weights ignored: no input opinion is dogmatic")
            else:
                opts = FusionOptions(DogmaticLimit.normalized(raw))
    except InputError as exc:
        _report_input_error(exc)
        return EXIT_INPUT
    except SLError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        result = fuse(operator, data.opinions, opts)
    except SLError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FUSION
    doc = opinions_document(data.domain, [f"fused:{operator}"], [result], projected=True)
    _write(dumps(doc), output)
    return EXIT_OK


def cmd_table(tolerance=table.DEFAULT_TOLERANCE, inputs=None, expected=None) -> int:
    text, ok = table.render(inputs, expected, tolerance)
    print(text)
    return EXIT_OK if ok else EXIT_TABLE


def cmd_convert(input_path, direction, output=None) -> int:
    try:
        if direction == "to-evidence":
            data = load_opinions(input_path)
        else:
            data = load_evidence(input_path)
    except InputError as exc:
        _report_input_error(exc)
        return EXIT_INPUT

    try:
        if direction == "to-evidence":
            records = [opinion_to_evidence(op) for op in data.opinions]
            doc = evidence_document(data.domain, data.actors, records)
        else:
            opinions = [evidence_to_opinion(ev) for ev in data.records]
            doc = opinions_document(data.domain, data.actors, opinions)
    except SLError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FUSION
    _write(dumps(doc), output)
    return EXIT_OK


def cmd_validate(input_path) -> int:
    try:
        data = load_opinions(input_path)
    except InputError as exc:
        _report_input_error(exc)
        return EXIT_INPUT
    print(f"ok: {len(data.opinions)} opinion(s) over {list(data.domain.labels)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slfusion", description="Multi-source subjective logic fusion."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuse", help="fuse every opinion in a file")
    p.add_argument("--op", required=True, choices=OPERATORS)
    p.add_argument("--input", required=True, metavar="PATH")
    p.add_argument("--output", metavar="PATH", help="default: standard output")
    p.add_argument("--weights", metavar="ACTOR=W,...", help="relative weights of dogmatic inputs")

    p = sub.add_parser("table", help="reproduce the three-source worked example")
    p.add_argument("--tolerance", type=float, default=table.DEFAULT_TOLERANCE)

    p = sub.add_parser("convert", help="map opinions to Dirichlet evidence or back")
    p.add_argument("--input", required=True, metavar="PATH")
    p.add_argument("--direction", required=True, choices=("to-evidence", "to-opinion"))
    p.add_argument("--output", metavar="PATH", help="default: standard output")

    p = sub.add_parser("validate", help="check every opinion in a file")
    p.add_argument("--input", required=True, metavar="PATH")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "fuse":
        return cmd_fuse(args.input, args.op, args.output, args.weights)
    if args.command == "table":
        return cmd_table(args.tolerance)
    if args.command == "convert":
        return cmd_convert(args.input, args.direction, args.output)
    return cmd_validate(args.input)
