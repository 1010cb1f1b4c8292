"""
Command-line frontend.

    python -m app filter -i in.pgm -o out.pgm --tree min --attr circularity ...
    python -m app detect -i in.pgm --attr circularity,elongation --eps 0.05 --json out.json
    python -m app tree-stats -i in.pgm --tree tos
    python -m app serve --port 8000

Exit codes: 0 success, 1 bad flags, 2 I/O or format errors.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from app.config.filter_config import FilterSpec, TEMPLATES, apply_template, load_config, save_config, validate_config
from app.errors import PnmError, ShapeSpaceError
from app.hierarchy.component_tree import tree_stats
from app.hierarchy.tree_of_shapes import build_tree_of_shapes
from app.imaging.image import Image
from app.imaging.overlay import render_overlay
from app.imaging.pnm import read_pnm_file, write_pnm, write_ppm
from app.log import configure_logging
from app.models.schemas import DetectionRecord, RangeReport, TreeStats
from app.shapespace.pipeline import attribute_range, build_tree, detect_on_tree, run_shape_filter, top_hat

logger = logging.getLogger(__name__)

ATTRIBUTE_CHOICES = ["area", "circularity", "elongation", "inertia_over_area2", "contour", "contour_length", "inertia"]


class UsageError(Exception):
    def __init__(self, parser: argparse.ArgumentParser, message: str):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(self, message)


def _attr_name(name: str) -> str:
    return "contour_length" if name == "contour" else name


def _attr_list(text: str) -> List[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    for n in names:
        if n not in ATTRIBUTE_CHOICES:
            raise argparse.ArgumentTypeError(f"unknown attribute '{n}'")
    return [_attr_name(n) for n in names]


def _eps(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid float value: '{text}'")
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"extinction threshold must be >= 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shapespace", description="Connected filtering in shape space")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    f = sub.add_parser("filter", help="shape-space filter (leveling or shaping)")
    f.add_argument("-i", "--input", required=True)
    f.add_argument("-o", "--output")
    f.add_argument("--config", help="FilterSpec JSON to start from")
    f.add_argument("--template", choices=sorted(TEMPLATES), help="preset to start from")
    f.add_argument("--save-config", help="write the effective FilterSpec as JSON")
    f.add_argument("--tree", choices=["min", "max", "tos"])
    f.add_argument("--conn", type=int, choices=[4, 8])
    f.add_argument("--attr", choices=ATTRIBUTE_CHOICES)
    f.add_argument("--combine", type=_attr_list, help="comma-separated attributes combined with --attr")
    f.add_argument("--orientation", choices=["relevant_is_low", "relevant_is_high"])
    f.add_argument("--strategy", choices=["threshold", "closing", "extinction"])
    f.add_argument("--param", type=float)
    f.add_argument("--aa", choices=["height", "node_count", "pixel_area"])
    f.add_argument("--mode", choices=["preserve", "remove"])
    f.add_argument("--tophat", help="also write the top-hat |f - g|")
    f.add_argument("--tophat-sign", choices=["abs", "f-g", "g-f"], default="abs")
    f.add_argument("--ascii", action="store_true", help="write P2 instead of P5")
    f.add_argument("--list-range", action="store_true", help="print the attribute range and exit")

    d = sub.add_parser("detect", help="detect objects with significant shape-space minima")
    d.add_argument("-i", "--input", required=True)
    d.add_argument("--attr", type=_attr_list, required=True, help="comma-separated attributes")
    d.add_argument("--eps", type=_eps, required=True, help="extinction threshold ('inf' allowed)")
    d.add_argument("--json", required=True, help="JSON-lines output")
    d.add_argument("--overlay", help="P6 image with detected contours")

    t = sub.add_parser("tree-stats", help="node, leaf and depth counts of a tree")
    t.add_argument("-i", "--input", required=True)
    t.add_argument("--tree", choices=["min", "max", "tos"], required=True)
    t.add_argument("--conn", type=int, choices=[4, 8], default=4)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    return parser


def _spec_from_args(args) -> FilterSpec:
    if args.config:
        spec = load_config(args.config)
    elif args.template:
        spec = apply_template(args.template)
    else:
        spec = FilterSpec()
    overrides = {
        "tree_kind": args.tree,
        "connectivity": args.conn,
        "attribute": _attr_name(args.attr) if args.attr else None,
        "combine_with": args.combine,
        "orientation": args.orientation,
        "strategy": args.strategy,
        "param": args.param,
        "aa_kind": args.aa,
        "mode": args.mode,
    }
    data = spec.model_dump()
    data.update({k: v for k, v in overrides.items() if v is not None})
    return FilterSpec(**data)


def _write(path: str, data: bytes):
    Path(path).write_bytes(data)


def cmd_filter(args) -> int:
    spec = _spec_from_args(args)
    ok, message = validate_config(spec)
    if not ok:
        print(f"error: {message}", file=sys.stderr)
        return 1
    f = read_pnm_file(args.input)
    if args.list_range:
        print(RangeReport(**attribute_range(f, spec)).to_lines(), end="")
        return 0
    if not args.output:
        print("error: filter needs -o/--output", file=sys.stderr)
        return 1
    if args.save_config:
        save_config(args.save_config, spec)

    outcome = run_shape_filter(f, spec)
    _write(args.output, write_pnm(outcome.image, ascii=args.ascii))
    if args.tophat:
        sign = None if args.tophat_sign == "abs" else args.tophat_sign
        _write(args.tophat, write_pnm(top_hat(f, outcome.image, signed=sign), ascii=args.ascii))
    return 0


def cmd_detect(args) -> int:
    f: Image = read_pnm_file(args.input)
    tree = build_tree_of_shapes(f)
    found = detect_on_tree(tree, args.attr, args.eps)
    lines = []
    for obj in found:
        record = DetectionRecord(
            id=obj.node,
            level=int(round(obj.level)),
            area=obj.area,
            centroid=list(obj.centroid),
            attribute=obj.attribute_value,
            extinction=obj.extinction,
            attr=obj.kind,
        )
        lines.append(record.to_json_line() + "\n")
    _write(args.json, "".join(lines).encode("utf-8"))
    if args.overlay:
        _write(args.overlay, write_ppm(render_overlay(f, tree, found, args.attr)))
    return 0


def cmd_tree_stats(args) -> int:
    f = read_pnm_file(args.input)
    tree = build_tree(f, args.tree, args.conn)
    print(TreeStats(**tree_stats(tree)).to_lines(), end="")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port)
    return 0


COMMANDS = {
    "filter": cmd_filter,
    "detect": cmd_detect,
    "tree-stats": cmd_tree_stats,
    "serve": cmd_serve,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        e.parser.print_usage(sys.stderr)
        print(f"{e.parser.prog}: error: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:  # --help
        return int(e.code or 0)

    configure_logging(logging.DEBUG if args.verbose else None)
    try:
        return COMMANDS[args.cmd](args)
    except ValidationError as e:
        print(f"error: invalid filter spec: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e.filename}: {e.strerror}", file=sys.stderr)
        return 2
    except PnmError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ShapeSpaceError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
