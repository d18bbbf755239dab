"""Command line entry: ``plotkit render --template <id> --in <csv> --out <image>``."""

import argparse
import sys

from .errors import ValidationError
from .figures import TEMPLATES, FigureJob, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="Render rate-sweep CSV tables as vector figures.")
    sub = parser.add_subparsers(dest="command", required=True)
    cmd = sub.add_parser("render", help="render one CSV with a figure template")
    cmd.add_argument("--template", required=True, choices=sorted(TEMPLATES),
                     help="figure template id")
    cmd.add_argument("--in", dest="input_csv", required=True, metavar="CSV",
                     help="input CSV written by the rates/sim tools")
    cmd.add_argument("--out", required=True, metavar="IMAGE",
                     help="output image path (.svg or .pdf)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        out = render(FigureJob(args.input_csv, args.template, args.out))
    except ValidationError as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
