"""Command-line front end: `plotgen render --spec figure.json`."""

from __future__ import annotations

import argparse
import sys

from .figures import ChecksumMismatchError, FigureSpecError, load_spec, render

EXIT_OK = 0
EXIT_SPEC = 2


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotgen",
        description="Render simulator figure datasets to SVG and PNG.")
    sub = parser.add_subparsers(dest="command", required=True)
    render_cmd = sub.add_parser("render", help="render one figure spec")
    render_cmd.add_argument("--spec", required=True,
                            help="JSON figure spec (kind, csv, manifest, out)")
    args = parser.parse_args(argv)

    try:
        spec = load_spec(args.spec)
        svg, png = render(spec)
    except (FigureSpecError, ChecksumMismatchError) as exc:
        print(f"plotgen: {exc}", file=sys.stderr)
        return EXIT_SPEC
    print(f"wrote {svg}")
    print(f"wrote {png}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
