"""Script entry point: render one figure from CSV inputs."""

import argparse
import sys

from .io import SchemaError
from .plots import KINDS, PlotDataError, PlotSpec, plot_trajectory3d, \
    plot_tsw_sweep


def build_parser():
    p = argparse.ArgumentParser(
        prog="gameplots",
        description="Render simulator CSV outputs as static figures.")
    p.add_argument("--in", dest="inputs", action="append", required=True,
                   metavar="CSV", help="input CSV (repeatable)")
    p.add_argument("--out", required=True, help="output image path "
                   "(format from extension, e.g. .png or .svg)")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--title", default=None)
    p.add_argument("--tsw", action="append", type=float, default=[],
                   metavar="VALUE",
                   help="TSW annotation for the title (repeatable)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    spec = PlotSpec(inputs=tuple(args.inputs), kind=args.kind,
                    output=args.out, title=args.title,
                    annotations=tuple(args.tsw))
    try:
        if spec.kind == "trajectory3d":
            plot_trajectory3d(spec)
        else:
            plot_tsw_sweep(spec)
    except (SchemaError, PlotDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
