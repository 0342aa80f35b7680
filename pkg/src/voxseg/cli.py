"""Command-line entry point: the ``seg`` tool.

Subcommands: run (batch evaluation), compare (one mask pair), stats
(recompute summaries from a rows CSV), rasterize (contours -> mask), and
serve (HTTP workbench).  Failures print a machine-readable JSON error on
stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import VoxsegError
from .growcut import GrowCutParams


def _parse_triple(text: str, cast):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values: {text!r}")
    return tuple(cast(p) for p in parts)


def _cmd_run(args) -> int:
    from .pipeline import run_batch

    params = GrowCutParams(max_iterations=args.max_iters)
    report, timings = run_batch(
        args.manifest, args.out, params=params, workers=args.workers
    )
    print(f"wrote report for {len({r.case_id for r in report.rows})} cases to {args.out}")
    for t in timings:
        flag = "" if t.converged else " [did not converge]"
        print(
            f"  {t.case_id}: {t.total_seconds:.2f}s total, "
            f"{t.segment_seconds:.2f}s segmentation, {t.iterations} iterations{flag}"
        )
    return 0


def _cmd_compare(args) -> int:
    from .metrics import compare_masks
    from .nrrd_io import read_nrrd
    from .pipeline import PairRow, rows_to_csv

    a = read_nrrd(args.a)
    b = read_nrrd(args.b)
    metrics = compare_masks(a, b)
    if args.json:
        print(
            json.dumps(
                {
                    "dsc": metrics.dsc,
                    "hd": metrics.hd,
                    "volume_a_mm3": metrics.volume_a_mm3,
                    "volume_b_mm3": metrics.volume_b_mm3,
                    "voxels_a": metrics.voxels_a,
                    "voxels_b": metrics.voxels_b,
                }
            )
        )
    else:
        row = PairRow(case_id="-", a=Path(args.a).stem, b=Path(args.b).stem, metrics=metrics)
        print(rows_to_csv([row]), end="")
    return 0


def _cmd_stats(args) -> int:
    from .pipeline import aggregate, emit, rows_from_csv, summary_to_csv

    rows = rows_from_csv(Path(args.rows).read_text())
    report = aggregate(rows)
    if args.out:
        emit(report, args.out)
        print(f"wrote summaries to {args.out}")
    else:
        print(summary_to_csv(report), end="")
    return 0


def _cmd_rasterize(args) -> int:
    from .contours import contours_from_json, stack_to_mask
    from .nrrd_io import write_nrrd_file

    stack = contours_from_json(Path(args.contours).read_text())
    mask = stack_to_mask(stack, args.dims, args.spacing)
    write_nrrd_file(mask, args.out)
    print(f"wrote mask with {mask.foreground_count()} foreground voxels to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    data_dir = args.data_dir or os.environ.get("SEG_DATA_DIR")
    if not data_dir:
        raise VoxsegError("no data directory: pass --data-dir or set SEG_DATA_DIR")
    app = create_app(Path(data_dir), ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a batch manifest and emit reports")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-iters", type=int, default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare", help="print metrics for one mask pair")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--json", action="store_true", help="print a JSON object instead of CSV")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("stats", help="recompute summaries from a cases_pairwise.csv")
    p.add_argument("--rows", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("rasterize", help="rasterize contour JSON into a mask NRRD")
    p.add_argument("--contours", required=True)
    p.add_argument("--dims", required=True, type=lambda t: _parse_triple(t, int))
    p.add_argument("--spacing", required=True, type=lambda t: _parse_triple(t, float))
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rasterize)

    p = sub.add_parser("serve", help="serve the HTTP workbench")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=None)
    p.add_argument("--ui-dir", default=None, help="serve a built frontend at /ui")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VoxsegError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
