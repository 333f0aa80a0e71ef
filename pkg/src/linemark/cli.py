"""Command line entry points.

Subcommands: ingest, run, eval, ablate, bench, profile-hsv, serve.
Exit codes: 0 success, 1 validation problem (bad input, missing ROI,
unknown flag), 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from . import color, detect, geometry
from .config import load_pipeline_config
from .errors import LinemarkError
from .evaluate import (
    Cbem,
    build_cbem,
    evaluate_frames,
    load_labels_csv,
    load_outline,
    run_ablation,
    write_ablation_csv,
)
from .frames import load_roi, load_sequence
from .pipeline import measure_stage_timings, read_coords, run_sequence
from .synthetic import make_benchmark_mask
from .traversal import TraversalParams, benchmark_traversal, write_benchmark_csv
from .workspace import Workspace


class _Parser(argparse.ArgumentParser):
    # usage problems are validation errors: exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_triple(text: str) -> tuple[int, int, int]:
    parts = [int(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated integers")
    return tuple(parts)  # type: ignore[return-value]


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--hsv-lower", type=_int_triple, help="H,S,V lower bounds")
    parser.add_argument("--hsv-upper", type=_int_triple, help="H,S,V upper bounds")
    parser.add_argument("--threshold", type=int, help="presence threshold on the histogram peak")
    parser.add_argument("--seed-group-gap", type=int, help="column gap separating marking groups")
    parser.add_argument("--theta", type=int, help="traversal radius")
    parser.add_argument("--disk-mode", action="store_const", const=True, help="Euclidean-disk offsets")
    parser.add_argument("--interpolation", choices=["bilinear", "nearest"], help="warp sampling filter")
    parser.add_argument("--overlay-color", type=_int_triple, help="R,G,B annotation color")


def _config_from_args(args):
    overrides = {
        "hsv.lower": getattr(args, "hsv_lower", None),
        "hsv.upper": getattr(args, "hsv_upper", None),
        "detect.threshold": getattr(args, "threshold", None),
        "detect.seed_group_gap": getattr(args, "seed_group_gap", None),
        "traversal.theta": getattr(args, "theta", None),
        "traversal.disk_mode": getattr(args, "disk_mode", None),
        "geometry.interpolation": getattr(args, "interpolation", None),
        "pipeline.overlay_color": getattr(args, "overlay_color", None),
    }
    return load_pipeline_config(getattr(args, "config", None), overrides)


def _resolve_sequence(args):
    """``--seq`` is a frame directory or a workspace sequence id."""
    candidate = Path(args.seq)
    if candidate.is_dir():
        return load_sequence(candidate)
    if args.workspace:
        return Workspace(args.workspace).open_sequence(args.seq)
    raise LinemarkError(f"sequence '{args.seq}' is neither a directory nor a known id")


def _resolve_roi(args, seq):
    if args.roi:
        return load_roi(args.roi)
    if args.workspace:
        roi = Workspace(args.workspace).load_roi(seq.id)
        if roi is not None:
            return roi
    raise LinemarkError(
        f"no ROI for sequence '{seq.id}': pass --roi <file> or store one in the workspace"
    )


def cmd_ingest(args) -> int:
    entry = Workspace(args.workspace).register_sequence(args.dir, args.id)
    print(f"ingested '{entry.id}': {entry.frame_count} frames, {entry.width}x{entry.height}")
    return 0


def cmd_run(args) -> int:
    seq = _resolve_sequence(args)
    roi = _resolve_roi(args, seq)
    cfg = _config_from_args(args)
    summary = run_sequence(seq, roi, cfg, args.out)
    print(
        f"annotated {summary.frames_total} frames "
        f"({summary.frames_with_marking} with markings, {summary.frames_failed} failed) "
        f"-> {summary.out_dir}"
    )
    if args.timings:
        report = measure_stage_timings(seq, roi, cfg, repeats=args.timings)
        for stage, ms in report.stages.items():
            print(f"  {stage:32s} {ms:8.2f} ms")
        print(f"  {'total':32s} {report.total:8.2f} ms")
    return 0


def _load_cbem_dir(cbem_dir: Path) -> dict[int, Cbem]:
    cbems = {}
    for path in sorted(cbem_dir.glob("frame_*.png")):
        index = int(path.stem.split("_")[1])
        edges = np.asarray(Image.open(path).convert("L"), dtype=np.uint8)
        cbems[index] = Cbem(edges=np.where(edges >= 128, 255, 0).astype(np.uint8))
    return cbems


def _build_cbems(frames_dir: Path, outlines_dir: Path, save_dir: Path | None) -> dict[int, Cbem]:
    seq = load_sequence(frames_dir)
    cbems = {}
    for frame in seq:
        outline_path = outlines_dir / f"frame_{frame.index:06d}.json"
        if not outline_path.is_file():
            continue
        outline = load_outline(outline_path, frame.index)
        cbems[frame.index] = build_cbem(frame, outline)
        if save_dir is not None:
            save_dir.mkdir(parents=True, exist_ok=True)
            Image.fromarray(cbems[frame.index].edges).save(
                save_dir / f"frame_{frame.index:06d}.png"
            )
    return cbems


def cmd_eval(args) -> int:
    if args.cbem_dir:
        cbems = _load_cbem_dir(Path(args.cbem_dir))
    elif args.frames_dir and args.outlines_dir:
        cbems = _build_cbems(
            Path(args.frames_dir),
            Path(args.outlines_dir),
            Path(args.save_cbem_dir) if args.save_cbem_dir else None,
        )
    else:
        raise LinemarkError("pass --cbem-dir, or --frames-dir with --outlines-dir")
    if not cbems:
        raise LinemarkError("no reference edge maps found")

    items = []
    for index in sorted(cbems):
        coords_path = Path(args.coords_dir) / f"frame_{index:06d}.txt"
        if not coords_path.is_file():
            raise LinemarkError(f"missing coordinate file {coords_path}")
        items.append((index, cbems[index], read_coords(coords_path)))

    report = evaluate_frames(items, tolerance=args.tau)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_json_dict(), fh, indent=2)
            fh.write("\n")
    agg = report.aggregate_recall
    print(f"frames evaluated: {len(items)}")
    print(f"aggregate recall (tau={args.tau}): " + ("undefined" if agg is None else f"{agg:.5f}"))
    return 0


def cmd_ablate(args) -> int:
    seq = _resolve_sequence(args)
    roi = _resolve_roi(args, seq)
    cfg = _config_from_args(args)
    labels = load_labels_csv(args.labels)
    thresholds = [int(t) for t in args.thresholds.split(",")]
    report = run_ablation(seq, labels, roi, cfg, thresholds)
    if args.out:
        write_ablation_csv(report, args.out)
    for row in report.rows:
        fp = "undefined" if row.fp_percent is None else f"{row.fp_percent:.2f}%"
        print(f"  T={row.threshold:<6d} false positives: {fp}")
    print(f"  T_optimal = {report.t_optimal}")
    return 0


def cmd_bench(args) -> int:
    masks = [
        make_benchmark_mask(args.width, args.height, seed=s, band_half_width=args.band_half_width)
        for s in range(args.masks)
    ]
    params = TraversalParams(theta=args.theta, disk_mode=bool(args.disk_mode))
    report = benchmark_traversal(masks, params, runs=args.runs)
    if args.out:
        write_benchmark_csv(report, args.out)
    print(f"{'algorithm':<12s} {'complexity':<10s} {'median_ms':>10s} {'visits':>12s}")
    for row in report.rows:
        print(f"{row.algorithm:<12s} {row.complexity:<10s} {row.median_ms:>10.2f} {row.visits:>12d}")
    return 0


def cmd_profile_hsv(args) -> int:
    seq = _resolve_sequence(args)
    roi = _resolve_roi(args, seq)
    cfg = _config_from_args(args)
    rois, masks = [], []
    for frame in seq:
        warped = geometry.warp_roi(frame, roi, cfg.interpolation)
        normalized = color.normalize_hsv(color.rgb_to_hsv(warped.image))
        rois.append(normalized)
        masks.append(color.threshold_hsv(normalized, cfg.hsv_bounds))
    tables = detect.hsv_frequency_profile(rois, masks)
    detect.write_profile_csv(tables, args.out)
    print(f"profiled {len(rois)} frames -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.workspace, static_dir=args.static)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="linemark", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="register a frame directory in the workspace")
    p.add_argument("--dir", required=True)
    p.add_argument("--id", default=None)
    p.add_argument("--workspace", default="workspace")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("run", help="annotate a sequence")
    p.add_argument("--seq", required=True, help="frame directory or workspace sequence id")
    p.add_argument("--roi", help="ROI JSON file")
    p.add_argument("--out", required=True)
    p.add_argument("--workspace", default=None)
    p.add_argument("--timings", type=int, default=0, metavar="REPEATS",
                   help="also measure per-stage timings over N repeats")
    _add_config_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="score coordinate files against reference edge maps")
    p.add_argument("--cbem-dir", help="directory of frame_%%06d.png edge maps")
    p.add_argument("--frames-dir", help="build edge maps from these frames...")
    p.add_argument("--outlines-dir", help="...with these outline polygons")
    p.add_argument("--save-cbem-dir", help="write built edge maps here")
    p.add_argument("--coords-dir", required=True)
    p.add_argument("--tau", type=int, default=1, help="Chebyshev matching tolerance")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="sweep presence thresholds against labels")
    p.add_argument("--seq", required=True)
    p.add_argument("--roi", help="ROI JSON file")
    p.add_argument("--labels", required=True, help="CSV frame_index,has_marking")
    p.add_argument("--thresholds", default="0,75,150")
    p.add_argument("--out", help="write the CSV report here")
    p.add_argument("--workspace", default=None)
    _add_config_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("bench", help="compare the traversal against the raster scan")
    p.add_argument("--width", type=int, default=1920)
    p.add_argument("--height", type=int, default=1080)
    p.add_argument("--masks", type=int, default=3)
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--theta", type=int, default=3)
    p.add_argument("--disk-mode", action="store_const", const=True)
    p.add_argument("--band-half-width", type=float, default=6.0)
    p.add_argument("--out", help="write the CSV report here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("profile-hsv", help="frequency tables of masked HSV values")
    p.add_argument("--seq", required=True)
    p.add_argument("--roi", help="ROI JSON file")
    p.add_argument("--out", default="hsv_profile.csv")
    p.add_argument("--workspace", default=None)
    _add_config_flags(p)
    p.set_defaults(func=cmd_profile_hsv)

    p = sub.add_parser("serve", help="start the local review service")
    p.add_argument("--workspace", default="workspace")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", default=None, help="directory of UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except LinemarkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
