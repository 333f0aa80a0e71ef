"""Per-frame orchestration: warp, normalize, threshold, detect, traverse,
unwarp, annotate. One ROI, defined on the initial frame, drives the whole
sequence. Emits red-overlay images, coordinate text files, and a per-stage
timing report.
"""

from __future__ import annotations

import json
import logging
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from . import color, detect, geometry, traversal
from .color import HsvBounds
from .errors import StageError
from .frames import Frame, FrameSequence, Roi, require_valid_roi
from .traversal import TraversalParams

logger = logging.getLogger("linemark")

# The six timing stages, in execution order; "projection_remapping" covers
# the unwarp plus overlay write-back.
STAGE_NAMES = (
    "perspective_transformation",
    "color_feature_normalization",
    "hsv_thresholding",
    "histogram_analysis",
    "circledat",
    "projection_remapping",
)

DEFAULT_OVERLAY_COLOR = (255, 0, 0)


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable knobs of the annotation pipeline.

    Defaults are the production values: HSV bounds (0,70,170)..(255,255,255),
    presence threshold 150, traversal radius 3.
    """

    hsv_bounds: HsvBounds = field(default_factory=HsvBounds)
    detect_threshold: int = detect.DEFAULT_PRESENCE_THRESHOLD
    seed_group_gap: int = detect.DEFAULT_SEED_GROUP_GAP
    traversal: TraversalParams = field(default_factory=TraversalParams)
    interpolation: str = "bilinear"
    overlay_color: tuple[int, int, int] = DEFAULT_OVERLAY_COLOR

    def to_json_dict(self) -> dict:
        return {
            "hsv": {"lower": list(self.hsv_bounds.lower), "upper": list(self.hsv_bounds.upper)},
            "detect": {"threshold": self.detect_threshold, "seed_group_gap": self.seed_group_gap},
            "traversal": {"theta": self.traversal.theta, "disk_mode": self.traversal.disk_mode},
            "geometry": {"interpolation": self.interpolation},
            "pipeline": {"overlay_color": list(self.overlay_color)},
        }


@dataclass(frozen=True)
class AnnotationRecord:
    """Marking pixels of one frame in original-frame coordinates."""

    frame_index: int
    present: bool
    pixels: np.ndarray  # (N, 2) int64 of (x, y), sorted by (y, x)
    seed_count: int


@dataclass(frozen=True)
class TimingReport:
    """Median per-stage latencies in milliseconds; total is their sum."""

    stages: dict[str, float]
    total: float

    @classmethod
    def from_samples(cls, samples: dict[str, list[float]]) -> "TimingReport":
        medians = {
            name: (statistics.median(samples[name]) * 1000.0 if samples[name] else 0.0)
            for name in STAGE_NAMES
        }
        return cls(stages=medians, total=sum(medians.values()))

    def to_json_dict(self) -> dict:
        out = {name: self.stages[name] for name in STAGE_NAMES}
        out["total"] = self.total
        return out


def _empty_record(index: int) -> AnnotationRecord:
    return AnnotationRecord(
        frame_index=index,
        present=False,
        pixels=np.empty((0, 2), dtype=np.int64),
        seed_count=0,
    )


def annotate_frame(
    frame: Frame,
    roi: Roi,
    cfg: PipelineConfig = PipelineConfig(),
) -> tuple[AnnotationRecord, np.ndarray, dict[str, float]]:
    """Run the full stage chain on one frame.

    Returns the annotation record, the overlay image (frame copy with
    marking pixels painted in the overlay color; untouched copy when no
    marking is present), and per-stage wall times in seconds. Stage
    failures re-raise with the stage name attached.
    """
    times = dict.fromkeys(STAGE_NAMES, 0.0)

    def run(stage: str, fn, *args):
        t0 = time.perf_counter()
        try:
            result = fn(*args)
        except Exception as exc:
            raise StageError(stage, exc) from exc
        times[stage] += time.perf_counter() - t0
        return result

    warped = run("perspective_transformation", geometry.warp_roi, frame, roi, cfg.interpolation)
    normalized = run(
        "color_feature_normalization",
        lambda img: color.normalize_hsv(color.rgb_to_hsv(img)),
        warped.image,
    )
    mask = run("hsv_thresholding", color.threshold_hsv, normalized, cfg.hsv_bounds)

    def analyze(m):
        hist = detect.vertical_histogram(m)
        decision = detect.decide_presence(hist, cfg.detect_threshold)
        if not decision.present:
            return decision, detect.SeedSet(seeds=[])
        return decision, detect.extract_seeds(m, decision, cfg.seed_group_gap)

    decision, seeds = run("histogram_analysis", analyze, mask)

    if not decision.present:
        return _empty_record(frame.index), frame.data.copy(), times

    collected = run("circledat", traversal.circledat_multi, mask, seeds, cfg.traversal)

    def remap(pixel_set):
        marked = np.zeros_like(mask)
        if pixel_set.pixels:
            arr = np.asarray(pixel_set.pixels, dtype=np.int64)
            marked[arr[:, 1], arr[:, 0]] = 255
        pixels = geometry.unwarp_mask(marked, roi, (frame.width, frame.height))
        overlay = frame.data.copy()
        if len(pixels):
            overlay[pixels[:, 1], pixels[:, 0]] = cfg.overlay_color
        return pixels, overlay

    pixels, overlay = run("projection_remapping", remap, collected)

    record = AnnotationRecord(
        frame_index=frame.index,
        present=True,
        pixels=pixels,
        seed_count=len(seeds.seeds),
    )
    return record, overlay, times


def write_coords(path: Path, pixels: np.ndarray) -> None:
    """Write one ``x y`` pair per line, sorted by (y, x); empty file when none."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for x, y in pixels:
            fh.write(f"{x} {y}\n")


def read_coords(path: Path) -> np.ndarray:
    """Inverse of :func:`write_coords`; returns an (N, 2) int64 array."""
    pixels = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                x, y = line.split()
                pixels.append((int(x), int(y)))
    if not pixels:
        return np.empty((0, 2), dtype=np.int64)
    return np.asarray(pixels, dtype=np.int64)


@dataclass(frozen=True)
class RunSummary:
    sequence_id: str
    frames_total: int
    frames_with_marking: int
    frames_failed: int
    timing: TimingReport
    out_dir: Path

    def to_json_dict(self, cfg: PipelineConfig) -> dict:
        return {
            "sequence_id": self.sequence_id,
            "frames_total": self.frames_total,
            "frames_with_marking": self.frames_with_marking,
            "frames_failed": self.frames_failed,
            "timing": self.timing.to_json_dict(),
            "config": cfg.to_json_dict(),
        }


def run_sequence(
    seq: FrameSequence,
    roi: Roi,
    cfg: PipelineConfig,
    out_root: str | Path,
    progress=None,
) -> RunSummary:
    """Annotate every frame of a sequence with the one shared ROI.

    Writes ``overlays/frame_%06d.png``, ``coords/frame_%06d.txt`` and a
    final ``summary.json`` under ``<out_root>/<sequence id>/``. A frame
    that fails is logged and skipped; the run continues.
    """
    require_valid_roi(roi, seq.dims)
    out_dir = Path(out_root) / seq.id
    overlays_dir = out_dir / "overlays"
    coords_dir = out_dir / "coords"
    overlays_dir.mkdir(parents=True, exist_ok=True)
    coords_dir.mkdir(parents=True, exist_ok=True)

    samples: dict[str, list[float]] = {name: [] for name in STAGE_NAMES}
    with_marking = 0
    failed = 0
    for index in range(seq.frame_count):
        try:
            frame = seq.frame(index)
            record, overlay, times = annotate_frame(frame, roi, cfg)
            name = f"frame_{index:06d}"
            Image.fromarray(overlay).save(overlays_dir / f"{name}.png")
            write_coords(coords_dir / f"{name}.txt", record.pixels)
            for stage, seconds in times.items():
                samples[stage].append(seconds)
            if record.present:
                with_marking += 1
        except Exception:
            logger.exception("frame %d failed; continuing", index)
            failed += 1
        if progress is not None:
            progress(index + 1, seq.frame_count)

    summary = RunSummary(
        sequence_id=seq.id,
        frames_total=seq.frame_count,
        frames_with_marking=with_marking,
        frames_failed=failed,
        timing=TimingReport.from_samples(samples),
        out_dir=out_dir,
    )
    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary.to_json_dict(cfg), fh, indent=2)
        fh.write("\n")
    return summary


def measure_stage_timings(
    seq: FrameSequence,
    roi: Roi,
    cfg: PipelineConfig,
    repeats: int = 1,
) -> TimingReport:
    """Median per-stage wall time across all frames times ``repeats``.

    Pure measurement: nothing is written. Absolute numbers are hardware
    bound; only the report structure is contractual.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    require_valid_roi(roi, seq.dims)
    samples: dict[str, list[float]] = {name: [] for name in STAGE_NAMES}
    for _ in range(repeats):
        for frame in seq:
            _, _, times = annotate_frame(frame, roi, cfg)
            for stage, seconds in times.items():
                samples[stage].append(seconds)
    return TimingReport.from_samples(samples)
