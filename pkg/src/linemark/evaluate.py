"""Reference edge maps (CBEM), recall evaluation, and the threshold ablation.

A CBEM is built from a manually outlined contour region: the frame is
masked to the polygon, converted to grayscale, Gaussian-blurred, and run
through a Canny stage (Sobel gradients, 4-sector non-maximum suppression,
median-derived double thresholds, 8-connected hysteresis). Detection rate
is recall over CBEM edge pixels within a Chebyshev matching tolerance.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw
from scipy import ndimage

from . import color, detect, geometry
from .errors import OutlineError
from .frames import Frame, FrameSequence, Roi

DEFAULT_SIGMA_COEFF = 0.33
DEFAULT_MATCH_TOLERANCE = 1

_GAUSS_SIGMA = 1.4
_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


@dataclass(frozen=True)
class ContourOutline:
    """Manually outlined polygon delimiting the marking region of one frame."""

    frame_index: int
    polygon: np.ndarray  # (N, 2) float64 of (x, y) vertices

    def __post_init__(self):
        poly = np.asarray(self.polygon, dtype=np.float64)
        if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 3:
            raise OutlineError("outline polygon needs at least 3 (x, y) vertices")
        object.__setattr__(self, "polygon", poly)


@dataclass(frozen=True)
class Cbem:
    """Binary edge map, nonzero only inside the outlined region."""

    edges: np.ndarray  # (H, W) uint8, values in {0, 255}

    @property
    def edge_points(self) -> np.ndarray:
        ys, xs = np.nonzero(self.edges == 255)
        return np.column_stack([xs, ys])


def _polygon_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _segments_cross(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) < 1e-12 else (1 if v > 0 else -1)

    return (
        orient(p1, p2, p3) * orient(p1, p2, p4) < 0
        and orient(p3, p4, p1) * orient(p3, p4, p2) < 0
    )


def validate_outline(outline: ContourOutline, dims: tuple[int, int]) -> None:
    """Reject degenerate, out-of-bounds, tiny, or self-intersecting polygons."""
    poly = outline.polygon
    width, height = dims
    if not np.all(np.isfinite(poly)):
        raise OutlineError("outline vertices must be finite")
    if np.any(poly[:, 0] < 0) or np.any(poly[:, 0] > width - 1) or np.any(
        poly[:, 1] < 0
    ) or np.any(poly[:, 1] > height - 1):
        raise OutlineError("outline vertex out of frame bounds")
    if _polygon_area(poly) < 9:
        raise OutlineError("outline polygon area is below 9 px")
    n = len(poly)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(i - j) in (0, 1) or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex, not a crossing
            if _segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]):
                raise OutlineError("outline polygon is self-intersecting")


def polygon_mask(polygon: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    """Rasterize the polygon interior as a boolean (H, W) mask."""
    width, height = dims
    img = Image.new("L", (width, height), 0)
    ImageDraw.Draw(img).polygon([(float(x), float(y)) for x, y in polygon], fill=1)
    return np.asarray(img, dtype=bool)


def gaussian_kernel(size: int = 5, sigma: float = _GAUSS_SIGMA) -> np.ndarray:
    half = size // 2
    ax = np.arange(-half, half + 1, dtype=np.float64)
    xx, yy = np.meshgrid(ax, ax)
    k = np.exp(-(xx**2 + yy**2) / (2.0 * sigma**2))
    return k / k.sum()


def auto_canny_thresholds(v: float, sigma_coeff: float = DEFAULT_SIGMA_COEFF) -> tuple[int, int]:
    """Hysteresis thresholds from the median intensity v.

    lower = max(0, (1 - sigma) * v), upper = min(255, (1 + sigma) * v),
    both truncated toward zero to integers.
    """
    lower = max(0, int((1.0 - sigma_coeff) * v))
    upper = min(255, int((1.0 + sigma_coeff) * v))
    return lower, upper


def _nms(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Thin the gradient magnitude to single-pixel ridges.

    The gradient angle is quantized to four axes. Along the signed (uphill)
    gradient direction the comparison is strict ahead and non-strict behind,
    so a two-pixel tie across an ideal step keeps the brighter-side pixel.
    Magnitudes are rounded before comparison: the twin peaks of an ideal
    step are analytically equal and must not be split by float noise.
    """
    mag = np.round(mag, 6)
    height, width = mag.shape
    padded = np.zeros((height + 2, width + 2), dtype=mag.dtype)
    padded[1:-1, 1:-1] = mag

    def shifted(dx: int, dy: int) -> np.ndarray:
        return padded[1 + dy : 1 + dy + height, 1 + dx : 1 + dx + width]

    angle = np.degrees(np.arctan2(gy, gx)) % 180.0
    sector0 = (angle < 22.5) | (angle >= 157.5)  # horizontal gradient axis
    sector45 = (angle >= 22.5) & (angle < 67.5)
    sector90 = (angle >= 67.5) & (angle < 112.5)
    sector135 = (angle >= 112.5) & (angle < 157.5)

    keep = np.zeros_like(mag, dtype=bool)
    for sector, (dx, dy) in (
        (sector0, (1, 0)),
        (sector45, (1, 1)),
        (sector90, (0, 1)),
        (sector135, (-1, 1)),
    ):
        plus = shifted(dx, dy)
        minus = shifted(-dx, -dy)
        uphill_plus = (gx * dx + gy * dy) >= 0
        ahead = np.where(uphill_plus, plus, minus)
        behind = np.where(uphill_plus, minus, plus)
        keep |= sector & (mag > ahead) & (mag >= behind)
    return keep & (mag > 0)


def build_cbem(
    frame: Frame | np.ndarray,
    outline: ContourOutline,
    sigma_coeff: float = DEFAULT_SIGMA_COEFF,
) -> Cbem:
    """Construct the reference edge map inside a manually outlined region."""
    data = frame.data if isinstance(frame, Frame) else np.asarray(frame)
    height, width = data.shape[:2]
    validate_outline(outline, (width, height))

    region = polygon_mask(outline.polygon, (width, height))
    if int(region.sum()) < 9:
        raise OutlineError("outline polygon covers fewer than 9 pixels")

    luma = (
        0.299 * data[..., 0].astype(np.float64)
        + 0.587 * data[..., 1].astype(np.float64)
        + 0.114 * data[..., 2].astype(np.float64)
    )
    gray = np.floor(luma + 0.5)

    # Gradients come from the unmasked grayscale: the polygon selects which
    # pixels may be edges, it must not itself read as a step edge.
    # correlate, not convolve: the Sobel kernels are antisymmetric and the
    # gradient sign steers the tie-break in the suppression step.
    blurred = ndimage.correlate(gray, gaussian_kernel(), mode="nearest")
    gx = ndimage.correlate(blurred, _SOBEL_X, mode="nearest")
    gy = ndimage.correlate(blurred, _SOBEL_Y, mode="nearest")
    mag = np.hypot(gx, gy)
    thinned = _nms(mag, gx, gy)

    v = float(np.median(gray[region]))
    lower, upper = auto_canny_thresholds(v, sigma_coeff)
    strong = thinned & (mag > upper) & region
    weak = thinned & (mag > lower) & region
    linked = ndimage.binary_propagation(strong, structure=np.ones((3, 3), dtype=bool), mask=weak)

    edges = np.where(linked, 255, 0).astype(np.uint8)
    return Cbem(edges=edges)


@dataclass(frozen=True)
class FrameEval:
    frame_index: int
    tp: int
    fn: int
    recall: float | None  # None when CBEM is empty but the annotation is not


@dataclass(frozen=True)
class EvalReport:
    frames: tuple[FrameEval, ...]
    tolerance: int

    @property
    def aggregate_recall(self) -> float | None:
        tp = sum(f.tp for f in self.frames)
        fn = sum(f.fn for f in self.frames)
        if tp + fn == 0:
            return None
        return tp / (tp + fn)

    def to_json_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "aggregate_recall": self.aggregate_recall,
            "frames": [
                {"frame_index": f.frame_index, "tp": f.tp, "fn": f.fn, "recall": f.recall}
                for f in self.frames
            ],
        }


def detection_rate(tp: int, fn: int) -> float:
    """Recall: the fraction of reference pixels that were identified."""
    if tp + fn == 0:
        raise ZeroDivisionError("detection rate undefined for TP + FN = 0")
    return tp / (tp + fn)


def evaluate_frame(
    cbem: Cbem,
    annotated_pixels: np.ndarray,
    tolerance: int = DEFAULT_MATCH_TOLERANCE,
    frame_index: int = 0,
) -> FrameEval:
    """Compare one frame's annotation against its reference edge map.

    A CBEM edge pixel is a true positive when some annotated pixel lies
    within Chebyshev distance ``tolerance`` (0 means exact match), otherwise
    a false negative. An empty CBEM scores recall 1.0 against an empty
    annotation and is undefined (None) against a non-empty one.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    height, width = cbem.edges.shape
    edges = cbem.edges == 255
    edge_total = int(edges.sum())
    pixels = np.asarray(annotated_pixels, dtype=np.int64).reshape(-1, 2)

    if edge_total == 0:
        recall = 1.0 if len(pixels) == 0 else None
        return FrameEval(frame_index=frame_index, tp=0, fn=0, recall=recall)
    if len(pixels) == 0:
        return FrameEval(frame_index=frame_index, tp=0, fn=edge_total, recall=0.0)

    occupancy = np.zeros((height, width), dtype=bool)
    inside = (
        (pixels[:, 0] >= 0)
        & (pixels[:, 0] < width)
        & (pixels[:, 1] >= 0)
        & (pixels[:, 1] < height)
    )
    kept = pixels[inside]
    occupancy[kept[:, 1], kept[:, 0]] = True
    if tolerance > 0:
        size = 2 * tolerance + 1
        occupancy = ndimage.binary_dilation(occupancy, structure=np.ones((size, size), dtype=bool))

    tp = int((edges & occupancy).sum())
    fn = edge_total - tp
    return FrameEval(frame_index=frame_index, tp=tp, fn=fn, recall=detection_rate(tp, fn))


def evaluate_frames(
    items: list[tuple[int, Cbem, np.ndarray]],
    tolerance: int = DEFAULT_MATCH_TOLERANCE,
) -> EvalReport:
    """Evaluate (frame_index, cbem, annotated_pixels) triples into a report."""
    frames = tuple(
        evaluate_frame(cbem, pixels, tolerance=tolerance, frame_index=idx)
        for idx, cbem, pixels in items
    )
    return EvalReport(frames=frames, tolerance=tolerance)


@dataclass(frozen=True)
class AblationRow:
    threshold: int
    fp_percent: float | None
    tp_percent: float | None


@dataclass(frozen=True)
class AblationReport:
    rows: tuple[AblationRow, ...]
    t_optimal: int | None

    def fp_percent(self, threshold: int) -> float | None:
        for row in self.rows:
            if row.threshold == threshold:
                return row.fp_percent
        raise KeyError(threshold)


def ablation_from_peaks(
    peaks: list[int],
    labels: list[bool],
    thresholds: list[int],
) -> AblationReport:
    """Score presence thresholds against human marking/no-marking labels.

    For each threshold T the false positive rate is the percentage of
    no-marking frames flagged present (strict peak > 0 at T = 0, else
    peak >= T). T_optimal minimizes FP% - TP%; with no no-marking frames
    the FP rate is undefined and reported as None.
    """
    if len(peaks) != len(labels):
        raise ValueError("need one label per frame peak")
    if not thresholds:
        raise ValueError("need at least one threshold")
    if len(set(thresholds)) != len(thresholds):
        raise ValueError("thresholds must be distinct")

    n_pos = sum(1 for has in labels if has)
    n_neg = len(labels) - n_pos

    rows = []
    best: tuple[float, int] | None = None
    for t in thresholds:
        flagged = [(p > 0 if t == 0 else p >= t) for p in peaks]
        fp = sum(1 for f, has in zip(flagged, labels) if f and not has)
        tp = sum(1 for f, has in zip(flagged, labels) if f and has)
        fp_pct = (100.0 * fp / n_neg) if n_neg else None
        tp_pct = (100.0 * tp / n_pos) if n_pos else None
        rows.append(AblationRow(threshold=t, fp_percent=fp_pct, tp_percent=tp_pct))
        if fp_pct is not None:
            objective = fp_pct - (tp_pct if tp_pct is not None else 0.0)
            if best is None or objective < best[0]:
                best = (objective, t)

    return AblationReport(rows=tuple(rows), t_optimal=best[1] if best else None)


def marking_peak(frame, roi: Roi, cfg) -> int:
    """Histogram peak of one frame after warp, normalization, thresholding."""
    warped = geometry.warp_roi(frame, roi, cfg.interpolation)
    normalized = color.normalize_hsv(color.rgb_to_hsv(warped.image))
    mask = color.threshold_hsv(normalized, cfg.hsv_bounds)
    hist = detect.vertical_histogram(mask)
    return int(hist.counts.max()) if hist.counts.size else 0


def run_ablation(
    seq: FrameSequence,
    labels: dict[int, bool],
    roi: Roi,
    cfg,
    thresholds: list[int],
) -> AblationReport:
    """Sweep presence thresholds over a human-labeled frame set.

    ``labels`` maps frame index to has-marking. Peaks are computed once per
    frame; every threshold is then scored against the labels.
    """
    peaks: list[int] = []
    flat_labels: list[bool] = []
    for frame in seq:
        if frame.index not in labels:
            raise ValueError(f"no label for frame {frame.index}")
        peaks.append(marking_peak(frame, roi, cfg))
        flat_labels.append(bool(labels[frame.index]))
    return ablation_from_peaks(peaks, flat_labels, thresholds)


def load_labels_csv(path: str | Path) -> dict[int, bool]:
    """Read a ``frame_index,has_marking`` CSV into a label map."""
    labels: dict[int, bool] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            labels[int(row["frame_index"])] = bool(int(row["has_marking"]))
    return labels


def write_ablation_csv(report: AblationReport, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "fp_percent"])
        for row in report.rows:
            fp = "undefined" if row.fp_percent is None else f"{row.fp_percent:.4f}"
            writer.writerow([row.threshold, fp])
        writer.writerow(["t_optimal", "" if report.t_optimal is None else report.t_optimal])


def load_outline(path: str | Path, frame_index: int) -> ContourOutline:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return ContourOutline(frame_index=frame_index, polygon=np.asarray(obj["polygon"], dtype=np.float64))


def save_outline(outline: ContourOutline, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"polygon": [[float(x), float(y)] for x, y in outline.polygon]}, fh)
        fh.write("\n")
