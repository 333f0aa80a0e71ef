"""Synthetic scenes with exact ground truth for tests, demos, and tuning.

Markings are designed in the rectified ground plane as thick bands around
centerline polylines (straight, curved, and a three-way junction), then
projected into frame space through the same ROI homography the pipeline
inverts. Because frame pixels are classified by the identical band
membership function used for rendering, the generator knows the exact
marking pixel set of every frame. Each frame also carries a tight outline
polygon around its marking for reference edge-map construction.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from .evaluate import ContourOutline, save_outline
from .frames import Roi, make_roi, save_roi
from .geometry import invert_homography, map_points, roi_homography

DEFAULT_FRAME_DIMS = (640, 480)
DEFAULT_ROI_SRC = ((100.0, 200.0), (540.0, 200.0), (620.0, 470.0), (20.0, 470.0))
# 1.5x the trapezoid's native pixel density: oversampling the bird's-eye view
# keeps thresholded marking borders within one source pixel of the truth.
DEFAULT_DST_DIMS = (900, 423)

MARKING_KINDS = ("straight", "curve", "junction")

_BG_BASE = np.array([48, 50, 46], dtype=np.int16)
_MARKING_BASE = np.array([250, 240, 160], dtype=np.int16)
_GLARE_BASE = np.array([246, 236, 168], dtype=np.int16)

_BAND_HALF_WIDTH = 10.0
_OUTLINE_MARGIN = 6.0
_GROUND_INSET = 60.0


def default_roi() -> Roi:
    return make_roi(DEFAULT_ROI_SRC, *DEFAULT_DST_DIMS)


def _sample_polyline(points: np.ndarray, step: float = 0.5) -> np.ndarray:
    """Resample a polyline at roughly uniform arc-length spacing."""
    out = [points[0]]
    for a, b in zip(points[:-1], points[1:]):
        seg = b - a
        length = float(np.hypot(*seg))
        n = max(1, int(np.ceil(length / step)))
        for t in np.linspace(0.0, 1.0, n + 1)[1:]:
            out.append(a + t * seg)
    return np.asarray(out)


def _bezier(p0, p1, p2, n: int = 80) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)[:, None]
    p0, p1, p2 = (np.asarray(p, dtype=np.float64) for p in (p0, p1, p2))
    return (1 - t) ** 2 * p0 + 2 * t * (1 - t) * p1 + t**2 * p2


def _band_raster(centerlines: list[np.ndarray], dims: tuple[int, int], half_width: float) -> np.ndarray:
    """Boolean raster of points within ``half_width`` of any centerline."""
    width, height = dims
    seed = np.ones((height, width), dtype=bool)
    for line in centerlines:
        pts = _sample_polyline(line)
        xs = np.clip(np.floor(pts[:, 0] + 0.5).astype(np.intp), 0, width - 1)
        ys = np.clip(np.floor(pts[:, 1] + 0.5).astype(np.intp), 0, height - 1)
        seed[ys, xs] = False
    dist = ndimage.distance_transform_edt(seed)
    return dist <= half_width


def _offset_outline(centerline: np.ndarray, radius: float) -> np.ndarray:
    """Band outline polygon: left offsets out, right offsets back.

    Ends are extended by the full radius so the band's rounded caps stay
    inside the flat-capped polygon.
    """
    pts = _sample_polyline(np.asarray(centerline, dtype=np.float64), step=6.0)
    t0 = pts[1] - pts[0]
    t1 = pts[-1] - pts[-2]
    t0 /= np.linalg.norm(t0)
    t1 /= np.linalg.norm(t1)
    pts = np.vstack([pts[0] - radius * t0, pts, pts[-1] + radius * t1])

    tangents = np.empty_like(pts)
    tangents[1:-1] = pts[2:] - pts[:-2]
    tangents[0] = pts[1] - pts[0]
    tangents[-1] = pts[-1] - pts[-2]
    tangents /= np.linalg.norm(tangents, axis=1, keepdims=True)
    normals = np.column_stack([-tangents[:, 1], tangents[:, 0]])

    left = pts + radius * normals
    right = pts - radius * normals
    return np.vstack([left, right[::-1]])


def _intersect_lines(a0, d0, a1, d1) -> np.ndarray:
    mat = np.column_stack([d0, -d1])
    rhs = np.asarray(a1, dtype=np.float64) - np.asarray(a0, dtype=np.float64)
    t, _ = np.linalg.solve(mat, rhs)
    return np.asarray(a0, dtype=np.float64) + t * np.asarray(d0, dtype=np.float64)


def _junction_outline(center: np.ndarray, ends: list[np.ndarray], radius: float) -> np.ndarray:
    """Simple 9-gon hugging a three-armed junction."""
    dirs = [(e - center) / np.linalg.norm(e - center) for e in ends]
    order = np.argsort([np.arctan2(d[1], d[0]) for d in dirs])
    dirs = [dirs[k] for k in order]
    ends = [np.asarray(ends[k], dtype=np.float64) + radius * dirs[i] for i, k in enumerate(order)]
    normals = [np.array([-d[1], d[0]]) for d in dirs]

    wedges = []
    for k in range(3):
        nk = (k + 1) % 3
        wedges.append(
            _intersect_lines(center + radius * normals[k], dirs[k], center - radius * normals[nk], dirs[nk])
        )
    poly = []
    for k in range(3):
        poly.append(wedges[(k - 1) % 3])
        poly.append(ends[k] - radius * normals[k])
        poly.append(ends[k] + radius * normals[k])
    return np.asarray(poly)


@dataclass(frozen=True)
class SyntheticFrame:
    """One rendered frame plus everything the generator knows about it."""

    data: np.ndarray  # (H, W, 3) uint8
    marking_pixels: np.ndarray  # (H, W) bool ground-truth raster in frame space
    outline: ContourOutline | None  # tight polygon around the marking, frame space
    has_marking: bool
    ground_peak: int  # peak column count of the ground-plane band raster


def _marking_geometry(kind: str, rng: np.random.Generator, dims: tuple[int, int]):
    """Centerlines (ground space) plus the outline builder for one marking."""
    gw, gh = dims
    inset = _GROUND_INSET
    if kind == "straight":
        xb = rng.uniform(inset + 80, gw - inset - 80)
        drift = rng.uniform(-35, 35)
        line = np.array([[xb, gh - inset], [xb + drift, inset]])
        return [line], lambda r: _offset_outline(line, r)
    if kind == "curve":
        xb = rng.uniform(inset + 120, gw - inset - 120)
        lateral = rng.uniform(-90, 90)
        mid_y = gh * 0.45
        curve = _bezier([xb, mid_y], [xb, mid_y * 0.55], [xb + lateral, inset])
        line = np.vstack([[[xb, gh - inset]], curve])
        return [line], lambda r: _offset_outline(line, r)
    if kind == "junction":
        cx = rng.uniform(inset + 180, gw - inset - 180)
        cy = gh * 0.55 + rng.uniform(-20, 20)
        center = np.array([cx, cy])
        up = np.array([cx + rng.uniform(-10, 10), inset])
        spread = np.radians(rng.uniform(50, 66))
        length = min(gh - inset - cy, 170.0)
        ends = [up]
        for sign in (-1.0, 1.0):
            d = np.array([np.sin(spread) * sign, np.cos(spread)])
            ends.append(center + d * length)
        lines = [np.array([center, e]) for e in ends]
        return lines, lambda r: _junction_outline(center, ends, r)
    raise ValueError(f"unknown marking kind {kind!r}")


def _frame_membership(band: np.ndarray, roi: Roi, dims: tuple[int, int]) -> np.ndarray:
    """Frame pixels whose ground-plane position falls inside the band."""
    width, height = dims
    gh, gw = band.shape
    to_ground = invert_homography(roi_homography(roi))

    xs = np.clip(roi.src[:, 0], 0, width - 1)
    ys = np.clip(roi.src[:, 1], 0, height - 1)
    x0, x1 = int(np.floor(xs.min())), int(np.ceil(xs.max()))
    y0, y1 = int(np.floor(ys.min())), int(np.ceil(ys.max()))

    grid_x, grid_y = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1))
    pts = np.column_stack([grid_x.ravel(), grid_y.ravel()]).astype(np.float64)
    mapped = map_points(to_ground, pts)
    gx = np.floor(mapped[:, 0] + 0.5).astype(np.intp)
    gy = np.floor(mapped[:, 1] + 0.5).astype(np.intp)
    inside = (gx >= 0) & (gx < gw) & (gy >= 0) & (gy < gh)
    member = np.zeros(len(pts), dtype=bool)
    member[inside] = band[gy[inside], gx[inside]]

    out = np.zeros((height, width), dtype=bool)
    out[y0 : y1 + 1, x0 : x1 + 1] = member.reshape(grid_x.shape)
    return out


def _paint(
    rng: np.random.Generator,
    dims: tuple[int, int],
    marking: np.ndarray | None,
    glare: np.ndarray | None,
    chromatic_texture: bool = True,
) -> np.ndarray:
    width, height = dims
    if chromatic_texture:
        noise = rng.integers(-10, 11, size=(height, width, 3), dtype=np.int16)
    else:
        # achromatic texture (equal channels): zero saturation, so min-max
        # normalization cannot stretch background speckle into the mask
        noise = np.repeat(rng.integers(-10, 11, size=(height, width, 1), dtype=np.int16), 3, axis=2)
    img = _BG_BASE + noise
    if glare is not None and glare.any():
        img[glare] = _GLARE_BASE + rng.integers(-5, 6, size=(int(glare.sum()), 3), dtype=np.int16)
    if marking is not None and marking.any():
        img[marking] = _MARKING_BASE + rng.integers(-5, 6, size=(int(marking.sum()), 3), dtype=np.int16)
    return np.clip(img, 0, 255).astype(np.uint8)


def render_marking_frame(
    kind: str,
    rng: np.random.Generator,
    roi: Roi | None = None,
    dims: tuple[int, int] = DEFAULT_FRAME_DIMS,
) -> SyntheticFrame:
    """Render one frame containing a single bright marking of the given kind.

    Retries the random geometry until the ground-plane band guarantees a
    histogram peak comfortably above the presence threshold.
    """
    roi = roi or default_roi()
    gdims = (roi.dst_width, roi.dst_height)
    for _ in range(20):
        lines, outline_fn = _marking_geometry(kind, rng, gdims)
        band = _band_raster(lines, gdims, _BAND_HALF_WIDTH)
        peak = int(band.sum(axis=0).max())
        if peak >= 170:
            break
    else:
        raise RuntimeError(f"could not place a {kind} marking with a strong peak")

    gt = _frame_membership(band, roi, dims)
    data = _paint(rng, dims, gt, None)

    ground_poly = outline_fn(_BAND_HALF_WIDTH + _OUTLINE_MARGIN)
    frame_poly = map_points(roi_homography(roi), ground_poly)
    outline = ContourOutline(frame_index=0, polygon=frame_poly)
    return SyntheticFrame(
        data=data, marking_pixels=gt, outline=outline, has_marking=True, ground_peak=peak
    )


def render_noise_frame(
    rng: np.random.Generator,
    roi: Roi | None = None,
    dims: tuple[int, int] = DEFAULT_FRAME_DIMS,
    glare_peak: int = 0,
) -> SyntheticFrame:
    """Render a no-marking frame; optional glare patch with a bounded peak.

    ``glare_peak`` is the target column height (ground pixels) of a bright
    disturbance: 0 renders pure background texture, anything below the
    presence threshold simulates reflections that must not be flagged.
    """
    roi = roi or default_roi()
    gw, gh = roi.dst_width, roi.dst_height
    glare = None
    peak = 0
    if glare_peak > 0:
        x0 = rng.uniform(_GROUND_INSET, gw - _GROUND_INSET - 40)
        y0 = rng.uniform(_GROUND_INSET, gh - _GROUND_INSET - glare_peak)
        glare_band = np.zeros((gh, gw), dtype=bool)
        glare_band[int(y0) : int(y0) + glare_peak, int(x0) : int(x0) + 30] = True
        glare = _frame_membership(glare_band, roi, dims)
        peak = glare_peak
    data = _paint(rng, dims, None, glare, chromatic_texture=False)
    return SyntheticFrame(
        data=data,
        marking_pixels=np.zeros((dims[1], dims[0]), dtype=bool),
        outline=None,
        has_marking=False,
        ground_peak=peak,
    )


def _save_frame(data: np.ndarray, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(data).save(path)


def generate_sequence(
    out_dir: str | Path,
    n_frames: int,
    seed: int = 7,
    roi: Roi | None = None,
    dims: tuple[int, int] = DEFAULT_FRAME_DIMS,
    kinds: tuple[str, ...] = MARKING_KINDS,
) -> Roi:
    """Write a marking sequence: frames, ground truth, outlines, ROI file.

    Layout under ``out_dir``: ``frames/frame_%06d.png``,
    ``gt/frame_%06d.png`` (0/255 ground-truth rasters),
    ``outlines/frame_%06d.json``, and ``roi.json``.
    """
    out_dir = Path(out_dir)
    roi = roi or default_roi()
    for index in range(n_frames):
        rng = np.random.default_rng([seed, index])
        frame = render_marking_frame(kinds[index % len(kinds)], rng, roi, dims)
        name = f"frame_{index:06d}"
        _save_frame(frame.data, out_dir / "frames" / f"{name}.png")
        _save_frame(
            np.where(frame.marking_pixels, 255, 0).astype(np.uint8),
            out_dir / "gt" / f"{name}.png",
        )
        save_outline(frame.outline, out_dir / "outlines" / f"{name}.json")
    save_roi(roi, out_dir / "roi.json")
    return roi


def generate_ablation_set(
    out_dir: str | Path,
    n_marking: int = 30,
    n_noise: int = 30,
    seed: int = 11,
    roi: Roi | None = None,
    dims: tuple[int, int] = DEFAULT_FRAME_DIMS,
) -> list[tuple[int, bool]]:
    """Write a labeled marking/no-marking set for the threshold ablation.

    Noise frames are constructed to peak below the production threshold:
    one third with strong glare (peaks in [90, 135]), one third weak
    ([25, 70]), one third pure texture (zero peak). Returns the labels and
    writes them to ``labels.csv`` alongside ``frames/`` and ``roi.json``.
    """
    out_dir = Path(out_dir)
    roi = roi or default_roi()
    labels: list[tuple[int, bool]] = []
    for index in range(n_marking + n_noise):
        rng = np.random.default_rng([seed, index])
        if index < n_marking:
            frame = render_marking_frame(MARKING_KINDS[index % len(MARKING_KINDS)], rng, roi, dims)
        else:
            k = index - n_marking
            third = max(1, n_noise // 3)
            if k < third:
                target = int(rng.integers(90, 136))
            elif k < 2 * third:
                target = int(rng.integers(25, 71))
            else:
                target = 0
            frame = render_noise_frame(rng, roi, dims, glare_peak=target)
        _save_frame(frame.data, out_dir / "frames" / f"frame_{index:06d}.png")
        labels.append((index, frame.has_marking))

    with open(out_dir / "labels.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_index", "has_marking"])
        for index, has in labels:
            writer.writerow([index, int(has)])
    save_roi(roi, out_dir / "roi.json")
    return labels


def make_benchmark_mask(
    width: int = 1920,
    height: int = 1080,
    seed: int = 3,
    band_half_width: float = 6.0,
) -> np.ndarray:
    """A sparse connected marking mask for the traversal benchmark.

    One thick, slightly wandering stroke; white fraction stays at or below
    one percent of the raster, the regime where neighborhood traversal
    beats the full scan by construction.
    """
    rng = np.random.default_rng(seed)
    margin = 60.0
    x = rng.uniform(width * 0.3, width * 0.7)
    y = height - margin
    pts = [[x, y]]
    while y > margin:
        step = rng.uniform(110, 150)
        angle = rng.uniform(-0.25, 0.25)
        x = float(np.clip(x + step * np.sin(angle), margin, width - margin))
        y = max(margin, y - step * np.cos(angle))
        pts.append([x, y])
    band = _band_raster([np.asarray(pts)], (width, height), band_half_width)
    mask = np.where(band, 255, 0).astype(np.uint8)
    white = int((mask == 255).sum())
    if white > 0.01 * width * height:
        raise ValueError(
            f"stroke covers {white / (width * height):.2%} of the mask; "
            "reduce band_half_width for rasters this small"
        )
    return mask
