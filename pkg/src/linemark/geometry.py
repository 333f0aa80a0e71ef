"""Projective geometry: 3x3 homography estimation and ROI resampling.

The homography convention throughout is the sampling direction: the matrix
returned by :func:`compute_homography` maps a *destination* (bird's-eye)
coordinate to the *source* frame coordinate it samples from. The same matrix
therefore drives both the forward warp (resample the trapezoid into a
rectangle) and the mask unwarp (send rectified pixels back to frame space).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PointAtInfinityError, SingularHomographyError
from .frames import Frame, Roi

_DENOM_EPS = 1e-12


def compute_homography(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Solve the 8-unknown linear system for the dst -> src projective map.

    ``src`` and ``dst`` are (4, 2) arrays of corresponding points. The result
    M is normalized with M[2, 2] = 1 and satisfies
    ``project(M, dst[k]) == src[k]`` for all four correspondences.
    """
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.shape != (4, 2) or dst.shape != (4, 2):
        raise ValueError("compute_homography needs four (x, y) points on each side")

    # Unknowns m11..m32 with m33 pinned to 1; one row pair per correspondence:
    #   u = (m11 x + m12 y + m13) / (m31 x + m32 y + 1)
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for k in range(4):
        x, y = dst[k]
        u, v = src[k]
        a[2 * k] = [x, y, 1, 0, 0, 0, -u * x, -u * y]
        b[2 * k] = u
        a[2 * k + 1] = [0, 0, 0, x, y, 1, -v * x, -v * y]
        b[2 * k + 1] = v

    try:
        sol = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularHomographyError(f"degenerate point correspondence: {exc}") from exc

    m = np.array(
        [
            [sol[0], sol[1], sol[2]],
            [sol[3], sol[4], sol[5]],
            [sol[6], sol[7], 1.0],
        ]
    )
    if abs(np.linalg.det(m)) <= 1e-12:
        raise SingularHomographyError("correspondence yields a non-invertible matrix")
    return m


def invert_homography(m: np.ndarray) -> np.ndarray:
    """Inverse map, renormalized so the (3, 3) entry is exactly 1."""
    inv = np.linalg.inv(m)
    if abs(inv[2, 2]) <= _DENOM_EPS:
        raise SingularHomographyError("inverse has a vanishing scale entry")
    return inv / inv[2, 2]


def map_point(m: np.ndarray, point) -> tuple[float, float]:
    """Apply the projective map to a single (x, y) point."""
    x, y = float(point[0]), float(point[1])
    w = m[2, 0] * x + m[2, 1] * y + m[2, 2]
    if abs(w) <= _DENOM_EPS:
        raise PointAtInfinityError(f"point ({x:g}, {y:g}) maps to infinity")
    return (
        (m[0, 0] * x + m[0, 1] * y + m[0, 2]) / w,
        (m[1, 0] * x + m[1, 1] * y + m[1, 2]) / w,
    )


def map_points(m: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Vectorized :func:`map_point` over an (N, 2) array."""
    pts = np.asarray(points, dtype=np.float64)
    w = m[2, 0] * pts[:, 0] + m[2, 1] * pts[:, 1] + m[2, 2]
    if np.any(np.abs(w) <= _DENOM_EPS):
        raise PointAtInfinityError("some points map to infinity")
    out = np.empty_like(pts)
    out[:, 0] = (m[0, 0] * pts[:, 0] + m[0, 1] * pts[:, 1] + m[0, 2]) / w
    out[:, 1] = (m[1, 0] * pts[:, 0] + m[1, 1] * pts[:, 1] + m[1, 2]) / w
    return out


def roi_homography(roi: Roi) -> np.ndarray:
    """Sampling matrix for a trapezoid ROI: rectified (x, y) -> frame (x, y)."""
    return compute_homography(roi.src, roi.dst_corners)


@dataclass(frozen=True)
class WarpedRoi:
    """Bird's-eye resampling of the ROI plus the matrix that produced it."""

    image: np.ndarray  # (dst_height, dst_width, 3) uint8
    homography: np.ndarray  # dst -> src sampling matrix


def _sample_grid(m: np.ndarray, dst_width: int, dst_height: int):
    xs, ys = np.meshgrid(
        np.arange(dst_width, dtype=np.float64),
        np.arange(dst_height, dtype=np.float64),
    )
    w = m[2, 0] * xs + m[2, 1] * ys + m[2, 2]
    if np.any(np.abs(w) <= _DENOM_EPS):
        raise PointAtInfinityError("warp grid touches the line at infinity")
    sx = (m[0, 0] * xs + m[0, 1] * ys + m[0, 2]) / w
    sy = (m[1, 0] * xs + m[1, 1] * ys + m[1, 2]) / w
    return sx, sy


def warp_roi(frame: Frame | np.ndarray, roi: Roi, interpolation: str = "bilinear") -> WarpedRoi:
    """Resample the trapezoidal ROI into its bird's-eye rectangle.

    Each destination pixel samples the frame at the position given by the
    dst -> src homography. Samples outside the frame produce black, which can
    never pass the brightness threshold downstream. ``interpolation`` is
    ``"bilinear"`` (default) or ``"nearest"`` for bit-exact experiments.
    """
    data = frame.data if isinstance(frame, Frame) else np.asarray(frame)
    height, width = data.shape[:2]
    m = roi_homography(roi)
    sx, sy = _sample_grid(m, roi.dst_width, roi.dst_height)
    valid = (sx >= 0) & (sx <= width - 1) & (sy >= 0) & (sy <= height - 1)

    if interpolation == "nearest":
        xi = np.clip(np.floor(sx + 0.5).astype(np.intp), 0, width - 1)
        yi = np.clip(np.floor(sy + 0.5).astype(np.intp), 0, height - 1)
        out = data[yi, xi].astype(np.uint8)
    elif interpolation == "bilinear":
        x0 = np.clip(np.floor(sx).astype(np.intp), 0, max(width - 2, 0))
        y0 = np.clip(np.floor(sy).astype(np.intp), 0, max(height - 2, 0))
        # float32 keeps dyadic blend weights exact (ties still round stably)
        # while halving the gather/arithmetic footprint.
        fx = (sx - x0)[..., None].astype(np.float32)
        fy = (sy - y0)[..., None].astype(np.float32)
        p00 = data[y0, x0].astype(np.float32)
        p01 = data[y0, x0 + 1].astype(np.float32)
        p10 = data[y0 + 1, x0].astype(np.float32)
        p11 = data[y0 + 1, x0 + 1].astype(np.float32)
        top = p00 + (p01 - p00) * fx
        bottom = p10 + (p11 - p10) * fx
        mixed = top + (bottom - top) * fy
        out = np.clip(np.floor(mixed + 0.5), 0, 255).astype(np.uint8)
    else:
        raise ValueError(f"unknown interpolation {interpolation!r}")

    out[~valid] = 0
    return WarpedRoi(image=out, homography=m)


def unwarp_mask(mask: np.ndarray, roi: Roi, frame_dims: tuple[int, int]) -> np.ndarray:
    """Map white mask pixels back to original-frame coordinates.

    Every 255 pixel of the rectified mask is sent through the dst -> src
    homography, rounded to the nearest integer pixel (half-up ties),
    deduplicated, and points landing outside the frame are dropped. Returns
    an (N, 2) int array of (x, y) rows sorted by (y, x).
    """
    if mask.shape != (roi.dst_height, roi.dst_width):
        raise ValueError(
            f"mask shape {mask.shape} does not match roi destination "
            f"{(roi.dst_height, roi.dst_width)}"
        )
    ys, xs = np.nonzero(mask == 255)
    if len(xs) == 0:
        return np.empty((0, 2), dtype=np.int64)

    m = roi_homography(roi)
    pts = map_points(m, np.column_stack([xs, ys]).astype(np.float64))
    mapped = np.floor(pts + 0.5).astype(np.int64)

    width, height = frame_dims
    keep = (
        (mapped[:, 0] >= 0)
        & (mapped[:, 0] < width)
        & (mapped[:, 1] >= 0)
        & (mapped[:, 1] < height)
    )
    mapped = mapped[keep]
    if len(mapped) == 0:
        return np.empty((0, 2), dtype=np.int64)

    mapped = np.unique(mapped, axis=0)  # unique rows, sorted by (x, y)
    order = np.lexsort((mapped[:, 0], mapped[:, 1]))  # re-sort by (y, x)
    return mapped[order]
