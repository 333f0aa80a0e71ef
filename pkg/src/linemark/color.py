"""Color feature pipeline: RGB -> HSV, min-max normalization, thresholding.

All three HSV channels live in [0, 255]; hue uses the full 8-bit range
rather than the half-degree [0, 180] convention. Rounding is half-up
everywhere so golden files stay stable across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_LOWER = (0, 70, 170)
DEFAULT_UPPER = (255, 255, 255)


def _round_half_up(x: np.ndarray) -> np.ndarray:
    return np.floor(x + 0.5)


@dataclass(frozen=True)
class HsvBounds:
    """Inclusive lower/upper HSV bounds for the marking threshold."""

    lower: tuple[int, int, int] = DEFAULT_LOWER
    upper: tuple[int, int, int] = DEFAULT_UPPER

    def __post_init__(self):
        for name, triple in (("lower", self.lower), ("upper", self.upper)):
            if len(triple) != 3 or any(not (0 <= v <= 255) for v in triple):
                raise ValueError(f"{name} bounds must be three values in [0, 255]")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("lower bounds must not exceed upper bounds")


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Convert an HxWx3 uint8 RGB image to 8-bit HSV.

    V = max(R, G, B); S = 255 * (V - min) / V (0 for black); H scales the
    standard sector hue in [0, 360) onto [0, 255]. Achromatic pixels get
    H = 0. Ties in the max channel resolve in R, G, B order.
    """
    rgb = np.asarray(rgb)
    r = rgb[..., 0].astype(np.float64)
    g = rgb[..., 1].astype(np.float64)
    b = rgb[..., 2].astype(np.float64)

    v = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = v - mn

    s = np.zeros_like(v)
    nonblack = v > 0
    s[nonblack] = _round_half_up(255.0 * delta[nonblack] / v[nonblack])

    safe = np.where(delta == 0, 1.0, delta)
    hue = np.select(
        [delta == 0, v == r, v == g],
        [
            np.zeros_like(v),
            60.0 * (((g - b) / safe) % 6.0),
            60.0 * ((b - r) / safe + 2.0),
        ],
        default=60.0 * ((r - g) / safe + 4.0),
    )
    h = _round_half_up(255.0 * hue / 360.0)

    out = np.empty(rgb.shape[:2] + (3,), dtype=np.uint8)
    out[..., 0] = h
    out[..., 1] = s
    out[..., 2] = _round_half_up(v)
    return out


def normalize_channel(plane: np.ndarray) -> np.ndarray:
    """8-bit min-max rescale of one channel plane.

    A constant plane normalizes to all zeros (the rescale is undefined
    there and zero is the conservative "no signal" choice). Non-constant
    planes always span 0 and 255 afterwards, which makes the operation
    idempotent.
    """
    plane = np.asarray(plane)
    mn = int(plane.min())
    mx = int(plane.max())
    if mx == mn:
        return np.zeros_like(plane, dtype=np.uint8)
    scaled = _round_half_up(255.0 * (plane.astype(np.float64) - mn) / (mx - mn))
    return scaled.astype(np.uint8)


def normalize_hsv(hsv: np.ndarray) -> np.ndarray:
    """Min-max normalize each HSV plane independently, then recombine."""
    out = np.empty_like(hsv)
    for c in range(3):
        out[..., c] = normalize_channel(hsv[..., c])
    return out


def threshold_hsv(hsv: np.ndarray, bounds: HsvBounds = HsvBounds()) -> np.ndarray:
    """Binary mask: 255 where all channels fall inside the inclusive bounds."""
    lower = np.asarray(bounds.lower, dtype=np.uint8)
    upper = np.asarray(bounds.upper, dtype=np.uint8)
    inside = np.all((hsv >= lower) & (hsv <= upper), axis=-1)
    return np.where(inside, 255, 0).astype(np.uint8)
