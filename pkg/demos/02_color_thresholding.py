"""From rectified ROI to binary marking mask: HSV, normalization, threshold.

Shows why the normalization step matters: the raw V plane of a dark scene
occupies a narrow band, and min-max rescaling stretches it so the fixed
bounds (S >= 70, V >= 170) separate marking from background.
"""

from pathlib import Path

import numpy as np
from PIL import Image

from linemark import normalize_hsv, rgb_to_hsv, threshold_hsv, warp_roi
from linemark.color import HsvBounds
from linemark.frames import Frame
from linemark.synthetic import default_roi, render_marking_frame

out_dir = Path(__file__).parent / "output" / "02_color_thresholding"
out_dir.mkdir(parents=True, exist_ok=True)

roi = default_roi()
scene = render_marking_frame("straight", np.random.default_rng(2), roi)
# simulate underexposure: the marking drops below the raw V bound of 170
dim = (scene.data.astype(np.float64) * 0.55).astype(np.uint8)
warped = warp_roi(Frame(data=dim), roi)

hsv = rgb_to_hsv(warped.image)
normalized = normalize_hsv(hsv)

for name, plane in (("raw", hsv), ("normalized", normalized)):
    v = plane[..., 2]
    print(f"{name:11s} V plane: min {v.min():3d}  max {v.max():3d}  mean {v.mean():6.1f}")

bounds = HsvBounds()  # (0, 70, 170) .. (255, 255, 255)
raw_mask = threshold_hsv(hsv, bounds)
mask = threshold_hsv(normalized, bounds)
print(f"\nbounds {bounds.lower} .. {bounds.upper} on the underexposed frame:")
print(f"  raw HSV        -> {(raw_mask == 255).mean():7.2%} white (marking missed)")
print(f"  normalized HSV -> {(mask == 255).mean():7.2%} white (marking recovered)")

Image.fromarray(warped.image).save(out_dir / "warped.png")
Image.fromarray(normalized).save(out_dir / "normalized_hsv_as_rgb.png")
Image.fromarray(mask).save(out_dir / "mask.png")
print(f"\nwrote warped.png, normalized_hsv_as_rgb.png, mask.png under {out_dir}")
