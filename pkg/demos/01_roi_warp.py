"""Define a trapezoidal ROI on a frame and rectify it to a bird's-eye view.

A synthetic frame with a curved marking stands in for camera footage. The
same ROI, picked once on the initial frame, is what the pipeline reuses
for every later frame of a sequence.
"""

from pathlib import Path

import numpy as np
from PIL import Image

from linemark import warp_roi
from linemark.frames import Frame
from linemark.synthetic import default_roi, render_marking_frame

out_dir = Path(__file__).parent / "output" / "01_roi_warp"
out_dir.mkdir(parents=True, exist_ok=True)

roi = default_roi()
print("ROI vertices (TL, TR, BR, BL):")
for x, y in roi.src:
    print(f"  ({x:.0f}, {y:.0f})")
print(f"bird's-eye rectangle: {roi.dst_width} x {roi.dst_height}")

scene = render_marking_frame("curve", np.random.default_rng(1), roi)
frame = Frame(data=scene.data, index=0)

# draw the trapezoid onto a copy for reference
annotated = scene.data.copy()
corners = roi.src.astype(int)
for k in range(4):
    x0, y0 = corners[k]
    x1, y1 = corners[(k + 1) % 4]
    n = int(max(abs(x1 - x0), abs(y1 - y0)))
    xs = np.linspace(x0, x1, n).astype(int)
    ys = np.linspace(y0, y1, n).astype(int)
    annotated[ys, xs] = (0, 255, 0)
Image.fromarray(annotated).save(out_dir / "frame_with_roi.png")

warped = warp_roi(frame, roi)
Image.fromarray(warped.image).save(out_dir / "birds_eye.png")

print(f"\nsampling matrix (bird's-eye (x,y) -> frame (x,y)):\n{np.round(warped.homography, 6)}")
print(f"\nwrote {out_dir}/frame_with_roi.png and birds_eye.png")
