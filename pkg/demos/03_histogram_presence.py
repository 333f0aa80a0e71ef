"""Column histogram of the marking mask and the presence decision.

The peak of the per-column white count decides whether a frame holds a
marking at all (threshold 150); runs of peak columns each contribute one
traversal seed.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from linemark import (
    decide_presence,
    extract_seeds,
    normalize_hsv,
    rgb_to_hsv,
    threshold_hsv,
    vertical_histogram,
    warp_roi,
)
from linemark.frames import Frame
from linemark.synthetic import default_roi, render_marking_frame, render_noise_frame

out_dir = Path(__file__).parent / "output" / "03_histogram_presence"
out_dir.mkdir(parents=True, exist_ok=True)

roi = default_roi()
scenes = {
    "junction": render_marking_frame("junction", np.random.default_rng(3), roi),
    "glare_only": render_noise_frame(np.random.default_rng(4), roi, glare_peak=110),
}

fig, axes = plt.subplots(2, 1, figsize=(9, 6), sharex=True)
for ax, (name, scene) in zip(axes, scenes.items()):
    warped = warp_roi(Frame(data=scene.data), roi)
    mask = threshold_hsv(normalize_hsv(rgb_to_hsv(warped.image)))
    hist = vertical_histogram(mask)
    decision = decide_presence(hist, threshold=150)

    ax.plot(hist.counts, lw=0.8)
    ax.axhline(150, color="red", ls="--", lw=0.8, label="presence threshold")
    ax.set_title(f"{name}: peak {decision.peak_value}, present={decision.present}")
    ax.set_ylabel("white pixels per column")
    ax.legend(loc="upper right")

    print(f"{name:11s} peak {decision.peak_value:4d}  present={decision.present}")
    if decision.present:
        seeds = extract_seeds(mask, decision)
        print(f"{'':11s} seeds: {seeds.seeds}")

axes[-1].set_xlabel("column")
fig.tight_layout()
fig.savefig(out_dir / "histograms.png", dpi=110)
print(f"\nwrote {out_dir}/histograms.png")
