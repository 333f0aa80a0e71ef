"""Histogram analysis of the thresholded ROI and marking presence decision.

The vertical histogram counts white pixels per column; its peak drives a
thresholded presence decision, and columns at or above the threshold are
grouped into marking candidates whose centroids seed the traversal.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DEFAULT_PRESENCE_THRESHOLD = 150
DEFAULT_SEED_GROUP_GAP = 20


@dataclass(frozen=True)
class VerticalHistogram:
    """Column-wise white pixel counts of a binary mask."""

    counts: np.ndarray  # (W,) int64
    mask_dims: tuple[int, int]  # (W, H)


@dataclass(frozen=True)
class PresenceDecision:
    present: bool
    peak_value: int
    peak_columns: list[int] = field(repr=False)
    threshold: int = DEFAULT_PRESENCE_THRESHOLD


@dataclass(frozen=True)
class SeedSet:
    """One traversal start point per detected marking group."""

    seeds: list[tuple[int, int]]  # (x, y) in mask space, each on a white pixel


def vertical_histogram(mask: np.ndarray) -> VerticalHistogram:
    """Count white pixels per column of a 0/255 mask."""
    height, width = mask.shape
    counts = (mask == 255).sum(axis=0).astype(np.int64)
    return VerticalHistogram(counts=counts, mask_dims=(width, height))


def decide_presence(hist: VerticalHistogram, threshold: int = DEFAULT_PRESENCE_THRESHOLD) -> PresenceDecision:
    """Decide whether a marking is present from the histogram peak.

    A positive threshold admits the frame when the peak reaches it
    (inclusive). At threshold 0 the decision degrades to "any white pixel
    at all", which is strict: an all-black mask stays absent.
    """
    if threshold < 0:
        raise ValueError("presence threshold must be >= 0")
    counts = hist.counts
    peak = int(counts.max()) if counts.size else 0
    if threshold == 0:
        present = peak > 0
        columns = np.nonzero(counts > 0)[0]
    else:
        present = peak >= threshold
        columns = np.nonzero(counts >= threshold)[0]
    return PresenceDecision(
        present=present,
        peak_value=peak,
        peak_columns=[int(c) for c in columns],
        threshold=threshold,
    )


def _group_columns(columns: list[int], gap: int) -> list[list[int]]:
    groups: list[list[int]] = []
    for col in columns:
        if groups and col - groups[-1][-1] <= gap:
            groups[-1].append(col)
        else:
            groups.append([col])
    return groups


def extract_seeds(
    mask: np.ndarray,
    decision: PresenceDecision,
    group_gap: int = DEFAULT_SEED_GROUP_GAP,
) -> SeedSet:
    """Pick one white seed pixel per group of near-consecutive peak columns.

    Columns within ``group_gap`` of each other belong to the same marking.
    Each group's seed is the white pixel (within the group's columns)
    closest to the centroid of those white pixels; distance ties break
    toward smaller y, then smaller x. The centroid itself may fall on black
    for curved markings, hence the snap.
    """
    if not decision.present:
        raise ValueError("extract_seeds requires a positive presence decision")

    seeds: list[tuple[int, int]] = []
    for group in _group_columns(decision.peak_columns, group_gap):
        cols = np.asarray(group, dtype=np.int64)
        sub = mask[:, cols] == 255
        rows, col_idx = np.nonzero(sub)
        if rows.size == 0:
            continue
        xs = cols[col_idx].astype(np.float64)
        ys = rows.astype(np.float64)
        cx, cy = xs.mean(), ys.mean()
        d2 = (xs - cx) ** 2 + (ys - cy) ** 2
        # Sorting keys: distance, then y, then x (lexsort is last-key-primary).
        best = np.lexsort((xs, ys, d2))[0]
        seeds.append((int(xs[best]), int(ys[best])))
    return SeedSet(seeds=seeds)


def hsv_frequency_profile(
    rois: list[np.ndarray],
    marking_masks: list[np.ndarray],
) -> np.ndarray:
    """Tally H, S, V values of masked pixels into 256-bin tables.

    Returns a (3, 256) count array; row order is H, S, V. Used to re-derive
    threshold bounds from labeled marking regions.
    """
    if len(rois) != len(marking_masks):
        raise ValueError("need one mask per roi")
    tables = np.zeros((3, 256), dtype=np.int64)
    for hsv, mask in zip(rois, marking_masks):
        if hsv.shape[:2] != mask.shape:
            raise ValueError(
                f"roi dims {hsv.shape[:2]} do not match mask dims {mask.shape}"
            )
        selected = mask == 255
        for c in range(3):
            values = hsv[..., c][selected]
            tables[c] += np.bincount(values, minlength=256).astype(np.int64)
    return tables


def write_profile_csv(tables: np.ndarray, path: str | Path) -> None:
    """Emit the frequency tables as ``channel,bin,count`` rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["channel", "bin", "count"])
        for c, name in enumerate("HSV"):
            for bin_idx in range(256):
                writer.writerow([name, bin_idx, int(tables[c, bin_idx])])
