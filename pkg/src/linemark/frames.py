"""Frame containers, sequence ingestion, and the trapezoidal region of interest.

Frames are H x W x 3 uint8 RGB rasters indexed as ``data[row, col, channel]``.
A sequence is a directory of files named ``frame_%06d.png`` (or ``.ppm``,
binary P6) with indices contiguous from zero and constant dimensions.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    DimensionMismatchError,
    FrameDecodeError,
    MissingDirectoryError,
    NoFramesError,
    RoiValidationError,
    SequenceLayoutError,
)

FRAME_NAME_RE = re.compile(r"^frame_(\d{6})\.(png|ppm)$")

# Type alias used throughout: points are (x, y) with x = column, y = row.
Point = tuple[float, float]


@dataclass(frozen=True)
class Frame:
    """One RGB raster plus its position in the sequence."""

    data: np.ndarray
    index: int = 0

    def __post_init__(self):
        if self.data.ndim != 3 or self.data.shape[2] != 3:
            raise ValueError(f"frame data must be HxWx3, got shape {self.data.shape}")
        if self.data.dtype != np.uint8:
            raise ValueError(f"frame data must be uint8, got {self.data.dtype}")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def get_pixel(self, i: int, j: int) -> tuple[int, int, int]:
        """Return the stored (R, G, B) triple at row i, column j."""
        if not (0 <= i < self.height and 0 <= j < self.width):
            raise IndexError(
                f"pixel ({i}, {j}) out of bounds for {self.height}x{self.width} frame"
            )
        r, g, b = self.data[i, j]
        return int(r), int(g), int(b)


def _read_image_size(path: Path) -> tuple[int, int]:
    # Image.open only parses the header, so this stays cheap for long sequences.
    try:
        with Image.open(path) as im:
            return im.size  # (W, H)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise FrameDecodeError(f"cannot decode {path}: {exc}") from exc


def _decode_frame(path: Path, index: int) -> Frame:
    try:
        with Image.open(path) as im:
            data = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise FrameDecodeError(f"cannot decode {path}: {exc}") from exc
    return Frame(data=data, index=index)


@dataclass
class FrameSequence:
    """An ordered, dimension-validated set of frame files.

    Frames are decoded lazily; the sequence object itself only holds paths,
    so it is safe to share across worker threads.
    """

    id: str
    source_dir: Path
    paths: list[Path] = field(repr=False)
    width: int = 0
    height: int = 0

    @property
    def frame_count(self) -> int:
        return len(self.paths)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.width, self.height)

    def frame(self, index: int) -> Frame:
        if not (0 <= index < len(self.paths)):
            raise IndexError(f"frame index {index} out of range 0..{len(self.paths) - 1}")
        return _decode_frame(self.paths[index], index)

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        for i in range(len(self.paths)):
            yield self.frame(i)


def load_sequence(directory: str | Path, seq_id: str | None = None) -> FrameSequence:
    """Scan a directory for ``frame_%06d`` images and validate the sequence.

    Frames are ordered by their numeric index regardless of directory listing
    order. Raises a distinct error for a missing directory, an empty one,
    mixed dimensions, non-contiguous indices, or an undecodable file.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingDirectoryError(f"frame directory not found: {directory}")

    indexed: list[tuple[int, Path]] = []
    for path in directory.iterdir():
        m = FRAME_NAME_RE.match(path.name)
        if m:
            indexed.append((int(m.group(1)), path))
    if not indexed:
        raise NoFramesError(f"no frames found in {directory}")
    indexed.sort(key=lambda t: t[0])

    for pos, (idx, path) in enumerate(indexed):
        if idx != pos:
            raise SequenceLayoutError(
                f"frame indices not contiguous: expected {pos:06d}, found {path.name}"
            )

    width, height = _read_image_size(indexed[0][1])
    for idx, path in indexed[1:]:
        w, h = _read_image_size(path)
        if (w, h) != (width, height):
            raise DimensionMismatchError(
                f"dimension mismatch at index {idx}: {w}x{h} differs from {width}x{height}"
            )

    return FrameSequence(
        id=seq_id or directory.name,
        source_dir=directory,
        paths=[p for _, p in indexed],
        width=width,
        height=height,
    )


@dataclass(frozen=True)
class Roi:
    """Trapezoidal region of interest plus its rectified destination size.

    ``src`` holds the four trapezoid vertices in frame space in the fixed
    order top-left, top-right, bottom-right, bottom-left.
    """

    src: np.ndarray  # (4, 2) float64, rows are (x, y)
    dst_width: int
    dst_height: int

    def __post_init__(self):
        pts = np.asarray(self.src, dtype=np.float64)
        if pts.shape != (4, 2):
            raise ValueError(f"roi needs exactly 4 (x, y) vertices, got shape {pts.shape}")
        object.__setattr__(self, "src", pts)

    @property
    def dst_corners(self) -> np.ndarray:
        """Destination rectangle corners in the same TL, TR, BR, BL order."""
        w, h = self.dst_width - 1, self.dst_height - 1
        return np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float64)

    def to_json_dict(self) -> dict:
        return {
            "src": [[float(x), float(y)] for x, y in self.src],
            "dst_width": self.dst_width,
            "dst_height": self.dst_height,
        }


def default_dst_dims(src: np.ndarray) -> tuple[int, int]:
    """Destination rectangle size preserving the trapezoid's pixel density.

    Width follows the longer of the two horizontal-ish edges, height the
    longer of the two side edges.
    """
    pts = np.asarray(src, dtype=np.float64)
    tl, tr, br, bl = pts
    width = max(np.linalg.norm(tr - tl), np.linalg.norm(br - bl))
    height = max(np.linalg.norm(bl - tl), np.linalg.norm(br - tr))
    return max(2, int(round(width))), max(2, int(round(height)))


def make_roi(src, dst_width: int | None = None, dst_height: int | None = None) -> Roi:
    """Build an Roi, deriving destination dimensions when not given."""
    pts = np.asarray(src, dtype=np.float64)
    dw, dh = default_dst_dims(pts) if pts.shape == (4, 2) else (0, 0)
    return Roi(
        src=pts,
        dst_width=int(dst_width) if dst_width is not None else dw,
        dst_height=int(dst_height) if dst_height is not None else dh,
    )


def validate_roi(roi: Roi, dims: tuple[int, int]) -> list[str]:
    """Check an Roi against frame dimensions.

    Returns a list of violation descriptions; an empty list means the ROI is
    valid. Pure: identical inputs always yield the same verdict.
    """
    width, height = dims
    violations: list[str] = []
    pts = roi.src

    if not np.all(np.isfinite(pts)):
        violations.append("vertex coordinates must be finite")
        return violations

    for k, (x, y) in enumerate(pts):
        if not (0 <= x <= width - 1 and 0 <= y <= height - 1):
            violations.append(
                f"vertex out of bounds: vertex {k} at ({x:g}, {y:g}) "
                f"outside {width}x{height} frame"
            )

    # Cross products of consecutive edges; image coordinates have y down, so
    # the TL,TR,BR,BL convention walks the quad with positive cross products.
    crosses = []
    for k in range(4):
        a = pts[(k + 1) % 4] - pts[k]
        b = pts[(k + 2) % 4] - pts[(k + 1) % 4]
        crosses.append(a[0] * b[1] - a[1] * b[0])
    if any(abs(c) < 1e-9 for c in crosses):
        violations.append("degenerate trapezoid: three vertices are collinear")
    elif any(c < 0 for c in crosses) and any(c > 0 for c in crosses):
        violations.append("non-convex: vertices do not form a convex quadrilateral")
    elif all(c < 0 for c in crosses):
        violations.append(
            "vertex order violates the top-left, top-right, bottom-right, "
            "bottom-left convention"
        )

    if roi.dst_width < 2 or roi.dst_height < 2:
        violations.append("destination rectangle must be at least 2x2")

    return violations


def require_valid_roi(roi: Roi, dims: tuple[int, int]) -> Roi:
    violations = validate_roi(roi, dims)
    if violations:
        raise RoiValidationError(violations)
    return roi


def roi_from_json_dict(obj: dict) -> Roi:
    try:
        src = obj["src"]
        return make_roi(src, obj.get("dst_width"), obj.get("dst_height"))
    except (KeyError, TypeError, ValueError) as exc:
        raise RoiValidationError(
            [f"roi json must contain a 'src' list of 4 [x, y] points: {exc}"]
        ) from exc


def load_roi(path: str | Path) -> Roi:
    path = Path(path)
    if not path.is_file():
        raise RoiValidationError([f"roi file not found: {path}"])
    with open(path, encoding="utf-8") as fh:
        return roi_from_json_dict(json.load(fh))


def save_roi(roi: Roi, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(roi.to_json_dict(), fh, indent=2)
        fh.write("\n")
