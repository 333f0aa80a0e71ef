import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

from linemark.frames import Frame, make_roi


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def square_roi():
    """Axis-aligned 20x20 crop ROI whose warp is an identity copy."""
    return make_roi([(5, 5), (24, 5), (24, 24), (5, 24)], 20, 20)


@pytest.fixture
def random_frame(rng):
    return Frame(data=rng.integers(0, 256, (48, 64, 3), dtype=np.uint8), index=0)


def write_frames(directory: Path, arrays, ext: str = "png", start: int = 0):
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, arr in enumerate(arrays):
        path = directory / f"frame_{start + k:06d}.{ext}"
        Image.fromarray(arr, mode="RGB").save(path)
        paths.append(path)
    return paths
