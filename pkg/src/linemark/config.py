"""TOML configuration loading for the pipeline and CLI.

Recognized keys (all optional, defaults in parentheses):

    [hsv]       lower = [0, 70, 170]   upper = [255, 255, 255]
    [detect]    threshold = 150        seed_group_gap = 20
    [traversal] theta = 3              disk_mode = false
    [geometry]  interpolation = "bilinear"
    [pipeline]  overlay_color = [255, 0, 0]
"""

from __future__ import annotations

from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .color import HsvBounds
from .errors import LinemarkError
from .pipeline import PipelineConfig
from .traversal import TraversalParams


def load_config_dict(path: str | Path | None) -> dict:
    if path is None:
        return {}
    path = Path(path)
    if not path.is_file():
        raise LinemarkError(f"config file not found: {path}")
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def pipeline_config_from_dict(raw: dict, overrides: dict | None = None) -> PipelineConfig:
    """Merge a parsed config dict with flat CLI overrides.

    Overrides use dotted keys (``detect.threshold``) and win over the file.
    """
    merged: dict = {k: dict(v) for k, v in raw.items() if isinstance(v, dict)}
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        section, _, name = key.partition(".")
        merged.setdefault(section, {})[name] = value

    hsv = merged.get("hsv", {})
    det = merged.get("detect", {})
    trav = merged.get("traversal", {})
    geo = merged.get("geometry", {})
    pipe = merged.get("pipeline", {})

    try:
        return PipelineConfig(
            hsv_bounds=HsvBounds(
                lower=tuple(hsv.get("lower", HsvBounds().lower)),
                upper=tuple(hsv.get("upper", HsvBounds().upper)),
            ),
            detect_threshold=int(det.get("threshold", PipelineConfig().detect_threshold)),
            seed_group_gap=int(det.get("seed_group_gap", PipelineConfig().seed_group_gap)),
            traversal=TraversalParams(
                theta=int(trav.get("theta", TraversalParams().theta)),
                disk_mode=bool(trav.get("disk_mode", TraversalParams().disk_mode)),
            ),
            interpolation=str(geo.get("interpolation", PipelineConfig().interpolation)),
            overlay_color=tuple(pipe.get("overlay_color", PipelineConfig().overlay_color)),
        )
    except (ValueError, TypeError) as exc:
        raise LinemarkError(f"invalid configuration: {exc}") from exc


def load_pipeline_config(path: str | Path | None, overrides: dict | None = None) -> PipelineConfig:
    return pipeline_config_from_dict(load_config_dict(path), overrides)
