"""Flat-file workspace shared by the CLI and the review service.

Layout under the workspace root:

    sequences.json      registry of ingested sequences
    rois/<id>.json      stored ROI per sequence
    out/<id>/...        pipeline outputs (overlays, coords, summary, flags)
    jobs.json           background job statuses
    config.toml         optional pipeline configuration
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import LinemarkError
from .frames import FrameSequence, Roi, load_sequence, roi_from_json_dict, save_roi


@dataclass(frozen=True)
class SequenceEntry:
    id: str
    dir: str
    frame_count: int
    width: int
    height: int

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "frame_count": self.frame_count,
            "dims": [self.width, self.height],
        }


class Workspace:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    @property
    def registry_path(self) -> Path:
        return self.root / "sequences.json"

    @property
    def jobs_path(self) -> Path:
        return self.root / "jobs.json"

    @property
    def out_root(self) -> Path:
        return self.root / "out"

    @property
    def config_path(self) -> Path:
        return self.root / "config.toml"

    def roi_path(self, seq_id: str) -> Path:
        return self.root / "rois" / f"{seq_id}.json"

    def flags_path(self, seq_id: str) -> Path:
        return self.out_root / seq_id / "flags.json"

    def _read_registry(self) -> dict:
        if not self.registry_path.is_file():
            return {}
        with open(self.registry_path, encoding="utf-8") as fh:
            return json.load(fh)

    def _write_registry(self, registry: dict) -> None:
        with open(self.registry_path, "w", encoding="utf-8") as fh:
            json.dump(registry, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def register_sequence(self, directory: str | Path, seq_id: str | None = None) -> SequenceEntry:
        seq = load_sequence(directory, seq_id)
        registry = self._read_registry()
        registry[seq.id] = {
            "dir": str(Path(directory).resolve()),
            "frame_count": seq.frame_count,
            "width": seq.width,
            "height": seq.height,
        }
        self._write_registry(registry)
        return SequenceEntry(seq.id, registry[seq.id]["dir"], seq.frame_count, seq.width, seq.height)

    def list_sequences(self) -> list[SequenceEntry]:
        registry = self._read_registry()
        return [
            SequenceEntry(sid, e["dir"], e["frame_count"], e["width"], e["height"])
            for sid, e in sorted(registry.items())
        ]

    def get_entry(self, seq_id: str) -> SequenceEntry | None:
        entry = self._read_registry().get(seq_id)
        if entry is None:
            return None
        return SequenceEntry(seq_id, entry["dir"], entry["frame_count"], entry["width"], entry["height"])

    def open_sequence(self, seq_id: str) -> FrameSequence:
        entry = self.get_entry(seq_id)
        if entry is None:
            raise LinemarkError(f"unknown sequence '{seq_id}' (ingest it first)")
        return load_sequence(entry.dir, seq_id)

    def load_roi(self, seq_id: str) -> Roi | None:
        path = self.roi_path(seq_id)
        if not path.is_file():
            return None
        with open(path, encoding="utf-8") as fh:
            return roi_from_json_dict(json.load(fh))

    def store_roi(self, seq_id: str, roi: Roi) -> None:
        save_roi(roi, self.roi_path(seq_id))
