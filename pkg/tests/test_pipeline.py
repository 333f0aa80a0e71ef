import json

import numpy as np
import pytest
from scipy import ndimage

from linemark.errors import RoiValidationError, StageError
from linemark.frames import Frame, load_sequence, make_roi
from linemark.pipeline import (
    STAGE_NAMES,
    PipelineConfig,
    annotate_frame,
    measure_stage_timings,
    read_coords,
    run_sequence,
    write_coords,
)
from linemark.synthetic import default_roi, generate_sequence, render_marking_frame
from linemark.traversal import TraversalParams


@pytest.fixture(scope="module")
def roi():
    return default_roi()


@pytest.fixture(scope="module")
def marking_frame(roi):
    rng = np.random.default_rng([21, 0])
    return render_marking_frame("straight", rng, roi)


@pytest.fixture(scope="module")
def small_seq_dir(tmp_path_factory, roi):
    path = tmp_path_factory.mktemp("seq")
    generate_sequence(path, n_frames=3, seed=31, roi=roi)
    return path


def gray_frame(level=90):
    return Frame(data=np.full((480, 640, 3), level, dtype=np.uint8), index=0)


class TestAnnotateFrame:
    def test_synthetic_line_is_annotated_near_truth(self, roi, marking_frame):
        record, overlay, times = annotate_frame(Frame(data=marking_frame.data), roi)
        assert record.present and len(record.pixels) > 0 and record.seed_count >= 1
        # every annotated pixel within 2 px of the known marking raster
        dist = ndimage.distance_transform_edt(~marking_frame.marking_pixels)
        assert dist[record.pixels[:, 1], record.pixels[:, 0]].max() <= 2.0
        assert set(times) == set(STAGE_NAMES)

    def test_gray_frame_absent(self, roi):
        record, overlay, _ = annotate_frame(gray_frame(), roi)
        assert not record.present
        assert record.pixels.shape == (0, 2)
        assert np.array_equal(overlay, gray_frame().data)

    def test_pixels_sorted_by_row_then_column(self, roi, marking_frame):
        record, _, _ = annotate_frame(Frame(data=marking_frame.data), roi)
        keys = record.pixels[:, 1] * 10_000 + record.pixels[:, 0]
        assert np.all(np.diff(keys) > 0)

    def test_overlay_diff_equals_record(self, roi, marking_frame):
        frame = Frame(data=marking_frame.data)
        record, overlay, _ = annotate_frame(frame, roi, PipelineConfig())
        changed = np.nonzero((overlay != frame.data).any(axis=-1))
        changed_set = {(int(x), int(y)) for y, x in zip(*changed)}
        is_red = np.nonzero(
            (overlay[..., 0] == 255) & (overlay[..., 1] == 0) & (overlay[..., 2] == 0)
        )
        red_and_changed = {
            (int(x), int(y)) for y, x in zip(*is_red) if (int(x), int(y)) in changed_set
        }
        assert red_and_changed == {(int(x), int(y)) for x, y in record.pixels}

    def test_deterministic(self, roi, marking_frame):
        frame = Frame(data=marking_frame.data)
        rec1, ov1, _ = annotate_frame(frame, roi)
        rec2, ov2, _ = annotate_frame(frame, roi)
        assert np.array_equal(rec1.pixels, rec2.pixels)
        assert np.array_equal(ov1, ov2)

    def test_stage_error_is_identified(self, roi, marking_frame):
        cfg = PipelineConfig(traversal=TraversalParams(theta=2000))
        with pytest.raises(StageError, match="circledat"):
            annotate_frame(Frame(data=marking_frame.data), roi, cfg)


class TestCoordsFiles:
    def test_round_trip(self, tmp_path):
        pixels = np.array([[3, 1], [10, 1], [2, 7]], dtype=np.int64)
        write_coords(tmp_path / "c.txt", pixels)
        assert np.array_equal(read_coords(tmp_path / "c.txt"), pixels)
        assert (tmp_path / "c.txt").read_text() == "3 1\n10 1\n2 7\n"

    def test_empty_is_zero_bytes(self, tmp_path):
        write_coords(tmp_path / "c.txt", np.empty((0, 2), np.int64))
        assert (tmp_path / "c.txt").stat().st_size == 0
        assert read_coords(tmp_path / "c.txt").shape == (0, 2)


class TestRunSequence:
    def test_output_inventory(self, small_seq_dir, roi, tmp_path):
        seq = load_sequence(small_seq_dir / "frames", seq_id="seq1")
        summary = run_sequence(seq, roi, PipelineConfig(), tmp_path)
        out = tmp_path / "seq1"
        for i in range(3):
            assert (out / "overlays" / f"frame_{i:06d}.png").is_file()
            assert (out / "coords" / f"frame_{i:06d}.txt").is_file()
        assert (out / "summary.json").is_file()
        assert summary.frames_total == 3
        assert summary.frames_with_marking == 3
        assert summary.frames_failed == 0

    def test_summary_structure(self, small_seq_dir, roi, tmp_path):
        seq = load_sequence(small_seq_dir / "frames", seq_id="seq1")
        run_sequence(seq, roi, PipelineConfig(), tmp_path)
        summary = json.loads((tmp_path / "seq1" / "summary.json").read_text())
        assert set(summary["timing"]) == set(STAGE_NAMES) | {"total"}
        assert summary["config"]["detect"]["threshold"] == 150
        assert summary["config"]["hsv"]["lower"] == [0, 70, 170]

    def test_byte_identical_reruns(self, small_seq_dir, roi, tmp_path):
        seq = load_sequence(small_seq_dir / "frames", seq_id="seq1")
        run_sequence(seq, roi, PipelineConfig(), tmp_path / "r1")
        run_sequence(seq, roi, PipelineConfig(), tmp_path / "r2")
        for i in range(3):
            name = f"frame_{i:06d}"
            a = (tmp_path / "r1" / "seq1" / "overlays" / f"{name}.png").read_bytes()
            b = (tmp_path / "r2" / "seq1" / "overlays" / f"{name}.png").read_bytes()
            assert a == b
            a = (tmp_path / "r1" / "seq1" / "coords" / f"{name}.txt").read_bytes()
            b = (tmp_path / "r2" / "seq1" / "coords" / f"{name}.txt").read_bytes()
            assert a == b
        s1 = json.loads((tmp_path / "r1" / "seq1" / "summary.json").read_text())
        s2 = json.loads((tmp_path / "r2" / "seq1" / "summary.json").read_text())
        s1.pop("timing"), s2.pop("timing")
        assert s1 == s2

    def test_absent_frame_writes_empty_file(self, roi, tmp_path):
        from conftest import write_frames

        frames_dir = tmp_path / "frames"
        write_frames(frames_dir, [np.full((480, 640, 3), 90, dtype=np.uint8)])
        seq = load_sequence(frames_dir, seq_id="graycase")
        summary = run_sequence(seq, roi, PipelineConfig(), tmp_path / "out")
        coords = tmp_path / "out" / "graycase" / "coords" / "frame_000000.txt"
        assert coords.stat().st_size == 0
        assert summary.frames_with_marking == 0
        # overlay equals the input frame pixel for pixel
        from PIL import Image

        overlay = np.asarray(
            Image.open(tmp_path / "out" / "graycase" / "overlays" / "frame_000000.png")
        )
        assert np.array_equal(overlay, np.full((480, 640, 3), 90, dtype=np.uint8))

    def test_invalid_roi_refuses_to_start(self, small_seq_dir, tmp_path):
        seq = load_sequence(small_seq_dir / "frames")
        bad = make_roi([(0, 0), (10, 0), (10, 10), (0, 10)], 1, 1)
        with pytest.raises(RoiValidationError):
            run_sequence(seq, bad, PipelineConfig(), tmp_path)

    def test_progress_is_monotone(self, small_seq_dir, roi, tmp_path):
        seq = load_sequence(small_seq_dir / "frames")
        seen = []
        run_sequence(seq, roi, PipelineConfig(), tmp_path, progress=lambda d, t: seen.append((d, t)))
        assert seen == [(1, 3), (2, 3), (3, 3)]


class TestTimingReport:
    def test_exactly_six_stages_plus_total(self, small_seq_dir, roi):
        seq = load_sequence(small_seq_dir / "frames")
        report = measure_stage_timings(seq, roi, PipelineConfig(), repeats=1)
        assert tuple(report.stages) == STAGE_NAMES
        assert report.total == pytest.approx(sum(report.stages.values()), rel=0.01)

    def test_repeats_same_structure(self, small_seq_dir, roi):
        seq = load_sequence(small_seq_dir / "frames")
        r1 = measure_stage_timings(seq, roi, PipelineConfig(), repeats=1)
        r3 = measure_stage_timings(seq, roi, PipelineConfig(), repeats=2)
        assert set(r1.stages) == set(r3.stages)

    def test_rejects_zero_repeats(self, small_seq_dir, roi):
        seq = load_sequence(small_seq_dir / "frames")
        with pytest.raises(ValueError):
            measure_stage_timings(seq, roi, PipelineConfig(), repeats=0)
