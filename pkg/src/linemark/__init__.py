"""linemark: annotate line markings in frame sequences.

A trapezoidal region of interest, picked once on a sequence's initial
frame, is warped to a bird's-eye view; color features are normalized and
thresholded in HSV; a column histogram decides marking presence; a
radius-bounded stack traversal collects the marking pixels across small
gaps; the pixels are projected back and written as red overlays plus
coordinate files. An evaluation harness scores the annotations against
reference edge maps and sweeps the presence threshold.
"""

from .color import HsvBounds, normalize_channel, normalize_hsv, rgb_to_hsv, threshold_hsv
from .detect import (
    PresenceDecision,
    SeedSet,
    VerticalHistogram,
    decide_presence,
    extract_seeds,
    hsv_frequency_profile,
    vertical_histogram,
)
from .errors import LinemarkError
from .evaluate import (
    AblationReport,
    Cbem,
    ContourOutline,
    EvalReport,
    auto_canny_thresholds,
    build_cbem,
    detection_rate,
    evaluate_frame,
    evaluate_frames,
    run_ablation,
)
from .frames import (
    Frame,
    FrameSequence,
    Roi,
    load_roi,
    load_sequence,
    make_roi,
    save_roi,
    validate_roi,
)
from .geometry import (
    WarpedRoi,
    compute_homography,
    invert_homography,
    map_point,
    map_points,
    unwarp_mask,
    warp_roi,
)
from .pipeline import (
    AnnotationRecord,
    PipelineConfig,
    RunSummary,
    TimingReport,
    annotate_frame,
    measure_stage_timings,
    run_sequence,
)
from .traversal import (
    BenchmarkReport,
    PixelSet,
    TraversalParams,
    benchmark_traversal,
    circledat,
    circledat_multi,
    sliding_window_collect,
)

__version__ = "0.1.0"
