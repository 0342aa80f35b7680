"""voxseg: stroke-seeded GrowCut segmentation workbench for CT volumes.

Core pieces: a strict NRRD-subset reader/writer, slice extraction with
window/level display mapping, the GrowCut cellular automaton, contour-to-mask
rasterization for ground truth, Dice/Hausdorff/volume metrics with an exact
Euclidean distance transform, a paired-statistics engine, a batch evaluation
pipeline with CSV/JSON reports, and an HTTP service for interactive use.
"""

from .contours import ContourStack, contours_from_json, contours_to_json, rasterize_slice, stack_to_mask
from .grid import LabelGrid, SliceImage, VolumeGrid, extract_slice, window_level
from .growcut import (
    BACKGROUND,
    FOREGROUND,
    UNLABELED,
    AutomatonState,
    GrowCutParams,
    SeedSet,
    SegmentationResult,
    Stroke,
    init_state,
    segment,
    step,
    strokes_from_json,
    strokes_to_json,
    strokes_to_seeds,
)
from .metrics import (
    CaseMetrics,
    compare_masks,
    dice,
    euclidean_distance_transform,
    hausdorff,
    physical_volume,
    squared_distance_field,
)
from .nrrd_io import parse_nrrd, read_nrrd, write_nrrd, write_nrrd_file
from .pipeline import (
    CaseSpec,
    EvaluationReport,
    PairRow,
    aggregate,
    emit,
    load_manifest,
    run_batch,
    run_case,
)
from .stats import (
    ComparisonStats,
    FiveNumber,
    StatSummary,
    compare_paired,
    descriptive,
    five_number,
    paired_t_two_sided,
    pearson_r,
    regression_through_origin,
    regularized_incomplete_beta,
    slope_comparison_t,
    student_t_two_sided_p,
)

__version__ = "0.1.0"
