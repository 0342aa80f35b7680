"""Batch evaluation: run cases end to end, aggregate, and emit reports.

A manifest lists cases (volume, strokes, zero or more ground-truth masks with
rater labels).  Each case is segmented exactly once; its mask is compared
against every rater and the raters against each other, yielding one
CaseMetrics row per pairing.  ``aggregate`` turns rows into per-column
summaries, paired comparisons (t-test, Pearson, origin regression) over
volumes and voxel counts, and five-number boxplot data.  ``emit`` writes
four CSV files plus a full-fidelity report.json that round-trips.

All math is double precision; rounding happens only at CSV emission
(volumes one decimal, DSC and HD two decimals, p and r three decimals).
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import CaseError, TooFewCases, TooFewValues, ZeroVariance
from .growcut import GrowCutParams, segment, strokes_from_json, strokes_to_seeds
from .grid import LabelGrid, VolumeGrid
from .metrics import CaseMetrics, compare_masks
from .nrrd_io import read_nrrd, write_nrrd_file
from .stats import (
    ComparisonStats,
    FiveNumber,
    StatSummary,
    compare_paired,
    descriptive,
    five_number,
)

ALG = "alg"   # side label for the automaton's mask in every pairing


@dataclass(frozen=True)
class CaseSpec:
    case_id: str
    volume_path: Path
    seeds_path: Path
    ground_truth: dict[str, Path] = field(default_factory=dict)
    interaction_minutes: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class PairRow:
    case_id: str
    a: str
    b: str
    metrics: CaseMetrics


@dataclass(frozen=True)
class CaseTiming:
    case_id: str
    total_seconds: float
    segment_seconds: float
    iterations: int
    converged: bool


@dataclass
class EvaluationReport:
    rows: list[PairRow]
    side_summaries: dict[str, dict[str, StatSummary]]
    pair_summaries: dict[str, dict[str, StatSummary]]
    comparisons: dict[str, dict[str, ComparisonStats]]
    boxplots: dict[str, dict[str, FiveNumber]]


def load_manifest(path: str | Path) -> list[CaseSpec]:
    """Read a batch manifest; relative paths resolve against the manifest dir."""
    path = Path(path)
    doc = json.loads(path.read_text())
    base = path.parent
    specs = []
    for entry in doc["cases"]:
        specs.append(
            CaseSpec(
                case_id=str(entry["id"]),
                volume_path=base / entry["volume"],
                seeds_path=base / entry["seeds"],
                ground_truth={
                    label: base / p for label, p in entry.get("ground_truth", {}).items()
                },
                interaction_minutes={
                    k: float(v) for k, v in entry.get("interaction_minutes", {}).items()
                },
            )
        )
    ids = [s.case_id for s in specs]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate case ids in manifest")
    return specs


def pairings(raters: list[str]) -> list[tuple[str, str]]:
    """Rater-vs-rater pairs first, then each rater vs the algorithmic mask."""
    raters = sorted(raters)
    pairs = [(a, b) for i, a in enumerate(raters) for b in raters[i + 1 :]]
    pairs += [(r, ALG) for r in raters]
    return pairs


def run_case(
    spec: CaseSpec,
    params: GrowCutParams | None = None,
    out_dir: Path | None = None,
) -> tuple[list[PairRow], CaseTiming]:
    """Segment one case and compare every mask pairing.

    The recorded elapsed time spans load -> segment -> save; it is attached
    to the rows that involve the algorithmic mask (rater-vs-rater rows get
    0.0 since no machine segmentation produced them).
    """
    t0 = time.perf_counter()
    try:
        volume = read_nrrd(spec.volume_path)
        if not isinstance(volume, VolumeGrid):
            raise TypeError(f"{spec.volume_path} is a mask, expected a short volume")
        seeds = strokes_to_seeds(
            strokes_from_json(Path(spec.seeds_path).read_text()), volume.dims
        )
        masks: dict[str, LabelGrid] = {}
        for label, gt_path in spec.ground_truth.items():
            gt = read_nrrd(gt_path)
            if not isinstance(gt, LabelGrid):
                raise TypeError(f"{gt_path} is a volume, expected a uchar mask")
            if gt.dims != volume.dims:
                raise ValueError(
                    f"ground truth {label} dims {gt.dims} != volume dims {volume.dims}"
                )
            masks[label] = gt
        result = segment(volume, seeds, params)
        masks[ALG] = result.mask
        if out_dir is not None:
            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            write_nrrd_file(result.mask, out_dir / f"{spec.case_id}_mask.nrrd")
        elapsed = time.perf_counter() - t0

        rows = []
        for a, b in pairings(sorted(spec.ground_truth)):
            pair_elapsed = elapsed if ALG in (a, b) else 0.0
            rows.append(
                PairRow(
                    case_id=spec.case_id,
                    a=a,
                    b=b,
                    metrics=compare_masks(masks[a], masks[b], elapsed_seconds=pair_elapsed),
                )
            )
    except Exception as exc:
        raise CaseError(spec.case_id, exc) from exc
    timing = CaseTiming(
        case_id=spec.case_id,
        total_seconds=elapsed,
        segment_seconds=result.elapsed_seconds,
        iterations=result.iterations,
        converged=result.converged,
    )
    return rows, timing


def _collect_side_values(rows: list[PairRow]) -> dict[str, dict[str, dict[str, float]]]:
    # metric -> side -> case -> value; cross-checks that repeated mentions agree
    out: dict[str, dict[str, dict[str, float]]] = {"volume_mm3": {}, "voxels": {}}
    for row in rows:
        m = row.metrics
        for side, vol, vox in (
            (row.a, m.volume_a_mm3, m.voxels_a),
            (row.b, m.volume_b_mm3, m.voxels_b),
        ):
            for metric, value in (("volume_mm3", float(vol)), ("voxels", float(vox))):
                per_case = out[metric].setdefault(side, {})
                prev = per_case.get(row.case_id)
                if prev is not None and prev != value:
                    raise ValueError(
                        f"inconsistent {metric} for case {row.case_id} side {side}: "
                        f"{prev} vs {value}"
                    )
                per_case[row.case_id] = value
    return out


def aggregate(
    rows: list[PairRow],
    interaction_minutes: dict[str, dict[str, float]] | None = None,
) -> EvaluationReport:
    """Build the full report from per-case pairing rows (needs >= 2 cases).

    DSC is summarized in percent and HD in voxel units.  Comparisons with
    degenerate inputs (constant differences) are omitted rather than failing
    the whole report.
    """
    case_ids = sorted({row.case_id for row in rows})
    if len(case_ids) < 2:
        raise TooFewCases(f"statistics need >= 2 cases, got {len(case_ids)}")

    side_values = _collect_side_values(rows)
    sides = sorted(side_values["volume_mm3"], key=lambda s: (s == ALG, s))
    pair_names = sorted({f"{row.a}:{row.b}" for row in rows})

    side_summaries: dict[str, dict[str, StatSummary]] = {}
    boxplots: dict[str, dict[str, FiveNumber]] = {}
    for side in sides:
        metrics_for_side: dict[str, StatSummary] = {}
        box_for_side: dict[str, FiveNumber] = {}
        for metric in ("volume_mm3", "voxels"):
            vals = [v for _, v in sorted(side_values[metric][side].items())]
            if len(vals) >= 2:
                metrics_for_side[metric] = descriptive(vals)
                box_for_side[metric] = five_number(vals)
        if interaction_minutes and side in interaction_minutes:
            mins = [v for _, v in sorted(interaction_minutes[side].items())]
            if len(mins) >= 2:
                metrics_for_side["interaction_min"] = descriptive(mins)
                box_for_side["interaction_min"] = five_number(mins)
        side_summaries[side] = metrics_for_side
        boxplots[side] = box_for_side

    pair_summaries: dict[str, dict[str, StatSummary]] = {}
    for name in pair_names:
        dscs, hds = [], []
        for row in sorted(rows, key=lambda r: r.case_id):
            if f"{row.a}:{row.b}" == name:
                dscs.append(row.metrics.dsc * 100.0)
                hds.append(row.metrics.hd)
        if len(dscs) >= 2:
            pair_summaries[name] = {
                "dsc_pct": descriptive(dscs),
                "hd_voxel": descriptive(hds),
            }
            boxplots[name] = {
                "dsc_pct": five_number(dscs),
                "hd_voxel": five_number(hds),
            }

    comparisons: dict[str, dict[str, ComparisonStats]] = {}
    for name in pair_names:
        a, b = name.split(":")
        per_pair: dict[str, ComparisonStats] = {}
        for metric, csv_name in (("volume_mm3", "volume"), ("voxels", "voxels")):
            va = side_values[metric].get(a, {})
            vb = side_values[metric].get(b, {})
            common = sorted(set(va) & set(vb))
            if len(common) < 2:
                continue
            try:
                per_pair[csv_name] = compare_paired(
                    [va[c] for c in common], [vb[c] for c in common]
                )
            except (ZeroVariance, TooFewValues):
                continue
        comparisons[name] = per_pair

    return EvaluationReport(
        rows=list(rows),
        side_summaries=side_summaries,
        pair_summaries=pair_summaries,
        comparisons=comparisons,
        boxplots=boxplots,
    )


# --- emission ---------------------------------------------------------------

_METRIC_DECIMALS = {
    "volume_mm3": 1,
    "voxels": 1,
    "dsc_pct": 2,
    "hd_voxel": 2,
    "interaction_min": 2,
}


def _fmt(value: float, decimals: int) -> str:
    return f"{value:.{decimals}f}"


def rows_to_csv(rows: list[PairRow]) -> str:
    lines = ["case,a,b,volume_a_mm3,volume_b_mm3,voxels_a,voxels_b,dsc_pct,hd_voxel,elapsed_s"]
    for row in rows:
        m = row.metrics
        lines.append(
            ",".join(
                [
                    row.case_id,
                    row.a,
                    row.b,
                    _fmt(m.volume_a_mm3, 1),
                    _fmt(m.volume_b_mm3, 1),
                    str(m.voxels_a),
                    str(m.voxels_b),
                    _fmt(m.dsc * 100.0, 2),
                    _fmt(m.hd, 2),
                    _fmt(m.elapsed_seconds, 3),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def rows_from_csv(text: str) -> list[PairRow]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    rows = []
    for line in lines[1:]:
        case, a, b, vol_a, vol_b, vox_a, vox_b, dsc_pct, hd, elapsed = line.split(",")
        rows.append(
            PairRow(
                case_id=case,
                a=a,
                b=b,
                metrics=CaseMetrics(
                    dsc=float(dsc_pct) / 100.0,
                    hd=float(hd),
                    volume_a_mm3=float(vol_a),
                    volume_b_mm3=float(vol_b),
                    voxels_a=int(vox_a),
                    voxels_b=int(vox_b),
                    elapsed_seconds=float(elapsed),
                ),
            )
        )
    return rows


def summary_to_csv(report: EvaluationReport) -> str:
    lines = ["scope,name,metric,n,min,max,mean,sd"]
    for scope, table in (("side", report.side_summaries), ("pair", report.pair_summaries)):
        for name in sorted(table):
            for metric in sorted(table[name]):
                s = table[name][metric]
                d = _METRIC_DECIMALS[metric]
                lines.append(
                    f"{scope},{name},{metric},{s.n},{_fmt(s.min, d)},{_fmt(s.max, d)},"
                    f"{_fmt(s.mean, d)},{_fmt(s.sd, d)}"
                )
    return "\n".join(lines) + "\n"


def comparisons_to_csv(report: EvaluationReport) -> str:
    lines = ["metric,a,b,p,r"]
    entries = []
    for pair in report.comparisons:
        a, b = pair.split(":")
        for metric, stats in report.comparisons[pair].items():
            entries.append((metric, a, b, stats))
    entries.sort(key=lambda e: (e[0], e[1], e[2]))
    for metric, a, b, stats in entries:
        lines.append(f"{metric},{a},{b},{_fmt(stats.p, 3)},{_fmt(stats.r, 3)}")
    return "\n".join(lines) + "\n"


def boxplot_to_csv(report: EvaluationReport) -> str:
    lines = ["scope,name,metric,min,q1,median,q3,max"]
    for name in sorted(report.boxplots):
        scope = "pair" if ":" in name else "side"
        for metric in sorted(report.boxplots[name]):
            f = report.boxplots[name][metric]
            d = _METRIC_DECIMALS[metric]
            lines.append(
                f"{scope},{name},{metric},{_fmt(f.min, d)},{_fmt(f.q1, d)},"
                f"{_fmt(f.median, d)},{_fmt(f.q3, d)},{_fmt(f.max, d)}"
            )
    return "\n".join(lines) + "\n"


def report_to_json(report: EvaluationReport) -> str:
    return json.dumps(asdict(report), indent=1)


def report_from_json(text: str) -> EvaluationReport:
    doc = json.loads(text)
    return EvaluationReport(
        rows=[
            PairRow(
                case_id=r["case_id"], a=r["a"], b=r["b"], metrics=CaseMetrics(**r["metrics"])
            )
            for r in doc["rows"]
        ],
        side_summaries={
            k: {m: StatSummary(**v) for m, v in t.items()}
            for k, t in doc["side_summaries"].items()
        },
        pair_summaries={
            k: {m: StatSummary(**v) for m, v in t.items()}
            for k, t in doc["pair_summaries"].items()
        },
        comparisons={
            k: {m: ComparisonStats(**v) for m, v in t.items()}
            for k, t in doc["comparisons"].items()
        },
        boxplots={
            k: {m: FiveNumber(**v) for m, v in t.items()}
            for k, t in doc["boxplots"].items()
        },
    )


def emit(report: EvaluationReport, out_dir: str | Path) -> list[Path]:
    """Write cases_pairwise.csv, summary.csv, comparisons.csv, boxplot.csv, report.json."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = {
        "cases_pairwise.csv": rows_to_csv(report.rows),
        "summary.csv": summary_to_csv(report),
        "comparisons.csv": comparisons_to_csv(report),
        "boxplot.csv": boxplot_to_csv(report),
        "report.json": report_to_json(report),
    }
    written = []
    for name, text in outputs.items():
        path = out_dir / name
        path.write_text(text)
        written.append(path)
    return written


def run_batch(
    manifest_path: str | Path,
    out_dir: str | Path,
    params: GrowCutParams | None = None,
    workers: int = 1,
) -> tuple[EvaluationReport, list[CaseTiming]]:
    """Run every case in the manifest and emit the aggregated report.

    A failing case aborts the batch: rows of already-completed cases are
    still written to ``out_dir`` before the tagged CaseError propagates.
    Workers > 1 run cases concurrently (timings then overlap; keep the
    default of 1 when segmentation times matter).
    """
    specs = load_manifest(manifest_path)
    out_dir = Path(out_dir)
    rows: list[PairRow] = []
    timings: list[CaseTiming] = []
    interaction: dict[str, dict[str, float]] = {}

    def finish_partial() -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "cases_pairwise.csv").write_text(rows_to_csv(rows))

    try:
        if workers <= 1:
            results = (run_case(spec, params, out_dir) for spec in specs)
            for case_rows, timing in results:
                rows.extend(case_rows)
                timings.append(timing)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(run_case, spec, params, out_dir) for spec in specs]
                for future in futures:
                    case_rows, timing = future.result()
                    rows.extend(case_rows)
                    timings.append(timing)
    except CaseError:
        finish_partial()
        raise

    for spec in specs:
        for rater, minutes in spec.interaction_minutes.items():
            interaction.setdefault(rater, {})[spec.case_id] = minutes

    report = aggregate(rows, interaction or None)
    emit(report, out_dir)
    (out_dir / "timings.json").write_text(
        json.dumps([asdict(t) for t in timings], indent=1)
    )
    return report, timings
