import json

import numpy as np
import pytest

from voxseg import (
    FOREGROUND,
    LabelGrid,
    Stroke,
    VolumeGrid,
    aggregate,
    emit,
    load_manifest,
    run_batch,
    run_case,
    strokes_to_json,
    write_nrrd_file,
)
from voxseg.datasets import load_mandible_study, study_interaction_minutes, study_rows
from voxseg.errors import CaseError, TooFewCases
from voxseg.pipeline import (
    EvaluationReport,
    report_from_json,
    report_to_json,
    rows_from_csv,
    rows_to_csv,
)

SPACING = (0.25, 0.25, 1.0)


def block_volume(n=16, split=8):
    """High-intensity slab x < split against a low background; exact to segment."""
    values = np.full((n, n, n), -400, dtype=np.int16)
    values[:split, :, :] = 300
    return VolumeGrid(intensities=values, spacing=SPACING)


def block_mask(n=16, split=8):
    labels = np.zeros((n, n, n), dtype=np.uint8)
    labels[:split, :, :] = 1
    return LabelGrid(labels=labels, spacing=SPACING)


def write_case(tmp_path, case_id, n=16, split=8, raters=("A", "B"), rater_masks=None):
    vol_path = tmp_path / f"{case_id}_vol.nrrd"
    write_nrrd_file(block_volume(n, split), vol_path)
    seeds_path = tmp_path / f"{case_id}_seeds.json"
    seeds_path.write_text(
        strokes_to_json(
            [
                Stroke("axial", 0, [(0, 0)], "foreground"),
                Stroke("axial", 0, [(n - 1, n - 1)], "background"),
            ]
        )
    )
    gts = {}
    for rater in raters:
        mask = rater_masks[rater] if rater_masks else block_mask(n, split)
        p = tmp_path / f"{case_id}_gt_{rater}.nrrd"
        write_nrrd_file(mask, p)
        gts[rater] = p.name
    return {
        "id": case_id,
        "volume": vol_path.name,
        "seeds": seeds_path.name,
        "ground_truth": gts,
    }


def write_manifest(tmp_path, cases):
    path = tmp_path / "cases.json"
    path.write_text(json.dumps({"cases": cases}))
    return path


def test_run_case_perfect_agreement(tmp_path):
    manifest = write_manifest(tmp_path, [write_case(tmp_path, "c1")])
    spec = load_manifest(manifest)[0]
    rows, timing = run_case(spec, out_dir=tmp_path / "out")
    by_pair = {(r.a, r.b): r.metrics for r in rows}
    assert set(by_pair) == {("A", "B"), ("A", "alg"), ("B", "alg")}
    # analytic ground truth and a noise-free two-region volume: exact recovery
    for pair, m in by_pair.items():
        assert m.dsc == 1.0
        assert m.hd == 0.0
    assert by_pair[("A", "alg")].voxels_a == 8 * 16 * 16
    assert timing.total_seconds >= timing.segment_seconds
    assert timing.converged
    assert (tmp_path / "out" / "c1_mask.nrrd").exists()


def test_run_case_identical_rater_masks(tmp_path):
    case = write_case(tmp_path, "c1")
    spec = load_manifest(write_manifest(tmp_path, [case]))[0]
    rows, _ = run_case(spec)
    ab = next(r for r in rows if (r.a, r.b) == ("A", "B"))
    assert ab.metrics.dsc == 1.0 and ab.metrics.hd == 0.0
    assert ab.metrics.elapsed_seconds == 0.0
    alg = next(r for r in rows if (r.a, r.b) == ("A", "alg"))
    assert alg.metrics.elapsed_seconds > 0.0


def test_aggregate_too_few_cases(tmp_path):
    spec = load_manifest(write_manifest(tmp_path, [write_case(tmp_path, "c1")]))[0]
    rows, _ = run_case(spec)
    with pytest.raises(TooFewCases):
        aggregate(rows)


def test_batch_aborts_on_broken_case_with_partial_report(tmp_path):
    good = write_case(tmp_path, "c1")
    broken = dict(good, id="c2", volume="missing.nrrd")
    manifest = write_manifest(tmp_path, [good, broken])
    out = tmp_path / "out"
    with pytest.raises(CaseError) as err:
        run_batch(manifest, out)
    assert err.value.case_id == "c2"
    text = (out / "cases_pairwise.csv").read_text()
    assert "c1,A,B" in text
    assert "c2" not in text


def test_prefix_mask_batch_reproduces_study_voxel_statistics(tmp_path):
    """Ten synthetic cases whose masks are linear-order prefixes sized to the
    bundled study's voxel counts; the pipeline must reproduce its voxel
    means/sds and the paired-comparison p and r values end to end."""
    study = load_mandible_study()
    n = 64
    cases = []
    for i, case_id in enumerate(study["case_ids"]):
        masks = {}
        for rater in ("A", "B"):
            labels = np.zeros(n * n * n, dtype=np.uint8)
            labels[: study["voxel_counts"][rater][i]] = 1
            masks[rater] = LabelGrid(
                labels=labels.reshape((n, n, n), order="F"), spacing=SPACING
            )
        k_alg = study["voxel_counts"]["alg"][i]
        values = np.full(n * n * n, -400, dtype=np.int16)
        values[:k_alg] = 300
        volume = VolumeGrid(
            intensities=values.reshape((n, n, n), order="F"), spacing=SPACING
        )
        vol_path = tmp_path / f"{case_id}_vol.nrrd"
        write_nrrd_file(volume, vol_path)
        seeds_path = tmp_path / f"{case_id}_seeds.json"
        seeds_path.write_text(
            strokes_to_json(
                [
                    Stroke("axial", 0, [(0, 0)], "foreground"),
                    Stroke("axial", n - 1, [(n - 1, n - 1)], "background"),
                ]
            )
        )
        gt = {}
        for rater, mask in masks.items():
            p = tmp_path / f"{case_id}_gt_{rater}.nrrd"
            write_nrrd_file(mask, p)
            gt[rater] = p.name
        cases.append(
            {
                "id": case_id,
                "volume": vol_path.name,
                "seeds": seeds_path.name,
                "ground_truth": gt,
            }
        )
    report, timings = run_batch(write_manifest(tmp_path, cases), tmp_path / "out")

    vox = report.side_summaries
    assert round(vox["A"]["voxels"].mean, 1) == 119147.0
    assert round(vox["B"]["voxels"].mean, 1) == 119200.7
    assert round(vox["alg"]["voxels"].mean, 1) == 123613.5
    assert abs(vox["A"]["voxels"].sd - 46957.5) < 0.05
    assert abs(vox["B"]["voxels"].sd - 45568.9) < 0.05
    assert abs(vox["alg"]["voxels"].sd - 58013.4) < 0.05

    comp = report.comparisons
    assert round(comp["A:B"]["voxels"].p, 3) == 0.960
    assert round(comp["A:alg"]["voxels"].p, 3) == 0.502
    assert round(comp["B:alg"]["voxels"].p, 3) == 0.493
    assert round(comp["A:B"]["voxels"].r, 3) == 0.998
    assert round(comp["A:alg"]["voxels"].r, 3) == 0.948
    assert round(comp["B:alg"]["voxels"].r, 3) == 0.957
    # physical volumes are voxel counts scaled by the spacing product, so the
    # volume comparisons carry identical p and r
    assert comp["A:B"]["volume"].p == pytest.approx(comp["A:B"]["voxels"].p, abs=1e-9)
    assert all(t.converged for t in timings)


def test_aggregate_self_consistency_on_full_precision_rows():
    rows = study_rows()
    report = aggregate(rows, study_interaction_minutes())
    again = aggregate(report.rows, study_interaction_minutes())
    assert again == report


def test_report_json_roundtrip():
    report = aggregate(study_rows(), study_interaction_minutes())
    back = report_from_json(report_to_json(report))
    assert back == report


def test_rows_csv_roundtrip_at_csv_precision():
    rows = study_rows()
    back = rows_from_csv(rows_to_csv(rows))
    assert len(back) == len(rows)
    for r1, r2 in zip(rows, back):
        assert (r1.case_id, r1.a, r1.b) == (r2.case_id, r2.a, r2.b)
        assert r2.metrics.hd == round(r1.metrics.hd, 2)
        assert r2.metrics.voxels_a == r1.metrics.voxels_a


def test_emit_contains_expected_comparison_row(tmp_path):
    report = aggregate(study_rows())
    emit(report, tmp_path)
    lines = (tmp_path / "comparisons.csv").read_text().splitlines()
    assert lines[0] == "metric,a,b,p,r"
    assert "volume,A,B,0.803,0.997" in lines


def test_emit_byte_stable(tmp_path):
    report = aggregate(study_rows(), study_interaction_minutes())
    emit(report, tmp_path / "one")
    emit(report, tmp_path / "two")
    for name in ("cases_pairwise.csv", "summary.csv", "comparisons.csv", "boxplot.csv", "report.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


def test_emit_empty_report_headers_only(tmp_path):
    report = EvaluationReport(
        rows=[], side_summaries={}, pair_summaries={}, comparisons={}, boxplots={}
    )
    emit(report, tmp_path)
    assert (tmp_path / "cases_pairwise.csv").read_text().splitlines() == [
        "case,a,b,volume_a_mm3,volume_b_mm3,voxels_a,voxels_b,dsc_pct,hd_voxel,elapsed_s"
    ]
    assert (tmp_path / "summary.csv").read_text().splitlines() == [
        "scope,name,metric,n,min,max,mean,sd"
    ]
    assert (tmp_path / "comparisons.csv").read_text().splitlines() == ["metric,a,b,p,r"]
    assert (tmp_path / "boxplot.csv").read_text().splitlines() == [
        "scope,name,metric,min,q1,median,q3,max"
    ]


def test_summary_recomputation_from_emitted_rows_is_close(tmp_path):
    report = aggregate(study_rows())
    emit(report, tmp_path)
    rows = rows_from_csv((tmp_path / "cases_pairwise.csv").read_text())
    recomputed = aggregate(rows)
    for pair, table in report.pair_summaries.items():
        for metric, summary in table.items():
            again = recomputed.pair_summaries[pair][metric]
            # rows were rounded to two decimals at emission
            assert abs(again.mean - summary.mean) < 0.01
            assert abs(again.sd - summary.sd) < 0.01


def test_workers_option_gives_same_rows(tmp_path):
    cases = [write_case(tmp_path, f"c{i}", split=4 + i) for i in range(3)]
    manifest = write_manifest(tmp_path, cases)
    r1, _ = run_batch(manifest, tmp_path / "o1", workers=1)
    r2, _ = run_batch(manifest, tmp_path / "o2", workers=3)
    key = lambda r: (r.case_id, r.a, r.b)
    m1 = {key(r): (r.metrics.dsc, r.metrics.hd, r.metrics.voxels_a) for r in r1.rows}
    m2 = {key(r): (r.metrics.dsc, r.metrics.hd, r.metrics.voxels_a) for r in r2.rows}
    assert m1 == m2
