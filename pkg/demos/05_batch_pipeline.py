"""End-to-end batch evaluation: manifest in, CSV/JSON reports out.

Creates three synthetic cases on disk (volume + strokes + two rater masks),
runs the batch pipeline, and shows the emitted report files - the same flow
as ``seg run --manifest cases.json --out reports``.
"""
import json
import tempfile
from pathlib import Path

import numpy as np

from voxseg import LabelGrid, Stroke, VolumeGrid, run_batch, strokes_to_json, write_nrrd_file

workdir = Path(tempfile.mkdtemp(prefix="voxseg_demo_"))
print(f"working in {workdir}")

n = 24
cases = []
for i, split in enumerate((8, 12, 16)):
    case_id = f"case{i + 1}"
    values = np.full((n, n, n), -400, dtype=np.int16)
    values[:split, :, :] = 300
    write_nrrd_file(VolumeGrid(intensities=values, spacing=(0.5, 0.5, 1.0)),
                    workdir / f"{case_id}.nrrd")

    labels = np.zeros((n, n, n), dtype=np.uint8)
    labels[:split, :, :] = 1
    labels_a = labels.copy()
    labels_a[split, :, : 2 * i + 3] = 1        # rater A reads the edge wider
    write_nrrd_file(LabelGrid(labels=labels_a, spacing=(0.5, 0.5, 1.0)),
                    workdir / f"{case_id}_gt_a.nrrd")
    labels_b = labels.copy()
    labels_b[split - 1, :, : 3 * i + 2] = 0    # rater B reads it thinner
    write_nrrd_file(LabelGrid(labels=labels_b, spacing=(0.5, 0.5, 1.0)),
                    workdir / f"{case_id}_gt_b.nrrd")

    (workdir / f"{case_id}_seeds.json").write_text(strokes_to_json([
        Stroke("axial", 0, [(0, 0)], "foreground"),
        Stroke("axial", 0, [(n - 1, n - 1)], "background"),
    ]))
    cases.append({
        "id": case_id,
        "volume": f"{case_id}.nrrd",
        "seeds": f"{case_id}_seeds.json",
        "ground_truth": {"A": f"{case_id}_gt_a.nrrd", "B": f"{case_id}_gt_b.nrrd"},
        "interaction_minutes": {"A": 30 + i, "B": 33 - i},
    })

manifest = workdir / "cases.json"
manifest.write_text(json.dumps({"cases": cases}, indent=1))

report, timings = run_batch(manifest, workdir / "reports")
print(f"\n{len(timings)} cases segmented:")
for t in timings:
    print(f"  {t.case_id}: {t.iterations} sweeps, {t.segment_seconds:.2f}s "
          f"(converged: {t.converged})")

print("\nper-pair rows:")
for row in report.rows:
    m = row.metrics
    print(f"  {row.case_id} {row.a}:{row.b}  DSC {m.dsc*100:6.2f}%  HD {m.hd:5.2f}  "
          f"voxels {m.voxels_a} vs {m.voxels_b}")

print("\nemitted files:")
for p in sorted((workdir / "reports").iterdir()):
    print(f"  {p.name} ({p.stat().st_size} bytes)")

print("\ncomparisons.csv:")
print((workdir / "reports" / "comparisons.csv").read_text())
