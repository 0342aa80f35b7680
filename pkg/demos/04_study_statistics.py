"""The full statistics battery over the bundled ten-case study measurements.

Rebuilds pairing rows from the packaged per-case values (two expert raters
plus the GrowCut run), aggregates them, and prints the volume, voxel, Dice,
and Hausdorff summaries together with the paired t-test / Pearson / slope
comparisons - the whole quantitative evaluation at desk scale.
"""
from voxseg import aggregate
from voxseg.datasets import study_interaction_minutes, study_rows

report = aggregate(study_rows(), study_interaction_minutes())

print("volume summaries (cm^3):")
for side in ("A", "B", "alg"):
    s = report.side_summaries[side]["volume_mm3"]
    print(f"  {side:3s}: mean {s.mean/1000:6.2f} +/- {s.sd/1000:5.2f}   "
          f"range [{s.min/1000:.2f}, {s.max/1000:.2f}]")

print("\nvoxel-count summaries:")
for side in ("A", "B", "alg"):
    s = report.side_summaries[side]["voxels"]
    print(f"  {side:3s}: mean {s.mean:9.1f} +/- {s.sd:7.1f}")

print("\nagreement summaries:")
for pair in ("A:B", "A:alg", "B:alg"):
    d = report.pair_summaries[pair]["dsc_pct"]
    h = report.pair_summaries[pair]["hd_voxel"]
    print(f"  {pair:6s}: DSC {d.mean:5.2f} +/- {d.sd:4.2f} %   "
          f"HD {h.mean:5.2f} +/- {h.sd:5.2f} voxels")

print("\npaired comparisons (p, r, slope through origin):")
for pair in ("A:B", "A:alg", "B:alg"):
    for metric in ("volume", "voxels"):
        c = report.comparisons[pair][metric]
        print(f"  {pair:6s} {metric:7s}: p = {c.p:.3f}   r = {c.r:.3f}   "
              f"b = {c.slope_b:.3f} +/- {c.slope_se:.3f}")

print("\nboxplot five-number summaries (DSC %):")
for pair in ("A:B", "A:alg", "B:alg"):
    f = report.boxplots[pair]["dsc_pct"]
    print(f"  {pair:6s}: {f.min:.2f} | {f.q1:.2f} | {f.median:.2f} | {f.q3:.2f} | {f.max:.2f}")

print("\ninteraction time (minutes):")
for side in ("A", "B"):
    s = report.side_summaries[side]["interaction_min"]
    print(f"  rater {side}: {s.mean:.1f} +/- {s.sd:.2f}")
