"""Bundled reference measurements for a ten-case mandibular CT study.

Two expert raters (A, B) produced slice-by-slice ground-truth masks and a
stroke-seeded GrowCut run produced the algorithmic mask; the bundled JSON
holds the per-case volumes, voxel counts, pairwise Dice/Hausdorff values,
and rater interaction times.  ``study_rows`` rebuilds the pipeline's pairing
rows from it so the whole statistics stack can be exercised without any
image data on disk.
"""
from __future__ import annotations

import json
from importlib import resources

from .metrics import CaseMetrics
from .pipeline import PairRow


def load_mandible_study() -> dict:
    text = resources.files("voxseg.data").joinpath("mandible_study.json").read_text()
    return json.loads(text)


def study_rows(study: dict | None = None) -> list[PairRow]:
    """Per-case pairing rows (A:B, A:alg, B:alg) from the bundled measurements."""
    study = study or load_mandible_study()
    case_ids = study["case_ids"]
    rows = []
    for pair, values in study["pairwise"].items():
        a, b = pair.split(":")
        for i, case_id in enumerate(case_ids):
            rows.append(
                PairRow(
                    case_id=case_id,
                    a=a,
                    b=b,
                    metrics=CaseMetrics(
                        dsc=values["dsc_pct"][i] / 100.0,
                        hd=values["hd_voxel"][i],
                        volume_a_mm3=study["volumes_mm3"][a][i],
                        volume_b_mm3=study["volumes_mm3"][b][i],
                        voxels_a=study["voxel_counts"][a][i],
                        voxels_b=study["voxel_counts"][b][i],
                    ),
                )
            )
    return rows


def study_interaction_minutes(study: dict | None = None) -> dict[str, dict[str, float]]:
    study = study or load_mandible_study()
    return {
        rater: {
            case_id: float(minutes)
            for case_id, minutes in zip(study["case_ids"], per_case)
        }
        for rater, per_case in study["interaction_minutes"].items()
    }
