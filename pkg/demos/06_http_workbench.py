"""The interactive workflow over HTTP: catalog, strokes, segment, metrics.

Starts the service in-process against a phantom volume, then drives the same
request sequence the browser client issues: open a session, paint strokes,
run GrowCut, fetch the overlay, register ground truth, and read the metrics.
"""
import tempfile
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from voxseg import LabelGrid, VolumeGrid, write_nrrd_file
from voxseg.service import create_app

data_dir = Path(tempfile.mkdtemp(prefix="voxseg_http_"))
n = 32
ax = np.arange(n, dtype=np.float64)
sphere = ((ax[:, None, None] - 15.5) ** 2 + (ax[None, :, None] - 15.5) ** 2
          + (ax[None, None, :] - 15.5) ** 2) <= 100
write_nrrd_file(VolumeGrid(
    intensities=np.where(sphere, 300, -400).astype(np.int16), spacing=(1, 1, 1)),
    data_dir / "phantom.nrrd")
write_nrrd_file(LabelGrid(labels=sphere.astype(np.uint8), spacing=(1, 1, 1)),
                data_dir / "phantom_gt.nrrd")

client = TestClient(create_app(data_dir))

print("GET /volumes ->", client.get("/volumes").json())

sid = client.post("/sessions", json={"volume_id": "phantom"}).json()["id"]
print(f"opened session {sid}")

png = client.get(f"/volumes/phantom/slice",
                 params={"plane": "axial", "index": 15, "window": 1000, "level": 0})
print(f"axial slice PNG: {len(png.content)} bytes")

strokes = {"strokes": [
    {"plane": "axial", "index": 15, "label": "foreground",
     "pixels": [[15, 15], [16, 15], [15, 16], [16, 16]]},
    {"plane": "axial", "index": 15, "label": "background",
     "pixels": [[1, 1], [30, 1], [1, 30], [30, 30]]},
]}
resp = client.post(f"/sessions/{sid}/strokes", json=strokes).json()
print(f"painted {len(resp['seeds'])} seed voxels")

run = client.post(f"/sessions/{sid}/segment", json={}).json()
print(f"segmented: mask {run['mask_id']}, {run['iterations']} sweeps, "
      f"{run['elapsed_seconds']:.2f}s, converged={run['converged']}")

overlay = client.get(f"/sessions/{sid}/overlay", params={"plane": "axial", "index": 15})
print(f"overlay PNG: {len(overlay.content)} bytes")

mask_bytes = client.get(f"/masks/{run['mask_id']}").content
print(f"mask NRRD: {len(mask_bytes)} bytes")

client.post(f"/sessions/{sid}/ground_truth", json={"path": "phantom_gt.nrrd"})
metrics = client.get(f"/sessions/{sid}/metrics").json()
print(f"metrics vs ground truth: DSC {metrics['dsc']*100:.2f}%, "
      f"HD {metrics['hd']:.2f} voxels, "
      f"{metrics['voxels_a']} vs {metrics['voxels_b']} voxels")
