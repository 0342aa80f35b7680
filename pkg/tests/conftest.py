import numpy as np
import pytest

from voxseg import LabelGrid, VolumeGrid


def make_volume(values, spacing=(1.0, 1.0, 1.0)) -> VolumeGrid:
    return VolumeGrid(intensities=np.asarray(values, dtype=np.int16), spacing=spacing)


def make_mask(values, spacing=(1.0, 1.0, 1.0)) -> LabelGrid:
    return LabelGrid(labels=np.asarray(values, dtype=np.uint8), spacing=spacing)


def linear_volume(nx, ny, nz, spacing=(1.0, 1.0, 1.0)) -> VolumeGrid:
    """Intensity equals the x-fastest linear index; handy for indexing checks."""
    flat = np.arange(nx * ny * nz, dtype=np.int16)
    return VolumeGrid(intensities=flat.reshape((nx, ny, nz), order="F"), spacing=spacing)


def sphere_phantom(n=64, radius=20, inside=300, outside=-400, noise_sd=0.0, rng=None):
    """Two-intensity sphere phantom and its analytic voxel mask."""
    c = (n - 1) / 2.0
    ax = np.arange(n, dtype=np.float64)
    dist2 = (
        (ax[:, None, None] - c) ** 2
        + (ax[None, :, None] - c) ** 2
        + (ax[None, None, :] - c) ** 2
    )
    sphere = dist2 <= radius * radius
    values = np.where(sphere, float(inside), float(outside))
    if noise_sd > 0:
        assert rng is not None
        values = values + rng.normal(0.0, noise_sd, size=values.shape)
    values = np.clip(np.rint(values), -32768, 32767).astype(np.int16)
    volume = VolumeGrid(intensities=values, spacing=(1.0, 1.0, 1.0))
    mask = LabelGrid(labels=sphere.astype(np.uint8), spacing=(1.0, 1.0, 1.0))
    return volume, mask


@pytest.fixture
def rng():
    return np.random.default_rng(20180510)
