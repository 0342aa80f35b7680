import numpy as np
import pytest

from voxseg import SliceImage, extract_slice, window_level
from voxseg.errors import IndexOutOfRange, NonPositiveWindow
from voxseg.grid import plane_extent

from conftest import linear_volume, make_volume


def test_axial_slice_samples():
    v = linear_volume(2, 2, 2)
    s = extract_slice(v, "axial", 1)
    assert (s.width, s.height) == (2, 2)
    assert s.samples.ravel().tolist() == [4, 5, 6, 7]


def test_sagittal_slice_samples():
    v = linear_volume(2, 2, 2)
    s = extract_slice(v, "sagittal", 0)
    assert (s.width, s.height) == (2, 2)
    assert s.samples.ravel().tolist() == [0, 2, 4, 6]


def test_coronal_slice_samples():
    v = linear_volume(2, 2, 2)
    s = extract_slice(v, "coronal", 0)
    # sample (u=x, v=z) = x + 4z
    assert s.samples.ravel().tolist() == [0, 1, 4, 5]


def test_slice_index_bounds():
    v = linear_volume(2, 3, 4)
    with pytest.raises(IndexOutOfRange):
        extract_slice(v, "axial", 4)
    with pytest.raises(IndexOutOfRange):
        extract_slice(v, "sagittal", 2)
    with pytest.raises(IndexOutOfRange):
        extract_slice(v, "coronal", -1)
    with pytest.raises(ValueError):
        extract_slice(v, "oblique", 0)


def test_plane_extents():
    v = linear_volume(2, 3, 4)
    assert plane_extent(v.dims, "axial") == 4
    assert plane_extent(v.dims, "sagittal") == 2
    assert plane_extent(v.dims, "coronal") == 3


def test_axial_slices_reassemble_volume(rng):
    values = rng.integers(-1000, 3000, size=(4, 5, 6), dtype=np.int16)
    v = make_volume(values)
    rebuilt = np.stack(
        [extract_slice(v, "axial", k).samples.T for k in range(6)], axis=2
    )
    assert np.array_equal(rebuilt, values)


def _single_pixel(value):
    return SliceImage(
        plane="axial", index=0, width=1, height=1,
        samples=np.array([[value]], dtype=np.int16),
    )


def test_window_level_midpoint_and_extremes():
    assert window_level(_single_pixel(500), 2000, 500)[0, 0] == 128
    assert window_level(_single_pixel(-501), 2000, 500)[0, 0] == 0
    assert window_level(_single_pixel(-500), 2000, 500)[0, 0] == 0
    assert window_level(_single_pixel(1500), 2000, 500)[0, 0] == 255
    assert window_level(_single_pixel(2000), 2000, 500)[0, 0] == 255


def test_window_level_arithmetic():
    # round(255 * (0 - (-500)) / 2000) = round(63.75) = 64
    assert window_level(_single_pixel(0), 2000, 500)[0, 0] == 64


def test_window_level_monotone(rng):
    values = np.sort(rng.integers(-2000, 4000, size=200)).astype(np.int16)
    img = SliceImage(plane="axial", index=0, width=200, height=1,
                     samples=values.reshape(1, -1))
    out = window_level(img, 1234.0, 321.0)[0]
    assert (np.diff(out.astype(int)) >= 0).all()


def test_window_must_be_positive():
    with pytest.raises(NonPositiveWindow):
        window_level(_single_pixel(0), 0, 0)
    with pytest.raises(NonPositiveWindow):
        window_level(_single_pixel(0), -5, 0)


def test_grids_are_immutable():
    v = linear_volume(2, 2, 2)
    with pytest.raises(ValueError):
        v.intensities[0, 0, 0] = 1
