import numpy as np
import pytest

from circledyn.circle_maps import PowerMap, RationalMap, cusp_polynomial, cusp_polynomial_b, pine_tree_blaschke
from circledyn.render import (
    ImageBuffer,
    RenderError,
    boundary_orbit,
    julia_backward,
    julia_seeds,
    pixel_grid,
    rasterize,
    read_ppm,
    viewport,
)


def test_ppm_round_trip():
    img = ImageBuffer.blank(3, 2, (10, 20, 30))
    img.rgb[1, 2] = (1, 2, 3)
    data = img.to_ppm()
    assert data.startswith(b"P6\n3 2\n255\n") and len(data) == len(b"P6\n3 2\n255\n") + 18
    back = read_ppm(data)
    assert np.array_equal(back.rgb, img.rgb)


def test_seeds_prefer_repelling():
    seeds = julia_seeds(PowerMap(2).rational())
    assert all(abs(abs(z) - 1) < 1e-12 for z in seeds)
    cusp = julia_seeds(cusp_polynomial())
    assert min(abs(z - 1) for z in cusp) < 1e-6 and min(abs(z - cusp_polynomial_b()) for z in cusp) < 1e-6


def test_seeds_missing():
    # z / 2 has a single attracting fixed point and nothing to seed from
    with pytest.raises(RenderError):
        julia_seeds(RationalMap(np.array([0.5, 0.0]), np.array([1.0])))


def test_power_cloud_on_circle():
    cloud = julia_backward(PowerMap(2).rational(), 50_000, seed=1)
    assert cloud.size >= 50_000 and np.max(np.abs(np.abs(cloud) - 1)) < 1e-9


def test_pine_cloud_on_circle():
    cloud = julia_backward(pine_tree_blaschke().rational(), 20_000, seed=2)
    assert np.max(np.abs(np.abs(cloud) - 1)) < 1e-6


def test_cloud_deterministic():
    R = cusp_polynomial()
    a = julia_backward(R, 10_000, seed=3)
    b = julia_backward(R, 10_000, seed=3)
    c = julia_backward(R, 10_000, seed=4)
    assert a.tobytes() == b.tobytes() and a.tobytes() != c.tobytes()


def test_viewport_and_grid():
    pts = np.array([-1 - 1j, 1 + 0.5j])
    center, half = viewport(pts, pad=0.0)
    assert center == pytest.approx(-0.25j) and half == pytest.approx(1.0)
    grid = pixel_grid(4, 4, 0j, 1.0)
    assert grid[0, 0] == pytest.approx(-0.75 + 0.75j) and grid[-1, -1] == pytest.approx(0.75 - 0.75j)


def test_rasterize_marks_hits():
    img = rasterize(np.array([0.5 + 0.5j, 0.5 + 0.5j, -0.5 - 0.5j]), 4, 4, 0j, 1.0)
    dark = np.argwhere(img.rgb[..., 0] < 255)
    assert sorted(map(tuple, dark)) == [(1, 3), (3, 1)]


def test_boundary_orbit_colours_basin():
    img = boundary_orbit(PowerMap(2).rational(), 16, 16, 0j, 1.5, iterations=100)
    center = img.rgb[8, 8]
    corner = img.rgb[0, 0]
    # the centre is captured by the attracting point 0, the corner escapes
    assert center[0] != center[1] and corner[0] == corner[1] == corner[2]
