"""Point clouds and raster images for rational maps; binary PPM output."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .circle_maps import RationalMap


class RenderError(ValueError):
    """Nothing suitable to render from (e.g. no seed on the Julia set)."""


@dataclass
class ImageBuffer:
    width: int
    height: int
    rgb: np.ndarray  # (height, width, 3) uint8

    @classmethod
    def blank(cls, width: int, height: int, color=(255, 255, 255)) -> "ImageBuffer":
        rgb = np.empty((height, width, 3), dtype=np.uint8)
        rgb[...] = color
        return cls(width, height, rgb)

    def to_ppm(self) -> bytes:
        return b"P6\n%d %d\n255\n" % (self.width, self.height) + np.ascontiguousarray(self.rgb).tobytes()

    def save(self, path: str):
        with open(path, "wb") as fh:
            fh.write(self.to_ppm())


_PPM_HEADER = re.compile(rb"P6\s+(\d+)\s+(\d+)\s+255\s")


def read_ppm(data: bytes) -> ImageBuffer:
    # the raster starts after exactly one whitespace byte, and may itself begin with whitespace values
    m = _PPM_HEADER.match(data)
    if m is None:
        raise ValueError("not a binary PPM with max value 255")
    w, h = int(m.group(1)), int(m.group(2))
    rgb = np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=m.end()).reshape(h, w, 3)
    return ImageBuffer(w, h, rgb.copy())


def julia_seeds(R: RationalMap, tol: float = 1e-9) -> list[complex]:
    """Finite fixed points on the Julia set: repelling ones, else multiplier-1 ones."""
    fixed = R.fixed_points()
    rep = [z for z, m in fixed if abs(m) > 1 + tol]
    if rep:
        return rep
    para = [z for z, m in fixed if abs(m - 1) < tol]
    if not para:
        raise RenderError("no repelling or parabolic fixed point to seed the backward orbit")
    return para


def julia_backward(R: RationalMap, n_points: int = 1_000_000, seed: int = 0, walkers: int = 1024,
                   seeds: list | None = None) -> np.ndarray:
    """Random inverse branches from fixed points on the Julia set.

    ``walkers`` orbits advance together; every visited point is kept.  The
    branch choice comes from numpy's default_rng(seed), so the cloud is
    reproducible.
    """
    rng = np.random.default_rng(seed)
    if seeds is None:
        seeds = julia_seeds(R)
    z = np.array([seeds[i % len(seeds)] for i in range(walkers)], dtype=complex)
    steps = -(-n_points // walkers)
    cloud = np.empty((steps, walkers), dtype=complex)
    rows = np.arange(walkers)
    for s in range(steps):
        pre = R.preimages(z)  # (walkers, d)
        z = pre[rows, rng.integers(0, pre.shape[1], size=walkers)]
        cloud[s] = z
    return cloud.ravel()


def viewport(points: np.ndarray, pad: float = 0.1, circle: bool = False) -> tuple[complex, float]:
    """(center, half-width) of a square window around the points."""
    if circle:
        return 0j, 1.0 + pad
    pts = points[np.isfinite(points)]
    lo = complex(pts.real.min(), pts.imag.min())
    hi = complex(pts.real.max(), pts.imag.max())
    center = (lo + hi) / 2
    half = max(hi.real - lo.real, hi.imag - lo.imag) / 2
    return center, half * (1 + pad) if half > 0 else 1.0


def pixel_grid(width: int, height: int, center: complex, half: float) -> np.ndarray:
    """Complex coordinate of each pixel center; row 0 is the top."""
    aspect = height / width
    x = center.real + half * ((np.arange(width) + 0.5) / width * 2 - 1)
    y = center.imag + half * aspect * (1 - (np.arange(height) + 0.5) / height * 2)
    return x[None, :] + 1j * y[:, None]


def rasterize(points: np.ndarray, width: int, height: int, center: complex, half: float) -> ImageBuffer:
    """Dark points on white, shaded by log hit count."""
    aspect = height / width
    col = np.floor((points.real - center.real + half) / (2 * half) * width).astype(np.int64)
    row = np.floor((center.imag + half * aspect - points.imag) / (2 * half * aspect) * height).astype(np.int64)
    ok = (col >= 0) & (col < width) & (row >= 0) & (row < height)
    counts = np.bincount(row[ok] * width + col[ok], minlength=width * height).reshape(height, width)
    img = ImageBuffer.blank(width, height)
    hit = counts > 0
    if hit.any():
        shade = np.log1p(counts) / np.log1p(counts.max())
        level = (200 * (1 - shade)).astype(np.uint8)
        img.rgb[hit] = np.stack([level[hit]] * 3, axis=-1)
    return img


_PALETTE = np.array([[220, 60, 60], [60, 140, 220], [60, 180, 90], [230, 170, 40], [150, 80, 200]], dtype=float)


def boundary_orbit(R: RationalMap, width: int, height: int, center: complex, half: float,
                   iterations: int = 1000, escape: float = 1e6, capture: float = 0.05) -> ImageBuffer:
    """Colour pixels by the fate of their forward orbit.

    Escaping orbits get a grey ramp by escape time.  Orbits ending within
    ``capture`` of a non-repelling fixed point get that point's colour,
    darkened by capture time.  Everything else is black.
    """
    z = pixel_grid(width, height, center, half).ravel()
    targets = np.array([p for p, m in R.fixed_points() if abs(m) <= 1 + 1e-9], dtype=complex)
    fate = np.full(z.size, -1)
    when = np.zeros(z.size)
    live = np.ones(z.size, dtype=bool)
    with np.errstate(all="ignore"):
        for k in range(iterations):
            idx = np.flatnonzero(live)
            if idx.size == 0:
                break
            w = R(z[idx])[0]
            z[idx] = w
            out = ~np.isfinite(w) | (np.abs(w) > escape)
            fate[idx[out]] = -2
            when[idx[out]] = k
            live[idx[out]] = False
            if targets.size:
                d = np.abs(w[:, None] - targets[None, :])
                near = (d.min(axis=1) < capture) & ~out
                fate[idx[near]] = d[near].argmin(axis=1)
                when[idx[near]] = k
                live[idx[near]] = False
    img = ImageBuffer.blank(width, height, (0, 0, 0))
    rgb = img.rgb.reshape(-1, 3)
    t = when / max(iterations - 1, 1)
    esc = fate == -2
    rgb[esc] = np.stack([(255 * (1 - t[esc]) ** 2)] * 3, axis=-1).astype(np.uint8)
    for i in range(targets.size):
        sel = fate == i
        tone = 1 - 0.7 * np.sqrt(t[sel])
        rgb[sel] = (_PALETTE[i % len(_PALETTE)] * tone[:, None]).astype(np.uint8)
    return img
