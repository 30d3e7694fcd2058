"""Disc training phantoms and held-out test phantoms."""

from __future__ import annotations

import math

import numpy as np

from .core import GridSpec, Image

__all__ = ["make_disc", "make_training_set", "make_held_out", "HELD_OUT_ELLIPSES"]

# Held-out phantom: overlapping ellipses painted in order (later entries
# overwrite earlier ones). Parameters are (cx, cy, a, b, tilt_deg, value)
# with centers/axes in fractions of the grid half-extent and values in [0, 1].
# The table is fixed; see README for the published listing.
HELD_OUT_ELLIPSES: tuple[tuple[float, float, float, float, float, float], ...] = (
    (0.00, 0.05, 0.72, 0.55, 20.0, 0.80),
    (0.05, 0.08, 0.55, 0.40, 20.0, 0.45),
    (-0.22, -0.12, 0.16, 0.25, -15.0, 0.95),
    (0.25, 0.10, 0.20, 0.12, 35.0, 0.60),
    (0.05, -0.28, 0.12, 0.10, 0.0, 0.25),
)


def make_disc(grid: GridSpec, radius: float, value: float = 1.0) -> Image:
    """Centered binary disc: pixels whose center lies within ``radius`` get
    ``value``, everything else 0. No anti-aliasing.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if radius > grid.half_extent:
        raise ValueError(
            f"radius {radius} exceeds grid half-extent {grid.half_extent}"
        )
    coords = grid.axis_coords()
    r2 = coords[None, :] ** 2 + coords[:, None] ** 2
    values = np.where(r2 <= radius * radius, float(value), 0.0)
    return Image(grid, values)


def make_training_set(grid: GridSpec, count: int) -> list[Image]:
    """Unit-intensity discs with strictly increasing radii.

    Radii follow r_i = (i / (count + 1)) * half_extent for i = 1..count,
    spanning narrow (impulse-like) to wide (large homogeneous interior).
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    radii = [grid.half_extent * i / (count + 1) for i in range(1, count + 1)]
    return [make_disc(grid, r, 1.0) for r in radii]


def make_held_out(grid: GridSpec) -> Image:
    """Deterministic multi-ellipse phantom used in place of real CT data.

    Not a centered disc: overlapping tilted ellipses with distinct
    intensities in [0, 1], painted per :data:`HELD_OUT_ELLIPSES`.
    """
    coords = grid.axis_coords() / grid.half_extent
    x = coords[None, :]
    y = coords[:, None]
    values = np.zeros((grid.size, grid.size))
    for cx, cy, a, b, tilt_deg, value in HELD_OUT_ELLIPSES:
        phi = math.radians(tilt_deg)
        u = (x - cx) * math.cos(phi) + (y - cy) * math.sin(phi)
        v = -(x - cx) * math.sin(phi) + (y - cy) * math.cos(phi)
        inside = (u / a) ** 2 + (v / b) ** 2 <= 1.0
        values[inside] = value
    return Image(grid, values)
