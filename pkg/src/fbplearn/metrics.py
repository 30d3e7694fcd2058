"""Quantitative evaluation: difference statistics, line profiles, cupping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Image
from .spectral import SpectralFilter

__all__ = [
    "DiffStats",
    "abs_diff_stats",
    "line_profile",
    "cupping_index",
    "spectrum_distance",
]


@dataclass(frozen=True)
class DiffStats:
    """Statistics of |a - b| over all pixels (no mask); population std dev."""

    mean: float
    std_dev: float
    min: float
    max: float


def abs_diff_stats(a: Image, b: Image) -> DiffStats:
    """Absolute-difference statistics between two images on the same grid."""
    if a.grid != b.grid:
        raise ValueError("images live on different grids")
    diff = np.abs(a.values - b.values)
    return DiffStats(
        mean=float(diff.mean()),
        std_dev=float(diff.std()),
        min=float(diff.min()),
        max=float(diff.max()),
    )


def line_profile(img: Image, row: int | None = None) -> np.ndarray:
    """Pixel values along one row, paired with their world x-coordinates.

    Returns an array of shape (size, 2) with columns (x, value); ``row``
    defaults to the center row.
    """
    size = img.grid.size
    if row is None:
        row = size // 2
    if not 0 <= row < size:
        raise IndexError(f"row {row} out of range [0, {size})")
    return np.column_stack((img.grid.axis_coords(), img.values[row]))


def cupping_index(img: Image, radius: float) -> float:
    """Relative depression of a disc center against its rim.

    1 - mean(central disc of 0.2 * radius) / mean(annulus [0.7, 0.9] * radius);
    0 for a perfectly flat disc, positive when the center sags (cupping).
    """
    coords = img.grid.axis_coords()
    r = np.sqrt(coords[None, :] ** 2 + coords[:, None] ** 2)
    center = r <= 0.2 * radius
    annulus = (r >= 0.7 * radius) & (r <= 0.9 * radius)
    if not center.any() or not annulus.any():
        raise ValueError(
            f"degenerate evaluation regions for radius {radius} on grid "
            f"size {img.grid.size}"
        )
    return 1.0 - float(img.values[center].mean()) / float(img.values[annulus].mean())


def spectrum_distance(f1: SpectralFilter, f2: SpectralFilter, k_max: int) -> float:
    """L2 distance between coefficient vectors over bins 0..k_max.

    The symmetric half suffices by the conjugate-symmetry invariant.
    """
    if f1.pad_length != f2.pad_length or f1.bin_spacing != f2.bin_spacing:
        raise ValueError("filters have mismatched pad_length or bin_spacing")
    if not 0 < k_max <= f1.pad_length // 2:
        raise IndexError(
            f"k_max {k_max} out of range (0, {f1.pad_length // 2}]"
        )
    d = f1.coeffs[: k_max + 1] - f2.coeffs[: k_max + 1]
    return float(np.linalg.norm(d))
