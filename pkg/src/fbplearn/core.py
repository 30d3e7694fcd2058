"""Domain types and geometry conventions shared by all modules.

Conventions fixed here and relied upon everywhere else:

* The image grid is square with its world origin at the grid center.
  Pixel (i, j) sits at world coordinates
  ``x = (j - (size - 1) / 2) * spacing``, ``y = (i - (size - 1) / 2) * spacing``.
* Projection angles sample ``[0, pi)`` uniformly: ``theta_j = j * pi / P``.
* The detector is centered: bin m sits at offset
  ``s_m = (m - (M - 1) / 2) * bin_spacing``.
* ``pad_length`` is the smallest power of two >= 2 * num_bins, so row
  filtering is a linear (not circular) convolution within the object support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "Image",
    "ScanGeometry",
    "Sinogram",
    "default_geometry",
    "frequency_of_bin",
    "bin_frequencies",
]


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


@dataclass(frozen=True)
class GridSpec:
    """Square pixel grid: ``size`` pixels per side, ``spacing`` length per pixel."""

    size: int
    spacing: float = 1.0

    def __post_init__(self) -> None:
        if self.size < 2:
            raise ValueError(f"grid size must be >= 2, got {self.size}")
        if not self.spacing > 0:
            raise ValueError(f"grid spacing must be > 0, got {self.spacing}")

    @property
    def half_extent(self) -> float:
        """Half the physical side length of the grid."""
        return 0.5 * self.size * self.spacing

    def axis_coords(self) -> np.ndarray:
        """World coordinate of each pixel center along one axis."""
        return (np.arange(self.size) - (self.size - 1) / 2.0) * self.spacing

    def pixel_to_world(self, i: int, j: int) -> tuple[float, float]:
        """World (x, y) of the center of pixel at row i, column j."""
        c = (self.size - 1) / 2.0
        return ((j - c) * self.spacing, (i - c) * self.spacing)

    def world_to_pixel(self, x: float, y: float) -> tuple[float, float]:
        """Fractional (row, col) pixel coordinates of world point (x, y)."""
        c = (self.size - 1) / 2.0
        return (y / self.spacing + c, x / self.spacing + c)


def _freeze(values: np.ndarray) -> np.ndarray:
    # Copy unconditionally: frozen types must not alias caller memory.
    out = np.array(values, dtype=np.float64, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Image:
    """Real-valued intensities on a :class:`GridSpec`, row-major (size, size)."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        n = self.grid.size
        if values.shape == (n * n,):
            values = values.reshape(n, n)
        if values.shape != (n, n):
            raise ValueError(
                f"image values have shape {values.shape}, expected ({n}, {n})"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("image values must all be finite")
        object.__setattr__(self, "values", _freeze(values))


@dataclass(frozen=True)
class ScanGeometry:
    """Parallel-beam scan layout: P angles over [0, pi), M centered detector bins.

    ``pad_length`` may be omitted; it is derived as the smallest power of two
    >= 2 * num_bins and validated if given explicitly.
    """

    num_angles: int
    num_bins: int
    bin_spacing: float = 1.0
    pad_length: int = 0

    def __post_init__(self) -> None:
        if self.num_angles < 1:
            raise ValueError(f"num_angles must be >= 1, got {self.num_angles}")
        if self.num_bins < 2:
            raise ValueError(f"num_bins must be >= 2, got {self.num_bins}")
        if not self.bin_spacing > 0:
            raise ValueError(f"bin_spacing must be > 0, got {self.bin_spacing}")
        required = _next_pow2(2 * self.num_bins)
        if self.pad_length == 0:
            object.__setattr__(self, "pad_length", required)
        elif self.pad_length != required:
            raise ValueError(
                f"pad_length must be the smallest power of two >= 2*num_bins "
                f"({required}), got {self.pad_length}"
            )

    def angles(self) -> np.ndarray:
        """Projection angles theta_j = j * pi / P, j = 0..P-1."""
        return np.arange(self.num_angles) * (math.pi / self.num_angles)

    def offsets(self) -> np.ndarray:
        """Detector bin offsets s_m = (m - (M-1)/2) * bin_spacing."""
        return (np.arange(self.num_bins) - (self.num_bins - 1) / 2.0) * self.bin_spacing


@dataclass(frozen=True)
class Sinogram:
    """Line integrals over angles x detector bins, angle-major (P, M)."""

    geom: ScanGeometry
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        shape = (self.geom.num_angles, self.geom.num_bins)
        if values.shape == (shape[0] * shape[1],):
            values = values.reshape(shape)
        if values.shape != shape:
            raise ValueError(
                f"sinogram values have shape {values.shape}, expected {shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("sinogram values must all be finite")
        object.__setattr__(self, "values", _freeze(values))


def default_geometry(grid: GridSpec, num_angles: int = 360) -> ScanGeometry:
    """Scan geometry covering ``grid`` with no object truncation.

    The detector matches the pixel spacing and spans the grid diagonal
    (M = smallest odd integer >= size * sqrt(2); an odd count centers a
    bin at s = 0).
    """
    m = math.ceil(grid.size * math.sqrt(2.0))
    if m % 2 == 0:
        m += 1
    return ScanGeometry(
        num_angles=num_angles, num_bins=m, bin_spacing=grid.spacing
    )


def frequency_of_bin(k: int, geom: ScanGeometry) -> float:
    """Physical frequency (cycles per unit length) of DFT bin ``k``.

    Bins above pad_length/2 mirror the negative frequencies, so the result
    is symmetric: f_k = min(k, N_pad - k) / (N_pad * bin_spacing).
    """
    n = geom.pad_length
    if not 0 <= k < n:
        raise IndexError(f"DFT bin {k} out of range [0, {n})")
    return min(k, n - k) / (n * geom.bin_spacing)


def bin_frequencies(geom: ScanGeometry) -> np.ndarray:
    """Vector of frequency_of_bin(k) for all k in 0..pad_length-1."""
    n = geom.pad_length
    k = np.arange(n)
    return np.minimum(k, n - k) / (n * geom.bin_spacing)
