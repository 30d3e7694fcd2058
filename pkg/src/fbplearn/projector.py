"""Discrete Radon transform and back-projection.

The production pair is deliberately unmatched: the forward projector is
ray-driven (line sampling with bilinear interpolation), the back-projector
is pixel-driven (linear detector interpolation). ``build_dense_system``
materializes the forward operator as an explicit matrix for small grids so
the exact transpose (``matched_back_project``) is available as an oracle.

Scaling conventions: the forward projector multiplies by the sampling step
(approximating the line integral); the back-projector multiplies by pi / P
(the quadrature weight of the angular integral). The reconstruction filter
therefore carries no extra geometry factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import get_num_threads, kernels
from .core import GridSpec, Image, ScanGeometry, Sinogram

__all__ = [
    "DenseSystem",
    "forward_project",
    "back_project",
    "build_dense_system",
    "matched_back_project",
]

_DENSE_SIZE_LIMIT = 32
_SAMPLES_PER_PIXEL = 2  # ray sampling step = spacing / 2


def forward_project(img: Image, geom: ScanGeometry) -> Sinogram:
    """Ray-driven projection of ``img`` onto ``geom``.

    Each ray (theta_j, s_m) is sampled at step spacing/2 across the grid's
    bounding circle (symmetric about the ray midpoint); samples are bilinear
    image reads (0 outside the grid) summed and scaled by the step.
    """
    grid = img.grid
    step = grid.spacing / _SAMPLES_PER_PIXEL
    n_half = math.ceil(grid.size * math.sqrt(2.0) / 2.0 * _SAMPLES_PER_PIXEL)
    angles = geom.angles()
    values = kernels.forward_kernel(
        img.values,
        grid.spacing,
        np.cos(angles),
        np.sin(angles),
        geom.offsets(),
        step,
        n_half,
        get_num_threads(),
    )
    return Sinogram(geom, values)


def back_project(sino: Sinogram, grid: GridSpec) -> Image:
    """Pixel-driven back-projection of ``sino`` onto ``grid``.

    For every pixel and angle, the detector signal is linearly interpolated
    at s = x cos(theta) + y sin(theta) (0 outside the detector); the sum over
    angles is scaled by pi / P.
    """
    geom = sino.geom
    values = kernels.back_kernel(
        sino.values,
        geom.bin_spacing,
        np.cos(geom.angles()),
        np.sin(geom.angles()),
        grid.size,
        grid.spacing,
        get_num_threads(),
    )
    values *= math.pi / geom.num_angles
    return Image(grid, values)


@dataclass(frozen=True)
class DenseSystem:
    """Explicit forward operator for tiny grids: (P*M, size^2) matrix whose
    column j is the ray-driven projection of the j-th unit-pixel image."""

    geom: ScanGeometry
    grid: GridSpec
    matrix: np.ndarray = field(repr=False)

    def project(self, img: Image) -> Sinogram:
        """Forward projection by explicit matrix multiply."""
        if img.grid != self.grid:
            raise ValueError("image grid does not match the dense system")
        flat = self.matrix @ img.values.ravel()
        return Sinogram(self.geom, flat)


def build_dense_system(grid: GridSpec, geom: ScanGeometry) -> DenseSystem:
    """Materialize the forward projector by projecting every unit image.

    Exact by construction (columns are forward_project outputs), so adjoint
    tests against ``matched_back_project`` carry no second geometry code path.
    """
    if grid.size > _DENSE_SIZE_LIMIT:
        raise ValueError(
            f"dense system limited to grids <= {_DENSE_SIZE_LIMIT}, "
            f"got size {grid.size}"
        )
    n = grid.size * grid.size
    matrix = np.empty((geom.num_angles * geom.num_bins, n))
    unit = np.zeros(n)
    for j in range(n):
        unit[j] = 1.0
        matrix[:, j] = forward_project(Image(grid, unit), geom).values.ravel()
        unit[j] = 0.0
    return DenseSystem(geom, grid, matrix)


def matched_back_project(sino: Sinogram, system: DenseSystem) -> Image:
    """Exact transpose of the dense forward operator applied to ``sino``."""
    if sino.geom != system.geom:
        raise ValueError("sinogram geometry does not match the dense system")
    flat = system.matrix.T @ sino.values.ravel()
    return Image(system.grid, flat)
