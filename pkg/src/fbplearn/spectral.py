"""Frequency-domain sinogram filtering and the analytic filter family.

A filter is one shared real vector of per-DFT-bin multipliers applied to
every projection row (the diagonal of the filtering operator). Conjugate
symmetry ``coeffs[k] == coeffs[N - k]`` is enforced so the equivalent
spatial kernel is real and even.

DFT convention: forward transform unnormalized, inverse scaled by 1/N.
Under this convention the ideal ramp is ``|f_k|`` in physical frequency
units and the classic band-limited discretization is ``bin_spacing *
DFT(spatial kernel)``; both then reconstruct in consistent units with the
projector scalings (see ``projector``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import GridSpec, Image, ScanGeometry, Sinogram, bin_frequencies
from .projector import back_project

__all__ = [
    "SpectralFilter",
    "ramp_filter",
    "modified_ramp_filter",
    "ramlak_filter",
    "shepp_logan_filter",
    "apply_filter",
    "reconstruct",
]

_SYMMETRY_RTOL = 1e-9


def _symmetry_defect(coeffs: np.ndarray) -> float:
    if coeffs.shape[0] < 3:
        return 0.0
    tail = coeffs[1:]
    return float(np.abs(tail - tail[::-1]).max())


@dataclass(frozen=True)
class SpectralFilter:
    """Real, conjugate-symmetric per-frequency multipliers of length pad_length."""

    pad_length: int
    bin_spacing: float
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if coeffs.shape != (self.pad_length,):
            raise ValueError(
                f"coeffs have shape {coeffs.shape}, expected ({self.pad_length},)"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("filter coefficients must all be finite")
        scale = max(float(np.abs(coeffs).max()), 1e-300)
        if _symmetry_defect(coeffs) > _SYMMETRY_RTOL * scale:
            raise ValueError(
                "filter coefficients are not conjugate-symmetric "
                "(coeffs[k] != coeffs[N - k])"
            )
        coeffs = np.array(coeffs, order="C")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)


def _filter_like(geom: ScanGeometry, coeffs: np.ndarray) -> SpectralFilter:
    return SpectralFilter(geom.pad_length, geom.bin_spacing, coeffs)


def ramp_filter(geom: ScanGeometry) -> SpectralFilter:
    """Band-limited ideal ramp: coeffs[k] = |f_k| in cycles per unit length."""
    return _filter_like(geom, bin_frequencies(geom))


def modified_ramp_filter(geom: ScanGeometry) -> SpectralFilter:
    """Ramp with the zero-valued band widened from one bin to three.

    Bins {0, 1, N-1} are forced to zero. Used as the training initialization
    and as the cupping-emphasizing baseline.
    """
    coeffs = bin_frequencies(geom).copy()
    coeffs[0] = 0.0
    coeffs[1] = 0.0
    coeffs[-1] = 0.0
    return _filter_like(geom, coeffs)


def ramlak_filter(geom: ScanGeometry) -> SpectralFilter:
    """Classic discretization of the ramp: DFT of the band-limited spatial kernel.

    The kernel on the padded grid (wraparound indexing) is
    h[0] = 1 / (4 ds^2), h[n] = -1 / (pi^2 n^2 ds^2) for odd n, 0 for even
    n != 0. Unlike the sampled ramp its DC coefficient is strictly positive.
    """
    n = geom.pad_length
    ds = geom.bin_spacing
    h = np.zeros(n)
    h[0] = 1.0 / (4.0 * ds * ds)
    odd = np.arange(1, n // 2 + 1, 2)
    h[odd] = -1.0 / (math.pi**2 * odd.astype(np.float64) ** 2 * ds * ds)
    h[n - odd] = h[odd]
    spectrum = np.fft.fft(h)
    coeffs = ds * spectrum.real
    scale = max(float(np.abs(coeffs).max()), 1.0)
    if np.abs(spectrum.imag).max() * ds > 1e-12 * scale:
        raise AssertionError("ramlak kernel DFT has non-negligible imaginary part")
    # Exact symmetrization (FFT rounding may differ between mirrored bins).
    coeffs[1:] = 0.5 * (coeffs[1:] + coeffs[1:][::-1])
    return _filter_like(geom, coeffs)


def shepp_logan_filter(geom: ScanGeometry) -> SpectralFilter:
    """Ramp multiplied by a sinc smoothing window (half-period at Nyquist)."""
    freqs = bin_frequencies(geom)
    # np.sinc is the normalized sinc; f_k / (2 f_Nyquist) = f_k * bin_spacing.
    coeffs = freqs * np.sinc(freqs * geom.bin_spacing)
    return _filter_like(geom, coeffs)


def _pad_offset(pad: int, num_bins: int) -> int:
    # Detector samples sit centered in the padded buffer; the same window is
    # cut back out after filtering. Keeps the object support at the center
    # of the padded period, away from the wraparound seam.
    return (pad - num_bins) // 2


def _pad_rows(rows: np.ndarray, pad: int) -> np.ndarray:
    num_bins = rows.shape[1]
    off = _pad_offset(pad, num_bins)
    padded = np.zeros((rows.shape[0], pad))
    padded[:, off : off + num_bins] = rows
    return padded


def _filter_rows(
    rows: np.ndarray,
    coeffs: np.ndarray,
    num_bins: int,
    check_imag: bool = True,
) -> np.ndarray:
    """Filter each row through the padded DFT and truncate back to num_bins.

    ``check_imag=False`` skips the imaginary-residue assertion; used when
    probing deliberately asymmetric coefficient vectors (gradient checks).
    """
    pad = coeffs.shape[0]
    off = _pad_offset(pad, num_bins)
    spectra = np.fft.fft(_pad_rows(rows, pad), axis=1)
    spectra *= coeffs[None, :]
    out = np.fft.ifft(spectra, axis=1)
    if check_imag:
        norms = np.linalg.norm(rows, axis=1)
        if np.any(np.abs(out.imag).max(axis=1) > 1e-9 * (norms + 1e-300)):
            raise AssertionError(
                "filtered rows have non-negligible imaginary content; "
                "filter is not conjugate-symmetric"
            )
    return np.ascontiguousarray(out.real[:, off : off + num_bins])


def apply_filter(sino: Sinogram, filt: SpectralFilter) -> Sinogram:
    """Filter every projection row with the shared coefficient vector.

    Rows are zero-padded (data first, trailing zeros) to pad_length,
    transformed, multiplied bin-wise, inverse-transformed, and truncated
    back to the detector length.
    """
    geom = sino.geom
    if filt.pad_length != geom.pad_length:
        raise ValueError(
            f"filter pad_length {filt.pad_length} != geometry pad_length "
            f"{geom.pad_length}"
        )
    if filt.bin_spacing != geom.bin_spacing:
        raise ValueError(
            f"filter bin_spacing {filt.bin_spacing} != geometry bin_spacing "
            f"{geom.bin_spacing}"
        )
    values = _filter_rows(sino.values, filt.coeffs, geom.num_bins)
    return Sinogram(geom, values)


def reconstruct(sino: Sinogram, filt: SpectralFilter, grid: GridSpec) -> Image:
    """Filtered back-projection: filter the rows, then back-project."""
    return back_project(apply_filter(sino, filt), grid)
