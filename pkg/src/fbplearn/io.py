"""Persistent formats: raw float arrays with JSON sidecars, filter CSVs, PGM.

Images and sinograms are stored as little-endian 32-bit float arrays
(row-major) next to a ``<stem>.meta.json`` sidecar describing the layout;
round-trips are bit-exact at 32-bit precision. Filters are CSV with header
``k,frequency,coefficient``. Viewable exports are plain-text portable
graymaps (magic ``P2``).
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

import numpy as np

from .core import GridSpec, Image, ScanGeometry, Sinogram
from .learner import TrainHistory
from .spectral import SpectralFilter, _symmetry_defect

__all__ = [
    "save_image",
    "load_image",
    "save_sinogram",
    "load_sinogram",
    "save_filter",
    "load_filter",
    "save_history",
    "export_viewable",
]

_FLOAT_FMT = "%.17g"


def _sidecar_path(path: str | Path) -> Path:
    stem, _ = os.path.splitext(str(path))
    return Path(stem + ".meta.json")


def _write_raw(path: Path, values: np.ndarray, meta: dict) -> None:
    if not np.all(np.isfinite(values)):
        raise ValueError("refusing to save non-finite values")
    path.write_bytes(values.astype("<f4").tobytes())
    _sidecar_path(path).write_text(json.dumps(meta, sort_keys=True, indent=1) + "\n")


def _read_raw(path: Path, kind: str) -> tuple[np.ndarray, dict]:
    sidecar = _sidecar_path(path)
    if not sidecar.is_file():
        raise FileNotFoundError(f"missing metadata sidecar {sidecar}")
    meta = json.loads(sidecar.read_text())
    if meta.get("kind") != kind:
        raise ValueError(
            f"{path} holds kind {meta.get('kind')!r}, expected {kind!r}"
        )
    data = np.frombuffer(path.read_bytes(), dtype="<f4")
    return data.astype(np.float64), meta


def save_image(img: Image, path: str | Path) -> None:
    meta = {"kind": "image", "size": img.grid.size, "spacing": img.grid.spacing}
    _write_raw(Path(path), img.values, meta)


def load_image(path: str | Path) -> Image:
    data, meta = _read_raw(Path(path), "image")
    size = int(meta["size"])
    if data.shape[0] != size * size:
        raise ValueError(
            f"{path}: payload holds {data.shape[0]} values, metadata says "
            f"{size}x{size}"
        )
    return Image(GridSpec(size, float(meta["spacing"])), data)


def save_sinogram(sino: Sinogram, path: str | Path) -> None:
    geom = sino.geom
    meta = {
        "kind": "sinogram",
        "num_angles": geom.num_angles,
        "num_bins": geom.num_bins,
        "bin_spacing": geom.bin_spacing,
        "pad_length": geom.pad_length,
    }
    _write_raw(Path(path), sino.values, meta)


def load_sinogram(path: str | Path) -> Sinogram:
    data, meta = _read_raw(Path(path), "sinogram")
    geom = ScanGeometry(
        num_angles=int(meta["num_angles"]),
        num_bins=int(meta["num_bins"]),
        bin_spacing=float(meta["bin_spacing"]),
        pad_length=int(meta["pad_length"]),
    )
    expected = geom.num_angles * geom.num_bins
    if data.shape[0] != expected:
        raise ValueError(
            f"{path}: payload holds {data.shape[0]} values, metadata says "
            f"{geom.num_angles}x{geom.num_bins}"
        )
    return Sinogram(geom, data)


def save_filter(filt: SpectralFilter, path: str | Path) -> None:
    """CSV with header k,frequency,coefficient and one row per DFT bin."""
    n = filt.pad_length
    k = np.arange(n)
    freqs = np.minimum(k, n - k) / (n * filt.bin_spacing)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "frequency", "coefficient"])
        for k in range(filt.pad_length):
            writer.writerow(
                [k, _FLOAT_FMT % freqs[k], _FLOAT_FMT % filt.coeffs[k]]
            )


def load_filter(path: str | Path) -> SpectralFilter:
    """Read a filter CSV; re-validates conjugate symmetry and re-symmetrizes."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["k", "frequency", "coefficient"]:
        raise ValueError(f"{path}: expected header k,frequency,coefficient")
    body = rows[1:]
    if len(body) < 4:
        raise ValueError(f"{path}: too few rows for a padded spectrum")
    try:
        coeffs = np.array([float(r[2]) for r in body])
        f1 = float(body[1][1])
    except (IndexError, ValueError) as exc:
        raise ValueError(f"{path}: malformed filter row") from exc
    pad = len(body)
    if pad & (pad - 1):
        raise ValueError(f"{path}: row count {pad} is not a power of two")
    if f1 <= 0:
        raise ValueError(f"{path}: frequency column must be positive at k=1")
    bin_spacing = 1.0 / (pad * f1)
    scale = max(float(np.abs(coeffs).max()), 1e-300)
    if _symmetry_defect(coeffs) > 1e-9 * scale:
        raise ValueError(f"{path}: coefficients violate conjugate symmetry")
    coeffs[1:] = 0.5 * (coeffs[1:] + coeffs[1:][::-1])
    return SpectralFilter(pad, bin_spacing, coeffs)


def save_history(history: TrainHistory, path: str | Path) -> None:
    """CSV of per-epoch mean objective values."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "objective"])
        for epoch, obj in enumerate(history.objectives, start=1):
            writer.writerow([epoch, _FLOAT_FMT % obj])


def export_viewable(
    img: Image, path: str | Path, window: tuple[float, float]
) -> None:
    """8-bit plain-text portable graymap with a linear window/level mapping.

    Values are clamped to [lo, hi], scaled to 0..255, and floored (the
    window midpoint maps to 127).
    """
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"degenerate window [{lo}, {hi}]")
    scaled = np.clip((img.values - lo) / (hi - lo), 0.0, 1.0)
    gray = np.floor(scaled * 255.0).astype(np.int64)
    size = img.grid.size
    lines = ["P2", f"{size} {size}", "255"]
    lines += [" ".join(str(v) for v in row) for row in gray]
    Path(path).write_text("\n".join(lines) + "\n")
