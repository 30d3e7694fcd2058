"""Pure-numpy projector kernels.

Fallback for the compiled extension in ``_kernels.pyx``; both expose the
same two entry points with identical sampling arithmetic so results agree
to rounding. ``num_threads`` is accepted for interface parity and ignored
(numpy paths here are single-threaded).
"""

from __future__ import annotations

import numpy as np


def forward_kernel(
    image: np.ndarray,
    spacing: float,
    cos_t: np.ndarray,
    sin_t: np.ndarray,
    offsets: np.ndarray,
    step: float,
    n_half: int,
    num_threads: int = 1,
) -> np.ndarray:
    size = image.shape[0]
    center = (size - 1) / 2.0
    t = np.arange(-n_half, n_half + 1) * step
    out = np.empty((cos_t.shape[0], offsets.shape[0]))
    s_col = offsets[:, None]
    for j in range(cos_t.shape[0]):
        c, sn = cos_t[j], sin_t[j]
        px = (s_col * c - t[None, :] * sn) / spacing + center
        py = (s_col * sn + t[None, :] * c) / spacing + center
        j0 = np.floor(px).astype(np.intp)
        i0 = np.floor(py).astype(np.intp)
        fx = px - j0
        fy = py - i0
        acc = np.zeros_like(px)
        for di, dj, w in (
            (0, 0, (1 - fy) * (1 - fx)),
            (0, 1, (1 - fy) * fx),
            (1, 0, fy * (1 - fx)),
            (1, 1, fy * fx),
        ):
            ii = i0 + di
            jj = j0 + dj
            valid = (ii >= 0) & (ii < size) & (jj >= 0) & (jj < size)
            vals = image[np.clip(ii, 0, size - 1), np.clip(jj, 0, size - 1)]
            acc += np.where(valid, w * vals, 0.0)
        out[j] = acc.sum(axis=1) * step
    return out


def back_kernel(
    sino: np.ndarray,
    bin_spacing: float,
    cos_t: np.ndarray,
    sin_t: np.ndarray,
    size: int,
    spacing: float,
    num_threads: int = 1,
) -> np.ndarray:
    num_bins = sino.shape[1]
    coords = (np.arange(size) - (size - 1) / 2.0) * spacing
    x = coords[None, :]
    y = coords[:, None]
    det_center = (num_bins - 1) / 2.0
    out = np.zeros((size, size))
    for j in range(cos_t.shape[0]):
        u = (x * cos_t[j] + y * sin_t[j]) / bin_spacing + det_center
        m0 = np.floor(u).astype(np.intp)
        w = u - m0
        row = sino[j]
        lo_ok = (m0 >= 0) & (m0 < num_bins)
        hi_ok = (m0 >= -1) & (m0 < num_bins - 1)
        out += np.where(lo_ok, (1 - w) * row[np.clip(m0, 0, num_bins - 1)], 0.0)
        out += np.where(hi_ok, w * row[np.clip(m0 + 1, 0, num_bins - 1)], 0.0)
    return out
