# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled projector kernels.

Same sampling arithmetic as the numpy fallback in ``_kernels_py``; kept in
lockstep so both backends agree to rounding. Outer loops parallelize over
rows of the output (one writer per element, deterministic for any thread
count).
"""

from cython.parallel import prange
from libc.math cimport floor

import numpy as np


def forward_kernel(
    const double[:, ::1] image,
    double spacing,
    const double[::1] cos_t,
    const double[::1] sin_t,
    const double[::1] offsets,
    double step,
    int n_half,
    int num_threads=1,
):
    cdef Py_ssize_t size = image.shape[0]
    cdef Py_ssize_t num_angles = cos_t.shape[0]
    cdef Py_ssize_t num_bins = offsets.shape[0]
    out_arr = np.empty((num_angles, num_bins))
    cdef double[:, ::1] out = out_arr
    cdef double center = (size - 1) / 2.0
    cdef Py_ssize_t j, m, i, i0, j0
    cdef double c, sn, s, t, x, y, px, py, fx, fy, acc, val

    for j in prange(num_angles, nogil=True, schedule="static",
                    num_threads=num_threads):
        c = cos_t[j]
        sn = sin_t[j]
        for m in range(num_bins):
            s = offsets[m]
            acc = 0.0
            for i in range(-n_half, n_half + 1):
                t = i * step
                x = s * c - t * sn
                y = s * sn + t * c
                px = x / spacing + center
                py = y / spacing + center
                j0 = <Py_ssize_t>floor(px)
                i0 = <Py_ssize_t>floor(py)
                fx = px - j0
                fy = py - i0
                val = 0.0
                if 0 <= i0 < size:
                    if 0 <= j0 < size:
                        val = val + (1 - fy) * (1 - fx) * image[i0, j0]
                    if 0 <= j0 + 1 < size:
                        val = val + (1 - fy) * fx * image[i0, j0 + 1]
                if 0 <= i0 + 1 < size:
                    if 0 <= j0 < size:
                        val = val + fy * (1 - fx) * image[i0 + 1, j0]
                    if 0 <= j0 + 1 < size:
                        val = val + fy * fx * image[i0 + 1, j0 + 1]
                acc = acc + val
            out[j, m] = acc * step
    return out_arr


def back_kernel(
    const double[:, ::1] sino,
    double bin_spacing,
    const double[::1] cos_t,
    const double[::1] sin_t,
    Py_ssize_t size,
    double spacing,
    int num_threads=1,
):
    cdef Py_ssize_t num_angles = sino.shape[0]
    cdef Py_ssize_t num_bins = sino.shape[1]
    out_arr = np.zeros((size, size))
    cdef double[:, ::1] out = out_arr
    cdef double grid_center = (size - 1) / 2.0
    cdef double det_center = (num_bins - 1) / 2.0
    cdef Py_ssize_t i, j, a, m0
    cdef double x, y, u, w, acc

    for i in prange(size, nogil=True, schedule="static",
                    num_threads=num_threads):
        y = (i - grid_center) * spacing
        for j in range(size):
            x = (j - grid_center) * spacing
            acc = 0.0
            for a in range(num_angles):
                u = (x * cos_t[a] + y * sin_t[a]) / bin_spacing + det_center
                m0 = <Py_ssize_t>floor(u)
                w = u - m0
                if 0 <= m0 < num_bins:
                    acc = acc + (1 - w) * sino[a, m0]
                if 0 <= m0 + 1 < num_bins:
                    acc = acc + w * sino[a, m0 + 1]
            out[i, j] = acc
    return out_arr
