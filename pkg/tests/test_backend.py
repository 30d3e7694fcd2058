import math
import os
import subprocess
import sys

import numpy as np
import pytest

import fbplearn
from fbplearn import _kernels_py
from fbplearn._backend import get_num_threads, set_num_threads

_kernels = pytest.importorskip(
    "fbplearn._kernels", reason="compiled kernels not built"
)


@pytest.fixture
def forward_args(rng):
    size = 24
    image = rng.random((size, size))
    angles = np.arange(18) * (np.pi / 18)
    offsets = (np.arange(35) - 17.0) * 1.0
    n_half = math.ceil(size * math.sqrt(2.0))
    return image, 1.0, np.cos(angles), np.sin(angles), offsets, 0.5, n_half


class TestBackendParity:
    def test_forward_kernels_agree(self, forward_args):
        a = _kernels.forward_kernel(*forward_args, 1)
        b = _kernels_py.forward_kernel(*forward_args, 1)
        assert np.abs(a - b).max() < 1e-10

    def test_back_kernels_agree(self, forward_args, rng):
        sino = rng.random((18, 35))
        angles = np.arange(18) * (np.pi / 18)
        args = (sino, 1.0, np.cos(angles), np.sin(angles), 24, 1.0)
        a = _kernels.back_kernel(*args, 1)
        b = _kernels_py.back_kernel(*args, 1)
        assert np.abs(a - b).max() < 1e-10

    def test_thread_count_does_not_change_results(self, forward_args, rng):
        one = _kernels.forward_kernel(*forward_args, 1)
        four = _kernels.forward_kernel(*forward_args, 4)
        np.testing.assert_array_equal(one, four)
        sino = rng.random((18, 35))
        angles = np.arange(18) * (np.pi / 18)
        args = (sino, 1.0, np.cos(angles), np.sin(angles), 24, 1.0)
        np.testing.assert_array_equal(
            _kernels.back_kernel(*args, 1), _kernels.back_kernel(*args, 4)
        )


class TestBackendSelection:
    def test_extension_active_by_default(self):
        assert fbplearn.using_extension()

    def test_env_var_forces_fallback(self):
        code = (
            "import fbplearn; "
            "assert not fbplearn.using_extension(); "
            "import fbplearn.projector as p; "
            "assert p.kernels.__name__.endswith('_kernels_py')"
        )
        proc = subprocess.run(
            [sys.executable, "-c", code],
            env={**os.environ, "FBPLEARN_PURE_PYTHON": "1"},
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr.decode()

    def test_thread_setting(self):
        set_num_threads(3)
        assert get_num_threads() == 3
        set_num_threads(1)
        with pytest.raises(ValueError):
            set_num_threads(0)
