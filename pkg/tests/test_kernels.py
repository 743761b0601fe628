"""Compiled kernel vs pure-numpy fallback parity."""

import os
import subprocess
import sys

import numpy as np
import pytest

from pathtrans import _kernels
from pathtrans._kernels import pure
from pathtrans.lie import SO3

HAVE_COMPILED = _kernels.IMPL != "pure"

RNG = np.random.default_rng(2024)


def _skew_batch(shape, scale=0.4):
    out = np.zeros(shape + (3, 3))
    flat = out.reshape(-1, 3, 3)
    for m in flat:
        m[:] = SO3.random_algebra(RNG, scale)
    return out


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernel unavailable")
class TestParity:
    def test_expm_matches_pure(self):
        X = _skew_batch((5, 4))
        assert np.max(np.abs(_kernels.expm(X) - pure.expm(X))) < 1e-13

    def test_expm_accepts_readonly_views(self):
        X = np.broadcast_to(SO3.random_algebra(RNG, 0.3), (6, 3, 3))
        assert np.max(np.abs(_kernels.expm(X) - pure.expm(X))) < 1e-13

    def test_rkmk4_scan_matches_pure(self):
        n = 30
        xi_nodes = _skew_batch((3, n + 1))
        xi_mids = _skew_batch((3, n))
        y0 = np.broadcast_to(np.eye(3), (3, 3, 3))
        a = _kernels.rkmk4_scan(xi_nodes, xi_mids, 1.0 / n, y0)
        b = pure.rkmk4_scan(xi_nodes, xi_mids, 1.0 / n, y0)
        assert np.max(np.abs(a - b)) < 1e-12

    def test_euler_scan_matches_pure(self):
        n = 25
        xi_nodes = _skew_batch((2, n + 1))
        y0 = np.broadcast_to(np.eye(3), (2, 3, 3))
        a = _kernels.euler_scan(xi_nodes, 1.0 / n, y0)
        b = pure.euler_scan(xi_nodes, 1.0 / n, y0)
        assert np.max(np.abs(a - b)) < 1e-12


class TestSelection:
    def test_env_forces_pure(self):
        code = ("import pathtrans; print(pathtrans.kernel_impl)")
        env = dict(os.environ, PATHTRANS_KERNEL="pure")
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "pure"

    def test_pure_expm_vs_scipy(self):
        from scipy.linalg import expm as sexpm
        X = SO3.random_algebra(RNG, 0.7)
        assert np.max(np.abs(pure.expm(X) - sexpm(X))) < 1e-12

    def test_results_independent_of_kernel(self):
        # an end-to-end lift must agree between the two implementations
        code = (
            "import numpy as np\n"
            "from pathtrans.geometry import default_chart, form_preset_1\n"
            "from pathtrans.lie import SO3\n"
            "from pathtrans.paths import horizontal_lift, segment_path\n"
            "abar = form_preset_1('gauss:0:0.5:1.5', SO3, default_chart())\n"
            "p = segment_path((-0.5, -0.2), (0.8, 0.4), 120)\n"
            "lift = horizontal_lift(abar, p, SO3.identity(), SO3)\n"
            "print(repr(lift.fiber[-1].tolist()))\n")
        outs = []
        for kern in ("", "pure"):
            env = dict(os.environ, PATHTRANS_KERNEL=kern)
            r = subprocess.run([sys.executable, "-c", code], env=env,
                               capture_output=True, text=True, check=True)
            outs.append(np.array(eval(r.stdout)))
        assert np.max(np.abs(outs[0] - outs[1])) < 1e-12
