import os
import subprocess
import sys

import numpy as np
import pytest

from paretogof import _kernels
from paretogof.distributions import pareto_sample

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def sorted_sample(n, seed):
    return np.sort(pareto_sample(n, 1.0, seed))


@pytest.mark.parametrize("n, k", [(5, 2), (12, 3), (40, 4), (120, 3), (60, 6)])
def test_numpy_matches_plain_loops(n, k):
    x = sorted_sample(n, n * k)
    w = _kernels.pair_weights(n, k)
    assert _kernels.integral_count_numpy(x, w) == pytest.approx(_kernels._integral_count_loop(x, w), rel=1e-13)
    d_np, t_np = _kernels.sup_scan_numpy(x, w)
    d_lp, t_lp = _kernels._sup_scan_loop(x, w)
    assert d_np == pytest.approx(d_lp, abs=1e-14)
    assert t_np == t_lp


@needs_numba
@pytest.mark.parametrize("seed", range(10))
def test_numba_matches_numpy(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 200))
    k = int(rng.integers(2, min(n, 7) + 1))
    x = sorted_sample(n, rng)
    w = _kernels.pair_weights(n, k)
    assert _kernels.integral_count_numba(x, w) == pytest.approx(_kernels.integral_count_numpy(x, w), rel=1e-13)
    d_nb, t_nb = _kernels.sup_scan_numba(x, w)
    d_np, t_np = _kernels.sup_scan_numpy(x, w)
    assert d_nb == pytest.approx(d_np, abs=1e-14)
    assert t_nb == t_np


def test_kernels_with_ties():
    x = np.array([1.0, 2.0, 2.0, 4.0, 4.0, 8.0])
    w = _kernels.pair_weights(6, 3)
    assert _kernels.integral_count_numpy(x, w) == pytest.approx(_kernels._integral_count_loop(x, w), rel=1e-15)
    assert _kernels.sup_scan_numpy(x, w) == pytest.approx(_kernels._sup_scan_loop(x, w))


def test_pair_weights():
    w = _kernels.pair_weights(10, 4)
    assert w[0] == w[1] == 0.0
    assert w[2] == pytest.approx(1 / 210)
    assert np.all(_kernels.pair_weights(10, 2) == 1 / 45)


@pytest.mark.parametrize("flag, expected", [("0", "numpy"), ("off", "numpy")])
def test_env_flag_selects_numpy(flag, expected):
    env = {**os.environ, "PARETOGOF_NUMBA": flag}
    code = "from paretogof import _kernels; print(_kernels.BACKEND, _kernels.integral_count.__name__)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, fn = out.stdout.split()
    assert backend == expected
    assert fn == "integral_count_numpy"


@needs_numba
def test_default_backend_is_numba():
    env = {k: v for k, v in os.environ.items() if k != "PARETOGOF_NUMBA"}
    code = "from paretogof import _kernels; print(_kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"
