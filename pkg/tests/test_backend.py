import importlib
import os

import numpy as np
import pytest

from curvlab import _jetcore_py as py
from curvlab._backend import BACKEND
from curvlab._tables import tables

cy = pytest.importorskip("curvlab._jetcore")


@pytest.fixture
def batch(rng):
    a = rng.normal(size=(16, 70))
    b = rng.normal(size=(16, 70))
    b[:, 0] = 2 + np.abs(b[:, 0])
    return a, b


def test_compiled_backend_selected():
    want = "python" if os.environ.get("CURVLAB_BACKEND", "").lower() == "python" else "cython"
    assert BACKEND == want


def test_env_forces_fallback(monkeypatch):
    import curvlab._backend as be
    monkeypatch.setenv("CURVLAB_BACKEND", "python")
    try:
        mod = importlib.reload(be)
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("CURVLAB_BACKEND")
        importlib.reload(be)


@pytest.mark.parametrize("name", ["mul", "div"])
def test_binary_kernels_agree(batch, name):
    a, b = batch
    t = tables(4)
    np.testing.assert_allclose(getattr(cy, name)(a, b, t), getattr(py, name)(a, b, t), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("name", ["exp", "log", "sincos", "sinhcosh"])
def test_unary_kernels_agree(batch, name):
    _, b = batch
    b = b * 0.3
    b[:, 0] = 1.5
    t = tables(4)
    out_c = getattr(cy, name)(b, t)
    out_p = getattr(py, name)(b, t)
    if not isinstance(out_c, tuple):
        out_c, out_p = (out_c,), (out_p,)
    for c, p in zip(out_c, out_p):
        np.testing.assert_allclose(c, p, rtol=1e-12, atol=1e-13)


def test_div_zero_both(batch):
    a, b = batch
    b[3, 0] = 0.0
    t = tables(4)
    for mod in (cy, py):
        with pytest.raises(ZeroDivisionError):
            mod.div(a, b, t)
