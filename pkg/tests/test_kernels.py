import os
import subprocess
import sys

import numpy as np
import pytest

from cavityrqi import kernels
from cavityrqi.kernels import _fallback

core = pytest.importorskip("cavityrqi.kernels._core")


@pytest.mark.parametrize("M", [0.1, 3.0, 250.0])
def test_dirac_roots_backends_agree(M):
    branches = np.arange(200, dtype=np.int64)
    a = core.dirac_roots(branches, M)
    b = _fallback.dirac_roots(branches, M)
    assert np.allclose(a, b, rtol=1e-12, atol=0)


@pytest.mark.parametrize("M", [0.0, 2.0])
def test_antidiagonal_backends_agree(M):
    assert np.allclose(core.scalar_beta_antidiagonals(M, 301),
                       _fallback.scalar_beta_antidiagonals(M, 301), rtol=1e-12, atol=1e-300)
    x = (np.arange(301) + 0.5) * np.pi if M == 0 else _fallback.dirac_roots(
        np.arange(301, dtype=np.int64), M)
    assert np.allclose(core.dirac_beta_antidiagonals(M, x),
                       _fallback.dirac_beta_antidiagonals(M, x), rtol=1e-12, atol=1e-300)


def test_compiled_backend_selected_when_built():
    assert kernels.BACKEND == "compiled"


def test_environment_forces_the_fallback():
    env = dict(os.environ, CAVITYRQI_PURE_PYTHON="1")
    proc = subprocess.run([sys.executable, "-c",
                           "from cavityrqi import kernels; print(kernels.BACKEND)"],
                          capture_output=True, text=True, env=env)
    assert proc.stdout.strip() == "python"
