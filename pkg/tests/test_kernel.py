import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ramstat import kernel
from ramstat.arith import factor, m_a
from ramstat.cover import make_cover, make_quadratic_cover

BACKENDS = kernel.backends()
needs_ext = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernel not built")

SPECS = [
    make_quadratic_cover((0, 1)),
    make_quadratic_cover((1, 0, 1)),
    make_quadratic_cover((0, 1, 0, 1)),
    make_cover([((-7, 0, 0, 3), 3)]),
    make_cover([((1, 0, 1), 4), ((0, 1), 2)]),
]


def block(impl, spec, start, stop):
    f = list(spec.family.f) if spec.is_quadratic else None
    return impl.evaluate_block(spec.orbit_coeffs(), spec.ram_indices(), spec.p0, f, start, stop)


@needs_ext
@pytest.mark.parametrize("spec", SPECS, ids=lambda s: str(s.orbit_coeffs()))
def test_backends_agree(spec):
    a = block(BACKENDS["python"], spec, 1, 1500)
    b = block(BACKENDS["cython"], spec, 1, 1500)
    assert np.array_equal(a, b)


@needs_ext
def test_backends_agree_at_large_n():
    spec = make_quadratic_cover((1, 0, 1))
    a = block(BACKENDS["python"], spec, 10**8, 10**8 + 200)
    b = block(BACKENDS["cython"], spec, 10**8, 10**8 + 200)
    assert np.array_equal(a, b)


@needs_ext
def test_overflow_falls_back():
    # values near 2^90 overflow 64 bits and are handled by the Python path
    spec = make_cover([((2, 0, 0, 0, 0, 0, 0, 0, 0, 1), 2)])
    a = block(BACKENDS["python"], spec, 1000, 1040)
    b = block(BACKENDS["cython"], spec, 1000, 1040)
    assert np.array_equal(a, b)


@needs_ext
@given(st.integers(1, 2**63 - 1))
def test_factor_int_agrees(m):
    assert list(BACKENDS["cython"].factor_int(m)) == list(factor(m).entries)


@needs_ext
@pytest.mark.parametrize("a", [1, 2, 3])
def test_m_a_block_agrees(a):
    p = [1, 0, 1]
    x = BACKENDS["python"].m_a_block(p, a, 1, 2000)
    y = BACKENDS["cython"].m_a_block(p, a, 1, 2000)
    assert np.array_equal(x, y)
    assert x[6] == m_a(50, a)


def test_m_a_block_marks_zeros():
    assert kernel.m_a_block([-3, 1], 2, 1, 6).tolist()[2] == -1


def test_branch_rows():
    spec = make_quadratic_cover((-4, 1))
    row = block(kernel, spec, 4, 5)[0]
    assert row[kernel.STATUS] == kernel.STATUS_BRANCH
    assert row[kernel.ORACLE_RAM] == -1


def test_pure_python_env_switch():
    env = dict(os.environ, RAMSTAT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from ramstat import kernel; print(kernel.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_default_backend_is_compiled_when_available():
    if os.environ.get("RAMSTAT_PURE_PYTHON") == "1":
        pytest.skip("pure Python forced")
    assert kernel.BACKEND == ("cython" if "cython" in BACKENDS else "python")
