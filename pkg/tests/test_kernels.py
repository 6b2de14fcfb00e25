import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polydensity import kernels

try:
    kernels.get_backend("cython")
    HAVE_CYTHON = True
except ImportError:
    HAVE_CYTHON = False

needs_cython = pytest.mark.skipif(not HAVE_CYTHON, reason="compiled extension not built")


def direct_log(x, zeros, mult, skip=-1):
    # straightforward complex product, no log-space tricks
    terms = [(1 - x / lam) ** m for k, (lam, m) in enumerate(zip(zeros, mult)) if k != skip]
    v = np.prod(terms) if terms else 1.0
    return np.log(np.abs(v)), v


@pytest.mark.parametrize("backend", ["python", pytest.param("cython", marks=needs_cython)])
def test_real_product_against_direct(backend):
    zeros = np.array([-3.0, -1.0, 0.5, 2.0, 7.0])
    mult = np.array([1, 2, 1, 3, 1])
    x = np.array([0.0, 0.3, -2.2, 5.0, 0.5])
    la, sg = kernels.prod_log_real(x, 1 / zeros, mult, backend=backend)
    for i, xi in enumerate(x):
        want, v = direct_log(xi, zeros, mult)
        if v == 0:
            assert la[i] == -np.inf
        else:
            assert la[i] == pytest.approx(want, rel=1e-13, abs=1e-14)
            assert sg[i] == np.sign(v)


@pytest.mark.parametrize("backend", ["python", pytest.param("cython", marks=needs_cython)])
def test_complex_product_against_direct(backend):
    zeros = np.array([-3.0, -1.0, 0.5, 2.0, 7.0])
    mult = np.array([1, 2, 1, 3, 1])
    z = np.array([0.1 + 0.2j, -2 + 1j, 4 - 3j])
    la, arg = kernels.prod_log_complex(z, 1 / zeros, mult, backend=backend)
    for i, zi in enumerate(z):
        want, v = direct_log(zi, zeros, mult)
        assert la[i] == pytest.approx(want, rel=1e-13)
        assert np.exp(1j * arg[i]) == pytest.approx(v / abs(v), abs=1e-12)


def test_removed_factor():
    zeros = np.array([-2.0, 1.0, 3.0])
    la, sg = kernels.removed_factor_log([1], zeros, np.ones(3, dtype=np.int64))
    # (1 + 1/2)(1 - 1/3)
    assert la[0] == pytest.approx(np.log(1.0))
    assert sg[0] == 1.0


@needs_cython
@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-50, 50).filter(lambda v: abs(v) > 1e-3), min_size=1, max_size=30, unique=True),
       st.lists(st.floats(-60, 60), min_size=1, max_size=20))
def test_backends_agree_real(zeros, xs):
    zeros = np.array(zeros)
    mult = np.ones(zeros.size, dtype=np.int64)
    x = np.array(xs)
    a = kernels.prod_log_real(x, 1 / zeros, mult, backend="python")
    b = kernels.prod_log_real(x, 1 / zeros, mult, backend="cython")
    np.testing.assert_allclose(a[0], b[0], rtol=1e-12, atol=1e-12)
    np.testing.assert_array_equal(a[1], b[1])


@needs_cython
@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-50, 50).filter(lambda v: abs(v) > 1e-3), min_size=1, max_size=30, unique=True),
       st.lists(st.complex_numbers(max_magnitude=60), min_size=1, max_size=20))
def test_backends_agree_complex(zeros, zs):
    zeros = np.array(zeros)
    mult = np.ones(zeros.size, dtype=np.int64)
    z = np.array(zs)
    a = kernels.prod_log_complex(z, 1 / zeros, mult, backend="python")
    b = kernels.prod_log_complex(z, 1 / zeros, mult, backend="cython")
    np.testing.assert_allclose(a[0], b[0], rtol=1e-12, atol=1e-12)
    # compare phases on the circle
    fin = np.isfinite(a[0])
    np.testing.assert_allclose(np.exp(1j * a[1][fin]), np.exp(1j * b[1][fin]), atol=1e-10)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")
