"""Compiled and pure-Python kernels must agree."""
import numpy as np
import pytest

from optodistill import kernels

py = kernels.load_backend("python")
try:
    cy = kernels.load_backend("compiled")
except ImportError:  # pragma: no cover - extension not built
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "python")
    with pytest.raises(ValueError):
        kernels.load_backend("fortran")


@needs_ext
def test_hermite_tables_agree():
    x = np.linspace(-6, 6, 37)
    assert np.allclose(cy.hermite_functions(30, x), py.hermite_functions(30, x), rtol=1e-13, atol=1e-300)
    assert np.allclose(cy.hermite_polys(12, 0.7), py.hermite_polys(12, 0.7), rtol=1e-14)


@needs_ext
def test_eq6_sums_agree():
    a = cy.eq6_sums(6, 5, 0.3, -0.8)
    b = py.eq6_sums(6, 5, 0.3, -0.8)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-12)


@needs_ext
def test_scatter_agrees():
    rng = np.random.default_rng(0)
    amp = rng.normal(size=(3, 4, 4, 4)) + 1j * rng.normal(size=(3, 4, 4, 4))
    assert np.array_equal(cy.scatter_two_mode(amp), py.scatter_two_mode(amp))


def test_scatter_index_map():
    d = 3
    amp = np.zeros((1, d, d, d), dtype=complex)
    amp[0, 2, 1, 1] = 1.5
    rho = py.scatter_two_mode(amp)
    # |n-k, n><m-k, m| with n=2, m=1, k=1
    assert rho[0, 1 * d + 2, 0 * d + 1] == 1.5
    assert np.count_nonzero(rho) == 1
