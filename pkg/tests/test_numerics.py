import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chancomp import numerics as nm
from chancomp._config import DimensionLimitError, DomainError, ValidationError

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 4)


def test_tensor_product_examples():
    assert np.array_equal(nm.tensor_product(np.eye(2), np.eye(3)), np.eye(6))
    x = np.array([[0, 1], [1, 0]])
    z = np.array([[1, 0], [0, -1]])
    want = np.array([[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]])
    assert np.array_equal(nm.tensor_product(x, z), want)


@given(seeds, dims, dims)
def test_tensor_product_is_left_major(seed, db, dc):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((db, db))
    b = rng.standard_normal((dc, dc))
    t = nm.tensor_product(a, b)
    i, j, k, l = rng.integers(db), rng.integers(dc), rng.integers(db), rng.integers(dc)
    assert t[i * dc + j, k * dc + l] == pytest.approx(a[i, k] * b[j, l])


def test_partial_trace_examples():
    rho = nm.random_density(2, 1)
    sigma = 2.5 * nm.random_density(3, 2)
    assert np.allclose(nm.partial_trace(np.kron(rho, sigma), 2, 3, "B"), 2.5 * rho, atol=1e-12)
    assert np.allclose(nm.partial_trace(np.eye(4), 2, 2, "C"), 2 * np.eye(2))
    omega = np.eye(3).reshape(-1) / np.sqrt(3)
    assert np.allclose(nm.partial_trace(np.outer(omega, omega), 3, 3, "B"), np.eye(3) / 3, atol=1e-15)


@given(seeds, dims, dims)
def test_partial_trace_linear_and_trace_preserving(seed, db, dc):
    rng = np.random.default_rng(seed)
    n = db * dc
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    for keep in ("B", "C"):
        pa, pb = nm.partial_trace(a, db, dc, keep), nm.partial_trace(b, db, dc, keep)
        assert np.allclose(nm.partial_trace(a - 2j * b, db, dc, keep), pa - 2j * pb, atol=1e-12)
        assert abs(np.trace(pa) - np.trace(a)) < 1e-12 * max(1, abs(np.trace(a)))


def test_partial_trace_rejects_bad_shape():
    with pytest.raises(ValidationError):
        nm.partial_trace(np.eye(5), 2, 2)
    with pytest.raises(ValueError):
        nm.partial_trace(np.eye(4), 2, 2, keep="X")


def test_nonzero_spectrum_examples():
    assert np.allclose(nm.nonzero_spectrum(np.diag([0.5, 0.5, 0.0])), [0.5, 0.5])
    psi = nm.random_pure(4, 3)
    assert np.allclose(nm.nonzero_spectrum(nm.projector(psi)), [1.0])
    with pytest.raises(ValidationError):
        nm.nonzero_spectrum(np.array([[0, 1], [0, 0]]))


@given(seeds, st.integers(1, 5))
def test_nonzero_spectrum_unitarily_invariant(seed, d):
    h = nm.random_density(d, seed, rank=max(1, d - 1))
    u = nm.random_unitary(d, seed + 1)
    a, b = nm.nonzero_spectrum(h), nm.nonzero_spectrum(u @ h @ u.conj().T)
    assert len(a) == len(b) and np.allclose(a, b, atol=1e-10)


def test_entropy_examples():
    assert nm.von_neumann_entropy(nm.projector(nm.random_pure(3, 0))) == pytest.approx(0, abs=1e-12)
    assert nm.von_neumann_entropy(np.eye(3) / 3) == pytest.approx(np.log(3))
    assert nm.von_neumann_entropy(np.diag([0.5, 0.5, 0])) == pytest.approx(np.log(2))


@given(seeds, st.integers(1, 5))
def test_entropy_unitarily_invariant(seed, d):
    s = nm.random_density(d, seed)
    u = nm.random_unitary(d, seed ^ 0xFF)
    assert abs(nm.von_neumann_entropy(s) - nm.von_neumann_entropy(u @ s @ u.conj().T)) < 1e-10


def test_trace_power_examples():
    psi = nm.random_pure(3, 5)
    for p in (1, 1.5, 2, 7):
        assert nm.trace_power(nm.projector(psi), p) == pytest.approx(1.0, abs=1e-12)
    assert nm.trace_power(np.eye(2) / 2, 2) == pytest.approx(0.5)
    assert nm.trace_power(np.eye(3) / 3, 3) == pytest.approx(1 / 9)
    s = 0.7 * nm.random_density(4, 1)
    assert abs(nm.trace_power(s, 1) - np.trace(s).real) < 1e-12
    with pytest.raises(DomainError):
        nm.trace_power(s, 0.5)


def test_eigenvalue_clamping():
    h = np.diag([1.0, -5e-11, 0.0])
    assert nm.clamped_eigvalsh(h).min() == 0.0
    assert nm.clamped_eigvalsh(np.diag([1.0, -1e-3])).min() < 0


def test_as_density_validation():
    with pytest.raises(ValidationError):
        nm.as_density(np.diag([1.5, -0.5]))
    with pytest.raises(ValidationError):
        nm.as_density(np.eye(2))
    assert np.allclose(nm.as_density(0.4 * np.eye(2), normalized=False), 0.4 * np.eye(2))
    with pytest.raises(ValidationError):
        nm.as_density(np.eye(2), normalized=False)
    with pytest.raises(ValidationError):
        nm.as_pure([1.0, 1.0])


def test_random_objects_deterministic_and_valid():
    for f in (nm.random_pure, nm.random_density, nm.random_unitary):
        assert np.array_equal(f(3, 42), f(3, 42))
    u = nm.random_unitary(4, 9)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
    w = nm.random_isometry(5, 2, 9)
    assert np.allclose(w.conj().T @ w, np.eye(2), atol=1e-12)
    rho = nm.random_density(3, 8, rank=1)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 1


def test_sub_seed_scheme():
    assert nm.sub_seed(7, 0, 3) == nm.sub_seed(7, 0, 3)
    assert len({nm.sub_seed(7, 0, t) for t in range(50)}) == 50
    assert nm.sub_seed(7, 1) != nm.sub_seed(8, 1)


def test_dimension_limit(monkeypatch):
    monkeypatch.setenv("CHANCOMP_MAX_DIM", "8")
    with pytest.raises(DimensionLimitError):
        nm.tensor_product(np.eye(3), np.eye(3))
    nm.tensor_product(np.eye(2), np.eye(4))
