"""Dense complex linear algebra for small quantum objects.

Conventions used throughout the package:

* tensor products are left-major: in ``a ⊗ b`` the index of ``a`` varies
  slowest, so a bipartite index ``(i, j)`` is stored at ``i * dim_b + j``;
* states and operators are plain ``numpy.ndarray`` objects of dtype
  ``complex128``; validators below enforce the density-matrix and
  pure-state contracts where an operation needs them.
"""
from __future__ import annotations

import numpy as np

from ._config import TOL, DomainError, ValidationError, check_dim

__all__ = [
    "tensor_product",
    "partial_trace",
    "nonzero_spectrum",
    "clamped_eigvalsh",
    "von_neumann_entropy",
    "trace_power",
    "as_density",
    "as_pure",
    "projector",
    "random_pure",
    "random_density",
    "random_unitary",
    "random_isometry",
    "rng_for",
    "sub_seed",
]


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b`` with ``a`` as the slow index."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim == 1 and b.ndim == 1:
        check_dim(a.shape[0] * b.shape[0])
    else:
        a2, b2 = np.atleast_2d(a), np.atleast_2d(b)
        check_dim(max(a2.shape[0] * b2.shape[0], a2.shape[1] * b2.shape[1]))
    return np.kron(a, b)


def partial_trace(m, dim_b: int, dim_c: int, keep: str = "B") -> np.ndarray:
    """Trace out one factor of an operator on ``H_B ⊗ H_C``.

    Parameters
    ----------
    m : array_like
        Square matrix of size ``dim_b * dim_c``.
    dim_b, dim_c : int
        Factor dimensions, B first.
    keep : {"B", "C"}
        The factor that survives.
    """
    m = np.asarray(m)
    n = dim_b * dim_c
    if m.shape != (n, n):
        raise ValidationError(f"expected shape {(n, n)}, got {m.shape}")
    t = m.reshape(dim_b, dim_c, dim_b, dim_c)
    if keep == "B":
        return np.einsum("ijkj->ik", t)
    if keep == "C":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'B' or 'C', not {keep!r}")


def _check_hermitian(h: np.ndarray, tol: float) -> None:
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    if np.max(np.abs(h - h.conj().T), initial=0.0) > tol * scale:
        raise ValidationError("matrix is not Hermitian within tolerance")


def clamped_eigvalsh(h, tol_psd: float = TOL.psd) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix with small negative drift set to 0."""
    h = np.asarray(h)
    w = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    w[(w < 0) & (w > -tol_psd)] = 0.0
    return w


def nonzero_spectrum(h, tol: float = 1e-12, tol_herm: float = TOL.herm) -> np.ndarray:
    """Eigenvalues with ``|λ| > tol``, sorted in descending order."""
    h = np.asarray(h, dtype=complex)
    _check_hermitian(h, tol_herm)
    w = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    w = w[np.abs(w) > tol]
    return np.sort(w)[::-1]


def von_neumann_entropy(sigma, tol_psd: float = TOL.psd) -> float:
    """Entropy ``-Tr σ ln σ`` in nats; ``0 ln 0 = 0``."""
    sigma = np.asarray(sigma, dtype=complex)
    _check_hermitian(sigma, TOL.herm)
    w = np.clip(clamped_eigvalsh(sigma, tol_psd), 0.0, 1.0)
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))


def trace_power(sigma, p: float, tol_psd: float = TOL.psd) -> float:
    """``Tr σ^p`` for a positive semidefinite ``σ`` and ``p >= 1``.

    ``p = inf`` is not handled here; callers use the largest eigenvalue.
    """
    if not p >= 1 or np.isinf(p):
        raise DomainError(f"trace_power needs finite p >= 1, got {p}")
    sigma = np.asarray(sigma, dtype=complex)
    _check_hermitian(sigma, TOL.herm)
    w = np.maximum(clamped_eigvalsh(sigma, tol_psd), 0.0)
    return float(np.sum(w**p))


def as_density(rho, normalized: bool = True, tol: float = TOL.trace) -> np.ndarray:
    """Validate and return ``rho`` as a complex density matrix.

    With ``normalized=False`` the trace only has to be at most ``1 + tol``,
    which is the contract for outputs of non trace-preserving CP maps.
    """
    rho = np.asarray(rho, dtype=complex)
    _check_hermitian(rho, TOL.herm)
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if w.size and w.min() < -TOL.psd:
        raise ValidationError(f"not positive semidefinite (min eigenvalue {w.min():.3e})")
    tr = float(np.real(np.trace(rho)))
    if normalized and abs(tr - 1.0) > tol:
        raise ValidationError(f"trace {tr} differs from 1")
    if not normalized and tr > 1.0 + tol:
        raise ValidationError(f"trace {tr} exceeds 1")
    return rho


def as_pure(psi, tol: float = TOL.norm) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol:
        raise ValidationError(f"state vector has norm {nrm}")
    return psi


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def rng_for(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sub_seed(master: int, *index: int) -> int:
    """Deterministic 63-bit child seed ``index`` of ``master`` (SeedSequence spawn keys)."""
    state = np.random.SeedSequence(int(master), spawn_key=tuple(int(i) for i in index)).generate_state(1, np.uint64)
    return int(state[0] >> np.uint64(1))


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_pure(dim: int, seed=None) -> np.ndarray:
    """Haar-random unit vector."""
    rng = rng_for(seed)
    v = _ginibre(rng, dim, 1)[:, 0]
    return v / np.linalg.norm(v)


def random_density(dim: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Random density matrix ``G G* / Tr G G*`` (Hilbert-Schmidt measure for full rank)."""
    rng = rng_for(seed)
    g = _ginibre(rng, dim, dim if rank is None else rank)
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.real(np.trace(rho))


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-random unitary: QR of a Ginibre matrix with phase-fixed diagonal of R."""
    rng = rng_for(seed)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_isometry(rows: int, cols: int, seed=None) -> np.ndarray:
    """``rows x cols`` matrix with orthonormal columns (``cols <= rows``)."""
    if cols > rows:
        raise ValueError("an isometry needs cols <= rows")
    return random_unitary(rows, seed)[:, :cols]
