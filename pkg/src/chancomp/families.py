"""Generators for the channel families used throughout the package.

Every generator returns a :class:`~chancomp.channels.KrausMap`. Where a
closed-form complementary map is known it is provided alongside, built
directly from its formula rather than through :func:`chancomp.complement.complement`,
so the two constructions can be checked against each other.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import zpstrf

from ._config import TOL, DomainError, ValidationError, check_dim
from .channels import KrausMap
from .numerics import random_isometry, random_pure, rng_for

__all__ = [
    "EBSpec",
    "identity",
    "completely_depolarizing",
    "depolarizing",
    "transpose_depolarizing",
    "wh_complement",
    "depolarizing_complement_s",
    "flip_operator",
    "max_entangled",
    "eb_channel",
    "eb_complement_closed_form",
    "kolmogorov_factor",
    "correlation_matrix",
    "diagonal_channel",
    "generalized_diagonal",
    "convex_mixture",
    "random_eb_spec",
    "random_qc_spec",
    "random_cq_spec",
    "random_correlation",
    "weyl_operators",
]


def _basis(d: int, j: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[j] = 1.0
    return e


def identity(d: int) -> KrausMap:
    return KrausMap(np.eye(d, dtype=complex)[None])


def completely_depolarizing(d: int) -> KrausMap:
    """``ρ ↦ Tr ρ · I/d`` with Kraus operators ``E_jk / sqrt(d)``."""
    ops = np.zeros((d * d, d, d), dtype=complex)
    for j in range(d):
        for k in range(d):
            ops[j * d + k, j, k] = 1.0 / np.sqrt(d)
    return KrausMap(ops)


def weyl_operators(d: int) -> list[np.ndarray]:
    """Clock-and-shift unitaries ``X^a Z^b`` in order ``a * d + b``."""
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    out = []
    for a in range(d):
        xa = np.linalg.matrix_power(x, a)
        for b in range(d):
            out.append(xa @ np.linalg.matrix_power(z, b))
    return out


def depolarizing(d: int, p: float) -> KrausMap:
    """``ρ ↦ (1-p) ρ + p Tr ρ · I/d`` for ``0 <= p <= d²/(d²-1)``.

    Uses the Weyl twirl ``Σ_W W ρ W* = d Tr ρ · I``; operators with zero
    weight are dropped.
    """
    if d < 1:
        raise DomainError("d must be positive")
    pmax = d * d / (d * d - 1) if d > 1 else np.inf
    if not (0.0 <= p <= pmax + 1e-15):
        raise DomainError(f"depolarizing parameter p={p} outside [0, {pmax}]")
    w_id = max(1.0 - p * (d * d - 1) / (d * d), 0.0)
    ops = []
    if w_id > 0:
        ops.append(np.sqrt(w_id) * np.eye(d, dtype=complex))
    if p > 0:
        ops.extend(np.sqrt(p) / d * w for w in weyl_operators(d)[1:])
    return KrausMap(np.stack(ops))


def transpose_depolarizing(d: int) -> KrausMap:
    """``ρ ↦ (I Tr ρ - ρ^T)/(d-1)``.

    Only pairs ``j < k`` are enumerated: ``j = k`` terms vanish and ``(k, j)``
    repeats ``(j, k)`` up to sign, so the pair normalization becomes
    ``1/sqrt(d-1)`` and the Kraus count is the minimal ``d(d-1)/2``.
    """
    if d < 2:
        raise DomainError("transpose-depolarizing channel needs d >= 2")
    ops = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = 1.0
            m[k, j] = -1.0
            ops.append(m / np.sqrt(d - 1))
    return KrausMap(np.stack(ops))


def depolarizing_complement_s(d: int, p: float):
    """S-operator of the complement of :func:`depolarizing`.

    ``S = sqrt(p/d) I + sqrt(d) (sqrt(1 - p(d²-1)/d²) - sqrt(p)/d) |Ω><Ω|``
    on ``C^d ⊗ C^d`` with unit ``Ω``; the complement is ``ρ ↦ S (ρ ⊗ I) S*``.
    """
    from .complement import SForm

    depolarizing(d, p)  # domain check
    w_id = max(1.0 - p * (d * d - 1) / (d * d), 0.0)
    omega = max_entangled(d)
    s = np.sqrt(p / d) * np.eye(d * d, dtype=complex) + np.sqrt(d) * (
        np.sqrt(w_id) - np.sqrt(p) / d
    ) * np.outer(omega, omega.conj())
    return SForm(s, d, d, d * d)


def flip_operator(d: int) -> np.ndarray:
    """Swap ``F (x ⊗ y) = y ⊗ x`` on ``C^d ⊗ C^d``."""
    check_dim(d * d)
    f = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for k in range(d):
            f[k * d + j, j * d + k] = 1.0
    return f


def max_entangled(d: int) -> np.ndarray:
    """Unit vector ``Σ_j e_j ⊗ e_j / sqrt(d)``."""
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)


def wh_complement(d: int) -> KrausMap:
    """Complement of the transpose-depolarizing channel in the antisymmetric form.

    ``Ṽ_j ψ = (ψ ⊗ e_j - e_j ⊗ ψ)/sqrt(2(d-1))`` maps ``C^d`` into ``C^d ⊗ C^d``.
    """
    if d < 2:
        raise DomainError("d >= 2 required")
    check_dim(d * d)
    eye = np.eye(d, dtype=complex)
    ops = []
    for j in range(d):
        e = eye[:, j]
        # columns: image of each input basis vector
        op = np.kron(eye, e[:, None]) - np.kron(e[:, None], eye)
        ops.append(op / np.sqrt(2 * (d - 1)))
    return KrausMap(np.stack(ops))


@dataclass(frozen=True)
class EBSpec:
    """Rank-one Kraus data ``|φ_α><ψ_α|``; ``psi`` rows live in the input, ``phi`` rows in the output."""

    psi: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        psi = np.atleast_2d(np.asarray(self.psi, dtype=complex))
        phi = np.atleast_2d(np.asarray(self.phi, dtype=complex))
        if psi.shape[0] != phi.shape[0]:
            raise ValidationError("psi and phi must have the same number of vectors")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "phi", phi)

    @property
    def size(self) -> int:
        return self.psi.shape[0]

    def completeness(self) -> np.ndarray:
        """``Σ_α |ψ_α><φ_α|φ_α><ψ_α|``."""
        w = np.sum(np.abs(self.phi) ** 2, axis=1)
        return np.einsum("a,ai,aj->ij", w, self.psi, self.psi.conj())

    def is_channel(self, tol: float = TOL.tp) -> bool:
        d = self.psi.shape[1]
        return bool(np.linalg.norm(self.completeness() - np.eye(d), 2) <= tol)

    def correlation(self) -> np.ndarray:
        """``c_αβ = <φ_β|φ_α>``."""
        return self.phi @ self.phi.conj().T


def eb_channel(spec: EBSpec) -> KrausMap:
    ops = np.einsum("ai,aj->aij", spec.phi, spec.psi.conj())
    return KrausMap(ops)


def kolmogorov_factor(c, tol_rank: float = TOL.rank) -> np.ndarray:
    """Factor a PSD matrix as ``c = v v*`` with the fewest columns.

    Uses LAPACK's pivoted Cholesky; the returned ``v`` has ``rank(c)``
    columns so that ``c_αβ = Σ_j v_αj conj(v_βj)``.
    """
    c = np.asarray(c, dtype=complex)
    c = 0.5 * (c + c.conj().T)
    n = c.shape[0]
    w = np.linalg.eigvalsh(c)
    top = max(float(w.max(initial=0.0)), 0.0)
    if w.min(initial=0.0) < -max(tol_rank * top, TOL.psd):
        raise DomainError(f"matrix is not positive semidefinite (eigenvalue {w.min():.3e})")
    if top == 0.0:
        return np.zeros((n, 1), dtype=complex)
    l, piv, rank, info = zpstrf(c, tol=tol_rank * top, lower=1)
    if info < 0:
        raise DomainError("pivoted Cholesky failed")
    l = np.tril(l)[:, :rank]
    v = np.zeros_like(l)
    v[piv - 1] = l
    return v


def eb_complement_closed_form(spec: EBSpec, tol_rank: float = TOL.rank) -> KrausMap:
    """``ρ ↦ [c_αβ <ψ_α|ρ|ψ_β>]`` as Kraus operators ``Ṽ_j = Σ_α v_αj |e_α><ψ_α|``."""
    return generalized_diagonal(spec.correlation(), spec.psi, tol_rank=tol_rank)


def correlation_matrix(c, diagonal: bool = False, tol: float = 1e-9) -> np.ndarray:
    """Validate a correlation matrix; ``diagonal=True`` also requires unit diagonal."""
    c = np.asarray(c, dtype=complex)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValidationError("correlation matrix must be square")
    if np.max(np.abs(c - c.conj().T)) > tol:
        raise ValidationError("correlation matrix must be Hermitian")
    if np.linalg.eigvalsh(0.5 * (c + c.conj().T)).min() < -tol:
        raise ValidationError("correlation matrix must be positive semidefinite")
    if diagonal and np.max(np.abs(np.diag(c) - 1.0)) > tol:
        raise ValidationError("diagonal channel needs c_aa = 1")
    return c


def generalized_diagonal(c, psi, tol_rank: float = TOL.rank) -> KrausMap:
    """Kraus form of ``ρ ↦ Σ_αβ c_αβ |e_α><ψ_α|ρ|ψ_β><e_β|``."""
    c = correlation_matrix(c)
    psi = np.atleast_2d(np.asarray(psi, dtype=complex))
    if psi.shape[0] != c.shape[0]:
        raise ValidationError("need one vector ψ_α per row of c")
    v = kolmogorov_factor(c, tol_rank)
    ops = np.einsum("aj,ai->jai", v, psi.conj())
    return KrausMap(ops)


def diagonal_channel(c, tol_rank: float = TOL.rank) -> KrausMap:
    """Dephasing map ``ρ ↦ [c_αβ ρ_αβ]`` with commuting diagonal Kraus operators."""
    c = correlation_matrix(c, diagonal=True)
    return generalized_diagonal(c, np.eye(c.shape[0]), tol_rank)


def convex_mixture(maps, weights, tol: float = 1e-9) -> KrausMap:
    weights = np.asarray(weights, dtype=float)
    if len(maps) != len(weights) or len(maps) == 0:
        raise ValidationError("need one weight per map")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > tol:
        raise ValidationError("weights must be a probability vector")
    dims = {(m.d_in, m.d_out) for m in maps}
    if len(dims) != 1:
        raise ValidationError("maps in a mixture must share input and output dimensions")
    ops = [np.sqrt(w) * m.kraus for m, w in zip(maps, weights) if w > 0]
    return KrausMap(np.concatenate(ops))


def random_correlation(size: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Gram matrix of random unit vectors: PSD with unit diagonal."""
    rng = rng_for(seed)
    r = size if rank is None else rank
    vecs = np.stack([random_pure(r, rng) for _ in range(size)])
    return vecs @ vecs.conj().T


def _povm_vectors(d: int, m: int, rng) -> np.ndarray:
    # rows of an m x d isometry: Σ_α |ψ_α><ψ_α| = Q*Q = I
    q = random_isometry(m, d, rng)
    return q.conj()


def random_eb_spec(d_in: int, d_out: int, m: int, seed=None) -> EBSpec:
    """Random entanglement-breaking channel: rank-one POVM ``ψ`` and unit ``φ``."""
    if m < d_in:
        raise ValidationError("an EB channel with a complete POVM needs m >= d_in")
    rng = rng_for(seed)
    psi = _povm_vectors(d_in, m, rng)
    phi = np.stack([random_pure(d_out, rng) for _ in range(m)])
    return EBSpec(psi, phi)


def random_qc_spec(d_in: int, m: int, seed=None) -> EBSpec:
    """Quantum-classical channel: orthonormal (canonical) output vectors ``φ_α = e_α``."""
    rng = rng_for(seed)
    return EBSpec(_povm_vectors(d_in, m, rng), np.eye(m, dtype=complex))


def random_cq_spec(d_in: int, d_out: int, seed=None) -> EBSpec:
    """Classical-quantum channel: ``ψ_α`` the canonical basis, ``φ_α`` random unit vectors."""
    rng = rng_for(seed)
    phi = np.stack([random_pure(d_out, rng) for _ in range(d_in)])
    return EBSpec(np.eye(d_in, dtype=complex), phi)
