"""CP maps in Kraus, Stinespring and Choi form.

A :class:`KrausMap` stores its operators as one array of shape
``(m, d_out, d_in)``. A :class:`StinespringOperator` stores
``V: H_A -> H_B ⊗ H_C`` as a ``(d_B * d_C, d_A)`` matrix with B as the slow
index, so that ``(I_B ⊗ <f_c|) V`` is ``v.reshape(d_B, d_C, d_A)[:, c, :]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._config import TOL, NotCPError, ValidationError, check_dim
from .numerics import partial_trace, random_density, random_isometry, rng_for

__all__ = [
    "KrausMap",
    "StinespringOperator",
    "ChoiMatrix",
    "EquivalenceWitness",
    "apply",
    "dual_apply",
    "kraus_to_stinespring",
    "stinespring_to_kraus",
    "choi",
    "choi_to_kraus",
    "choi_distance",
    "tensor",
    "check_covariance",
    "random_kraus_map",
    "random_channel",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class KrausMap:
    """``ρ ↦ Σ_α V_α ρ V_α*`` with operators ``kraus[α]`` of shape ``(d_out, d_in)``."""

    kraus: np.ndarray
    tol_tp: float = field(default=TOL.tp, compare=False)

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or k.shape[0] == 0:
            raise ValidationError("a Kraus map needs a nonempty list of equally shaped matrices")
        if not np.all(np.isfinite(k)):
            raise ValidationError("Kraus operators contain NaN or Inf")
        check_dim(max(k.shape))
        object.__setattr__(self, "kraus", _frozen(k))

    @classmethod
    def from_list(cls, ops) -> "KrausMap":
        ops = [np.atleast_2d(np.asarray(o, dtype=complex)) for o in ops]
        if not ops:
            raise ValidationError("empty Kraus list")
        shape = ops[0].shape
        if any(o.shape != shape for o in ops):
            raise ValidationError("Kraus operators have different shapes")
        return cls(np.stack(ops))

    @property
    def d_in(self) -> int:
        return self.kraus.shape[2]

    @property
    def d_out(self) -> int:
        return self.kraus.shape[1]

    @property
    def n_kraus(self) -> int:
        return self.kraus.shape[0]

    def gram(self) -> np.ndarray:
        """``Σ_α V_α* V_α``; equals the identity iff the map is trace preserving."""
        return np.einsum("aji,ajk->ik", self.kraus.conj(), self.kraus)

    @property
    def is_tp(self) -> bool:
        return bool(np.linalg.norm(self.gram() - np.eye(self.d_in), 2) <= self.tol_tp)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)


@dataclass(frozen=True)
class StinespringOperator:
    v: np.ndarray
    d_a: int
    d_b: int
    d_c: int

    def __post_init__(self):
        v = np.asarray(self.v, dtype=complex)
        if v.shape != (self.d_b * self.d_c, self.d_a):
            raise ValidationError(
                f"Stinespring operator must be {(self.d_b * self.d_c, self.d_a)}, got {v.shape}"
            )
        object.__setattr__(self, "v", _frozen(v))

    def is_isometry(self, tol: float = TOL.tp) -> bool:
        return bool(np.linalg.norm(self.v.conj().T @ self.v - np.eye(self.d_a), 2) <= tol)

    def output(self, rho, keep: str) -> np.ndarray:
        big = self.v @ np.asarray(rho, dtype=complex) @ self.v.conj().T
        return partial_trace(big, self.d_b, self.d_c, keep=keep)


@dataclass(frozen=True)
class ChoiMatrix:
    """Block matrix ``[Φ(E_jk)]_{jk}`` of size ``d_in * d_out`` (input index slow)."""

    matrix: np.ndarray
    d_in: int
    d_out: int

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    def rank(self, tol_rank: float = TOL.rank) -> int:
        w = np.linalg.eigvalsh(self.matrix)
        top = max(w.max(initial=0.0), 0.0)
        return int(np.sum(w > tol_rank * top)) if top > 0 else 0


@dataclass(frozen=True)
class EquivalenceWitness:
    """Partial isometry ``W: H_C -> H_C'`` relating two dilations or complements."""

    w: np.ndarray
    kind: str  # "isometry" or "partial_isometry"

    @property
    def initial_projection(self) -> np.ndarray:
        return self.w.conj().T @ self.w

    @property
    def final_projection(self) -> np.ndarray:
        return self.w @ self.w.conj().T


def apply(phi: KrausMap, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (phi.d_in, phi.d_in):
        raise ValidationError(f"input must be {phi.d_in}x{phi.d_in}, got {rho.shape}")
    k = phi.kraus
    return np.einsum("aij,jk,alk->il", k, rho, k.conj())


def dual_apply(phi: KrausMap, x) -> np.ndarray:
    """Heisenberg-picture action ``X ↦ Σ_α V_α* X V_α``."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (phi.d_out, phi.d_out):
        raise ValidationError(f"observable must be {phi.d_out}x{phi.d_out}, got {x.shape}")
    k = phi.kraus
    return np.einsum("aji,jk,akl->il", k.conj(), x, k)


def kraus_to_stinespring(phi: KrausMap) -> StinespringOperator:
    """Stack the Kraus operators into ``V = Σ_α V_α ⊗ |f_α>``.

    The environment C is indexed by the Kraus order, so ``(I_B ⊗ <f_α|) V = V_α``.
    """
    m, d_out, d_in = phi.kraus.shape
    check_dim(m * d_out)
    v = np.transpose(phi.kraus, (1, 0, 2)).reshape(d_out * m, d_in)
    return StinespringOperator(v, d_a=d_in, d_b=d_out, d_c=m)


def stinespring_to_kraus(st: StinespringOperator, side: str = "B") -> KrausMap:
    """Kraus operators of one of the two maps ``Tr_C VρV*`` (side B) or ``Tr_B VρV*`` (side C).

    Side B operators are indexed by the canonical basis of C and side C
    operators by the canonical basis of B, i.e. ``<e_j| V_α`` stacked over α.
    """
    t = st.v.reshape(st.d_b, st.d_c, st.d_a)
    if side == "B":
        return KrausMap(np.transpose(t, (1, 0, 2)))
    if side == "C":
        return KrausMap(t)
    raise ValueError(f"side must be 'B' or 'C', not {side!r}")


def choi(phi: KrausMap) -> ChoiMatrix:
    """Unnormalized Choi matrix ``Σ_jk E_jk ⊗ Φ(E_jk)``."""
    m, d_out, d_in = phi.kraus.shape
    check_dim(d_in * d_out)
    # vec_α[j * d_out + b] = V_α[b, j]
    vecs = np.transpose(phi.kraus, (0, 2, 1)).reshape(m, d_in * d_out)
    return ChoiMatrix(vecs.T @ vecs.conj(), d_in, d_out)


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    idx = int(np.argmax(np.abs(v) > 1e-12 * np.abs(v).max()))
    ph = v[idx] / abs(v[idx])
    return v / ph


def choi_to_kraus(c: ChoiMatrix, tol: float = TOL.rank) -> KrausMap:
    """Minimal Kraus list from the eigendecomposition of a Choi matrix.

    Eigenvalues above ``tol`` times the largest are kept, in descending
    order; near-equal eigenvalues are ordered by the lexicographic order of
    the (phase-fixed) eigenvector entries.
    """
    mat = 0.5 * (c.matrix + c.matrix.conj().T)
    w, u = np.linalg.eigh(mat)
    top = max(float(w.max(initial=0.0)), 0.0)
    if top == 0.0:
        return KrausMap(np.zeros((1, c.d_out, c.d_in)))
    if w.min() < -tol * top:
        raise NotCPError(f"Choi matrix has eigenvalue {w.min():.3e}; the map is not CP")
    keep = np.flatnonzero(w > tol * top)
    vecs = [_canonical_phase(u[:, i]) for i in keep]
    vals = w[keep]

    def key(i):
        lam = round(float(vals[i]) / (tol * top)) if tol > 0 else vals[i]
        entries = tuple(x for z in vecs[i] for x in (round(z.real, 9), round(z.imag, 9)))
        return (-lam, entries)

    order = sorted(range(len(keep)), key=key)
    ops = [np.sqrt(vals[i]) * vecs[i].reshape(c.d_in, c.d_out).T for i in order]
    return KrausMap(np.stack(ops))


def choi_distance(phi: KrausMap, psi: KrausMap) -> float:
    """Operator-norm distance between the Choi matrices of two maps."""
    if (phi.d_in, phi.d_out) != (psi.d_in, psi.d_out):
        return float("inf")
    return float(np.linalg.norm(choi(phi).matrix - choi(psi).matrix, 2))


def tensor(phi1: KrausMap, phi2: KrausMap) -> KrausMap:
    """``Φ1 ⊗ Φ2`` with Kraus operators ``V_α ⊗ W_β`` in left-major order of ``(α, β)``."""
    check_dim(phi1.d_in * phi2.d_in)
    check_dim(phi1.d_out * phi2.d_out)
    check_dim(phi1.n_kraus * phi2.n_kraus)
    a, b = phi1.kraus, phi2.kraus
    k = np.einsum("aij,bkl->abikjl", a, b).reshape(
        a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], a.shape[2] * b.shape[2]
    )
    return KrausMap(k)


def _is_unitary(u: np.ndarray, tol: float) -> bool:
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.linalg.norm(
        u.conj().T @ u - np.eye(u.shape[0]), 2
    ) <= tol


def check_covariance(phi: KrausMap, u_a, u_b, n_probes: int = 8, seed=0) -> float:
    """Largest ``||Φ(U_A ρ U_A*) - U_B Φ(ρ) U_B*||`` over random probe states."""
    u_a = np.asarray(u_a, dtype=complex)
    u_b = np.asarray(u_b, dtype=complex)
    if not _is_unitary(u_a, 1e-9) or not _is_unitary(u_b, 1e-9):
        raise ValidationError("covariance check needs unitary operators")
    if u_a.shape[0] != phi.d_in or u_b.shape[0] != phi.d_out:
        raise ValidationError("unitaries do not match the map dimensions")
    rng = rng_for(seed)
    worst = 0.0
    for _ in range(n_probes):
        rho = random_density(phi.d_in, rng)
        lhs = apply(phi, u_a @ rho @ u_a.conj().T)
        rhs = u_b @ apply(phi, rho) @ u_b.conj().T
        worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
    return worst


def random_kraus_map(d_in: int, d_out: int, n_kraus: int, seed=None) -> KrausMap:
    """Random CP map with Ginibre Kraus operators, normalized so that ``||Σ V*V|| = 1``."""
    rng = rng_for(seed)
    k = rng.standard_normal((n_kraus, d_out, d_in)) + 1j * rng.standard_normal((n_kraus, d_out, d_in))
    phi = KrausMap(k)
    scale = np.linalg.norm(phi.gram(), 2)
    return KrausMap(k / np.sqrt(scale))


def random_channel(d_in: int, d_out: int, n_kraus: int, seed=None) -> KrausMap:
    """Random channel from a Haar isometry ``H_in -> H_out ⊗ C^n_kraus``."""
    if d_out * n_kraus < d_in:
        raise ValidationError("d_out * n_kraus must be at least d_in for a channel")
    v = random_isometry(d_out * n_kraus, d_in, seed)
    return stinespring_to_kraus(StinespringOperator(v, d_in, d_out, n_kraus), side="B")
