"""Complementary maps, minimal dilations and equivalence witnesses."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._config import TOL, NotSameChannelError, ValidationError
from .channels import (
    EquivalenceWitness,
    KrausMap,
    StinespringOperator,
    choi,
    choi_distance,
    choi_to_kraus,
    kraus_to_stinespring,
    stinespring_to_kraus,
)
from .numerics import partial_trace

__all__ = [
    "SForm",
    "WitnessResult",
    "complement",
    "minimal_form",
    "equivalence_witness",
    "complement_witness",
    "double_complement_check",
    "s_form",
    "s_to_channel",
    "environment_representation",
    "equivalence_threshold",
]


@dataclass(frozen=True)
class SForm:
    """``ρ ↦ S (ρ ⊗ I_B) S*`` with ``s`` of shape ``(d_C, d_A * d_B)``."""

    s: np.ndarray
    d_a: int
    d_b: int
    d_c: int

    def __post_init__(self):
        s = np.asarray(self.s, dtype=complex)
        if s.shape != (self.d_c, self.d_a * self.d_b):
            raise ValidationError(f"S must be {(self.d_c, self.d_a * self.d_b)}, got {s.shape}")
        object.__setattr__(self, "s", s)

    def tp_residual(self) -> float:
        """``|| Tr_B S*S - I_A ||``."""
        red = partial_trace(self.s.conj().T @ self.s, self.d_a, self.d_b, keep="B")
        return float(np.linalg.norm(red - np.eye(self.d_a), 2))


@dataclass(frozen=True)
class WitnessResult:
    witness: EquivalenceWitness
    residual: float  # ||V' - (I_B ⊗ W) V||
    forward_residual: float  # Choi distance of Φ_C' and W Φ_C W*
    backward_residual: float  # Choi distance of Φ_C and W* Φ_C' W
    threshold: float

    @property
    def ok(self) -> bool:
        return max(self.residual, self.forward_residual, self.backward_residual) <= self.threshold


def equivalence_threshold(phi: KrausMap, tol: float = TOL.equiv) -> float:
    """Scale-free acceptance level ``tol * max(1, ||Choi||)``."""
    return tol * max(1.0, float(np.linalg.norm(choi(phi).matrix, 2)))


def complement(phi: KrausMap) -> KrausMap:
    """Map ``ρ ↦ [Tr V_α ρ V_β*]_αβ`` into the environment spanned by the Kraus index.

    Its Kraus operators are ``(Ṽ_j)_α = <e_j| V_α`` for the output basis
    ``e_j``; applying the construction twice returns the original operators.
    """
    return KrausMap(np.transpose(phi.kraus, (1, 0, 2)))


def minimal_form(phi: KrausMap, tol: float = TOL.rank) -> KrausMap:
    """Linearly independent Kraus operators, as many as the Choi rank."""
    return choi_to_kraus(choi(phi), tol)


def _conjugated(phi: KrausMap, w: np.ndarray) -> KrausMap:
    return KrausMap(np.einsum("ij,ajk->aik", w, phi.kraus))


def _classify(w: np.ndarray, tol: float) -> str:
    n = w.shape[1]
    return "isometry" if np.linalg.norm(w.conj().T @ w - np.eye(n), 2) <= tol else "partial_isometry"


def equivalence_witness(
    v: StinespringOperator, v2: StinespringOperator, tol: float = TOL.equiv, tol_rank: float = TOL.rank
) -> WitnessResult:
    """Partial isometry ``W`` with ``V' = (I_B ⊗ W) V`` for two dilations of one map.

    With ``A_k`` and ``A'_l`` the side-B Kraus operators of ``v`` and ``v2``,
    the rows of ``W`` solve ``G w_l = b_l`` where ``G_kk' = Tr A_k* A_k'`` and
    ``(b_l)_k = Tr A_k* A'_l``. The pseudo-inverse picks the solution that
    vanishes off the support of ``v``.

    Raises
    ------
    NotSameChannelError
        If the two dilations do not describe the same map on side B.
    """
    if (v.d_a, v.d_b) != (v2.d_a, v2.d_b):
        raise NotSameChannelError("dilations have different input or output dimensions")
    phi_b = stinespring_to_kraus(v, "B")
    phi_b2 = stinespring_to_kraus(v2, "B")
    thresh = equivalence_threshold(phi_b, tol)
    gap = choi_distance(phi_b, phi_b2)
    if gap > thresh:
        raise NotSameChannelError(f"side-B maps differ (Choi distance {gap:.3e})")

    a = phi_b.kraus.reshape(phi_b.n_kraus, -1)
    a2 = phi_b2.kraus.reshape(phi_b2.n_kraus, -1)
    g = a.conj() @ a.T
    b = a2.conj() @ a.T  # b[l, k] = conj(Tr A_k* A'_l)
    top = float(np.linalg.norm(g, 2))
    w = (np.linalg.pinv(g, rcond=tol_rank, hermitian=True) @ b.conj().T).T
    # g is Hermitian, so G W^T = B^T  <=>  W^T = pinv(G) B^T
    w = np.asarray(w)

    t = v.v.reshape(v.d_b, v.d_c, v.d_a)
    rebuilt = np.einsum("lk,bka->bla", w, t).reshape(v.d_b * v2.d_c, v.d_a)
    residual = float(np.linalg.norm(v2.v - rebuilt, 2)) if top > 0 else 0.0

    phi_c = stinespring_to_kraus(v, "C")
    phi_c2 = stinespring_to_kraus(v2, "C")
    fwd = choi_distance(_conjugated(phi_c, w), phi_c2)
    bwd = choi_distance(_conjugated(phi_c2, w.conj().T), phi_c)
    return WitnessResult(
        EquivalenceWitness(w, _classify(w, max(tol, 1e-9))), residual, fwd, bwd, thresh
    )


def complement_witness(phi1: KrausMap, phi2: KrausMap, tol: float = TOL.equiv) -> WitnessResult:
    """Witness ``W`` with ``Φ2 = W Φ1(·) W*`` for two maps complementary to one map.

    Both Kraus lists must be indexed by the same basis of the common
    complementary system (for the output of :func:`complement` this is the
    output basis of the original map). Each map then has the dilation
    ``kraus_to_stinespring(complement(Φi))`` whose side-C map is ``Φi``.
    """
    if phi1.n_kraus != phi2.n_kraus or phi1.d_in != phi2.d_in:
        raise NotSameChannelError("maps are not indexed by a common complementary system")
    v1 = kraus_to_stinespring(complement(phi1))
    v2 = kraus_to_stinespring(complement(phi2))
    return equivalence_witness(v1, v2, tol)


def double_complement_check(phi: KrausMap, tol: float = TOL.equiv) -> WitnessResult:
    """Compare ``Φ`` with the complement of its (minimalized) complement.

    The middle step is put in minimal form so the second complement lives on
    an environment of dimension ``rank Choi(Φ̃)``; the witness maps the
    output space of ``Φ`` onto it.
    """
    phi_t = complement(phi)
    phi_t_min = minimal_form(phi_t)
    v1 = kraus_to_stinespring(phi_t)
    v2 = kraus_to_stinespring(phi_t_min)
    try:
        return equivalence_witness(v1, v2, tol)
    except NotSameChannelError:
        inf = float("inf")
        return WitnessResult(EquivalenceWitness(np.zeros((1, 1)), "partial_isometry"), inf, inf, inf, 0.0)


def s_form(st: StinespringOperator) -> SForm:
    """S-operator with ``<ψ̄_B ⊗ ψ_C| V |ψ_A> = <ψ_C| S |ψ_A ⊗ ψ_B>`` in canonical bases."""
    t = st.v.reshape(st.d_b, st.d_c, st.d_a)
    # S[c, a * d_b + b] = V[(b, c), a]; canonical basis vectors are real
    s = np.transpose(t, (1, 2, 0)).reshape(st.d_c, st.d_a * st.d_b)
    return SForm(s, st.d_a, st.d_b, st.d_c)


def s_to_channel(sf: SForm) -> KrausMap:
    """Kraus operators ``S (I_A ⊗ |e_j>)`` of ``ρ ↦ S (ρ ⊗ I_B) S*``."""
    t = sf.s.reshape(sf.d_c, sf.d_a, sf.d_b)
    return KrausMap(np.transpose(t, (2, 0, 1)))


def environment_representation(phi: KrausMap, u_a, u_b, tol_rank: float = TOL.rank):
    """Environment unitary for a covariant map.

    Solves ``V_k U_A = Σ_j E_kj U_B V_j`` in least squares; then the
    complement satisfies ``Φ̃(U_A ρ U_A*) = E Φ̃(ρ) E*``. Returns ``(E, residual)``.
    """
    u_a = np.asarray(u_a, dtype=complex)
    u_b = np.asarray(u_b, dtype=complex)
    k = phi.kraus
    lhs = np.einsum("aij,jk->aik", k, u_a).reshape(phi.n_kraus, -1)
    basis = np.einsum("ij,ajk->aik", u_b, k).reshape(phi.n_kraus, -1)
    # lhs = E @ basis  ->  E = lhs @ pinv(basis)
    e = lhs @ np.linalg.pinv(basis, rcond=tol_rank)
    residual = float(np.linalg.norm(lhs - e @ basis))
    return e, residual
