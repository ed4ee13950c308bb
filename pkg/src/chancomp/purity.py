"""Output purity of CP maps: ν_p, minimal output entropy and its convex closure.

All optimizations run over pure input states (or pure-state ensembles for
:func:`h_hat`) with deterministic multi-start. Maxima are therefore lower
bounds of the true value and minima are upper bounds; nothing here certifies
global optimality.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._config import DomainError, ValidationError, check_dim
from .channels import KrausMap, apply, tensor
from .families import max_entangled, transpose_depolarizing
from .numerics import (
    as_density,
    partial_trace,
    projector,
    random_isometry,
    random_pure,
    trace_power,
    von_neumann_entropy,
)

__all__ = [
    "OptimizerOptions",
    "PurityResult",
    "Ensemble",
    "SlackReport",
    "nu_p",
    "min_output_entropy",
    "h_hat",
    "multiplicativity_gap",
    "additivity_gap",
    "superadditivity_slack",
    "superadditivity_report",
    "wh_violation_witness",
    "wh_violation_threshold",
    "restart_rng",
]

DEFAULT_SEED = 0xC0FFEE


@dataclass(frozen=True)
class OptimizerOptions:
    restarts: int = 50
    seed: int = DEFAULT_SEED
    max_iter: int = 5000
    tol: float = 1e-10
    patience: int = 20
    backend: str | None = None  # "numba", "numpy" or environment default
    members: int | None = None  # ensemble size for h_hat; default r**2


@dataclass(frozen=True)
class Ensemble:
    weights: np.ndarray
    states: np.ndarray  # rows are unit vectors

    def density(self) -> np.ndarray:
        return np.einsum("x,xi,xj->ij", self.weights, self.states, self.states.conj())


@dataclass(frozen=True)
class PurityResult:
    kind: str  # "nu_p", "min_entropy" or "h_hat"
    value: float
    argmax_state: object  # unit vector, or Ensemble for h_hat
    restarts_used: int
    converged: bool
    seed: int
    p: float | None = None
    restart_values: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        state = self.argmax_state
        if isinstance(state, Ensemble):
            state = {"weights": state.weights.tolist(), "states": _cvec(state.states)}
        else:
            state = _cvec(state)
        return {
            "kind": self.kind,
            "p": _jsonable_p(self.p),
            "value": self.value,
            "argmax_state": state,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "seed": self.seed,
        }


def _jsonable_p(p):
    if p is None:
        return None
    return "inf" if np.isinf(p) else float(p)


def _cvec(a):
    a = np.asarray(a)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def restart_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for restart ``index``; independent of the total restart count."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _best(values):
    # lowest index wins ties
    return int(np.argmax(np.asarray(values)))


def _multistart(phi: KrausMap, mode: int, p: float, opts: OptimizerOptions):
    runs = []
    for i in range(opts.restarts):
        psi0 = random_pure(phi.d_in, restart_rng(opts.seed, i))
        runs.append(
            _kernels.ascend(
                phi.kraus, psi0, mode, p, opts.max_iter, opts.tol, opts.patience, opts.backend
            )
        )
    return runs


def _output(phi: KrausMap, psi: np.ndarray) -> np.ndarray:
    return apply(phi, projector(psi))


def _nu_value(sigma: np.ndarray, p: float) -> float:
    if np.isinf(p):
        return float(max(np.linalg.eigvalsh(sigma).max(), 0.0))
    return trace_power(sigma, p) ** (1.0 / p)


def nu_p(phi: KrausMap, p: float, opts: OptimizerOptions = OptimizerOptions()) -> PurityResult:
    """Maximal output Schatten-type purity ``max_ψ [Tr Φ(ψψ*)^p]^{1/p}``.

    ``p = 1`` is answered in closed form by the largest eigenvalue of
    ``Σ V_α* V_α``; ``p = inf`` maximizes the largest output eigenvalue.
    """
    if not p >= 1:
        raise DomainError(f"nu_p needs p >= 1, got {p}")
    if p == 1:
        w, u = np.linalg.eigh(phi.gram())
        return PurityResult("nu_p", float(w[-1]), u[:, -1], 0, True, opts.seed, 1.0, (float(w[-1]),))
    mode = _kernels.MODE_MAXEIG if np.isinf(p) else _kernels.MODE_POWER
    runs = _multistart(phi, mode, p, opts)
    values = [_nu_value(_output(phi, r[0]), p) for r in runs]
    k = _best(values)
    return PurityResult("nu_p", values[k], runs[k][0], opts.restarts, runs[k][3], opts.seed, float(p), tuple(values))


def _require_tp(phi: KrausMap, what: str) -> None:
    if not phi.is_tp:
        raise DomainError(f"{what} is defined for trace-preserving maps only")


def min_output_entropy(phi: KrausMap, opts: OptimizerOptions = OptimizerOptions()) -> PurityResult:
    """``min_ψ H(Φ(ψψ*))`` in nats; the returned value is attained by ``argmax_state``."""
    _require_tp(phi, "minimal output entropy")
    runs = _multistart(phi, _kernels.MODE_ENTROPY, 1.0, opts)
    values = [von_neumann_entropy(_output(phi, r[0])) for r in runs]
    k = int(np.argmin(values))
    return PurityResult("min_entropy", values[k], runs[k][0], opts.restarts, runs[k][3], opts.seed, None, tuple(values))


# ------------------------------------------------------------------ h_hat


def _ensemble_objective(phi: KrausMap, u: np.ndarray, r: np.ndarray):
    """Average output entropy of the ensemble ``w_x = Σ_i u_xi r_i`` and its gradient in ``u``."""
    k = phi.kraus
    wvecs = u @ r.T  # rows are the unnormalized members
    pi = np.real(np.einsum("xi,xi->x", wvecs, wvecs.conj()))
    cols = np.einsum("aij,xj->xai", k, wvecs)
    sigma = np.einsum("xai,xak->xik", cols, cols.conj())
    lam, vec = np.linalg.eigh(0.5 * (sigma + np.swapaxes(sigma.conj(), 1, 2)))
    lam = np.maximum(lam, 0.0)
    live = pi > 1e-300
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -np.sum(np.where(lam > 0, lam * np.log(lam), 0.0), axis=1)
        logpi = np.where(live, np.log(np.where(live, pi, 1.0)), 0.0)
    value = float(np.sum(np.where(live, ent + pi * logpi, 0.0)))
    logs = np.log(np.maximum(lam, 1e-300))
    dlog = np.einsum("xij,xj,xkj->xik", vec, logs, vec.conj())
    # Φ*(dlog) w_x, without forming the dual operator
    dual_w = np.einsum("aji,xjk,xak->xi", k.conj(), dlog, cols)
    grad_w = 2.0 * (-dual_w + logpi[:, None] * wvecs)
    grad_w[~live] = 0.0
    return value, grad_w @ r.conj()


def _polar(a: np.ndarray) -> np.ndarray:
    left, _, right = np.linalg.svd(a, full_matrices=False)
    return left @ right


def _stiefel_descent(phi, u, r, opts):
    value, grad = _ensemble_objective(phi, u, r)
    history = [value]
    converged = False
    prev = None  # (u, xi) of the last accepted step, for the Barzilai-Borwein guess
    for it in range(opts.max_iter):
        sym = u.conj().T @ grad
        xi = grad - u @ (0.5 * (sym + sym.conj().T))
        gnorm2 = float(np.real(np.vdot(xi, xi)))
        if gnorm2 < 1e-28:
            converged = True
            break
        t = 1.0
        if prev is not None:
            s_k, y_k = u - prev[0], xi - prev[1]
            sy = abs(float(np.real(np.vdot(s_k, y_k))))
            if sy > 0:
                t = min(float(np.real(np.vdot(s_k, s_k))) / sy, 1e3)
        while True:
            cand = _polar(u - t * xi)
            cval, cgrad = _ensemble_objective(phi, cand, r)
            if cval <= value - 1e-4 * t * gnorm2 or t < 1e-14:
                break
            t *= 0.5
        if cval > value:
            converged = True
            break
        prev = (u, xi)
        u, value, grad = cand, cval, cgrad
        history.append(value)
        if len(history) > opts.patience and history[-1 - opts.patience] - value < opts.tol:
            converged = True
            break
    return u, value, converged


def h_hat(phi: KrausMap, rho, opts: OptimizerOptions = OptimizerOptions()) -> PurityResult:
    """Convex closure of the output entropy at ``rho``.

    Every ``m``-member pure ensemble of ``ρ = Σ_i λ_i e_i e_i*`` has
    unnormalized members ``w_x = Σ_i U_xi sqrt(λ_i) e_i`` for an ``m x r``
    matrix ``U`` with orthonormal columns. The average output entropy is
    minimized over ``U`` by Riemannian gradient descent with Armijo
    backtracking and polar retraction; ``m`` defaults to ``r**2``.
    """
    _require_tp(phi, "the convex closure of the output entropy")
    rho = as_density(rho)
    if rho.shape != (phi.d_in, phi.d_in):
        raise ValidationError("state does not match the map input dimension")
    lam, vec = np.linalg.eigh(rho)
    keep = lam > 1e-12
    r_mat = vec[:, keep] * np.sqrt(lam[keep])
    rank = r_mat.shape[1]
    if rank == 1:
        value = von_neumann_entropy(apply(phi, rho))
        ens = Ensemble(np.ones(1), (r_mat[:, 0] / np.linalg.norm(r_mat[:, 0]))[None])
        return PurityResult("h_hat", value, ens, 0, True, opts.seed, None, (value,))
    members = opts.members or rank * rank
    if members < rank:
        raise ValidationError("ensemble needs at least rank(rho) members")
    best = None
    values = []
    for i in range(opts.restarts):
        u0 = random_isometry(members, rank, restart_rng(opts.seed, i))
        u, val, conv = _stiefel_descent(phi, u0, r_mat, opts)
        values.append(val)
        if best is None or val < best[1]:
            best = (u, val, conv)
    u, val, conv = best
    wvecs = u @ r_mat.T
    weights = np.real(np.einsum("xi,xi->x", wvecs, wvecs.conj()))
    states = np.array([w / np.sqrt(p) if p > 0 else w for w, p in zip(wvecs, weights)])
    return PurityResult("h_hat", val, Ensemble(weights, states), opts.restarts, conv, opts.seed, None, tuple(values))


# ------------------------------------------------------------------ gaps


def multiplicativity_gap(phi1: KrausMap, phi2: KrausMap, p: float, opts: OptimizerOptions = OptimizerOptions()) -> float:
    """``ν_p(Φ1 ⊗ Φ2) - ν_p(Φ1) ν_p(Φ2)`` with every term optimized independently."""
    check_dim(phi1.d_in * phi2.d_in)
    joint = nu_p(tensor(phi1, phi2), p, opts).value
    return joint - nu_p(phi1, p, opts).value * nu_p(phi2, p, opts).value


def additivity_gap(phi1: KrausMap, phi2: KrausMap, opts: OptimizerOptions = OptimizerOptions()) -> float:
    """``Ȟ(Φ1 ⊗ Φ2) - Ȟ(Φ1) - Ȟ(Φ2)``; a negative value indicates non-additivity."""
    check_dim(phi1.d_in * phi2.d_in)
    joint = min_output_entropy(tensor(phi1, phi2), opts).value
    return joint - min_output_entropy(phi1, opts).value - min_output_entropy(phi2, opts).value


@dataclass(frozen=True)
class SlackReport:
    slack: float
    band: float
    flagged: bool
    joint: float
    first: float
    second: float


def _restart_spread(res: PurityResult) -> float:
    """How much the best value moved after the first half of the restarts."""
    vals = np.asarray(res.restart_values)
    if len(vals) < 2:
        return 0.0
    half = vals[: max(1, len(vals) // 2)]
    return float(abs(half.min() - vals.min()))


def superadditivity_report(
    phi1: KrausMap, phi2: KrausMap, rho12, opts: OptimizerOptions = OptimizerOptions(), anomaly: float = -1e-3
) -> SlackReport:
    """Slack of ``Ĥ_{Φ1⊗Φ2}(ρ12) >= Ĥ_{Φ1}(ρ1) + Ĥ_{Φ2}(ρ2)`` with an uncertainty band.

    All three terms are optimizer upper bounds, so a negative slack is not a
    counterexample. The band adds, for each term, how much its best value
    still improved over the second half of the restarts; ``flagged`` marks a
    slack below ``anomaly`` that the band does not explain.
    """
    rho12 = as_density(rho12)
    rho1 = partial_trace(rho12, phi1.d_in, phi2.d_in, keep="B")
    rho2 = partial_trace(rho12, phi1.d_in, phi2.d_in, keep="C")
    joint = h_hat(tensor(phi1, phi2), rho12, opts)
    first = h_hat(phi1, rho1, opts)
    second = h_hat(phi2, rho2, opts)
    slack = joint.value - first.value - second.value
    band = sum(_restart_spread(r) for r in (joint, first, second))
    return SlackReport(slack, band, bool(slack + band < anomaly), joint.value, first.value, second.value)


def superadditivity_slack(phi1: KrausMap, phi2: KrausMap, rho12, opts: OptimizerOptions = OptimizerOptions()) -> float:
    return superadditivity_report(phi1, phi2, rho12, opts).slack


# ------------------------------------------------------------------ WH witness


def wh_violation_witness(d: int, p: float):
    """Exact multiplicativity test for two copies of the transpose-depolarizing channel.

    Returns ``(ratio, witness_value, product_value)`` where ``witness_value`` is
    the output ``p``-norm of the maximally entangled input under ``Φ ⊗ Φ``
    and ``product_value = ν_p(Φ)² = (d-1)^{2(1-p)/p}``. ``ratio > 1``
    certifies that ν_p is not multiplicative for this pair.
    """
    if d < 2 or not p >= 1:
        raise DomainError("need d >= 2 and p >= 1")
    check_dim(d * d)
    phi = transpose_depolarizing(d)
    out = apply(tensor(phi, phi), projector(max_entangled(d)))
    lam = np.maximum(np.linalg.eigvalsh(0.5 * (out + out.conj().T)), 0.0)
    if np.isinf(p):
        witness = float(lam.max())
        product = float((d - 1) ** -2.0)
    else:
        top = lam.max()
        witness = float(top * np.sum((lam / top) ** p) ** (1.0 / p))
        product = float((d - 1) ** (2.0 * (1.0 - p) / p))
    return witness / product, witness, product


def wh_violation_threshold(d: int, p_max: float = 200.0, tol: float = 1e-10) -> float | None:
    """Smallest ``p`` with ``wh_violation_witness(d, p)`` ratio above 1, by bisection.

    Returns ``None`` when the maximally entangled witness shows no violation
    up to ``p_max``.
    """
    def excess(p):
        return wh_violation_witness(d, p)[0] - 1.0

    if excess(p_max) <= 0:
        return None
    lo, hi = 1.0, p_max
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi
