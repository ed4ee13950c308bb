"""Inner loop of the pure-state output-purity optimizer.

Two interchangeable implementations of :func:`ascend` live here: a
vectorized NumPy one and a loop-based one compiled with numba. The compiled
path is used when numba imports and ``CHANCOMP_NUMBA`` is not ``0``.

The objective is ``f(ψ) = Tr g(Φ(ψψ*))`` with ``g`` convex: ``x^p`` for the
output purity, ``x ln x`` for (minus) the entropy and the top eigenvalue
for ``p = inf``. The gradient of ``f`` at ``ψ`` is ``2 Φ*(g'(σ)) ψ``; each
step moves ``ψ`` to the top eigenvector of ``Φ*(g'(σ))``, the maximizer of
the linearized objective over the sphere. Convexity of ``f`` in ``ψψ*``
makes that step monotone.
"""
from __future__ import annotations

import os

import numpy as np

MODE_POWER = 0
MODE_ENTROPY = 1
MODE_MAXEIG = 2

LOG_FLOOR = 1e-300
# Entropy steps first try ln(max(λ, 1e-4 λ_max)); structurally zero output
# eigenvalues otherwise pin the step near the current state.
ENTROPY_FLOOR_REL = 1e-4

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def numba_enabled() -> bool:
    return HAVE_NUMBA and os.environ.get("CHANCOMP_NUMBA", "1") != "0"


# ---------------------------------------------------------------- numpy path


def _objective_np(w, mode, p):
    w = np.maximum(w, 0.0)
    if mode == MODE_POWER:
        top = w[-1]
        if top <= 0.0:
            return 0.0
        return top * np.sum((w / top) ** p) ** (1.0 / p)
    if mode == MODE_ENTROPY:
        wp = w[w > 0]
        return float(np.sum(wp * np.log(wp)))
    return w[-1]


def _direction_np(w, u, mode, p, floor_rel):
    w = np.maximum(w, 0.0)
    if mode == MODE_POWER:
        top = w[-1]
        coef = (w / top) ** (p - 1.0) if top > 0 else np.ones_like(w)
    elif mode == MODE_ENTROPY:
        coef = np.log(np.maximum(w, max(floor_rel * w[-1], LOG_FLOOR)))
    else:
        coef = np.zeros_like(w)
        coef[-1] = 1.0
    return (u * coef) @ u.conj().T


def _state_np(kraus, psi):
    u = kraus @ psi  # (m, d_out)
    return np.linalg.eigh(u.T @ u.conj())


def ascend_numpy(kraus, psi0, mode, p, max_iter, tol, patience):
    """Run the ascent from ``psi0``; returns ``(psi, objective, iterations, converged)``."""
    psi = psi0 / np.linalg.norm(psi0)
    history = np.empty(max_iter + 1)
    kc = kraus.conj()
    floors = (ENTROPY_FLOOR_REL, 0.0) if mode == MODE_ENTROPY else (0.0,)
    w, vecs = _state_np(kraus, psi)
    f = _objective_np(w, mode, p)
    for it in range(max_iter + 1):
        history[it] = f
        if it >= patience and history[it] - history[it - patience] < tol:
            return psi, f, it, True
        if it == max_iter:
            break
        moved = False
        for floor_rel in floors:
            dmat = _direction_np(w, vecs, mode, p, floor_rel)
            x = np.einsum("aji,jk,akl->il", kc, dmat, kraus)
            _, xv = np.linalg.eigh(0.5 * (x + x.conj().T))
            cand = xv[:, -1]
            w2, v2 = _state_np(kraus, cand)
            f2 = _objective_np(w2, mode, p)
            if f2 >= f:
                psi, w, vecs, f = cand, w2, v2, f2
                moved = True
                break
        if not moved:
            return psi, f, it, True
    return psi, f, max_iter, False


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _output_nb(kraus, psi):
        m, d_out, d_in = kraus.shape
        sigma = np.zeros((d_out, d_out), dtype=np.complex128)
        col = np.empty(d_out, dtype=np.complex128)
        for a in range(m):
            for i in range(d_out):
                acc = 0j
                for j in range(d_in):
                    acc += kraus[a, i, j] * psi[j]
                col[i] = acc
            for i in range(d_out):
                ci = col[i]
                for k in range(d_out):
                    sigma[i, k] += ci * np.conj(col[k])
        return sigma

    @numba.njit(cache=True)
    def _dual_nb(kraus, dmat):
        m, d_out, d_in = kraus.shape
        x = np.zeros((d_in, d_in), dtype=np.complex128)
        for a in range(m):
            k = kraus[a]
            t = dmat @ k
            x += np.conj(k).T @ t
        return x

    @numba.njit(cache=True)
    def _objective_nb(w, mode, p):
        n = w.shape[0]
        top = max(w[n - 1], 0.0)
        if mode == 0:
            if top <= 0.0:
                return 0.0
            s = 0.0
            for i in range(n):
                if w[i] > 0.0:
                    s += (w[i] / top) ** p
            return top * s ** (1.0 / p)
        if mode == 1:
            s = 0.0
            for i in range(n):
                if w[i] > 0.0:
                    s += w[i] * np.log(w[i])
            return s
        return top

    @numba.njit(cache=True)
    def _direction_nb(w, u, mode, p, floor_rel):
        n = w.shape[0]
        coef = np.zeros(n)
        top = max(w[n - 1], 0.0)
        floor = max(floor_rel * top, 1e-300)
        for i in range(n):
            wi = max(w[i], 0.0)
            if mode == 0:
                coef[i] = (wi / top) ** (p - 1.0) if top > 0.0 else 1.0
            elif mode == 1:
                coef[i] = np.log(max(wi, floor))
        if mode == 2:
            coef[n - 1] = 1.0
        d = np.zeros((n, n), dtype=np.complex128)
        for i in range(n):
            for k in range(n):
                acc = 0j
                for j in range(n):
                    acc += u[i, j] * coef[j] * np.conj(u[k, j])
                d[i, k] = acc
        return d

    @numba.njit(cache=True)
    def ascend_numba(kraus, psi0, mode, p, max_iter, tol, patience):
        psi = psi0 / np.linalg.norm(psi0)
        history = np.empty(max_iter + 1)
        n_floors = 2 if mode == 1 else 1
        w, vecs = np.linalg.eigh(_output_nb(kraus, psi))
        f = _objective_nb(w, mode, p)
        for it in range(max_iter + 1):
            history[it] = f
            if it >= patience and history[it] - history[it - patience] < tol:
                return psi, f, it, True
            if it == max_iter:
                break
            moved = False
            for k in range(n_floors):
                floor_rel = ENTROPY_FLOOR_REL if (mode == 1 and k == 0) else 0.0
                dmat = _direction_nb(w, vecs, mode, p, floor_rel)
                x = _dual_nb(kraus, dmat)
                x = 0.5 * (x + np.conj(x).T)
                _, xv = np.linalg.eigh(x)
                cand = xv[:, xv.shape[1] - 1].copy()
                w2, v2 = np.linalg.eigh(_output_nb(kraus, cand))
                f2 = _objective_nb(w2, mode, p)
                if f2 >= f:
                    psi = cand
                    w = w2
                    vecs = v2
                    f = f2
                    moved = True
                    break
            if not moved:
                return psi, f, it, True
        return psi, f, max_iter, False

else:  # pragma: no cover
    ascend_numba = None


def ascend(kraus, psi0, mode, p, max_iter=5000, tol=1e-10, patience=20, backend=None):
    """Dispatch to the numba or numpy implementation.

    ``backend`` is ``"numba"``, ``"numpy"`` or ``None`` (environment default).
    """
    if backend is None:
        backend = "numba" if numba_enabled() else "numpy"
    kraus = np.ascontiguousarray(kraus, dtype=np.complex128)
    psi0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    p = float(p) if np.isfinite(p) else 1.0
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        psi, val, it, conv = ascend_numba(kraus, psi0, int(mode), p, int(max_iter), float(tol), int(patience))
    elif backend == "numpy":
        psi, val, it, conv = ascend_numpy(kraus, psi0, int(mode), p, int(max_iter), float(tol), int(patience))
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return np.asarray(psi), float(val), int(it), bool(conv)
