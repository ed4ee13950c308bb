"""One-mode Gaussian attenuator and amplifier at the covariance-matrix level.

Quadratures are ordered ``(q, p)``, the vacuum covariance is the identity and
``Ω = [[0, 1], [-1, 0]]``. A channel acts as ``γ ↦ x γ x^T + y``. Hermitian
conjugation ``a ↦ a†`` is the reflection ``Z = diag(1, -1)`` on quadratures.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._config import DomainError, ValidationError

__all__ = [
    "OMEGA",
    "Z",
    "GaussianChannel",
    "BogoliubovDilation",
    "attenuation",
    "amplifier",
    "conjugate_amplifier",
    "dilate",
    "complement_gaussian",
    "symplectic_residual",
    "cp_condition_min_eig",
]

OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])
Z = np.diag([1.0, -1.0])
I2 = np.eye(2)


@dataclass(frozen=True)
class GaussianChannel:
    kind: str  # "attenuation", "amplifier" or "conjugate_amplifier"
    coeff: float
    x: np.ndarray
    y: np.ndarray
    env: np.ndarray = I2  # covariance of the environment mode

    def apply(self, gamma) -> np.ndarray:
        gamma = np.asarray(gamma, dtype=float)
        return self.x @ gamma @ self.x.T + self.y

    def is_cp(self, tol: float = 1e-12) -> bool:
        return cp_condition_min_eig(self.x, self.y) >= -tol

    def to_dict(self) -> dict:
        return {"kind": self.kind, "coeff": self.coeff, "x": self.x.tolist(), "y": self.y.tolist()}


@dataclass(frozen=True)
class BogoliubovDilation:
    """4x4 real map on ``(q, p, q0, p0)``; the environment mode is the second pair."""

    s: np.ndarray
    env: np.ndarray = I2

    def system_block(self, gamma) -> np.ndarray:
        return self._joint(gamma)[:2, :2]

    def environment_block(self, gamma) -> np.ndarray:
        return self._joint(gamma)[2:, 2:]

    def _joint(self, gamma) -> np.ndarray:
        big = np.zeros((4, 4))
        big[:2, :2] = gamma
        big[2:, 2:] = self.env
        return self.s @ big @ self.s.T


def _env(env) -> np.ndarray:
    if env is None:
        return I2
    env = np.asarray(env, dtype=float)
    if env.shape != (2, 2) or not np.allclose(env, env.T):
        raise ValidationError("environment covariance must be a symmetric 2x2 matrix")
    if np.linalg.eigvalsh(env + 1j * OMEGA).min() < -1e-12:
        raise ValidationError("environment covariance violates the uncertainty relation")
    return env


def cp_condition_min_eig(x, y) -> float:
    """Smallest eigenvalue of ``y - iΩ + i x Ω x^T`` (nonnegative iff the map is CP)."""
    m = np.asarray(y) - 1j * OMEGA + 1j * np.asarray(x) @ OMEGA @ np.asarray(x).T
    return float(np.linalg.eigvalsh(m).min())


def attenuation(k: float, env=None) -> GaussianChannel:
    """Beam splitter with transmissivity ``k²``: ``a' = k a + sqrt(1-k²) a0``."""
    if not 0.0 < k < 1.0:
        raise DomainError(f"attenuation coefficient must lie in (0, 1), got {k}")
    env = _env(env)
    return GaussianChannel("attenuation", float(k), k * I2, (1.0 - k * k) * env, env)


def amplifier(k: float, env=None) -> GaussianChannel:
    """``a' = k a + sqrt(k²-1) a0†``."""
    if not k > 1.0:
        raise DomainError(f"amplifier coefficient must exceed 1, got {k}")
    env = _env(env)
    return GaussianChannel("amplifier", float(k), k * I2, (k * k - 1.0) * Z @ env @ Z, env)


def conjugate_amplifier(c: float, env=None) -> GaussianChannel:
    """``a' = c a† + sqrt(1+c²) a0``, the complement of an amplifier."""
    if not c > 0.0:
        raise DomainError(f"conjugate amplifier coefficient must be positive, got {c}")
    env = _env(env)
    return GaussianChannel("conjugate_amplifier", float(c), c * Z, (1.0 + c * c) * env, env)


def dilate(ch: GaussianChannel) -> BogoliubovDilation:
    k = ch.coeff
    if ch.kind == "attenuation":
        t = np.sqrt(1.0 - k * k)
        s = np.block([[k * I2, t * I2], [t * I2, -k * I2]])
    elif ch.kind == "amplifier":
        t = np.sqrt(k * k - 1.0)
        s = np.block([[k * I2, t * Z], [t * Z, k * I2]])
    else:
        raise DomainError(f"no dilation implemented for {ch.kind}")
    return BogoliubovDilation(s, ch.env)


def symplectic_residual(s) -> float:
    """``max |s Ω4 s^T - Ω4|`` with ``Ω4 = Ω ⊕ Ω``."""
    om4 = np.kron(I2, OMEGA)
    return float(np.max(np.abs(s @ om4 @ s.T - om4)))


def complement_gaussian(ch: GaussianChannel, tol: float = 1e-12) -> GaussianChannel:
    """Channel to the environment output of :func:`dilate`, classified by its ``x`` block."""
    dil = dilate(ch)
    x = dil.s[2:, :2]
    y = dil.s[2:, 2:] @ dil.env @ dil.s[2:, 2:].T
    c = float(x[0, 0])
    if np.allclose(x, c * I2, atol=tol, rtol=0) and 0.0 < c < 1.0:
        return GaussianChannel("attenuation", c, x, y, dil.env)
    if np.allclose(x, c * Z, atol=tol, rtol=0) and c > 0.0:
        return GaussianChannel("conjugate_amplifier", c, x, y, dil.env)
    raise DomainError("environment output is not a one-mode attenuator or conjugate amplifier")
