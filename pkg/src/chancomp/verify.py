"""Invariant suites run by ``chancomp verify``.

Each suite returns a list of :class:`Check` records; a suite passes when every
check does. Trial ``t`` draws its channel and inputs from
``sub_seed(seed, 0, t)``; optimizer restarts use ``sub_seed(seed, 1)`` as
their master seed. A suite run is therefore reproducible from one seed.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import gaussian as gs
from .channels import random_channel, random_kraus_map, tensor
from .complement import complement, complement_witness
from .numerics import nonzero_spectrum, projector, random_pure, rng_for, sub_seed
from .purity import OptimizerOptions, min_output_entropy, nu_p, wh_violation_witness

__all__ = ["Check", "SUITES", "run_suite", "spectra_gap"]


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    threshold: float
    passed: bool
    detail: dict | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        if out["detail"] is None:
            del out["detail"]
        return out


def _check(name, residual, threshold, detail=None, passed=None) -> Check:
    residual = float(residual)
    ok = residual <= threshold if passed is None else passed
    return Check(name, residual, float(threshold), bool(ok), detail)


def spectra_gap(a, b) -> float:
    """Elementwise distance between nonzero spectra, shorter one padded with zeros."""
    sa, sb = nonzero_spectrum(a), nonzero_spectrum(b)
    n = max(len(sa), len(sb))
    sa = np.pad(sa, (0, n - len(sa)))
    sb = np.pad(sb, (0, n - len(sb)))
    return float(np.max(np.abs(sa - sb))) if n else 0.0


def suite_spectra(seed, trials=100, inputs=20, tol=1e-9, **_):
    checks = []
    for t in range(trials):
        rng = rng_for(sub_seed(seed, 0, t))
        d_in, d_out = (int(x) for x in rng.integers(2, 5, size=2))
        m = int(rng.integers(1, 9))
        phi = random_kraus_map(d_in, d_out, m, rng)
        phi_c = complement(phi)
        worst = 0.0
        for _ in range(inputs):
            rho = projector(random_pure(d_in, rng))
            worst = max(worst, spectra_gap(phi(rho), phi_c(rho)))
        checks.append(_check(f"trial {t} ({d_in},{d_out},{m})", worst, tol))
    return checks


def _tp_channels(seed, trials, dims=(2, 3)):
    for t in range(trials):
        rng = rng_for(sub_seed(seed, 0, t))
        d = dims[t % len(dims)]
        m = int(rng.integers(1, d * d + 1))
        yield t, d, random_channel(d, d, m, rng)


def suite_nu_p(seed, trials=20, restarts=50, ps=(1.5, 2.0, 3.0, np.inf), tol=1e-5, **_):
    opts = OptimizerOptions(restarts=restarts, seed=sub_seed(seed, 1))
    checks = []
    for t, d, phi in _tp_channels(seed, trials):
        phi_c = complement(phi)
        for p in ps:
            a, b = nu_p(phi, p, opts), nu_p(phi_c, p, opts)
            checks.append(
                _check(f"trial {t} d={d} p={p}", abs(a.value - b.value), tol, {"nu": a.value, "nu_c": b.value})
            )
    return checks


def suite_min_entropy(seed, trials=20, restarts=50, tol=1e-5, **_):
    opts = OptimizerOptions(restarts=restarts, seed=sub_seed(seed, 1))
    checks = []
    for t, d, phi in _tp_channels(seed, trials):
        a = min_output_entropy(phi, opts)
        b = min_output_entropy(complement(phi), opts)
        checks.append(_check(f"trial {t} d={d}", abs(a.value - b.value), tol, {"h": a.value, "h_c": b.value}))
    return checks


def suite_tensor_complement(seed, trials=10, **_):
    checks = []
    for t in range(trials):
        rng = rng_for(sub_seed(seed, 0, t))
        m1, m2 = (int(x) for x in rng.integers(1, 5, size=2))
        phi1 = random_channel(2, 2, m1, rng)
        phi2 = random_channel(2, 2, m2, rng)
        res = complement_witness(complement(tensor(phi1, phi2)), tensor(complement(phi1), complement(phi2)))
        worst = max(res.residual, res.forward_residual, res.backward_residual)
        checks.append(_check(f"pair {t} ({m1},{m2})", worst, res.threshold))
    return checks


def suite_wh_witness(seed, d=4, p=30.0, expect="violation", **_):
    ratio, witness, product = wh_violation_witness(d, p)
    detail = {"ratio": ratio, "witness_value": witness, "product_value": product}
    if expect == "violation":
        return [_check(f"d={d} p={p} ratio > 1", ratio - 1.0, 0.0, detail, passed=ratio > 1.0)]
    return [_check(f"d={d} p={p} ratio <= 1", ratio - 1.0, 1e-12, detail)]


def suite_gaussian(seed, tol=1e-12, **_):
    checks = []
    for k in np.round(np.arange(1, 10) / 10.0, 1):
        ch = gs.attenuation(k)
        comp = gs.complement_gaussian(ch)
        want = gs.attenuation(np.sqrt(1.0 - k * k))
        err = max(
            abs(comp.coeff - want.coeff),
            np.max(np.abs(comp.x - want.x)),
            np.max(np.abs(comp.y - want.y)),
        )
        ok = comp.kind == "attenuation" and err <= tol
        checks.append(_check(f"attenuation k={k} complement", err, tol, passed=ok))
        checks.append(_check(f"attenuation k={k} symplectic", gs.symplectic_residual(gs.dilate(ch).s), tol))
    comp = gs.complement_gaussian(gs.amplifier(np.sqrt(2.0)))
    err = max(np.max(np.abs(comp.x - gs.Z)), np.max(np.abs(comp.y - 2.0 * np.eye(2))))
    ok = comp.kind == "conjugate_amplifier" and err <= tol
    checks.append(_check("amplifier sqrt(2) complement", err, tol, passed=ok))
    return checks


SUITES = {
    "spectra": suite_spectra,
    "nu-p": suite_nu_p,
    "min-entropy": suite_min_entropy,
    "tensor-complement": suite_tensor_complement,
    "wh-witness": suite_wh_witness,
    "gaussian": suite_gaussian,
}


def run_suite(name: str, seed: int, **params) -> list[Check]:
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return suite(seed, **{k: v for k, v in params.items() if v is not None})
