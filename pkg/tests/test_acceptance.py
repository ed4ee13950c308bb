"""Acceptance criteria 1-12, one check per criterion.

Each ``criterion_N`` returns ``(passed, detail)``. Under pytest every
criterion prints one ``AC<N> PASS|FAIL`` line; ``python3 tests/test_acceptance.py``
prints the same lines without pytest.
"""
from __future__ import annotations

import sys
import time

import numpy as np
import pytest
import scipy.linalg as sla

from chancomp import families as fam
from chancomp import gaussian as gs
from chancomp.channels import (
    KrausMap,
    apply,
    choi,
    choi_distance,
    kraus_to_stinespring,
    random_channel,
    random_kraus_map,
    tensor,
)
from chancomp.complement import (
    complement,
    complement_witness,
    double_complement_check,
    equivalence_witness,
    minimal_form,
    s_to_channel,
)
from chancomp.numerics import partial_trace, projector, random_density, random_pure, rng_for, sub_seed
from chancomp.purity import (
    OptimizerOptions,
    additivity_gap,
    min_output_entropy,
    nu_p,
    superadditivity_report,
    wh_violation_witness,
)

SEED = 0xC0FFEE
# ratio for d=4, p=30 from an explicit Kronecker-product eigensolve (see criterion_8)
WH_RATIO_4_30 = 1.3940654868144207


def _stream(tag: int, t: int):
    return rng_for(sub_seed(SEED, tag, t))


def _nonzero(h, tol=1e-12):
    w = sla.eigvalsh(0.5 * (h + h.conj().T), driver="evr")
    return np.sort(w[w > tol])[::-1]


def _padded_gap(a, b):
    n = max(len(a), len(b))
    return float(np.max(np.abs(np.pad(a, (0, n - len(a))) - np.pad(b, (0, n - len(b)))))) if n else 0.0


def _worst(res):
    return max(res.residual, res.forward_residual, res.backward_residual)


# ------------------------------------------------------------------ criteria


def criterion_1():
    """Nonzero spectra of Φ(ρ) and Φ̃(ρ) agree on 100 maps x 20 pure inputs."""
    t0 = time.perf_counter()
    worst = 0.0
    for t in range(100):
        rng = _stream(1, t)
        d_in, d_out = (int(x) for x in rng.integers(2, 5, size=2))
        phi = random_kraus_map(d_in, d_out, int(rng.integers(1, 9)), rng)
        phi_c = complement(phi)
        v = kraus_to_stinespring(phi).v
        for _ in range(20):
            rho = projector(random_pure(d_in, rng))
            out_c = apply(phi_c, rho)
            # the complement must be the other partial trace of V ρ V*
            big = v @ rho @ v.conj().T
            worst = max(worst, float(np.max(np.abs(out_c - partial_trace(big, d_out, phi.n_kraus, "C")))))
            worst = max(worst, _padded_gap(_nonzero(apply(phi, rho)), _nonzero(out_c)))
    elapsed = time.perf_counter() - t0
    return worst <= 1e-9 and elapsed < 30, f"max spectral gap {worst:.2e} (tol 1e-9), {elapsed:.1f}s (< 30s)"


def _tp_channel_set():
    out = []
    for t in range(20):
        rng = _stream(2, t)
        d = 2 if t < 10 else 3
        out.append(random_channel(d, d, int(rng.integers(2, d * d + 1)), rng))
    return out


def criterion_2():
    """ν_p(Φ) = ν_p(Φ̃) for 20 random TP channels, 50 restarts."""
    t0 = time.perf_counter()
    opts = OptimizerOptions(restarts=50, seed=SEED)
    worst = 0.0
    for phi in _tp_channel_set():
        phi_c = complement(phi)
        for p in (1.5, 2.0, 3.0, np.inf):
            worst = max(worst, abs(nu_p(phi, p, opts).value - nu_p(phi_c, p, opts).value))
    elapsed = time.perf_counter() - t0
    return worst <= 1e-5 and elapsed < 300, f"max |Δν_p| {worst:.2e} (tol 1e-5), {elapsed:.1f}s (< 300s)"


def criterion_3():
    """Ȟ(Φ) = Ȟ(Φ̃) on the same channel set."""
    opts = OptimizerOptions(restarts=50, seed=SEED)
    worst = 0.0
    for phi in _tp_channel_set():
        worst = max(worst, abs(min_output_entropy(phi, opts).value - min_output_entropy(complement(phi), opts).value))
    return worst <= 1e-5, f"max |ΔȞ| {worst:.2e} (tol 1e-5)"


def criterion_4():
    """Diagonal channels: ν_2 = 1 and Ȟ = 0."""
    opts = OptimizerOptions(restarts=50, seed=SEED)
    worst_nu = worst_h = 0.0
    for t in range(20):
        rng = _stream(4, t)
        d = (2, 3, 4)[t % 3]
        c = fam.random_correlation(d, rng, rank=int(rng.integers(1, d + 1)))
        assert np.allclose(np.diag(c), 1.0)
        phi = fam.diagonal_channel(c)
        worst_nu = max(worst_nu, abs(nu_p(phi, 2.0, opts).value - 1.0))
        worst_h = max(worst_h, abs(min_output_entropy(phi, opts).value))
    ok = worst_nu <= 1e-6 and worst_h <= 1e-6
    return ok, f"max |ν_2-1| {worst_nu:.2e}, max |Ȟ| {worst_h:.2e} (tol 1e-6)"


def criterion_5():
    """EB closed-form complement equals the generic complement; q-c stays q-c."""
    worst = 0.0
    for t in range(20):
        rng = _stream(5, t)
        d_in, d_out = (int(x) for x in rng.integers(2, 4, size=2))
        spec = fam.random_eb_spec(d_in, d_out, d_in + int(rng.integers(0, 4)), rng)
        worst = max(worst, choi_distance(fam.eb_complement_closed_form(spec), complement(fam.eb_channel(spec))))
    worst_delta = worst_qc = 0.0
    for t in range(5):
        rng = _stream(50, t)
        d = int(rng.integers(2, 4))
        spec = fam.random_qc_spec(d, d + int(rng.integers(0, 3)), rng)
        worst_delta = max(worst_delta, float(np.max(np.abs(spec.correlation() - np.eye(spec.size)))))
        worst_qc = max(worst_qc, choi_distance(fam.eb_complement_closed_form(spec), fam.eb_channel(spec)))
    ok = worst <= 1e-10 and worst_delta <= 1e-12 and worst_qc <= 1e-12
    return ok, f"EB Choi residual {worst:.2e} (1e-10); q-c |c-δ| {worst_delta:.1e}, q-c self-complement {worst_qc:.1e} (1e-12)"


def criterion_6():
    """Complement of the transpose-depolarizing channel vs the antisymmetric formula."""
    worst = 0.0
    ranks_ok = True
    for d in (2, 3, 4):
        td = fam.transpose_depolarizing(d)
        worst = max(worst, _worst(complement_witness(complement(td), fam.wh_complement(d))))
        ranks_ok &= choi(td).rank() == minimal_form(td).n_kraus == d * (d - 1) // 2
    return worst <= 1e-9 and ranks_ok, f"witness residual {worst:.2e} (1e-9); minimal d_C = d(d-1)/2: {ranks_ok}"


def criterion_7():
    """Depolarizing complement from the S operator, d=2."""
    worst = tp = 0.0
    for p in (0.25, 0.5, 1.0):
        sf = fam.depolarizing_complement_s(2, p)
        tp = max(tp, sf.tp_residual())
        worst = max(worst, _worst(complement_witness(complement(fam.depolarizing(2, p)), s_to_channel(sf))))
    return worst <= 1e-9 and tp <= 1e-10, f"witness residual {worst:.2e} (1e-9); |Tr_B S*S - I| {tp:.2e} (1e-10)"


def _wh_ratio_oracle(d, p):
    td = fam.transpose_depolarizing(d)
    omega = np.eye(d).reshape(-1) / np.sqrt(d)
    out = np.zeros((d * d, d * d), dtype=complex)
    for a in td.kraus:
        for b in td.kraus:
            k = np.kron(a, b)
            out += k @ np.outer(omega, omega) @ k.conj().T
    lam = np.clip(sla.eigvalsh(out), 0, None)
    return np.sum(lam**p) ** (1 / p) / (d - 1) ** (2 * (1 - p) / p)


def criterion_8():
    """Exact two-copy violation witness."""
    t0 = time.perf_counter()
    r430 = wh_violation_witness(4, 30)[0]
    r32 = wh_violation_witness(3, 2)[0]
    oracle = _wh_ratio_oracle(4, 30)
    elapsed = time.perf_counter() - t0
    ok = r430 > 1 and r32 <= 1 + 1e-12 and abs(r430 - oracle) <= 1e-12 and abs(r430 - WH_RATIO_4_30) <= 1e-12
    ok &= elapsed < 60
    return ok, f"ratio(4,30) = {r430:.12f} > 1 (oracle {oracle:.12f}); ratio(3,2) = {r32:.6f} <= 1; {elapsed:.2f}s"


def _cholesky_dilation(phi):
    """Minimal Kraus list from a pivoted Cholesky factor of the Choi matrix."""
    c = choi(phi)
    v = fam.kolmogorov_factor(c.matrix)
    return KrausMap(np.stack([col.reshape(c.d_in, c.d_out).T for col in v.T]))


def criterion_9():
    """Minimal dilations: rank bound, unitary witness, double complement."""
    rank_ok = True
    unit = dbl = 0.0
    for t in range(50):
        rng = _stream(9, t)
        d_in, d_out = (int(x) for x in rng.integers(1, 4, size=2))
        phi = random_kraus_map(d_in, d_out, int(rng.integers(1, 9)), rng)
        m = minimal_form(phi)
        rank_ok &= m.n_kraus == choi(phi).rank() <= d_in * d_out
        other = _cholesky_dilation(phi)
        rank_ok &= other.n_kraus == m.n_kraus
        w = equivalence_witness(kraus_to_stinespring(m), kraus_to_stinespring(other)).witness.w
        eye = np.eye(w.shape[0])
        unit = max(unit, np.max(np.abs(w @ w.conj().T - eye)), np.max(np.abs(w.conj().T @ w - eye)))
        dbl = max(dbl, _worst(double_complement_check(phi)))
    ok = rank_ok and unit <= 1e-9 and dbl <= 1e-9
    return ok, f"Kraus count = rank <= d_in d_out: {rank_ok}; |WW*-I|,|W*W-I| {unit:.2e}; double complement {dbl:.2e} (1e-9)"


def criterion_10():
    """complement(Φ1⊗Φ2) ~ complement(Φ1)⊗complement(Φ2) at d=2."""
    worst = 0.0
    for t in range(10):
        rng = _stream(10, t)
        p1 = random_kraus_map(2, 2, int(rng.integers(1, 5)), rng)
        p2 = random_kraus_map(2, 2, int(rng.integers(1, 5)), rng)
        worst = max(worst, _worst(complement_witness(complement(tensor(p1, p2)), tensor(complement(p1), complement(p2)))))
    return worst <= 1e-9, f"witness residual {worst:.2e} (1e-9)"


def criterion_11():
    """Gaussian complement law on the grid k = 0.1..0.9 and the amplifier at sqrt(2)."""
    coeff = sympl = 0.0
    kinds = True
    for i in range(1, 10):
        k = i / 10
        comp = gs.complement_gaussian(gs.attenuation(k))
        kinds &= comp.kind == "attenuation"
        coeff = max(coeff, abs(comp.coeff - np.sqrt(1 - k * k)))
        sympl = max(sympl, gs.symplectic_residual(gs.dilate(gs.attenuation(k)).s))
    amp = gs.complement_gaussian(gs.amplifier(np.sqrt(2)))
    amp_err = max(np.max(np.abs(amp.x - gs.Z)), np.max(np.abs(amp.y - 2 * np.eye(2))))
    kinds &= amp.kind == "conjugate_amplifier"
    ok = kinds and coeff <= 1e-12 and sympl <= 1e-12 and amp_err <= 1e-12
    return ok, f"coefficient {coeff:.1e}, symplectic {sympl:.1e}, amplifier x/y {amp_err:.1e} (1e-12)"


def criterion_12():
    """Ȟ additivity for (EB, TP) pairs and their complements; Ĥ superadditivity reported."""
    opts = OptimizerOptions(restarts=200, seed=SEED)
    # Ĥ is report-only; 200 fully converged restarts on the joint input take ~15 min
    report_opts = OptimizerOptions(restarts=20, seed=SEED, max_iter=500, tol=1e-8)
    eb_gap = comp_gap = 0.0
    slacks, bands, flagged = [], [], 0
    for t in range(10):
        rng = _stream(12, t)
        eb = fam.eb_channel(fam.random_eb_spec(2, 2, int(rng.integers(2, 5)), rng))
        other = random_channel(2, 2, int(rng.integers(2, 5)), rng)
        eb_gap = max(eb_gap, abs(additivity_gap(eb, other, opts)))
        comp_gap = max(comp_gap, abs(additivity_gap(complement(eb), complement(other), opts)))
        rho12 = random_density(4, rng)
        for pair in ((eb, other), (complement(eb), complement(other))):
            rep = superadditivity_report(*pair, rho12, report_opts)
            slacks.append(rep.slack)
            bands.append(rep.band)
            flagged += rep.flagged
    ok = eb_gap <= 1e-4 and comp_gap <= 1e-4
    detail = (
        f"max |gap| EB pairs {eb_gap:.2e}, complement pairs {comp_gap:.2e} (1e-4); "
        f"Ĥ slack min {min(slacks):+.2e} (band <= {max(bands):.1e}), flagged {flagged}/{len(slacks)} [reported only]"
    )
    return ok, detail


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 13)}


def _line(n, ok, detail):
    return f"AC{n:<2} {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for n, check in CRITERIA.items():
        ok, detail = check()
        failures += not ok
        print(_line(n, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
