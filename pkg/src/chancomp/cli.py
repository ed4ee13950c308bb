"""``chancomp`` command-line interface.

Exit codes: 0 success, 1 failed verification, 2 usage or domain error,
3 I/O error. Commands that produce a channel write a channel file (``-o``)
or print it to stdout; all other commands emit a JSON report to stdout or to
``--json PATH``. Seeds default to 0xC0FFEE and every derived seed comes from
:func:`chancomp.numerics.sub_seed`.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict

import numpy as np

from . import families as fam
from . import gaussian as gs
from ._config import TOL, NotSameChannelError
from .channels import KrausMap
from .complement import complement, complement_witness, double_complement_check, minimal_form, s_to_channel
from .io import channel_to_dict, decode_matrix, digest, read_channel, write_channel, write_json_atomic
from .numerics import as_density, sub_seed
from .purity import (
    DEFAULT_SEED,
    OptimizerOptions,
    additivity_gap,
    h_hat,
    min_output_entropy,
    multiplicativity_gap,
    nu_p,
    superadditivity_report,
    wh_violation_threshold,
    wh_violation_witness,
)
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

FAMILIES = (
    "identity",
    "cdepol",
    "depolarizing",
    "wh",
    "eb",
    "cq",
    "qc",
    "diagonal",
    "gdiag",
    "mixture",
    "wh-complement",
    "depolarizing-complement",
)

SEED_SCHEME = "sub_seed(master, *index): SeedSequence(master, spawn_key=index)"


class UsageError(ValueError):
    pass


# ------------------------------------------------------------------ helpers


def _seed(text: str) -> int:
    return int(text, 0)


def _p_value(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return float("inf")
    return float(text)


def _read_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("matrix")
    return decode_matrix(data)


def _options(args) -> OptimizerOptions:
    return OptimizerOptions(restarts=args.restarts, seed=args.seed, backend=args.backend)


def _emit(args, command: str, params: dict, results: dict, files=(), seeds=None, started=0.0) -> None:
    inputs = {"params": params, "files": {str(f): digest(channel_to_dict(read_channel(f)[0])) for f in files}}
    report = {
        "command": command,
        "inputs": {"digest": digest(inputs), **inputs},
        "results": results,
        "seeds": seeds or {},
        "tolerances": asdict(TOL),
        "wall_time": time.perf_counter() - started,
    }
    if getattr(args, "json", None):
        write_json_atomic(args.json, report)
    else:
        json.dump(report, sys.stdout, indent=1, allow_nan=False)
        sys.stdout.write("\n")


def _write_or_print(args, phi: KrausMap, metadata: dict) -> None:
    summary = f"d_in={phi.d_in} d_out={phi.d_out} n_kraus={phi.n_kraus} tp={str(phi.is_tp).lower()}"
    if args.out:
        write_channel(args.out, phi, metadata)
        print(summary)
    else:
        json.dump(channel_to_dict(phi, metadata), sys.stdout, allow_nan=False)
        sys.stdout.write("\n")
        print(summary, file=sys.stderr)


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"family {args.family!r} needs --{n.replace('_', '-')}")


# ------------------------------------------------------------------ commands


def _build_family(args) -> KrausMap:
    f = args.family
    seed = args.seed
    if f in ("identity", "cdepol", "depolarizing", "wh", "wh-complement", "depolarizing-complement", "eb", "cq", "qc", "diagonal", "gdiag"):
        _need(args, "d")
    d = args.d
    if f == "identity":
        return fam.identity(d)
    if f == "cdepol":
        return fam.completely_depolarizing(d)
    if f == "depolarizing":
        _need(args, "p")
        return fam.depolarizing(d, args.p)
    if f == "depolarizing-complement":
        _need(args, "p")
        return s_to_channel(fam.depolarizing_complement_s(d, args.p))
    if f == "wh":
        return fam.transpose_depolarizing(d)
    if f == "wh-complement":
        return fam.wh_complement(d)
    if f == "eb":
        m = args.m if args.m is not None else d * (args.d_out or d)
        return fam.eb_channel(fam.random_eb_spec(d, args.d_out or d, m, seed))
    if f == "cq":
        return fam.eb_channel(fam.random_cq_spec(d, args.d_out or d, seed))
    if f == "qc":
        return fam.eb_channel(fam.random_qc_spec(d, args.m or d, seed))
    if f == "diagonal":
        c = _read_matrix(args.corr) if args.corr else fam.random_correlation(d, seed)
        return fam.diagonal_channel(c)
    if f == "gdiag":
        m = args.m or d
        psi = fam.random_qc_spec(d, m, sub_seed(seed, 0)).psi
        c = _read_matrix(args.corr) if args.corr else fam.random_correlation(m, sub_seed(seed, 1))
        return fam.generalized_diagonal(c, psi)
    if f == "mixture":
        if not args.components or not args.weights:
            raise UsageError("mixture needs --components and --weights")
        maps = [read_channel(path)[0] for path in args.components]
        return fam.convex_mixture(maps, args.weights)
    raise UsageError(f"unknown family {f!r}")


def cmd_gen(args) -> int:
    phi = _build_family(args)
    params = {k: getattr(args, k) for k in ("d", "d_out", "p", "m") if getattr(args, k) is not None}
    _write_or_print(args, phi, {"family": args.family, "params": params, "seed": args.seed})
    return EXIT_OK


def cmd_complement(args) -> int:
    phi, _ = read_channel(args.input)
    if args.minimal:
        phi = minimal_form(phi)
    out = complement(phi)
    _write_or_print(args, out, {"complement_of": str(args.input), "minimal": bool(args.minimal)})
    return EXIT_OK


def cmd_minimal(args) -> int:
    phi, meta = read_channel(args.input)
    _write_or_print(args, minimal_form(phi), {**meta, "minimal": True})
    return EXIT_OK


def _finite(x: float):
    return x if np.isfinite(x) else None


def cmd_witness(args) -> int:
    t0 = time.perf_counter()
    phi1, _ = read_channel(args.input)
    files = [args.input]
    mode = "double-complement"
    if args.other is not None:
        phi2, _ = read_channel(args.other)
        files.append(args.other)
        mode = "complement"
    try:
        res = double_complement_check(phi1) if args.other is None else complement_witness(phi1, phi2)
    except NotSameChannelError as exc:
        _emit(args, "witness", {"mode": mode}, {"mode": mode, "ok": False, "error": str(exc)}, files, started=t0)
        print(f"FAIL {exc}", file=sys.stderr)
        return EXIT_FAIL
    results = {
        "mode": mode,
        "ok": res.ok,
        "residual": _finite(res.residual),
        "forward_residual": _finite(res.forward_residual),
        "backward_residual": _finite(res.backward_residual),
        "threshold": res.threshold,
        "witness_kind": res.witness.kind,
        "witness_shape": list(res.witness.w.shape),
    }
    _emit(args, "witness", {"mode": mode}, results, files, started=t0)
    return EXIT_OK if res.ok else EXIT_FAIL


def _purity_report(args, command, res, params, files, t0) -> int:
    seeds = {"master": args.seed, "scheme": SEED_SCHEME}
    _emit(args, command, params, res.to_dict(), files, seeds, t0)
    return EXIT_OK


def cmd_purity(args) -> int:
    t0 = time.perf_counter()
    phi, _ = read_channel(args.input)
    res = nu_p(phi, args.p, _options(args))
    params = {"p": "inf" if np.isinf(args.p) else args.p, "restarts": args.restarts}
    return _purity_report(args, "purity", res, params, [args.input], t0)


def cmd_minentropy(args) -> int:
    t0 = time.perf_counter()
    phi, _ = read_channel(args.input)
    res = min_output_entropy(phi, _options(args))
    return _purity_report(args, "minentropy", res, {"restarts": args.restarts}, [args.input], t0)


def _rho(args, dim) -> np.ndarray:
    if args.rho:
        return as_density(_read_matrix(args.rho))
    return np.eye(dim, dtype=complex) / dim


def cmd_hhat(args) -> int:
    t0 = time.perf_counter()
    phi, _ = read_channel(args.input)
    rho = _rho(args, phi.d_in)
    res = h_hat(phi, rho, _options(args))
    params = {"restarts": args.restarts, "rho": digest(np.stack([rho.real, rho.imag]).tolist())}
    return _purity_report(args, "hhat", res, params, [args.input], t0)


def cmd_gap(args) -> int:
    t0 = time.perf_counter()
    phi1, _ = read_channel(args.first)
    phi2, _ = read_channel(args.second)
    opts = _options(args)
    params = {"kind": args.kind, "restarts": args.restarts}
    if args.kind == "mult":
        if args.p is None:
            raise UsageError("--kind mult needs --p")
        params["p"] = "inf" if np.isinf(args.p) else args.p
        results = {"gap": multiplicativity_gap(phi1, phi2, args.p, opts)}
    elif args.kind == "add":
        results = {"gap": additivity_gap(phi1, phi2, opts)}
    else:
        rho = _rho(args, phi1.d_in * phi2.d_in)
        rep = superadditivity_report(phi1, phi2, rho, opts)
        results = asdict(rep)
    seeds = {"master": args.seed, "scheme": SEED_SCHEME}
    _emit(args, "gap", params, results, [args.first, args.second], seeds, t0)
    return EXIT_OK


def cmd_wh_witness(args) -> int:
    t0 = time.perf_counter()
    ratio, witness, product = wh_violation_witness(args.d, args.p)
    results = {"ratio": ratio, "witness_value": witness, "product_value": product, "violation": ratio > 1.0}
    if args.threshold:
        results["threshold_p"] = wh_violation_threshold(args.d)
    params = {"d": args.d, "p": "inf" if np.isinf(args.p) else args.p}
    _emit(args, "wh-witness", params, results, started=t0)
    return EXIT_OK


def cmd_gaussian(args) -> int:
    t0 = time.perf_counter()
    make = gs.attenuation if args.kind == "attenuation" else gs.amplifier
    ch = make(args.k)
    results = {"channel": ch.to_dict(), "cp": ch.is_cp(), "symplectic_residual": gs.symplectic_residual(gs.dilate(ch).s)}
    if args.complement:
        comp = gs.complement_gaussian(ch)
        results["complement"] = comp.to_dict()
        results["complement_cp"] = comp.is_cp()
    _emit(args, "gaussian", {"kind": args.kind, "k": args.k, "complement": args.complement}, results, started=t0)
    return EXIT_OK


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    params = {
        k: getattr(args, k)
        for k in ("trials", "restarts", "d", "p", "expect")
        if getattr(args, k) is not None
    }
    checks = run_suite(args.suite, args.seed, **params)
    passed = all(c.passed for c in checks)
    results = {"suite": args.suite, "passed": passed, "n_checks": len(checks), "checks": [c.to_dict() for c in checks]}
    if "p" in params and np.isinf(params["p"]):
        params["p"] = "inf"
    seeds = {"master": args.seed, "scheme": SEED_SCHEME}
    _emit(args, "verify", {"suite": args.suite, **params}, results, seeds=seeds, started=t0)
    for c in checks:
        if not c.passed:
            print(f"FAIL {c.name}: residual {c.residual:.3e} > {c.threshold:.1e}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chancomp", description="Complementary quantum channels toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def seeded(p):
        p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="master seed (default 0xC0FFEE)")

    def optimizer(p):
        seeded(p)
        p.add_argument("--restarts", type=int, default=50)
        p.add_argument("--backend", choices=("numba", "numpy"), default=None)

    def reported(p):
        p.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")

    p = sub.add_parser("gen", help="generate a channel family")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--d", type=int, help="input dimension")
    p.add_argument("--d-out", type=int, dest="d_out")
    p.add_argument("--p", type=float, help="depolarizing parameter")
    p.add_argument("--m", type=int, help="number of POVM elements / correlation size")
    p.add_argument("--corr", metavar="PATH", help="correlation matrix JSON")
    p.add_argument("--components", nargs="+", metavar="PATH")
    p.add_argument("--weights", nargs="+", type=float)
    p.add_argument("-o", "--out", metavar="PATH")
    seeded(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("complement", help="complementary channel of a channel file")
    p.add_argument("input")
    p.add_argument("--minimal", action="store_true", help="minimize the Kraus list first")
    p.add_argument("-o", "--out", metavar="PATH")
    p.set_defaults(func=cmd_complement)

    p = sub.add_parser("minimal", help="minimal Kraus form")
    p.add_argument("input")
    p.add_argument("-o", "--out", metavar="PATH")
    p.set_defaults(func=cmd_minimal)

    p = sub.add_parser("witness", help="equivalence witness of two complements, or double-complement check")
    p.add_argument("input")
    p.add_argument("other", nargs="?")
    reported(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("purity", help="maximal output p-norm")
    p.add_argument("input")
    p.add_argument("--p", type=_p_value, required=True)
    optimizer(p)
    reported(p)
    p.set_defaults(func=cmd_purity)

    p = sub.add_parser("minentropy", help="minimal output entropy")
    p.add_argument("input")
    optimizer(p)
    reported(p)
    p.set_defaults(func=cmd_minentropy)

    p = sub.add_parser("hhat", help="convex closure of the output entropy at a state")
    p.add_argument("input")
    p.add_argument("--rho", metavar="PATH", help="density matrix JSON (default maximally mixed)")
    optimizer(p)
    reported(p)
    p.set_defaults(func=cmd_hhat)

    p = sub.add_parser("gap", help="multiplicativity / additivity / superadditivity gap")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--kind", choices=("mult", "add", "superadd"), default="mult")
    p.add_argument("--p", type=_p_value)
    p.add_argument("--rho", metavar="PATH", help="joint state for --kind superadd")
    optimizer(p)
    reported(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("wh-witness", help="exact two-copy test for the transpose-depolarizing channel")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=_p_value, required=True)
    p.add_argument("--threshold", action="store_true", help="also bisect for the smallest violating p")
    reported(p)
    p.set_defaults(func=cmd_wh_witness)

    p = sub.add_parser("gaussian", help="one-mode attenuator / amplifier")
    p.add_argument("--kind", choices=("attenuation", "amplifier"), required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--complement", action="store_true")
    reported(p)
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--trials", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=_p_value)
    p.add_argument("--expect", choices=("violation", "multiplicative"))
    seeded(p)
    reported(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except OSError as exc:
        print(f"chancomp: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"chancomp: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
