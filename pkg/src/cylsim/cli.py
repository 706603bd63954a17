"""Command-line front end.

Subcommands: sample, compare, lemma1, coarse, purify, pbs-verify.  Exit
codes: 0 success, 2 non-simulable circuit, 3 resource cap exceeded, 1 any
other error.  Stochastic commands require --seed and echo a provenance
JSON sufficient to reproduce their output bit-exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import coarse, oracle, pbs, purify, sampler
from .circuits import ClusterCircuit
from .czdec import LAMBDA, ppt_determinants, separability_condition

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_SIMULABLE = 2
EXIT_RESOURCE_CAP = 3


def _write_counts_csv(path: str, counts: dict[str, int]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("bitstring,count\n")
        for key in sorted(counts):
            f.write(f"{key},{counts[key]}\n")


def _write_json(path: str, data) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def _provenance(args: argparse.Namespace, extra: dict) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    return {"config": cfg, **extra}


def cmd_sample(args: argparse.Namespace) -> int:
    with open(args.circuit, encoding="utf-8") as f:
        c = ClusterCircuit.from_json(f.read())
    rep = sampler.default_rep(args.growth_margin)
    report = sampler.check_simulable(c, rep.growth)
    if not report.simulable:
        for v in report.vertices:
            status = "ok" if v.ok else "EXCEEDED"
            print(
                f"vertex {v.vertex}: degree {v.degree}, radius {v.radius:.6g}, "
                f"bound {v.bound:.6g} [{status}]",
                file=sys.stderr,
            )
        return EXIT_NOT_SIMULABLE
    counts = sampler.sample_parallel(c, args.shots, args.seed, rep, args.threads)
    _write_counts_csv(args.out, counts)
    _write_json(
        args.out + ".provenance.json",
        _provenance(
            args,
            {
                "growth": rep.growth,
                "simulable": True,
                "vertex_bounds": [
                    {"vertex": v.vertex, "degree": v.degree, "bound": v.bound}
                    for v in report.vertices
                ],
            },
        ),
    )
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    with open(args.circuit, encoding="utf-8") as f:
        c = ClusterCircuit.from_json(f.read())
    if c.n_qubits > oracle.DENSE_CAP:
        print(f"dense oracle capped at {oracle.DENSE_CAP} qubits", file=sys.stderr)
        return EXIT_RESOURCE_CAP
    rep = sampler.default_rep(args.growth_margin)
    report = sampler.check_simulable(c, rep.growth)
    if not report.simulable:
        return EXIT_NOT_SIMULABLE
    counts = sampler.sample_parallel(c, args.shots, args.seed, rep, args.threads)
    tv = oracle.tv_distance(oracle.normalize_counts(counts), oracle.exact_distribution(c))
    result = {"tv": tv, "shots": args.shots, "epsilon_pass": tv <= 0.02}
    _write_json(args.out, _provenance(args, result))
    print(json.dumps(result))
    return EXIT_OK


def cmd_lemma1(args: argparse.Namespace) -> int:
    inner, outer = ppt_determinants(1.0 / LAMBDA, 1.0 / LAMBDA)
    result = {
        "lambda": f"{LAMBDA:.12f}",
        "lambda_pow_minus_4": LAMBDA**-4,
        "outer_determinant_at_critical": outer,
        "inner_determinant_at_critical": inner,
        "separable_at_critical": separability_condition(1.0, 1.0, LAMBDA, LAMBDA),
    }
    print(f"lambda = {LAMBDA:.12f}")
    if args.out:
        _write_json(args.out, result)
    return EXIT_OK


def cmd_coarse(args: argparse.Namespace) -> int:
    try:
        h, w = (int(x) for x in args.block.lower().split("x"))
    except ValueError:
        print("--block must look like HxW, e.g. 2x2", file=sys.stderr)
        return EXIT_ERROR
    mode = coarse.PLAIN if args.mode == "plain" else coarse.LAMBDA_GROWN
    block = coarse.BlockSpec(h, w, mode)
    if min(h, w) > 8:
        print("block short side capped at 8", file=sys.stderr)
        return EXIT_RESOURCE_CAP
    est = coarse.s_estimate(block, theta_grid=args.grid, bisect_tol=args.bisect_tol)
    result = {
        "block": f"{h}x{w}",
        "mode": args.mode,
        "r_lower": est.lower,
        "r_upper": est.upper,
        "grid": est.theta_grid,
        "certified_grid": est.cert_grid,
        "witness_assignment": list(est.witness) if est.witness else None,
        "search_capped": est.capped,
    }
    print(json.dumps(result))
    if args.out:
        _write_json(args.out, result)
    return EXIT_OK


def cmd_purify(args: argparse.Namespace) -> int:
    if args.angles:
        angles = tuple(float(a) * math.pi for a in args.angles.split(","))
    else:
        angles = (0.18 * math.pi, 0.32 * math.pi, 0.31 * math.pi)
    protocol = purify.ChainProtocol(angles)
    p_site = purify.site_success_prob(protocol)
    result = {
        "angles": list(angles),
        "p_site": p_site,
        "r_max": protocol.r_max(),
        "verdict": purify.percolation_verdict(p_site),
    }
    print(json.dumps(result))
    if args.out:
        _write_json(args.out, result)
    return EXIT_OK


def cmd_pbs_verify(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    checks = []
    for d in (2, 3, 4):
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = 0.5 * (m + m.conj().T)
        rho = rho / np.trace(rho)
        g1, g2 = pbs.offdiag_identity_check(rho)
        checks.append(
            {"d": d, "gap1": float(g1), "gap2": float(g2), "pass": bool(max(g1, g2) <= 1e-12)}
        )
    recon = []
    for n in (2, 3):
        for d in (2, 3):
            coeff = complex(rng.normal() * 0.1, rng.normal() * 0.1)
            x = (1,) * n
            y = (0,) * n
            dec = pbs.phase_decompose(d, (0,) * n, x, y, coeff, W=3.0)
            gap = float(np.max(np.abs(dec.reconstruct() - dec.target())))
            recon.append({"d": d, "N": n, "gap": gap, "pass": gap <= 1e-10})
    result = {"identities": checks, "reconstructions": recon}
    result["all_pass"] = all(c["pass"] for c in checks) and all(
        r["pass"] for r in recon
    )
    print(json.dumps(result))
    if args.out:
        _write_json(args.out, result)
    return EXIT_OK if result["all_pass"] else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cylsim")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, required=True)
        sp.add_argument("--out", type=str, required=True)
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    sp = sub.add_parser("sample", help="sample a circuit to CSV")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--shots", type=int, required=True)
    sp.add_argument("--growth-margin", type=float, default=sampler.DEFAULT_GROWTH_MARGIN)
    common(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("compare", help="sampler vs exact oracle TV distance")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--shots", type=int, default=100000)
    sp.add_argument("--growth-margin", type=float, default=sampler.DEFAULT_GROWTH_MARGIN)
    common(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("lemma1", help="print the critical growth constant")
    sp.add_argument("--out", type=str, default=None)
    sp.set_defaults(func=cmd_lemma1)

    sp = sub.add_parser("coarse", help="bracket a block threshold radius")
    sp.add_argument("--block", required=True, help="HxW, e.g. 2x2")
    sp.add_argument("--mode", choices=["plain", "lambda"], default="plain")
    sp.add_argument("--grid", type=int, default=32)
    sp.add_argument("--bisect-tol", type=float, default=1e-4)
    sp.add_argument("--out", type=str, default=None)
    sp.set_defaults(func=cmd_coarse)

    sp = sub.add_parser("purify", help="chain steering success probability")
    sp.add_argument("--angles", type=str, default=None, help="comma list, units of pi")
    sp.add_argument("--out", type=str, default=None)
    sp.set_defaults(func=cmd_purify)

    sp = sub.add_parser("pbs-verify", help="qudit identity and decomposition checks")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=str, default=None)
    sp.set_defaults(func=cmd_pbs_verify)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
