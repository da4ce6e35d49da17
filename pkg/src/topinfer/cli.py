"""Command-line entry point.

Every subcommand writes its primary result (JSON or CSV) to ``--out`` or
stdout.  When ``--out`` is given a ``<out>.manifest.json`` is written next to
it with the parameters, seed, version, wall-clock time and output digest; the
primary output never contains timestamps, so reruns are byte-identical.

Exit codes: 0 ok, 2 usage error, 3 computation error, 4 result flagged
unreliable.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from importlib import metadata
from pathlib import Path

import numpy as np

from . import detector, ensembles, ergodic, largedev, matching, walks, zeta
from .graph import GraphError, dumps, read_edgelist, structure_report

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_FLAGGED = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands; each returns (text, flagged)


def cmd_generate(a):
    if a.ensemble == "er":
        spec = ensembles.ErdosRenyi(a.n, a.p)
    elif a.ensemble == "bipartite":
        spec = ensembles.BipartiteRegular(a.n_bits, a.m_checks, a.q, a.r, a.burn_in)
    else:
        spec = ensembles.PlantedBridge(a.n1, a.n2, a.k, a.p_intra)
    return dumps(spec.sample(a.seed)), False


def cmd_zeta(a):
    g = read_edgelist(a.inp)
    M = a.max_m
    zp = zeta.zeta_reciprocal(g)
    summary = zeta.topological_summary(g, M)
    L = len(summary.prime_counts) - 1
    euler = zeta.euler_product_truncation(summary.prime_counts, L)
    bass = list(zp.coeffs[:L + 1]) + [0] * max(0, L + 1 - len(zp.coeffs))
    rank = zeta.circuit_rank(g)
    kappa = {"circuit_rank": rank, "matrix_tree": str(summary.spanning_trees)}
    if rank >= 2:
        kz = zeta.kappa_from_zeta(zp, rank)
        kappa.update(from_zeta=str(kz), agree=kz == summary.spanning_trees)
    else:
        kappa.update(from_zeta=None, agree=None)
    report = {
        "graph": {"vertices": g.n_vertices, "edges": g.n_edges},
        "zeta_reciprocal": zp.to_strings(),
        "summary": summary.to_dict(),
        "oracles": {
            "euler_product": {
                "through": L,
                "bass": [str(c) for c in bass],
                "euler": [str(c) for c in euler],
                "agree": bass == euler,
            },
            "loop_counts": {
                "hashimoto_trace": [str(c) for c in zeta.loop_counts_trace(g, M)],
                "log_derivative": [str(c) for c in zeta.loop_counts_logderiv(zp, M)],
            },
            "spanning_trees": kappa,
            "prime_asymptotics": zeta.prime_asymptotics_check(summary),
        },
    }
    flagged = not report["oracles"]["euler_product"]["agree"] or kappa["agree"] is False
    return _json(report), flagged


def cmd_walk(a):
    if a.asym is not None:
        M = a.steps
        exact = walks.asym_return_probs(a.asym, M).probs
        emp = walks.simulate_asym_returns(a.asym, M, a.trajectories, a.seed)
        rows = []
        for n in range(M + 1):
            se = math.sqrt(exact[n] * (1 - exact[n]) / a.trajectories)
            rows.append({"step": n, "exact_return_probability": float(exact[n]),
                         "empirical_return_frequency": float(emp[n]), "binomial_std_error": se})
        return _csv(rows, list(rows[0])), False
    if a.inp is None:
        raise UsageError("walk needs --in FILE (graph walk) or --asym P (walk on Z)")
    g = read_edgelist(a.inp)
    trajs = walks.simulate_walks(g, a.start, a.steps, a.trajectories, a.seed)
    occ = walks.occupancy(trajs, g.n_vertices)
    p = walks.WalkDistribution.point_mass(g.n_vertices, a.start)
    rows = []
    for t in range(a.steps + 1):
        for v in range(g.n_vertices):
            rows.append({
                "step": t,
                "vertex": v,
                "exact_probability": float(p.probs[v]),
                "empirical_frequency": float(occ[t, v]),
                "is_return": int(v == a.start),
            })
        if t < a.steps:
            p = walks.evolve_distribution(g, p, 1)
    return _csv(rows, list(rows[0])), False


def _config(a) -> detector.DetectorConfig:
    return detector.DetectorConfig(a.pairs, a.walk_len, a.threshold, a.reps)


def cmd_detect(a):
    cfg = _config(a)
    if a.p_intra is None:
        a.p_intra = 2 * math.log(a.n) / a.n
    if a.mode == "sweep":
        rows = detector.phase_sweep(a.n, _ints(a.k_values), a.p_intra, cfg, a.runs, a.seed, workers=a.workers)
        return _csv(rows, ["k", "detection_rate", "std_error", "runs", "locality_violations"]), False
    if a.mode == "calibrate":
        pos = ensembles.PlantedBridge(a.n // 2, a.n - a.n // 2, a.k, a.p_intra)
        neg = ensembles.ErdosRenyi(a.n, a.p_intra)
        cal = detector.calibrate_threshold(pos, neg, cfg, a.runs, a.seed)
        out = {"threshold": cal.threshold, "balanced_error": cal.balanced_error, "roc": cal.roc}
        return _json(out), cal.balanced_error >= 0.5
    if a.inp is None:
        raise UsageError("detect needs --in FILE")
    g = read_edgelist(a.inp)
    log = detector.AccessLog(g.n_vertices)
    v = detector.detect(g, cfg, a.seed, log=log)
    out = v.to_dict()
    out["locality_violations"] = log.violations
    out["queries"] = log.n_queries
    if a.truth:
        out["ground_truth"] = structure_report(g).to_dict()
    return _json(out), v.stuck_pairs > 0 or log.violations > 0


def _dist(a):
    if a.dist == "bernoulli":
        return largedev.Bernoulli(a.p)
    return largedev.Gaussian(a.mu, a.sigma)


def _grid(lo, hi, step):
    k = int(round((hi - lo) / step))
    return lo + step * np.arange(k + 1)


def cmd_ldp(a):
    if a.task == "diffusion":
        if a.force == "ou":
            sysd = largedev.DiffusionSystem(1, None, lambda e: -e, a.dt, a.horizon, a.x0)
            obs = lambda e: e[:, 0] ** 2
        else:
            sysd = largedev.DiffusionSystem(2, lambda d: -0.5 * d, None, a.dt, a.horizon, [a.x0, -a.x0])
            obs = lambda e: (e[:, 0] - e[:, 1]) ** 2
            exact = largedev.pair_gap_second_moment(2 * a.x0, a.horizon)
        d = largedev.direct_moment(sysd, obs, a.paths, a.seed, workers=a.workers)
        r = largedev.reweighted_moment(sysd, obs, a.paths, a.seed, workers=a.workers)
        rows = [
            {"method": "direct", "mean": d.mean, "std_error": d.std_error, "ess_fraction": 1.0},
            {"method": "girsanov", "mean": r.mean, "std_error": r.std_error, "ess_fraction": r.ess_fraction},
        ]
        if a.force == "ou":
            exact = largedev.ou_second_moment(a.x0, a.horizon)
        rows.append({"method": "analytic", "mean": exact, "std_error": 0.0, "ess_fraction": 1.0})
        return _csv(rows, ["method", "mean", "std_error", "ess_fraction"]), r.degenerate
    dist = _dist(a)
    if a.task == "decay":
        rows = largedev.ldp_decay_check(dist, a.x, _ints(a.n_list), a.samples, a.seed)
        return _csv(rows, list(rows[0])), any(r["flagged"] for r in rows)
    t = _grid(a.t_min, a.t_max, a.t_step)
    s = largedev.empirical_scgf(dist, a.n, t, a.samples, a.seed, method=a.method)
    if a.task == "scgf":
        rows = [{"t": float(ti), "lambda_hat": float(li), "analytic": float(dist.scgf(ti)), "reliable": int(ok)}
                for ti, li, ok in zip(s.t_grid, s.lambda_hat, s.reliable)]
        return _csv(rows, list(rows[0])), not s.reliable.all()
    rate = largedev.legendre_transform(s, _grid(a.x_min, a.x_max, a.x_step))
    rows = [{"x": float(x), "q_hat": float(q), "analytic": largedev.cramer_rate_analytic(dist, float(x)),
             "boundary": int(b)} for x, q, b in zip(rate.x_grid, rate.q_hat, rate.boundary)]
    return _csv(rows, list(rows[0])), bool(rate.boundary.any())


def cmd_ergodic(a):
    sysm = ergodic.make_map(a.map, a.alpha)
    curve = ergodic.l2_error_curve(sysm, a.observable, _ints(a.n_grid), a.points, a.seed, workers=a.workers)
    rows = [{"n": int(n), "l2_error": float(e), "max_abs_deviation": float(m),
             "fitted_exponent": curve.fitted_exponent, "exponent_ci_low": curve.exponent_ci[0],
             "exponent_ci_high": curve.exponent_ci[1]}
            for n, e, m in zip(curve.n_grid, curve.l2_error, curve.max_deviation)]
    return _csv(rows, list(rows[0])), curve.flagged


def cmd_match(a):
    out = matching.grid_matchings(a.rows, a.cols, a.brute_force)
    text = _json(out) if a.out else f"{out['fkt']}\n"
    return text, out.get("agree") is False


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="topinfer", description="Graph zeta invariants and stochastic topological inference.")
    ap.add_argument("--workers", type=int, default=1, help="thread count; results do not depend on it")
    sub = ap.add_subparsers(dest="command", required=True)

    def out_flag(p):
        p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("generate", help="sample a random graph")
    p.add_argument("--ensemble", choices=["er", "bipartite", "planted"], required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--n-bits", type=int, default=6)
    p.add_argument("--m-checks", type=int, default=4)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--n1", type=int, default=50)
    p.add_argument("--n2", type=int, default=50)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p-intra", type=float, default=0.2)
    p.add_argument("--seed", type=int, required=True)
    out_flag(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("zeta", help="Ihara zeta polynomial and invariants")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--max-m", type=int, default=12)
    out_flag(p)
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("walk", help="random-walk occupancy or 1D return probabilities")
    p.add_argument("--in", dest="inp")
    p.add_argument("--asym", type=float, help="right-step probability of a walk on Z (replaces --in)")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--trajectories", type=int, default=10_000)
    p.add_argument("--seed", type=int, required=True)
    out_flag(p)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("detect", help="local connectivity detector")
    p.add_argument("mode", nargs="?", choices=["sweep", "calibrate"])
    p.add_argument("--in", dest="inp")
    p.add_argument("--pairs", type=int, default=8)
    p.add_argument("--walk-len", type=int)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--reps", type=int, default=11)
    p.add_argument("--truth", action="store_true", help="attach the exact structure report")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--k", type=int, default=0, help="cross edges of the positive class (calibrate)")
    p.add_argument("--k-values", default="0,1,2,4,8,16,32")
    p.add_argument("--p-intra", type=float, default=None, help="edge probability; default 2 ln(n) / n")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    out_flag(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("ldp", help="large-deviations estimators")
    p.add_argument("task", choices=["scgf", "rate", "decay", "diffusion"])
    p.add_argument("--dist", choices=["bernoulli", "gaussian"], default="bernoulli")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--method", choices=["factorized", "direct"], default="factorized")
    p.add_argument("--t-min", type=float, default=-3.0)
    p.add_argument("--t-max", type=float, default=3.0)
    p.add_argument("--t-step", type=float, default=0.01)
    p.add_argument("--x-min", type=float, default=0.2)
    p.add_argument("--x-max", type=float, default=0.8)
    p.add_argument("--x-step", type=float, default=0.01)
    p.add_argument("--x", type=float, default=0.7)
    p.add_argument("--n-list", default="20,50,100")
    p.add_argument("--force", choices=["ou", "pair"], default="ou")
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--seed", type=int, required=True)
    out_flag(p)
    p.set_defaults(func=cmd_ldp)

    p = sub.add_parser("ergodic", help="Birkhoff-average convergence curve")
    p.add_argument("--map", choices=["rotation", "doubling"], required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--observable", choices=["x", "sin", "const"], default="x")
    p.add_argument("--n-grid", default="100,1000,10000,100000")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    out_flag(p)
    p.set_defaults(func=cmd_ergodic)

    p = sub.add_parser("match", help="perfect matchings of a grid")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--brute-force", action="store_true")
    out_flag(p)
    p.set_defaults(func=cmd_match)
    return ap


def _params(a) -> dict:
    return {k: v for k, v in sorted(vars(a).items()) if k not in ("func",)}


def run(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    t0 = time.time()
    try:
        text, flagged = a.func(a)
    except (UsageError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, AssertionError, GraphError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    if a.out:
        path = Path(a.out)
        path.write_text(text)
        manifest = {
            "subcommand": a.command,
            "parameters": _params(a),
            "seed": getattr(a, "seed", None),
            "version": _version(),
            "started_at": t0,
            "duration_s": time.time() - t0,
            "outputs": {path.name: hashlib.sha256(text.encode()).hexdigest()},
            "flagged": flagged,
        }
        path.with_name(path.name + ".manifest.json").write_text(_json(manifest))
    else:
        sys.stdout.write(text)
    if flagged:
        print("warning: result flagged as unreliable", file=sys.stderr)
        return EXIT_FLAGGED
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
