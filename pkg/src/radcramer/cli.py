"""Command-line interface: ``radcramer {rate,verify,ldp,oracle}``.

Exit codes: 0 success, 1 verification or convergence failure, 2 input or
size error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .core import WeightVector, as_weights
from .errors import RadCramerError, SizeError
from .ldp import chernoff_check, mc_tail_probability, rate_convergence
from .legendre import EXTERIOR, INTERIOR, SolverConfig, cramer_transform
from .oracle import conjugate_by_grid, exact_distribution, tail_probability
from .variational import minimize_entropy
from .verification import alpha_grid, run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

RATE_HEADER = ["alpha", "legendre", "variational", "diff", "tilt", "kkt_residual", "status"]
RATE_DIFF_TOL = 1e-6


class InputError(Exception):
    pass


def parse_weights(source: str) -> WeightVector:
    """Parse ``"1 2 3"``, ``"1,2,3"`` or ``"@path"``; files allow ``#`` comments."""
    if source.startswith("@"):
        path = Path(source[1:])
        try:
            text = path.read_text()
        except OSError as exc:
            raise InputError(f"cannot read weights file {path}: {exc}") from exc
        text = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    else:
        text = source
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise InputError("no weights given")
    try:
        return as_weights([float(tok) for tok in tokens])
    except ValueError as exc:
        raise InputError(f"bad weight value: {exc}") from exc


def parse_grid(text: str):
    try:
        count_s, cov_s = text.split(",")
        count, coverage = int(count_s), float(cov_s)
    except ValueError as exc:
        raise InputError(f"--alpha-grid expects COUNT,COVERAGE, got {text!r}") from exc
    if count < 3 or count % 2 == 0:
        raise InputError("grid count must be odd and at least 3")
    if not 0.0 < coverage < 1.0:
        raise InputError("grid coverage must lie in (0, 1)")
    return count, coverage


def build_config(overrides) -> SolverConfig:
    fields = {f.name: f.type for f in dataclasses.fields(SolverConfig)}
    kwargs = {}
    for item in overrides or []:
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in fields:
            raise InputError(f"unknown tolerance {key!r}; choose from {', '.join(fields)}")
        try:
            kwargs[key] = int(val) if key.endswith("iters") else float(val)
        except ValueError as exc:
            raise InputError(f"bad value for {key}: {val!r}") from exc
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def alphas_for(args, t: WeightVector):
    explicit = [float(a) for a in (args.alpha or [])]
    if explicit and args.alpha_grid is None:
        return sorted(explicit)
    count, coverage = parse_grid(args.alpha_grid or "41,0.98")
    grid = alpha_grid(t.l1_norm, count, coverage)
    return sorted(set(grid.tolist()) | set(explicit))


def fmt(x):
    """17 significant digits; ``inf`` literal; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def jsonable(x):
    """JSON value carrying exactly the number printed by :func:`fmt`."""
    if isinstance(x, dict):
        return {k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)) or x is None or isinstance(x, str):
        return bool(x) if isinstance(x, np.bool_) else x
    if isinstance(x, (int, np.integer)):
        return int(x)
    s = fmt(x)
    return s if s in ("inf", "-inf", "nan") else float(s)


def report(t: WeightVector, cfg: SolverConfig, rows, suite_results, seed, extra=None) -> dict:
    out = {
        "weights": t.tolist(),
        "l1_norm": t.l1_norm,
        "config": dataclasses.asdict(cfg),
        "rows": rows,
        "suite_results": suite_results,
        "seed": seed,
        "version": __version__,
    }
    if extra:
        out.update(extra)
    out["timestamp"] = time.time()
    return jsonable(out)


def write_output(text: str, out_path):
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([fmt(r[h]) for h in header])
    return buf.getvalue()


def rate_row(t, alpha, cfg):
    rp = cramer_transform(t, alpha, cfg)
    if rp.status == EXTERIOR or (rp.status == "degenerate" and alpha != 0.0):
        return {"alpha": alpha, "legendre": rp.value, "variational": math.inf, "diff": 0.0,
                "tilt": None, "kkt_residual": None, "status": rp.status, "converged": True}
    sol = minimize_entropy(t, alpha, cfg)
    diff = abs(rp.value - sol.value)
    return {
        "alpha": alpha,
        "legendre": rp.value,
        "variational": sol.value,
        "diff": diff,
        "tilt": rp.s_star,
        "kkt_residual": sol.kkt_residual if rp.status == INTERIOR else None,
        "status": rp.status,
        "converged": sol.converged,
    }


def cmd_rate(args) -> int:
    t = parse_weights(args.weights)
    cfg = build_config(args.tol)
    alphas = alphas_for(args, t)
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as ex:
        rows = list(ex.map(lambda a: rate_row(t, a, cfg), alphas))
    bad = [r for r in rows if not r["converged"] or r["diff"] > RATE_DIFF_TOL]
    table = [{h: r[h] for h in RATE_HEADER} for r in rows]
    if args.format == "json":
        text = json.dumps(report(t, cfg, table, {"failed_rows": len(bad)}, args.seed), indent=2) + "\n"
    else:
        text = render_csv(RATE_HEADER, table)
    write_output(text, args.out)
    for r in bad:
        print(f"flagged: alpha={fmt(r['alpha'])} diff={fmt(r['diff'])} "
              f"converged={r['converged']}", file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


def cmd_verify(args) -> int:
    cfg = build_config(args.tol)
    weights = parse_weights(args.weights) if args.weights else None
    res = run_suite(args.instances, args.seed, cfg, weights)
    for name, (p, f) in sorted(res.counts.items()):
        print(f"{name:22s} passed {p:6d}  failed {f:6d}")
    for fail in res.failures[: args.max_failures]:
        print("FAIL " + json.dumps(jsonable(fail.to_dict())), file=sys.stderr)
    if args.out:
        t = weights if weights is not None else as_weights([])
        Path(args.out).write_text(
            json.dumps(report(t, cfg, [], res.to_dict(), args.seed), indent=2) + "\n")
    if res.ok:
        print(f"all checks passed ({res.passed})")
        return EXIT_OK
    print(f"{res.failed} of {res.passed + res.failed} checks failed")
    return EXIT_FAIL


def cmd_ldp(args) -> int:
    t = parse_weights(args.weights)
    cfg = build_config(args.tol)
    alphas = alphas_for(args, t)
    ns = [int(x) for x in args.ns.split(",")]
    warnings = []
    try:
        if args.mc:
            rows = []
            for a in alphas:
                rp = cramer_transform(t, a, cfg)
                est = mc_tail_probability(t, a, args.mc_samples, args.seed,
                                          tilt="auto" if 0 < a and rp.status == INTERIOR else None,
                                          workers=args.workers)
                bound = math.exp(-rp.value)
                rows.append({"alpha": a, "rate_value": rp.value, "status": rp.status,
                             "mc_estimate": est.estimate, "ci_low": est.lower,
                             "ci_high": est.upper, "ci_half_width": est.half_width,
                             "method": est.method, "bound": bound,
                             "chernoff_ok": bool(a < 0 or est.lower <= bound)})
        else:
            rep = chernoff_check(t, alphas, cfg, args.seed)
            rows = rep.rows
            warnings.extend(rep.warnings)
        all_decreasing = True
        for row in rows:
            if row["alpha"] < 0 or row["status"] == EXTERIOR:
                continue
            conv = rate_convergence(t, row["alpha"], ns, cfg, max_support=args.max_support,
                                    seed=args.seed, fallback_mc=args.mc)
            row["convergence"] = conv.as_dicts()
            row["gaps_decreasing"] = conv.gaps_decreasing
            all_decreasing &= conv.gaps_decreasing
            warnings.extend(conv.warnings)
    except SizeError as exc:
        print(f"error: {exc} (pass --mc for Monte Carlo)", file=sys.stderr)
        return EXIT_INPUT
    chern = all(r["chernoff_ok"] for r in rows)
    suite = {"chernoff_ok": chern, "gaps_decreasing": all_decreasing, "warnings": warnings,
             "mode": "mc" if args.mc else "exact", "ns": ns, "workers": args.workers}
    text = json.dumps(report(t, cfg, rows, suite, args.seed), indent=2) + "\n"
    write_output(text, args.out)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK if chern and all_decreasing else EXIT_FAIL


def cmd_oracle(args) -> int:
    t = parse_weights(args.weights)
    cfg = build_config(args.tol)
    try:
        d = exact_distribution(t)
    except SizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    alphas = [float(a) for a in (args.alpha or [])]
    rows = [{"alpha": a, "tail": tail_probability(d, a), "conjugate_by_grid": conjugate_by_grid(t, a),
             "legendre": cramer_transform(t, a, cfg).value} for a in alphas]
    dist = {"support": d.support.tolist(), "probs": d.probs.tolist()}
    if args.format == "json":
        text = json.dumps(report(t, cfg, rows, {"distribution": dist}, args.seed), indent=2) + "\n"
    else:
        text = render_csv(["support", "prob"], [{"support": x, "prob": p}
                                                for x, p in zip(d.support, d.probs)])
        if rows:
            text += "\n" + render_csv(["alpha", "tail", "conjugate_by_grid", "legendre"], rows)
    write_output(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--weights", help="weights as 'a b c', 'a,b,c' or @file")
    common.add_argument("--alpha-grid", metavar="COUNT,COVERAGE",
                        help="symmetric grid over COVERAGE of the open domain (default 41,0.98)")
    common.add_argument("--alpha", type=float, action="append",
                        help="explicit alpha value (repeatable)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="solver setting override, e.g. pg_tol=1e-12 (repeatable)")
    common.add_argument("--workers", type=int, default=1)

    p = argparse.ArgumentParser(prog="radcramer", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("rate", parents=[common], help="rate curve by both routes")

    v = sub.add_parser("verify", parents=[common], help="randomized property suite")
    v.add_argument("--instances", type=int, default=100)
    v.add_argument("--max-failures", type=int, default=20)

    ldp = sub.add_parser("ldp", parents=[common], help="Chernoff and rate-convergence experiments")
    ldp.add_argument("--ns", default="10,100,1000", help="comma-separated N schedule")
    ldp.add_argument("--mc", action="store_true", help="use Monte Carlo tails")
    ldp.add_argument("--mc-samples", type=int, default=100_000)
    ldp.add_argument("--max-support", type=int, default=200_000)

    sub.add_parser("oracle", parents=[common], help="exact distribution, tails, grid conjugate")
    return p


COMMANDS = {"rate": cmd_rate, "verify": cmd_verify, "ldp": cmd_ldp, "oracle": cmd_oracle}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "verify" and not args.weights:
        parser.error("--weights is required")
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RadCramerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
