"""Command-line front end.

Every subcommand writes a JSON report (plus CSV projections) into ``--out``
and exits with 0 when all checks pass, 1 when some expectation fails and 2
on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import boundary, elliptic, oracles, transport
from .errors import FriedrichsError, NotAGenerator, ParseError
from .functions import GridFunction
from .fuzz import CHECKS, run_fuzz
from .report import (Record, Report, bound_record, close_record, equal_record, load_report,
                     plot_report, write_report)

DEFAULT_ALPHAS = [round(float(a), 12) for a in np.linspace(-2, 2, 41)] + [math.inf]
DEFAULT_LAMBDAS = [1.0, 10.0, 100.0]
DEFAULT_TIMES = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 2.7, 3.0]
SWEEP_GRID = 256
SEMIGROUP_GRID = 1024

# keys a config file may set; command-line flags take precedence
CONFIG_KEYS = {"seed": int, "jobs": int, "grid": int, "tol": float, "alphas": str,
               "lambdas": str, "times": str, "count": int, "max_dim": int, "out": str}


def parse_list(text: str) -> list[float]:
    """Comma separated numbers; ``inf`` and ``1/e`` are accepted."""
    if text is None or not text.strip():
        return []
    try:
        return [transport.parse_alpha(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ParseError(f"cannot parse number list {text!r}: {exc}") from exc


def read_config(path) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def _opt(args, key, default):
    val = getattr(args, key, None)
    if val is not None:
        return val
    return args.file_config.get(key, default)


def _alpha_inputs(a: float) -> dict:
    return {"alpha": transport.format_alpha(a)}


# -- transport sweep -------------------------------------------------------

def _sweep_records(alpha: float, grid: int, tol: float, times: list[float]):
    row = transport._sweep_one(alpha, grid)
    inp = _alpha_inputs(alpha)
    recs = []
    bij_expected = abs(alpha - transport.INV_E) > 1e-12
    recs.append(equal_record("transport.bijective", inp, bij_expected, row.bijective, "paper"))
    signed = abs(alpha) >= 1
    recs.append(equal_record("transport.signed_map", inp, signed, row.signed_map, "paper"))
    recs.append(equal_record("transport.m_accretive", inp, signed, row.m_accretive, "paper"))
    if row.bijective:
        recs.append(close_record("transport.U_norm", inp,
                                 transport.contraction_norm_closed_form(alpha), row.U_norm,
                                 tol, "derived"))
        recs.append(equal_record("transport.U_contraction", inp, signed,
                                 row.U_norm <= 1 + 1e-10, "derived"))
    disc = oracles.discrete_accretivity(("transport", alpha), 2048)
    recs.append(equal_record("transport.discrete_accretivity_sign", {**inp, "n": 2048},
                             signed, disc >= -1e-6, "derived"))
    if alpha == 0:
        try:
            transport.semigroup_norm(alpha, 1.0, grid)
            raised = False
        except NotAGenerator:
            raised = True
        recs.append(equal_record("transport.semigroup_not_generator", inp, True, raised, "paper"))
        norms = [math.nan] * len(times)
    else:
        norms = [transport.semigroup_norm(alpha, t, grid) for t in times]
        if signed:
            recs.append(bound_record("transport.semigroup_contractive_t1", inp, 1.0,
                                     row.semigroup_norm_t1, tol, "paper"))
        else:
            recs.append(close_record("transport.semigroup_norm_t1", inp, abs(alpha) ** -1,
                                     row.semigroup_norm_t1, tol, "paper"))
    return row, recs, norms


def cmd_transport_sweep(args) -> Report:
    alphas = parse_list(_opt(args, "alphas", None)) if _opt(args, "alphas", None) is not None \
        else DEFAULT_ALPHAS
    grid = _opt(args, "grid", SWEEP_GRID)
    tol = _opt(args, "tol", 1e-8)
    times = parse_list(_opt(args, "times", None)) if _opt(args, "times", None) else DEFAULT_TIMES
    jobs = _opt(args, "jobs", 1)
    rep = Report("transport-sweep", _opt(args, "seed", 0),
                 {"alphas": [transport.format_alpha(a) for a in alphas], "grid": grid,
                  "tol": tol, "times": times})

    def work(a):
        return _sweep_records(a, grid, tol, times)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(work, alphas))
    else:
        results = [work(a) for a in alphas]
    rows = []
    lines = {}
    for a, (row, recs, norms) in zip(alphas, results):
        rows.append(row)
        rep.add(*recs)
        lines[f"alpha={transport.format_alpha(a)}"] = norms
    rep.tables["sweep"] = [{"alpha": transport.format_alpha(r.alpha), "bijective": r.bijective,
                            "signed_map": r.signed_map, "m_accretive": r.m_accretive,
                            "U_norm": r.U_norm, "semigroup_norm_t1": r.semigroup_norm_t1}
                           for r in rows]
    if alphas:
        rep.series["semigroup_norm"] = {"x": times, "lines": lines, "xlabel": "t",
                                        "ylabel": "||S(t)||"}
    rep.extra_files = {"transport_sweep.csv": transport.sweep_csv(rows)}
    return rep


# -- resolvent -------------------------------------------------------------

def cmd_resolvent(args) -> Report:
    lams = parse_list(_opt(args, "lambdas", None)) if _opt(args, "lambdas", None) \
        else DEFAULT_LAMBDAS
    if any(not (x > 0 and math.isfinite(x)) for x in lams):
        raise ParseError("lambda values must be positive and finite")
    grid = _opt(args, "grid", 4096)
    grid += grid % 2
    tol = _opt(args, "tol", 1e-8)
    rep = Report("resolvent", _opt(args, "seed", 0), {"lambdas": lams, "grid": grid, "tol": tol})
    one = GridFunction.constant(1.0, grid)
    table = []
    for lam in lams:
        r = transport.resolvent_L0(lam, one)
        quad = r.norm("simpson") ** 2
        formula = transport.resolvent_norm_sq_published(lam)
        exact = transport.resolvent_norm_sq_exact(lam)
        inp = {"lambda": lam, "grid": grid}
        rep.add(close_record("resolvent.norm_sq_vs_published_formula", inp, formula, quad, tol,
                             "paper"),
                close_record("resolvent.norm_sq_vs_exact_integral", inp, exact, quad, tol,
                             "derived"),
                close_record("resolvent.value_at_0", inp, (1 - math.exp(-lam)) / lam,
                             float(r.values[0]), 1e-8, "derived"))
        table.append({"lambda": lam, "quadrature_norm_sq": quad, "formula": formula,
                      "exact": exact, "lambda_bound": lam * math.sqrt(formula),
                      "lambda_norm_exact": lam * math.sqrt(exact)})
    if lams:
        hy = transport.hille_yosida_violation(lams)
        rep.add(equal_record("resolvent.lambda_bound_increasing", {"lambdas": lams}, True,
                             hy.strictly_increasing, "derived"))
        rep.series["lambda_bound"] = {"x": lams, "lines": {
            "lambda*sqrt(formula)": list(hy.products),
            "lambda*||R(lambda)1||": list(hy.exact_products)},
            "xlabel": "lambda", "ylabel": "lambda * norm"}
        if 100.0 in lams:
            rep.add(Record("resolvent.lambda_bound_100", {"lambda": 100.0}, "[12, 12.5]",
                           hy.products[lams.index(100.0)],
                           None, 12 <= hy.products[lams.index(100.0)] <= 12.5, "derived"))
    rep.tables["resolvent"] = table
    return rep


# -- semigroup -------------------------------------------------------------

def cmd_semigroup(args) -> Report:
    grid = _opt(args, "grid", SEMIGROUP_GRID)
    tol = _opt(args, "tol", 1e-8)
    rep = Report("semigroup", _opt(args, "seed", 0), {"grid": grid, "tol": tol})
    for a in (0.5, -0.5, 0.9, -0.9):
        for n in range(1, 6):
            obs = transport.semigroup_norm(a, n, grid)
            rep.add(close_record("semigroup.integer_time_norm", {"alpha": a, "t": n},
                                 abs(a) ** -n, obs, tol, "paper"))
    for a in (1.0, -1.0, 2.0, -2.0, math.inf):
        for t in (0.5, 1.0, 2.7):
            obs = transport.semigroup_norm(a, t, grid)
            inp = {**_alpha_inputs(a), "t": t}
            rep.add(bound_record("semigroup.contractive", inp, 1.0, obs, tol, "paper"),
                    bound_record("semigroup.growth_bound", inp, math.exp(t),
                                 transport.perturbed_semigroup_norm(a, t, grid), tol, "paper"))
    try:
        transport.semigroup_norm(0.0, 1.0, grid)
        raised = False
    except NotAGenerator:
        raised = True
    rep.add(equal_record("semigroup.alpha0_not_generator", {"alpha": 0.0}, True, raised, "paper"))
    times = parse_list(_opt(args, "times", None)) if _opt(args, "times", None) else DEFAULT_TIMES
    rep.series["semigroup_norm"] = {
        "x": times, "xlabel": "t", "ylabel": "||S(t)||",
        "lines": {f"alpha={transport.format_alpha(a)}":
                  [transport.semigroup_norm(a, t, grid) for t in times]
                  for a in (0.5, -0.9, 1.0, 2.0, math.inf)}}
    return rep


# -- model fuzz ------------------------------------------------------------

def cmd_model_fuzz(args) -> Report:
    seed = _opt(args, "seed", 0)
    count = _opt(args, "count", 1000)
    max_dim = _opt(args, "max_dim", 8)
    if count < 1 or max_dim < 1:
        raise ParseError("count and max_dim must be at least 1")
    rep = Report("model-fuzz", seed, {"count": count, "max_dim": max_dim})
    s = run_fuzz(seed, count, max_dim, _opt(args, "jobs", 1))
    inp = {"count": count, "max_dim": max_dim, "seed": seed}
    for name in CHECKS:
        rep.add(equal_record(f"fuzz.{name}.failures", inp, 0, s.failures[name], "derived"))
    rep.tables["fuzz"] = {"max_round_trip_err": s.max_round_trip_err, "signed": s.signed,
                          "unitary": s.unitary, "failure_examples": s.examples}
    return rep


# -- elliptic --------------------------------------------------------------

def cmd_elliptic(args) -> Report:
    tol = _opt(args, "tol", 1e-12)
    rep = Report("elliptic", _opt(args, "seed", 0), {"tol": tol})
    model = elliptic.elliptic_model()
    d_dtn = elliptic.m_dirichlet("dtn", model)
    d_proj = elliptic.m_dirichlet("kernel_projector", model)
    rep.add(close_record("elliptic.dtn_vs_projector", {}, 0.0,
                         float(np.max(np.abs(d_dtn.mat - d_proj.mat))), tol, "derived"))
    rep.add(equal_record("elliptic.dirichlet_check_M", {}, True,
                         boundary.check_M(d_dtn).ok, "paper"))
    drep = elliptic.dirichlet_report(model)
    rep.add(equal_record("elliptic.dirichlet_self_dual", {}, True, drep.self_dual, "derived"),
            equal_record("elliptic.dirichlet_unitary", {}, True, drep.unitary, "derived"))
    fd_tol = 1e-5
    for g in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0)):
        exact = elliptic.dtn(*g)
        fd = oracles.fd_dtn(*g, n=4096)
        rep.add(close_record("elliptic.dtn_vs_fd", {"g": list(g), "n": 4096}, 0.0,
                             max(abs(a - b) for a, b in zip(exact, fd)), fd_tol, "derived"))
    for a in (0.0, 0.5, 1.0, 2.0, 10.0):
        w = elliptic.w2_alpha_report(a)
        inp = {"alpha": a}
        rep.add(close_record("elliptic.m_alpha_vs_projector", inp, 0.0, w.m_defect, tol,
                             "derived"),
                equal_record("elliptic.w2_form_exact", inp, True, w.form_exact, "derived"),
                equal_record("elliptic.w2_nonpositive", inp, True, w.nonpositive, "paper"),
                equal_record("elliptic.m_alpha_check_M", inp, True,
                             boundary.check_M(elliptic.m_alpha(a, model)).ok, "derived"))
    rows = elliptic.family_rows([0.0, 0.5, 1.0, 2.0, 10.0])
    rep.tables["family"] = rows
    rep.extra_files = {"elliptic_family.csv": elliptic.family_csv(rows),
                       "elliptic_family.json": elliptic.family_json(rows)}
    return rep


# -- driver ----------------------------------------------------------------

COMMANDS = {
    "transport-sweep": (cmd_transport_sweep, "transport_sweep"),
    "resolvent": (cmd_resolvent, "resolvent"),
    "semigroup": (cmd_semigroup, "semigroup"),
    "model-fuzz": (cmd_model_fuzz, "model_fuzz"),
    "elliptic": (cmd_elliptic, "elliptic"),
}


def _run(name: str, args, out: Path) -> int:
    func, stem = COMMANDS[name]
    t0 = time.perf_counter()
    rep = func(args)
    rep.timing = {"elapsed_s": time.perf_counter() - t0}
    write_report(rep, out, stem)
    for fname, text in rep.extra_files.items():
        (out / fname).write_text(text)
    failed = [r for r in rep.records if not r.passed]
    print(f"{name}: {len(rep.records) - len(failed)}/{len(rep.records)} checks passed "
          f"-> {out / (stem + '.json')}")
    for r in failed[:20]:
        print(f"  FAIL {r.name} {json.dumps(r.to_dict()['inputs'])}: "
              f"expected {r.to_dict()['expected']!r}, observed {r.to_dict()['observed']!r}")
    return rep.exit_code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default: reports)")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--jobs", type=int, help="worker threads for sweeps (default 1)")
    common.add_argument("--grid", type=int, help="grid intervals for grid-based checks")
    common.add_argument("--tol", type=float, help="tolerance for numeric comparisons")
    common.add_argument("--config", help="key=value file; flags override its entries")

    p = argparse.ArgumentParser(prog="friedrichs-bc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("transport-sweep", parents=[common], help="classify T^alpha over a grid")
    s.add_argument("--alphas", help="comma list, e.g. '-2,-1,0,0.5,1,2,inf' (empty for none)")
    s.add_argument("--times", help="comma list of times for the semigroup-norm series")
    s = sub.add_parser("resolvent", parents=[common], help="resolvent norms of L^0")
    s.add_argument("--lambdas", help="comma list of positive lambdas (default 1,10,100)")
    s = sub.add_parser("semigroup", parents=[common], help="semigroup norm laws")
    s.add_argument("--times", help="comma list of times for the norm series")
    s = sub.add_parser("model-fuzz", parents=[common], help="random boundary-model suite")
    s.add_argument("--count", type=int, help="number of instances (default 1000)")
    s.add_argument("--max-dim", dest="max_dim", type=int, help="largest block dimension (8)")
    sub.add_parser("elliptic", parents=[common], help="elliptic example coherence checks")
    s = sub.add_parser("plot", parents=[common], help="render a report's series as SVG")
    s.add_argument("report", help="report JSON written by another subcommand")
    s.add_argument("svg", help="output SVG path")
    s = sub.add_parser("all", parents=[common], help="run every report subcommand")
    s.add_argument("--count", type=int)
    s.add_argument("--max-dim", dest="max_dim", type=int)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key in ("alphas", "times", "lambdas", "count", "max_dim"):
        if not hasattr(args, key):
            setattr(args, key, None)
    try:
        args.file_config = read_config(args.config) if args.config else {}
        if args.command == "plot":
            n = plot_report(load_report(args.report), args.svg)
            print(f"plot: {n} line(s) -> {args.svg}")
            return 0
        out = Path(_opt(args, "out", "reports"))
        if args.command == "all":
            codes = [_run(name, args, out) for name in COMMANDS]
            return max(codes)
        return _run(args.command, args, out)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FriedrichsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
