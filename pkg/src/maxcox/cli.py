"""Command line front end.

    maxcox evaluate|normalize|bound|simulate|certify [example1|example2] [--scenario FILE] [flags]
    maxcox example1|example2 [flags]

Tables go to stdout, or to ``--out DIR`` as ``<subcommand>.csv`` (plus
``summary.json`` for certifications; without ``--out`` the summary goes to
stderr).  Every number is written with 17
significant digits.  Exit status: 0 on success or PASS, 1 on FAIL, 2 on a
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import rate_bounds as rb
from .errors import DomainError, ScenarioError, TableFormatError
from .exact_law import normalized_max_cdf
from .montecarlo import SimConfig, bound_at, certify, fmt, simulate
from .reproduce import example1_constant, example1_table, example2_row
from .scenario import BUILTIN, Scenario

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

BOUND_COLUMNS = ("x", "bound_kind", "status", "z", "discrepancy", "q", "s", "M", *rb.TERM_NAMES, "total", "note")


@dataclass(frozen=True)
class Run:
    scenario: Scenario
    seed: int
    n_samples: int
    delta: float
    workers: int
    out: Path | None

    def sim_config(self, grid=None) -> SimConfig:
        sc = self.scenario
        grid = sc.grid() if grid is None else grid
        return SimConfig(sc.size_law(), sc.obs_law(), sc.plan(), sc.horizon(), self.n_samples, self.seed,
                         tuple(float(x) for x in grid), self.workers)  # fmt: skip

    def limit_mix(self):
        sc = self.scenario
        mix = sc.limit_mix()
        if mix is None:
            t = sc.horizon()
            mix = sc.size_law().limit_mixing(float(sc.plan().d(t)), t)
        return mix


# -- argument handling ------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, builtin: bool) -> None:
    if builtin:
        p.add_argument("name", nargs="?", choices=sorted(BUILTIN), help="built-in scenario")
    p.add_argument("--scenario", type=Path, help="JSON scenario file")
    p.add_argument("--seed", type=int, help="Monte Carlo seed (unsigned 64-bit)")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--workers", type=int, help="sampling workers (default $MAXCOX_WORKERS or 1)")
    g = p.add_argument_group("overrides")
    g.add_argument("--p", type=float, help="negative binomial p")
    g.add_argument("--r", type=float, help="negative binomial r")
    g.add_argument("--gamma", type=float, help="Pareto tail index")
    g.add_argument("--c", type=float, help="Pareto scale")
    g.add_argument("--t", type=float, help="horizon t")
    g.add_argument("--lambda", dest="lam", type=float, help="Poisson mean (also sets t unless --t is given)")
    g.add_argument("--kind", help="bound kind(s), comma separated")
    g.add_argument("--x", type=float, nargs="+", help="explicit x grid")
    g.add_argument("--n-samples", type=int, help="Monte Carlo sample count")
    g.add_argument("--delta", type=float, help="DKW confidence parameter")
    g.add_argument("--q", type=float, help="fixed q instead of optimizing")
    g.add_argument("--M", type=int, help="fixed series length M")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxcox", description="Maxima over random sample sizes.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "evaluate": "exact and limiting d.f. of the normalized maximum on the x grid",
        "normalize": "a(t), b(t), d(t) over the t grid",
        "bound": "bound reports over the x grid for each bound kind",
        "simulate": "empirical d.f. of simulated maxima vs the exact d.f.",
        "certify": "exact error vs bound plus Monte Carlo check",
    }
    for name, text in helps.items():
        _add_common(sub.add_parser(name, help=text), builtin=True)
    _add_common(sub.add_parser("example1", help="reproduce the negative binomial / Pareto example"), builtin=False)
    _add_common(sub.add_parser("example2", help="reproduce the Poisson / exponential example"), builtin=False)
    return parser


def _scenario_dict(sc: Scenario) -> dict:
    return {f.name: getattr(sc, f.name) for f in fields(sc) if f.name != "base_dir"}


def resolve_scenario(args: argparse.Namespace) -> Scenario:
    name = args.command if args.command in BUILTIN else getattr(args, "name", None)
    if args.scenario is not None:
        if name is not None:
            raise ScenarioError("give either a built-in scenario name or --scenario, not both")
        sc = Scenario.load(args.scenario)
    elif name == "example1":
        kw = {k: getattr(args, k) for k in ("p", "r", "gamma", "c") if getattr(args, k) is not None}
        sc = BUILTIN["example1"](**kw)
    elif name == "example2":
        sc = BUILTIN["example2"](**({"t": args.t} if args.t is not None else {}))
    else:
        sc = Scenario(bounds=["thm7"])
    data = _scenario_dict(sc)
    if name is None:
        if args.lam is not None:
            data["size"] = {"kind": "poisson", "lam": args.lam}
            if args.t is None:
                data["t"] = args.lam
        elif args.p is not None or args.r is not None:
            data["size"] = {"kind": "neg_binomial", "r": args.r or 1.0, "p": args.p if args.p is not None else 0.5}
            data["mixing"] = {"kind": "gamma", "shape": args.r or 1.0}
        if args.t is not None:
            data["t"] = args.t
        obs = dict(data["observation"])
        for key in ("gamma", "c"):
            if getattr(args, key) is not None:
                if obs.get("family") != "pareto":
                    raise ScenarioError(f"--{key} applies to Pareto observations only")
                obs[key] = getattr(args, key)
        data["observation"] = obs
    if args.kind is not None:
        data["bounds"] = [k.strip() for k in args.kind.split(",") if k.strip()]
    if args.x is not None:
        data["x_grid"] = list(args.x)
    params = dict(data["params"])
    if args.q is not None:
        params["q"] = args.q
    if args.M is not None:
        params["M"] = args.M
    data["params"] = params
    return Scenario.from_dict(data, base_dir=sc.base_dir)


def make_run(args: argparse.Namespace) -> Run:
    sc = resolve_scenario(args)
    mc = sc.mc
    seed = args.seed if args.seed is not None else int(mc.get("seed", 0))
    if not 0 <= seed < 2**64:
        raise ScenarioError(f"--seed: expected an unsigned 64-bit integer, got {seed}")
    n = args.n_samples if args.n_samples is not None else int(mc.get("n_samples", 100_000))
    delta = args.delta if args.delta is not None else float(mc.get("delta", 0.01))
    if n < 1 or not 0 < delta < 1:
        raise ScenarioError("mc: n_samples must be >= 1 and delta in (0, 1)")
    workers = args.workers
    if workers is None:
        env = os.environ.get("MAXCOX_WORKERS")
        try:
            workers = int(env) if env else 1
        except ValueError:
            raise ScenarioError(f"MAXCOX_WORKERS: expected an integer, got {env!r}") from None
    if workers < 1:
        raise ScenarioError(f"--workers: expected a positive integer, got {workers}")
    return Run(sc, seed, n, delta, workers, args.out)


# -- output -----------------------------------------------------------------------


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def _emit(run: Run, name: str, text: str) -> None:
    if run.out is None:
        sys.stdout.write(text)
        return
    run.out.mkdir(parents=True, exist_ok=True)
    (run.out / name).write_text(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _clean(v):
    """JSON-safe float: 17 significant digits round-trip, non-finite as strings."""
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


# -- subcommands ------------------------------------------------------------------


def cmd_evaluate(run: Run) -> int:
    sc = run.scenario
    size, plan, t, mix = sc.size_law(), sc.plan(), sc.horizon(), run.limit_mix()
    rows = []
    for x in sc.grid():
        exact = normalized_max_cdf(size, plan, t, x)
        limit = mix.power_mixture(plan.evt, x)
        rows.append((x, plan.z_t(t, x), exact, limit, abs(exact - limit)))
    _emit(run, "evaluate.csv", _csv(("x", "z", "exact_cdf", "limit_cdf", "abs_error"), rows))
    return EXIT_OK


def cmd_normalize(run: Run) -> int:
    sc = run.scenario
    plan = sc.plan()
    ts = sc.t_grid or [sc.horizon()]
    rows = []
    for t in ts:
        a, b, dt = plan.normalizers(float(t))
        rows.append((float(t), dt, a, b))
    _emit(run, "normalize.csv", _csv(("t", "d", "a", "b"), rows))
    return EXIT_OK


def _status_token(status: str) -> str:
    return status.replace(" ", "_")


def cmd_bound(run: Run) -> int:
    sc = run.scenario
    size, plan, t, mix = sc.size_law(), sc.plan(), sc.horizon(), run.limit_mix()
    rows = []
    for kind in sc.bounds:
        for x in sc.grid():
            rep = bound_at(kind, size, plan, t, x, mix, sc.params)
            terms = [rep.terms.get(name) for name in rb.TERM_NAMES]
            rows.append((x, rep.bound_kind, _status_token(rep.status), rep.z, rep.discrepancy, rep.q, rep.s, rep.M,
                         *terms, rep.total, rep.note))  # fmt: skip
    _emit(run, "bound.csv", _csv(BOUND_COLUMNS, rows))
    return EXIT_OK


def cmd_simulate(run: Run) -> int:
    res = simulate(run.sim_config(), run.delta)
    _emit(run, "simulate.csv", res.to_csv())
    if run.out is not None:
        summary = dict(passed=res.passed, seed=run.seed, n_samples=run.n_samples, workers=run.workers,
                       delta=run.delta, dkw_eps=res.dkw_eps, max_deviation=float(res.deviation.max()),
                       config=run.scenario.echo())  # fmt: skip
        (run.out / "simulate.json").write_text(_json(summary))
    return EXIT_OK if res.passed else EXIT_FAIL


def _certify_all(run: Run) -> tuple[bool, dict]:
    sc = run.scenario
    cfg = run.sim_config()
    echo = sc.echo()
    verdicts = {}
    errors = []
    for i, kind in enumerate(sc.bounds):
        cert = certify(cfg, kind, sc.params, limit_mix=run.limit_mix(), delta=run.delta, run_mc=(i == 0), config_echo=echo)
        suffix = "" if len(sc.bounds) == 1 else f"_{kind}"
        _emit(run, f"certify{suffix}.csv", cert.to_csv())
        verdicts[kind] = {k: v for k, v in cert.summary.items() if k != "config"}
        errors = [r["exact_error"] for r in cert.rows]
        print(f"certify {sc.name} {kind}: {cert.verdict}", file=sys.stderr)
    passed = all(s["verdict"] == "PASS" for s in verdicts.values())
    summary = dict(verdict="PASS" if passed else "FAIL", name=sc.name, seed=run.seed, bounds=verdicts, config=echo)
    if sc.name == "example1":
        # the advertised closed-form constant is checked on the same grid
        size = sc.size_law()
        c = example1_constant(size.p, size.r)
        sup = max(errors)
        holds = sup <= c
        summary["advertised_constant"] = dict(value=c, sup_exact_error=sup, holds=holds,
                                              sharper_constant=example1_constant(size.p, size.r, sharper=True))  # fmt: skip
        print(f"certify example1 advertised constant {fmt(c)}: sup error {fmt(sup)} -> {'PASS' if holds else 'FAIL'}",
              file=sys.stderr)  # fmt: skip
        passed = passed and holds
        summary["verdict"] = "PASS" if passed else "FAIL"
    return passed, summary


def cmd_certify(run: Run) -> int:
    passed, summary = _certify_all(run)
    text = _json(_walk(summary))
    if run.out is None:
        sys.stderr.write(text)  # stdout carries the CSV table
    else:
        (run.out / "summary.json").write_text(text)
    return EXIT_OK if passed else EXIT_FAIL


def _walk(obj):
    if isinstance(obj, dict):
        return {k: _walk(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_walk(v) for v in obj]
    return _clean(obj)


def cmd_example1(run: Run) -> int:
    sc = run.scenario
    size, obs = sc.size_law(), sc.observation
    grid = sc.grid()
    ps = sorted(set(sc.p_grid) | {size.p}, reverse=True)
    table = example1_table(ps, size.r, obs["gamma"], obs["c"], grid)
    header = ("p", "t", "sup_error", "argmax_x", "advertised_constant", "advertised_holds", "sharper_constant",
              "sup_error_x_ge_1", "sharper_holds_x_ge_1", "sup_error_over_p")  # fmt: skip
    rows = [(r.p, r.t, r.sup_error, r.argmax_x, r.advertised_constant, r.advertised_holds, r.sharper_constant,
             r.sup_error_x_ge_1, r.sharper_holds_x_ge_1, r.sup_error / r.p) for r in table]  # fmt: skip
    _emit(run, "example1_table.csv", _csv(header, rows))
    return cmd_certify(run)


def cmd_example2(run: Run) -> int:
    sc = run.scenario
    ts = sorted({1.0, 10.0, 1000.0, sc.horizon()})
    rows = []
    for t in ts:
        row = example2_row(t, sc.grid())
        rows.append((t, row.sup_error, row.argmax_x, row.sup_error_support, row.exact))
    _emit(run, "example2_table.csv", _csv(("t", "sup_error", "argmax_x", "sup_error_x_ge_minus_log_t", "exact"), rows))
    return cmd_certify(run)


COMMANDS = {
    "evaluate": cmd_evaluate,
    "normalize": cmd_normalize,
    "bound": cmd_bound,
    "simulate": cmd_simulate,
    "certify": cmd_certify,
    "example1": cmd_example1,
    "example2": cmd_example2,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        run = make_run(args)
        return COMMANDS[args.command](run)
    except (ScenarioError, TableFormatError, DomainError, ArithmeticError) as exc:
        print(f"maxcox: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
