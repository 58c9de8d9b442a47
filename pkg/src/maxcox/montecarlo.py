"""Simulation of maxima over random sample sizes and certification runs.

The maximum of N i.i.d. marks is drawn directly: if U is uniform, the maximum
of N uniforms is U**(1/N), so the maximum has tail probability
v = 1 - U**(1/N) = -expm1(log(U) / N) and equals ``tail_quantile(v)``.  The
cost per sample is O(1) in N.

Streams are derived from ``SeedSequence(seed).spawn(workers)``; worker i
draws the i-th contiguous block of samples (the first ``n % workers`` blocks
get one extra sample), so the output depends on (seed, workers) only.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import rate_bounds as rb
from .errors import DomainError
from .exact_law import RandomSizeLaw, max_cdf, normalized_max_cdf
from .mixing import MixingLaw
from .normalizer import NormalizationPlan
from .obs_dist import ObservationLaw

CSV_COLUMNS = ("x", "exact_error", "bound", "margin", "ecdf_dev", "dkw_eps", "conditions_ok")
DEFAULT_DELTA = 0.01


def fmt(v) -> str:
    """17 significant digits, empty for missing values."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


@dataclass(frozen=True)
class SimConfig:
    size_law: RandomSizeLaw
    obs: ObservationLaw
    plan: NormalizationPlan | None = None
    t: float = 1.0
    n_samples: int = 100_000
    seed: int = 0
    x_grid: tuple[float, ...] = ()
    workers: int = 1


def dkw_epsilon(n: int, delta: float = DEFAULT_DELTA) -> float:
    """Half-width of the Dvoretzky--Kiefer--Wolfowitz band at confidence 1 - delta."""
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


def _block_sizes(n: int, workers: int) -> list[int]:
    base, extra = divmod(n, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _draw_block(cfg: SimConfig, seq: np.random.SeedSequence, count: int) -> np.ndarray:
    rng = np.random.default_rng(seq)
    counts = cfg.size_law.sample_counts(rng, count, cfg.t)
    u = 1.0 - rng.random(count)  # (0, 1]
    out = np.full(count, -np.inf)
    pos = counts > 0
    if pos.any():
        v = -np.expm1(np.log(u[pos]) / counts[pos])
        out[pos] = cfg.obs.tail_quantile(np.clip(v, 0.0, 1.0))
    if cfg.plan is not None:
        a, b, _ = cfg.plan.normalizers(cfg.t)
        out = (out - a) / b
    return out


def sample_max(cfg: SimConfig, count: int | None = None, workers: int | None = None) -> np.ndarray:
    """Samples of the (normalized, if cfg.plan is set) maximum; -inf for empty samples."""
    count = cfg.n_samples if count is None else count
    workers = cfg.workers if workers is None else workers
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    seqs = np.random.SeedSequence(cfg.seed).spawn(workers)
    sizes = _block_sizes(count, workers)
    if workers == 1:
        return _draw_block(cfg, seqs[0], sizes[0])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        blocks = list(pool.map(lambda args: _draw_block(cfg, *args), zip(seqs, sizes)))
    return np.concatenate(blocks)


def sample_max_naive(cfg: SimConfig, count: int | None = None) -> np.ndarray:
    """Reference sampler for fixed sizes: the explicit maximum of n inverse-cdf draws."""
    if cfg.size_law.kind != "fixed":
        raise DomainError("the naive sampler only handles fixed sample sizes")
    count = cfg.n_samples if count is None else count
    n = cfg.size_law.n
    if n == 0:
        return np.full(count, -np.inf)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
    u = 1.0 - rng.random((count, n))
    draws = cfg.obs.tail_quantile(u)  # tail_quantile(U) has the law F as well
    out = draws.max(axis=1)
    if cfg.plan is not None:
        a, b, _ = cfg.plan.normalizers(cfg.t)
        out = (out - a) / b
    return out


def ecdf(samples: np.ndarray, x_grid: Sequence[float]) -> np.ndarray:
    """Fraction of samples strictly below each grid point (-inf counts everywhere)."""
    srt = np.sort(np.asarray(samples, dtype=float))
    return np.searchsorted(srt, np.asarray(x_grid, dtype=float), side="left") / srt.size


@dataclass
class EmpiricalResult:
    x_grid: np.ndarray
    ecdf: np.ndarray
    exact: np.ndarray
    n_samples: int
    delta: float
    dkw_eps: float

    @property
    def deviation(self) -> np.ndarray:
        return np.abs(self.ecdf - self.exact)

    @property
    def passed(self) -> bool:
        return bool(np.all(self.deviation <= self.dkw_eps))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "ecdf", "exact", "deviation", "dkw_eps"])
        for x, e, ex, dev in zip(self.x_grid, self.ecdf, self.exact, self.deviation):
            w.writerow([fmt(x), fmt(e), fmt(ex), fmt(dev), fmt(self.dkw_eps)])
        return buf.getvalue()


def exact_cdf(cfg: SimConfig, x: float) -> float:
    if cfg.plan is not None:
        return normalized_max_cdf(cfg.size_law, cfg.plan, cfg.t, x)
    return max_cdf(cfg.size_law, cfg.obs, x, cfg.t)


def simulate(cfg: SimConfig, delta: float = DEFAULT_DELTA) -> EmpiricalResult:
    samples = sample_max(cfg)
    grid = np.asarray(cfg.x_grid, dtype=float)
    exact = np.array([exact_cdf(cfg, x) for x in grid])
    return EmpiricalResult(grid, ecdf(samples, grid), exact, cfg.n_samples, delta, dkw_epsilon(cfg.n_samples, delta))


# -- certification ------------------------------------------------------------


def bound_at(
    kind: str,
    size: RandomSizeLaw,
    plan: NormalizationPlan,
    t: float,
    x: float,
    limit_mix: MixingLaw,
    params: dict | None = None,
    finite_t_cdf=None,
    fallback: bool = True,
) -> rb.BoundReport:
    """Evaluate bound ``kind`` for the configuration (size, plan, t) at x.

    Missing free parameters (q, M) are optimized.  With ``fallback``, a
    moment-based kind whose moments are unavailable is replaced by cor6.
    """
    rep = _bound_at(kind, size, plan, t, x, limit_mix, dict(params or {}), finite_t_cdf)
    if fallback and rep.status == rb.MOMENT_UNAVAILABLE:
        alt = _bound_at("cor6", size, plan, t, x, limit_mix, dict(params or {}), finite_t_cdf)
        alt.note = f"{kind}: moment unavailable, fell back to cor6"
        return alt
    return rep


def _bound_at(kind, size, plan, t, x, limit_mix, params, finite_t_cdf) -> rb.BoundReport:
    evt = plan.evt
    if math.isinf(float(evt.log_h(x))):
        return rb._violated(kind, x, "H(x) = 0")
    dt = float(plan.d(t))
    z = plan.z_t(t, x)
    if kind in ("thm5", "thm7", "cor3"):
        if kind == "thm5" and size.kind != "fixed":
            raise DomainError("thm5 certifies fixed sample sizes")
        if kind in ("thm7", "cor3") and size.kind != "poisson":
            raise DomainError(f"{kind} certifies Poisson sample sizes")
        lam = size.n if kind == "thm5" else size.lam
        if lam == dt:
            zeta, rho = z, plan.r_t(t, x)
        else:
            zeta = lam * (z / dt)
            rho = zeta + float(evt.log_h(x))
        if kind == "thm5":
            return rb.thm5_bound(zeta / lam, size.n, evt, x, params.get("q"), params.get("s"), zeta=zeta, rho=rho)
        if kind == "thm7":
            return rb.thm7_bound(lam, zeta / lam, evt, x, params.get("s"), rho=rho)
        return rb.cor3_bound(lam, zeta / lam, evt, x, rho=rho)
    if kind == "thm6":
        if size.kind != "binomial":
            raise DomainError("thm6 certifies binomial sample sizes")
        a, b, _ = plan.normalizers(t)
        return rb.thm6_bound(plan.law, size.n, size.p, a, b, evt, x, params.get("q"), params.get("s"))
    inputs = dict(plan=plan, t=t, x=x, mix=limit_mix, finite_t_cdf=finite_t_cdf)
    if kind == "cor2":
        return rb.cor_bound("cor2", plan, t, x, limit_mix)
    if kind in ("cor4", "cor5"):
        return rb.cor_bound(kind, **inputs)
    if kind in ("cor1", "cor6"):
        if "q" in params:
            return rb.cor_bound(kind, q=params["q"], **inputs)
        return rb.optimize_parameters(kind, **inputs)[3]
    if kind == "thm8":
        if "q" in params:
            return rb.thm8_bound(q=params["q"], M=params.get("M", 1), **inputs)
        if "M" in params:
            inputs["M"] = params["M"]
        return rb.optimize_parameters("thm8", **inputs)[3]
    raise DomainError(f"unknown bound kind {kind!r}")


@dataclass
class Certification:
    rows: list[dict]
    verdict: str
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows:
            w.writerow([fmt(row[c]) for c in CSV_COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.summary, indent=2, sort_keys=True) + "\n"


def certify(
    cfg: SimConfig,
    bound_kind: str,
    params: dict | None = None,
    *,
    limit_mix: MixingLaw | None = None,
    finite_t_cdf=None,
    delta: float = DEFAULT_DELTA,
    bound_scale: float = 1.0,
    run_mc: bool = True,
    config_echo: dict | None = None,
) -> Certification:
    """Exact error vs bound on cfg.x_grid, plus the empirical d.f. vs the exact oracle.

    PASS requires bound - error >= 0 wherever the bound's conditions hold and
    every empirical deviation within the DKW band.  ``bound_scale`` multiplies
    the bound (a value of 0 is the harness self-test).
    """
    plan = cfg.plan
    if plan is None:
        raise DomainError("certification needs a normalization plan")
    t = cfg.t
    limit_mix = cfg.size_law.limit_mixing(float(plan.d(t)), t) if limit_mix is None else limit_mix
    grid = np.asarray(cfg.x_grid, dtype=float)
    if run_mc:
        emp = simulate(cfg, delta)
        devs, eps = emp.deviation, emp.dkw_eps
    else:
        devs, eps = [None] * grid.size, None
    rows = []
    for x, dev in zip(grid, devs):
        exact = normalized_max_cdf(cfg.size_law, plan, t, x)
        limit = limit_mix.power_mixture(plan.evt, x)
        err = abs(exact - limit)
        rep = bound_at(bound_kind, cfg.size_law, plan, t, x, limit_mix, params, finite_t_cdf)
        bound = rep.total * bound_scale if rep.ok else None
        rows.append(
            dict(
                x=float(x),
                exact_error=err,
                bound=bound,
                margin=None if bound is None else bound - err,
                ecdf_dev=None if dev is None else float(dev),
                dkw_eps=eps,
                conditions_ok=rep.ok,
            )
        )
    bound_ok = all(r["margin"] >= 0 for r in rows if r["conditions_ok"])
    mc_ok = (not run_mc) or all(r["ecdf_dev"] <= eps for r in rows)
    verdict = "PASS" if bound_ok and mc_ok else "FAIL"
    checked = [r for r in rows if r["conditions_ok"]]
    summary = dict(
        verdict=verdict,
        bound_kind=bound_kind,
        params=params or {},
        seed=cfg.seed,
        n_samples=cfg.n_samples if run_mc else 0,
        workers=cfg.workers,
        delta=delta,
        dkw_eps=eps,
        sup_exact_error=max(r["exact_error"] for r in rows) if rows else None,
        min_margin=min((r["margin"] for r in checked), default=None),
        n_conditions_ok=len(checked),
        n_bound_violations=sum(1 for r in checked if r["margin"] < 0),
        max_ecdf_dev=max(r["ecdf_dev"] for r in rows) if run_mc and rows else None,
        config=config_echo or {},
    )
    return Certification(rows, verdict, summary)
