"""Convergence-rate bounds for maxima over random sample sizes.

Each bound returns a :class:`BoundReport` with its nonnegative components in
``terms``; ``total`` is their plain sum.  A bound whose side conditions fail
reports ``status = "conditions violated"`` instead of raising, so grids can be
tabulated past infeasible cells.

Notation: zeta = n (1 - F(a + b x)) (or lambda (1 - F) for Poisson sizes),
rho = zeta + log H(x); for horizon-indexed plans z = z_t(x), r = r_t(x).

Bounds
------
thm5   fixed n        H [r1 + r2 + r1 r2]
thm6   binomial       same with zeta = n p (1 - F)
thm7   Poisson        H [|rho| + rho^2 / (2 (1 - s))]
thm8   Cox            series (B_{k,M}(q) ladder) + P(Lambda > q/|r|) + leading-process term
cor1   thm8 with M = 1
cor2   deterministic Lambda = lambda:   |r| lambda H^lambda
cor3   Poisson(lambda), plan at t = lambda:   |rho| H
cor4   q eliminated by Markov's inequality (needs E Lambda = L < inf)
cor5   (2 + sqrt 2) L |r|
cor6   moment-free: (2 - q)|r| / (2 e (1 - q) log(1/H)) + P(Lambda > q/|r|)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DomainError
from .evt_laws import EvtLaw
from .mixing import MixingLaw
from .normalizer import NormalizationPlan
from .obs_dist import ObservationLaw

OK = "ok"
VIOLATED = "conditions violated"
MOMENT_UNAVAILABLE = "moment unavailable"

BOUND_KINDS = ("thm5", "thm6", "thm7", "thm8", "cor1", "cor2", "cor3", "cor4", "cor5", "cor6")
TERM_NAMES = ("series_term", "tail_term", "leading_process_term", "r1", "r2", "cross")

# finite-t d.f. of the leading process: (t, lam) -> P(Lambda(t) < lam d(t))
FiniteTCdf = Callable[[float, float], float]

Q_EPS = 1e-6
M_MAX = 30


@dataclass
class BoundReport:
    x: float
    bound_kind: str
    z: float | None = None
    discrepancy: float | None = None
    q: float | None = None
    s: float | None = None
    M: int | None = None
    terms: dict[str, float] = field(default_factory=dict)
    status: str = OK
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status == OK

    @property
    def total(self) -> float | None:
        if not self.ok:
            return None
        return sum(self.terms.values())


def _violated(kind: str, x: float, note: str, **kw) -> BoundReport:
    return BoundReport(x=float(x), bound_kind=kind, status=VIOLATED, note=note, **kw)


def _log_h(evt: EvtLaw, x: float) -> float:
    return float(evt.log_h(x))


# -- classical and binomial/Poisson bounds ----------------------------------


def _classical_core(kind, x, zeta, rho, n, log_h, q, s) -> BoundReport:
    H = math.exp(log_h)
    q_min = 2.0 * zeta**2 / (3.0 * n)
    s_min = abs(rho) / 3.0
    q = q_min if q is None else float(q)
    s = s_min if s is None else float(s)
    base = dict(z=zeta, discrepancy=rho, q=q, s=s)
    if not (q_min <= q < 1.0):
        return _violated(kind, x, f"need 2 zeta^2 / (3n) <= q < 1, have q_min={q_min:.6g}, q={q:.6g}", **base)
    if not (s_min <= s < 1.0):
        return _violated(kind, x, f"need |rho| <= 3s with s < 1, have |rho|={abs(rho):.6g}, s={s:.6g}", **base)
    r1 = 2.0 * zeta**2 / n + 2.0 * zeta**4 / ((1.0 - q) * n**2)
    r2 = abs(rho) + rho**2 / (2.0 * (1.0 - s))
    terms = {"r1": H * r1, "r2": H * r2, "cross": H * r1 * r2}
    return BoundReport(x=float(x), bound_kind=kind, terms=terms, **base)


def thm5_bound(
    tail_at: float,
    n: int,
    evt: EvtLaw,
    x: float,
    q: float | None = None,
    s: float | None = None,
    *,
    zeta: float | None = None,
    rho: float | None = None,
) -> BoundReport:
    """Classical bound for |F(a + b x)**n - H(x)|; tail_at = 1 - F(a + b x).

    q and s default to their smallest feasible values.
    """
    log_h = _log_h(evt, x)
    if math.isinf(log_h):
        return _violated("thm5", x, "H(x) = 0")
    if tail_at > 0.5:
        return _violated("thm5", x, "F(a + b x) < 1/2")
    zeta = n * tail_at if zeta is None else zeta
    rho = zeta + log_h if rho is None else rho
    return _classical_core("thm5", x, zeta, rho, n, log_h, q, s)


def thm6_bound(
    law: ObservationLaw,
    n: int,
    p: float,
    a: float,
    b: float,
    evt: EvtLaw,
    x: float,
    q: float | None = None,
    s: float | None = None,
) -> BoundReport:
    """Binomial(n, p) sample size: the classical bound with zeta = n p (1 - F)."""
    log_h = _log_h(evt, x)
    if math.isinf(log_h):
        return _violated("thm6", x, "H(x) = 0")
    tail_at = float(law.tail(a + b * x))
    if p * tail_at > 0.5:
        return _violated("thm6", x, "p (1 - F(a + b x)) > 1/2")
    zeta = n * p * tail_at
    return _classical_core("thm6", x, zeta, zeta + log_h, n, log_h, q, s)


def thm7_bound(
    lam: float,
    tail_at: float,
    evt: EvtLaw,
    x: float,
    s: float | None = None,
    *,
    rho: float | None = None,
) -> BoundReport:
    """Poisson(lam) sample size: H [|rho| + rho^2 / (2 (1 - s))], |rho| <= 3 s < 3."""
    log_h = _log_h(evt, x)
    if math.isinf(log_h):
        return _violated("thm7", x, "H(x) = 0")
    zeta = lam * tail_at
    rho = zeta + log_h if rho is None else rho
    s_min = abs(rho) / 3.0
    s = s_min if s is None else float(s)
    if not (s_min <= s < 1.0):
        return _violated("thm7", x, f"need |rho| <= 3s < 3, have |rho|={abs(rho):.6g}", z=zeta, discrepancy=rho, s=s)
    H = math.exp(log_h)
    terms = {"r2": H * (abs(rho) + rho**2 / (2.0 * (1.0 - s)))}
    return BoundReport(x=float(x), bound_kind="thm7", z=zeta, discrepancy=rho, s=s, terms=terms)


def cor3_bound(lam: float, tail_at: float, evt: EvtLaw, x: float, *, rho: float | None = None) -> BoundReport:
    """Poisson(lam) sample size, no side condition: |rho| H(x)."""
    log_h = _log_h(evt, x)
    if math.isinf(log_h):
        return _violated("cor3", x, "H(x) = 0")
    zeta = lam * tail_at
    rho = zeta + log_h if rho is None else rho
    terms = {"series_term": abs(rho) * math.exp(log_h)}
    return BoundReport(x=float(x), bound_kind="cor3", z=zeta, discrepancy=rho, terms=terms)


# -- general Cox bound --------------------------------------------------------


def b_coefficient(k: int, M: int, q: float) -> float:
    """B_{k,M}(q): 1/k! for k < M, (1 + M(1-q)) / ((M+1)! (1-q)) for k = M."""
    if not 1 <= k <= M:
        raise DomainError(f"need 1 <= k <= M, got k={k}, M={M}")
    if k < M:
        return 1.0 / math.factorial(k)
    return (1.0 + M * (1.0 - q)) / (math.factorial(M + 1) * (1.0 - q))


def leading_process_term(
    z: float,
    mix: MixingLaw,
    finite_t_cdf: FiniteTCdf | None,
    t: float,
) -> float:
    """z * integral over lam >= 0 of |P(Lambda(t) < lam d(t)) - P(Lambda < lam)| exp(-lam z).

    Zero when no finite-t d.f. is supplied (Lambda(t) = Lambda d(t) exactly)
    and when z = 0.
    """
    if finite_t_cdf is None or z == 0.0:
        return 0.0
    hi = 37.0 / z  # exp(-lam z) < 1e-16 beyond
    pts = [p for p in mix.breakpoints() if 0.0 < p < hi] or None

    def integrand(lam: float) -> float:
        return abs(finite_t_cdf(t, lam) - mix.cdf(lam)) * math.exp(-lam * z)

    val, _ = integrate.quad(integrand, 0.0, hi, points=pts, epsabs=1e-14, epsrel=1e-10, limit=500)
    return z * val


def _plan_inputs(plan: NormalizationPlan, t: float, x: float):
    log_h = _log_h(plan.evt, x)
    if math.isinf(log_h):
        return None
    return plan.z_t(t, x), plan.r_t(t, x), log_h


def thm8_bound(
    plan: NormalizationPlan,
    t: float,
    x: float,
    mix: MixingLaw,
    finite_t_cdf: FiniteTCdf | None = None,
    q: float = 0.5,
    M: int = 1,
    *,
    proof_form: bool = False,
    kind: str = "thm8",
    cache: dict | None = None,
) -> BoundReport:
    """General Cox-process bound.

    ``proof_form`` divides the k-th series coefficient by an extra k!, as in
    the display closing the proof; the default is the larger (statement) form.
    ``cache`` (a dict) keeps z, r, log H and the moments m_k between calls
    that differ only in q and M, as during parameter search.
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    if M < 1 or int(M) != M:
        raise DomainError(f"M must be an integer >= 1, got {M}")
    cache = {} if cache is None else cache
    if "inputs" not in cache:
        cache["inputs"] = _plan_inputs(plan, t, x)
    inputs = cache["inputs"]
    if inputs is None:
        return _violated(kind, x, "H(x) = 0", q=q, M=M)
    z, r, log_h = inputs
    ar = abs(r)
    base = dict(x=float(x), bound_kind=kind, z=z, discrepancy=r, q=q, M=int(M))
    if ar == 0.0:
        series = 0.0
        tail = 0.0
    else:
        series_sum = 0.0
        moments = cache.setdefault("moments", {})
        for k in range(1, M + 1):
            if k not in moments:
                moments[k] = mix.weighted_moment(plan.evt, x, k)
            m_k = moments[k]
            if not math.isfinite(m_k):
                return BoundReport(status=MOMENT_UNAVAILABLE, note=f"m_{k}(x) diverges; use cor6", **base)
            coef = b_coefficient(k, M, q)
            if proof_form:
                coef /= math.factorial(k)
            series_sum += coef * ar ** (k - 1) * m_k
        series = ar * series_sum
        tail = mix.tail_prob(q / ar)
    if "lead" not in cache:
        cache["lead"] = leading_process_term(z, mix, finite_t_cdf, t)
    terms = {"series_term": series, "tail_term": tail, "leading_process_term": cache["lead"]}
    return BoundReport(terms=terms, **base)


def cor1_bound(plan, t, x, mix, finite_t_cdf=None, q: float = 0.5, cache: dict | None = None) -> BoundReport:
    return thm8_bound(plan, t, x, mix, finite_t_cdf, q=q, M=1, kind="cor1", cache=cache)


def cor2_bound(plan: NormalizationPlan, t: float, x: float, lam: float) -> BoundReport:
    """Deterministic Lambda = lam with d(t) = t: |r_t| lam H^lam."""
    inputs = _plan_inputs(plan, t, x)
    if inputs is None:
        return _violated("cor2", x, "H(x) = 0")
    z, r, log_h = inputs
    terms = {"series_term": abs(r) * lam * math.exp(lam * log_h)}
    return BoundReport(x=float(x), bound_kind="cor2", z=z, discrepancy=r, terms=terms)


def cor4_bound(plan, t, x, mix: MixingLaw, finite_t_cdf=None) -> BoundReport:
    """|r| [m_1 + L + sqrt(2 L m_1)] + leading-process term, L = E Lambda < inf."""
    L = mix.mean()
    if not math.isfinite(L):
        return _violated("cor4", x, "E Lambda is infinite")
    inputs = _plan_inputs(plan, t, x)
    if inputs is None:
        return _violated("cor4", x, "H(x) = 0")
    z, r, log_h = inputs
    m1 = mix.weighted_moment(plan.evt, x, 1)
    series = abs(r) * (m1 + L + math.sqrt(2.0 * L * m1))
    terms = {"series_term": series, "leading_process_term": leading_process_term(z, mix, finite_t_cdf, t)}
    return BoundReport(x=float(x), bound_kind="cor4", z=z, discrepancy=r, terms=terms)


def cor5_bound(plan, t, x, mix: MixingLaw, finite_t_cdf=None) -> BoundReport:
    """(2 + sqrt 2) L |r| + leading-process term."""
    L = mix.mean()
    if not math.isfinite(L):
        return _violated("cor5", x, "E Lambda is infinite")
    inputs = _plan_inputs(plan, t, x)
    if inputs is None:
        return _violated("cor5", x, "H(x) = 0")
    z, r, log_h = inputs
    terms = {
        "series_term": (2.0 + math.sqrt(2.0)) * L * abs(r),
        "leading_process_term": leading_process_term(z, mix, finite_t_cdf, t),
    }
    return BoundReport(x=float(x), bound_kind="cor5", z=z, discrepancy=r, terms=terms)


def cor6_bound(plan, t, x, mix: MixingLaw, finite_t_cdf=None, q: float = 0.5) -> BoundReport:
    """Moment-free bound, meaningful for E Lambda = inf; needs 0 < H(x) < 1."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    inputs = _plan_inputs(plan, t, x)
    if inputs is None:
        return _violated("cor6", x, "H(x) = 0", q=q)
    z, r, log_h = inputs
    if log_h == 0.0:
        return _violated("cor6", x, "H(x) = 1", z=z, discrepancy=r, q=q)
    ar = abs(r)
    series = (2.0 - q) * ar / (2.0 * math.e * (1.0 - q) * -log_h)
    tail = mix.tail_prob(q / ar) if ar > 0 else 0.0
    terms = {
        "series_term": series,
        "tail_term": tail,
        "leading_process_term": leading_process_term(z, mix, finite_t_cdf, t),
    }
    return BoundReport(x=float(x), bound_kind="cor6", z=z, discrepancy=r, q=q, terms=terms)


def cor_bound(kind: str, plan, t, x, mix=None, finite_t_cdf=None, q: float = 0.5, cache: dict | None = None) -> BoundReport:
    """Dispatch a cor* bound by name, all driven by one normalization plan.

    cor2 reads lambda from a point-mass ``mix``; cor3 treats the plan's
    horizon as the Poisson parameter (d(t) = t = lambda, Lambda = 1).
    """
    if kind == "cor1":
        return cor1_bound(plan, t, x, mix, finite_t_cdf, q=q, cache=cache)
    if kind == "cor2":
        if mix is None or mix.kind != "point":
            return _violated("cor2", x, "cor2 needs a deterministic (point) mixing law")
        return cor2_bound(plan, t, x, mix.lam0)
    if kind == "cor3":
        log_h = _log_h(plan.evt, x)
        if math.isinf(log_h):
            return _violated("cor3", x, "H(x) = 0")
        dt = float(plan.d(t))
        z = plan.z_t(t, x)
        return cor3_bound(dt, z / dt, plan.evt, x, rho=plan.r_t(t, x))
    if kind == "cor4":
        return cor4_bound(plan, t, x, mix, finite_t_cdf)
    if kind == "cor5":
        return cor5_bound(plan, t, x, mix, finite_t_cdf)
    if kind == "cor6":
        return cor6_bound(plan, t, x, mix, finite_t_cdf, q=q)
    raise DomainError(f"unknown cor* bound {kind!r}")


# -- parameter selection ----------------------------------------------------

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_minimize(f, lo: float, hi: float, *, coarse: int = 64, tol: float = 1e-12):
    """Minimize f on [lo, hi]: coarse scan to bracket, then golden-section refinement.

    Returns the best (argument, value) among all evaluated points.
    """
    grid = np.linspace(lo, hi, coarse)
    vals = [f(g) for g in grid]
    best_i = int(np.argmin(vals))
    best = (float(grid[best_i]), float(vals[best_i]))
    a = float(grid[max(best_i - 1, 0)])
    b = float(grid[min(best_i + 1, coarse - 1)])
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * (1.0 + abs(a) + abs(b)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        for arg, val in ((c, fc), (d, fd)):
            if val < best[1]:
                best = (arg, val)
    return best


def grid_minimize(f, lo: float, hi: float, num: int = 1000):
    grid = np.linspace(lo, hi, num)
    vals = np.array([f(g) for g in grid])
    i = int(np.argmin(vals))
    return float(grid[i]), float(vals[i])


def _optimize_q(make_report, strategy: str):
    probe = make_report(0.5)
    if not probe.ok or probe.discrepancy == 0.0:
        return 0.5, probe

    def objective(q: float) -> float:
        return make_report(q).total

    lo, hi = Q_EPS, 1.0 - Q_EPS
    if strategy == "grid":
        q, _ = grid_minimize(objective, lo, hi)
    elif strategy == "golden":
        q, _ = golden_section_minimize(objective, lo, hi)
    else:
        raise DomainError(f"unknown strategy {strategy!r}")
    return q, make_report(q)


def optimize_parameters(kind: str, strategy: str = "golden", **inputs):
    """Choose the free parameters of a bound; returns (q, s, M, report).

    s is always the smallest feasible value.  q minimizes the total by
    golden-section search over (1e-6, 1 - 1e-6) for the Cox bounds.  For
    thm8, M grows until the total improves by less than 1e-6 relative, or
    M = 30, unless ``M`` is given.
    """
    if kind in ("thm5", "thm6", "thm7"):
        fn = {"thm5": thm5_bound, "thm6": thm6_bound, "thm7": thm7_bound}[kind]
        inputs = {k: v for k, v in inputs.items() if k not in ("q", "s")}
        rep = fn(**inputs)
        return rep.q, rep.s, None, rep
    if kind in ("cor2", "cor3", "cor4", "cor5"):
        inputs.pop("q", None)
        rep = cor_bound(kind, **inputs)
        return None, None, None, rep
    if kind in ("cor1", "cor6"):
        inputs.pop("q", None)
        cache = {} if kind == "cor1" else None
        q, rep = _optimize_q(lambda qq: cor_bound(kind, q=qq, cache=cache, **inputs), strategy)
        return q, None, (1 if kind == "cor1" else None), rep
    if kind != "thm8":
        raise DomainError(f"unknown bound kind {kind!r}")
    inputs.pop("q", None)
    fixed_M = inputs.pop("M", None)
    Ms = [fixed_M] if fixed_M is not None else range(1, M_MAX + 1)
    best = None
    cache: dict = {}
    for M in Ms:
        q, rep = _optimize_q(lambda qq, M=M: thm8_bound(q=qq, M=M, cache=cache, **inputs), strategy)
        if not rep.ok:
            return q, None, M, rep
        if best is not None:
            improvement = best[2].total - rep.total
            if rep.total < best[2].total:
                best = (q, M, rep)
            if improvement <= 1e-6 * abs(best[2].total):
                break
        else:
            best = (q, M, rep)
    q, M, rep = best
    return q, None, M, rep
