"""Normalizing functions a(t), b(t), d(t) and the tail drivers z_t, r_t.

    z_t(x) = d(t) * (1 - F(a(t) + b(t) x)),    r_t(x) = z_t(x) + log H(x).

For the parametric families in their own domain the plan holds closed forms
for a and b, and z_t / r_t are evaluated from algebraically simplified
expressions so that r_t carries no cancellation error (it is exactly 0 in the
exponential/Gumbel case).  Other laws fall back to bisection for the
generalized inverse inf{x : 1 - F(x) <= 1/d(t)} and plain subtraction for r_t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .evt_laws import EvtLaw
from .obs_dist import ObservationLaw

MODES = ("frechet", "weibull", "gumbel", "custom")


def identity(t: float) -> float:
    return t


@dataclass(frozen=True, eq=False)
class NormalizationPlan:
    law: ObservationLaw
    evt: EvtLaw
    d: Callable[[float], float]
    mode: str
    closed_form: bool
    custom_a: Callable[[float], float] | None = None
    custom_b: Callable[[float], float] | None = None

    # -- normalizers ------------------------------------------------------

    def _check_d(self, t: float) -> float:
        dt = float(self.d(t))
        if not dt > 0 or math.isnan(dt):
            raise DomainError(f"d(t) must be positive, got d({t}) = {dt}")
        if self.mode != "custom" and dt < 1.0:
            raise DomainError(f"d({t}) = {dt} < 1: the tail inverse at 1/d(t) is undefined")
        return dt

    def normalizers(self, t: float) -> tuple[float, float, float]:
        """(a(t), b(t), d(t)); raises DomainError outside the plan's valid range."""
        dt = self._check_d(t)
        law = self.law
        if self.mode == "custom":
            a, b = float(self.custom_a(t)), float(self.custom_b(t))
        elif self.closed_form:
            if self.mode == "frechet":
                a, b = 0.0, (law.c * (dt - 1.0)) ** (1.0 / law.gamma)
            elif self.mode == "weibull":
                a = law.upper
                b = (law.upper - law.lower) * dt ** (-1.0 / law.gamma)
            else:
                a, b = math.log(dt) / law.rate, 1.0 / law.rate
        else:
            q = law.tail_inverse_bisect(1.0 / dt)
            if self.mode == "frechet":
                a, b = 0.0, q
            elif self.mode == "weibull":
                a, b = law.rext, law.rext - q
            else:
                a, b = q, law.mean_excess(q)
        if not b > 0 or math.isinf(b):
            raise DomainError(f"b({t}) = {b} is not a positive finite scale (d(t) = {dt})")
        return a, b, dt

    def a(self, t: float) -> float:
        return self.normalizers(t)[0]

    def b(self, t: float) -> float:
        return self.normalizers(t)[1]

    # -- tail drivers -----------------------------------------------------

    def z_t(self, t: float, x: float) -> float:
        """d(t) * (1 - F(a(t) + b(t) x))."""
        a, b, dt = self.normalizers(t)
        x = float(x)
        if self.closed_form:
            law = self.law
            if self.mode == "frechet":
                if x <= 0:
                    return dt
                return dt / ((dt - 1.0) * x**law.gamma + 1.0)
            if self.mode == "weibull":
                if x >= 0:
                    return 0.0
                # a + b x >= lext  <=>  x >= -d**(1/gamma)
                return min(dt, (-x) ** law.gamma)
            if math.log(dt) + x >= 0:
                return float(np.exp(-x))  # same rounding as log H, so r_t cancels exactly
            return dt
        return dt * float(self.law.tail(a + b * x))

    def r_t(self, t: float, x: float) -> float:
        """z_t(x) + log H(x); DomainError where H(x) = 0."""
        log_h = float(self.evt.log_h(x))
        if math.isinf(log_h):
            raise DomainError(f"H(x) = 0 at x={x}")
        if self.closed_form:
            a, b, dt = self.normalizers(t)
            x = float(x)
            law = self.law
            if self.mode == "frechet":
                xg = x**law.gamma
                return (xg - 1.0) / (xg * ((dt - 1.0) * xg + 1.0))
            if self.mode == "weibull":
                if x >= 0 or (-x) ** law.gamma <= dt:
                    return 0.0
                return dt + log_h
            if math.log(dt) + x >= 0:
                return 0.0
            return dt + log_h
        return self.z_t(t, x) + log_h

    def r_t_generic(self, t: float, x: float) -> float:
        """Plain d(t) * tail(a + b x) + log H(x), no algebraic rearrangement."""
        a, b, dt = self.normalizers(t)
        log_h = float(self.evt.log_h(x))
        if math.isinf(log_h):
            raise DomainError(f"H(x) = 0 at x={x}")
        return dt * float(self.law.tail(a + b * float(x))) + log_h


def _default_evt(law: ObservationLaw, mode: str) -> EvtLaw:
    if mode == "frechet":
        return EvtLaw.frechet(law.classify_domain().gamma or law.gamma)
    if mode == "weibull":
        return EvtLaw.weibull(law.classify_domain().gamma or law.gamma)
    return EvtLaw.gumbel()


def make_plan(
    law: ObservationLaw,
    evt: EvtLaw | None = None,
    d: Callable[[float], float] = identity,
    mode: str | None = None,
    *,
    a: Callable[[float], float] | None = None,
    b: Callable[[float], float] | None = None,
) -> NormalizationPlan:
    """Build the Frechet, Weibull or Gumbel normalization plan for ``law``.

    ``mode`` defaults to the analytic domain of ``law``.  ``custom`` requires
    user-supplied ``a`` and ``b`` and an explicit ``evt``.
    """
    domain = law.classify_domain()
    if mode is None:
        mode = "custom" if a is not None else domain.kind
    if mode not in MODES:
        raise DomainError(f"unknown normalization mode {mode!r}; domain of law is {domain.kind!r}")
    if mode == "custom":
        if a is None or b is None or evt is None:
            raise DomainError("custom mode needs a, b and evt")
        return NormalizationPlan(law, evt, d, "custom", False, custom_a=a, custom_b=b)
    if mode == "weibull" and math.isinf(law.rext):
        raise DomainError("weibull mode needs a finite right endpoint")
    if mode == "gumbel" and law.family == "pareto":
        law.mean_excess(law.lext + 1.0)  # raises NotIntegrableError for gamma <= 1
    if domain.kind != "unknown" and domain.kind != mode:
        raise DomainError(f"mode {mode!r} inconsistent with the law's domain {domain.kind!r}")
    if evt is None:
        evt = _default_evt(law, mode)
    elif evt.kind != mode:
        raise DomainError(f"limit law of kind {evt.kind!r} does not match mode {mode!r}")
    closed = evt.classical and (
        (mode, law.family) == ("gumbel", "exponential")
        or (
            (mode, law.family) in {("frechet", "pareto"), ("weibull", "bounded_power")}
            and math.isclose(evt.gamma, law.gamma, rel_tol=1e-15)
        )
    )
    return NormalizationPlan(law, evt, d, mode, closed)


def tabulate(plan: NormalizationPlan, ts) -> np.ndarray:
    """Rows (t, d(t), a(t), b(t)) over a grid of horizons."""
    rows = []
    for t in ts:
        a, b, dt = plan.normalizers(t)
        rows.append((t, dt, a, b))
    return np.array(rows)
