"""Extreme-value limit laws.

The universal (von Mises--Jenkinson) form is

    H_tau(x) = exp(-(1 + tau * x) ** (-1 / tau)),   tau != 0,
    H_0(x)   = exp(-exp(-x)).

The three classical types agree with it up to location and scale:

    H_tau(x) = H_{1,1/tau}(1 + tau * x)        (tau > 0, Frechet)
    H_tau(x) = H_{2,-1/tau}(-(1 + tau * x))    (tau < 0, Weibull)

Bounds consume log H, so :meth:`EvtLaw.log_h` is the primitive and
``h = exp(log_h)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

GUMBEL_TAU_THRESHOLD = 1e-8

CLASSICAL_KINDS = ("frechet", "weibull", "gumbel")


def log_h_tau(tau: float, x):
    """log H_tau(x); -inf below the support (tau > 0), 0 above it (tau < 0)."""
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if abs(tau) < GUMBEL_TAU_THRESHOLD:
            out = -np.exp(-x)
        else:
            w = 1.0 + tau * x
            inside = -np.where(w > 0, w, 1.0) ** (-1.0 / tau)
            outside = -np.inf if tau > 0 else 0.0
            out = np.where(w > 0, inside, outside)
    return float(out) if scalar else out


def h_tau(tau: float, x):
    return np.exp(log_h_tau(tau, x)) if np.ndim(x) else math.exp(log_h_tau(tau, x))


def log_classical_form(kind: str, gamma: float, x):
    """log of H_{1,gamma}, H_{2,gamma} or H_{3,0} in their textbook coordinates."""
    if kind not in CLASSICAL_KINDS:
        raise DomainError(f"unknown classical kind {kind!r}")
    if kind != "gumbel" and not gamma > 0:
        raise DomainError(f"{kind} needs gamma > 0, got {gamma}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if kind == "frechet":
            out = np.where(x > 0, -np.where(x > 0, x, 1.0) ** (-gamma), -np.inf)
        elif kind == "weibull":
            out = np.where(x < 0, -np.abs(x) ** gamma, 0.0)
        else:
            out = -np.exp(-x)
    return float(out) if scalar else out


def classical_form(kind: str, gamma: float, x):
    out = log_classical_form(kind, gamma, x)
    return np.exp(out) if np.ndim(out) else math.exp(out)


@dataclass(frozen=True)
class EvtLaw:
    """Limit law H with shape ``tau``.

    ``classical=True`` evaluates the textbook type in its own coordinates
    (e.g. exp(-x**-gamma) for the Frechet law) instead of the universal form;
    that is what the Frechet, Weibull and Gumbel normalizers converge to.
    """

    tau: float
    classical: bool = False

    @classmethod
    def universal(cls, tau: float) -> "EvtLaw":
        return cls(float(tau))

    @classmethod
    def frechet(cls, gamma: float) -> "EvtLaw":
        if not gamma > 0:
            raise DomainError(f"frechet needs gamma > 0, got {gamma}")
        return cls(1.0 / gamma, classical=True)

    @classmethod
    def weibull(cls, gamma: float) -> "EvtLaw":
        if not gamma > 0:
            raise DomainError(f"weibull needs gamma > 0, got {gamma}")
        return cls(-1.0 / gamma, classical=True)

    @classmethod
    def gumbel(cls) -> "EvtLaw":
        return cls(0.0, classical=True)

    @property
    def kind(self) -> str:
        if abs(self.tau) < GUMBEL_TAU_THRESHOLD:
            return "gumbel"
        return "frechet" if self.tau > 0 else "weibull"

    @property
    def gamma(self) -> float | None:
        return None if self.kind == "gumbel" else abs(1.0 / self.tau)

    def log_h(self, x):
        if self.classical:
            return log_classical_form(self.kind, self.gamma or 0.0, x)
        return log_h_tau(self.tau, x)

    def h(self, x):
        out = self.log_h(x)
        return np.exp(out) if np.ndim(out) else math.exp(out)

    def quantile(self, u: float) -> float:
        """x with H(x) = u, for u in (0, 1); used to lay out x-grids."""
        if not 0 < u < 1:
            raise DomainError("quantile needs 0 < u < 1")
        theta = -math.log(u)
        g = self.gamma
        if self.classical:
            if self.kind == "frechet":
                return theta ** (-1.0 / g)
            if self.kind == "weibull":
                return -(theta ** (1.0 / g))
            return -math.log(theta)
        if self.kind == "gumbel":
            return -math.log(theta)
        return (theta ** (-self.tau) - 1.0) / self.tau
