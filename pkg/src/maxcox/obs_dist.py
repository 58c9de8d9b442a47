"""Observation laws F of the marks X_j.

Every parametric family carries a direct tail formula: the rate bounds are
driven by 1 - F evaluated far out in the tail, where ``1 - cdf(x)`` has no
relative accuracy left.

Families
--------
pareto(c, gamma)          F(x) = 1 - c / (x**gamma + c),           x >= 0
exponential(rate)         F(x) = 1 - exp(-rate * x),                x >= 0
bounded_power(gamma, ...) F(x) = 1 - ((rext - x) / (rext - lext))**gamma
tabulated(xs, Fs)         linear interpolation between knots; the last
                          knot is treated as rext
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, NotIntegrableError, TableFormatError

FAMILIES = ("pareto", "exponential", "bounded_power", "tabulated")


def _as_output(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


@dataclass(frozen=True)
class Domain:
    """Domain of max-attraction tag returned by :meth:`ObservationLaw.classify_domain`."""

    kind: str  # "frechet" | "weibull" | "gumbel" | "unknown"
    gamma: float | None = None


@dataclass(frozen=True)
class ObservationLaw:
    family: str
    c: float = 1.0
    gamma: float = 1.0
    rate: float = 1.0
    lower: float = 0.0
    upper: float = 1.0
    xs: tuple[float, ...] = ()
    Fs: tuple[float, ...] = ()

    # -- constructors -----------------------------------------------------

    @classmethod
    def pareto(cls, c: float = 1.0, gamma: float = 1.0) -> "ObservationLaw":
        if not (c > 0 and gamma > 0):
            raise DomainError(f"pareto needs c > 0 and gamma > 0, got c={c}, gamma={gamma}")
        return cls("pareto", c=float(c), gamma=float(gamma))

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "ObservationLaw":
        if not rate > 0:
            raise DomainError(f"exponential needs rate > 0, got {rate}")
        return cls("exponential", rate=float(rate))

    @classmethod
    def bounded_power(cls, gamma: float, rext: float = 1.0, lext: float | None = None) -> "ObservationLaw":
        lext = rext - 1.0 if lext is None else lext
        if not (gamma > 0 and lext < rext):
            raise DomainError(f"bounded_power needs gamma > 0 and lext < rext, got {gamma}, [{lext}, {rext}]")
        return cls("bounded_power", gamma=float(gamma), lower=float(lext), upper=float(rext))

    @classmethod
    def tabulated(cls, xs: Sequence[float], Fs: Sequence[float]) -> "ObservationLaw":
        xs = tuple(float(v) for v in xs)
        Fs = tuple(float(v) for v in Fs)
        if len(xs) < 2 or len(xs) != len(Fs):
            raise DomainError("tabulated law needs at least two (x, F) knots of equal length")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("tabulated x knots must be strictly increasing")
        if any(b < a for a, b in zip(Fs, Fs[1:])) or Fs[0] < 0 or Fs[-1] > 1:
            raise DomainError("tabulated F values must be nondecreasing in [0, 1]")
        return cls("tabulated", xs=xs, Fs=Fs)

    @classmethod
    def from_csv(cls, path: str | Path) -> "ObservationLaw":
        """Load a tabulated law from a CSV file with header ``x,F``."""
        xs: list[float] = []
        Fs: list[float] = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["x", "F"]:
                raise TableFormatError(f"{path}:1: expected header 'x,F', got {header!r}")
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != 2:
                    raise TableFormatError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
                try:
                    x, F = float(row[0]), float(row[1])
                except ValueError:
                    raise TableFormatError(f"{path}:{lineno}: non-numeric value in {row!r}") from None
                if not 0.0 <= F <= 1.0:
                    raise TableFormatError(f"{path}:{lineno}: F={F} outside [0, 1]")
                if xs and x <= xs[-1]:
                    raise TableFormatError(f"{path}:{lineno}: x={x} not strictly increasing")
                if Fs and F < Fs[-1]:
                    raise TableFormatError(f"{path}:{lineno}: F={F} decreases")
                xs.append(x)
                Fs.append(F)
        if len(xs) < 2:
            raise TableFormatError(f"{path}: need at least two data rows")
        return cls.tabulated(xs, Fs)

    # -- endpoints --------------------------------------------------------

    @property
    def lext(self) -> float:
        if self.family in ("pareto", "exponential"):
            return 0.0
        if self.family == "bounded_power":
            return self.lower
        Fs = self.Fs
        k = 0
        while k + 1 < len(Fs) and Fs[k + 1] == 0.0:
            k += 1
        return self.xs[k]

    @property
    def rext(self) -> float:
        if self.family in ("pareto", "exponential"):
            return math.inf
        if self.family == "bounded_power":
            return self.upper
        for x, F in zip(self.xs, self.Fs):
            if F >= 1.0:
                return x
        return self.xs[-1]

    # -- distribution functions ------------------------------------------

    def tail(self, x):
        """1 - F(x), from a direct formula for the parametric families."""
        scalar = np.ndim(x) == 0
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if self.family == "pareto":
                xp = np.where(x > 0, x, 0.0) ** self.gamma
                out = np.where(x > 0, self.c / (xp + self.c), 1.0)
            elif self.family == "exponential":
                out = np.where(x > 0, np.exp(-self.rate * np.maximum(x, 0.0)), 1.0)
            elif self.family == "bounded_power":
                lo, hi = self.lower, self.upper
                s = np.clip((hi - x) / (hi - lo), 0.0, 1.0)
                out = s**self.gamma
            else:
                out = 1.0 - self._tab_cdf(x)
        return _as_output(out, scalar)

    def cdf(self, x):
        scalar = np.ndim(x) == 0
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if self.family == "pareto":
                xp = np.where(x > 0, x, 0.0) ** self.gamma
                out = np.where(x > 0, np.where(np.isinf(xp), 1.0, xp / (xp + self.c)), 0.0)
            elif self.family == "exponential":
                out = np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)
            elif self.family == "bounded_power":
                # 1 - (1 - y)**gamma without cancellation near the left endpoint
                y = np.clip((x - self.lower) / (self.upper - self.lower), 0.0, 1.0)
                out = np.where(y < 1.0, -np.expm1(self.gamma * np.log1p(-np.minimum(y, 0.5))), 1.0)
                out = np.where(y > 0.5, 1.0 - np.asarray(self.tail(x)), out)
            else:
                out = self._tab_cdf(x)
        return _as_output(out, scalar)

    def _tab_cdf(self, x: np.ndarray) -> np.ndarray:
        xs = np.asarray(self.xs)
        Fs = np.asarray(self.Fs)
        out = np.interp(x, xs, Fs)
        out = np.where(x < xs[0], 0.0, out)
        return np.where(x >= xs[-1], 1.0, out)

    # -- inverses ---------------------------------------------------------

    def quantile(self, u):
        """inf{x : F(x) >= u} for u in (0, 1)."""
        scalar = np.ndim(u) == 0
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0) | (u >= 1)) or np.any(np.isnan(u)):
            raise DomainError("quantile needs 0 < u < 1")
        if self.family == "tabulated":
            out = np.vectorize(lambda p: self._bisect(lambda x: self.cdf(x) >= p))(u)
            return _as_output(out, scalar)
        if self.family == "pareto":
            out = (self.c * u / (1.0 - u)) ** (1.0 / self.gamma)
        elif self.family == "exponential":
            out = -np.log1p(-u) / self.rate
        else:
            out = self.lower - (self.upper - self.lower) * np.expm1(np.log1p(-u) / self.gamma)
        out = self._nudge_up(np.atleast_1d(out).astype(float), np.atleast_1d(u), lambda x: self.cdf(x))
        return _as_output(out.reshape(u.shape), scalar)

    def tail_quantile(self, v):
        """inf{x : 1 - F(x) <= v} for v in [0, 1]; v = 0 gives rext."""
        scalar = np.ndim(v) == 0
        v = np.asarray(v, dtype=float)
        if np.any((v < 0) | (v > 1)) or np.any(np.isnan(v)):
            raise DomainError("tail_quantile needs 0 <= v <= 1")
        if self.family == "tabulated":
            out = np.vectorize(self.tail_inverse_bisect)(v)
            return _as_output(out, scalar)
        with np.errstate(divide="ignore"):
            if self.family == "pareto":
                out = (self.c * (1.0 - v) / v) ** (1.0 / self.gamma)
            elif self.family == "exponential":
                out = -np.log(v) / self.rate
            else:
                out = self.upper - (self.upper - self.lower) * v ** (1.0 / self.gamma)
        return _as_output(out, scalar)

    @staticmethod
    def _nudge_up(x: np.ndarray, target: np.ndarray, cdf) -> np.ndarray:
        # closed forms can land one ulp short of the generalized inverse
        for _ in range(64):
            short = np.asarray(cdf(x)) < target
            if not short.any():
                break
            x = np.where(short, np.nextafter(x, np.inf), x)
        return x

    def _bisect(self, pred, rel_tol: float = 1e-12) -> float:
        """Smallest x in [lext, rext] with pred(x) true, pred monotone."""
        lo, hi = self.lext, self.rext
        if math.isinf(hi):
            hi = max(1.0, 2.0 * abs(lo))
            while not pred(hi):
                lo, hi = hi, 2.0 * hi
                if hi > 1e300:
                    return math.inf
        if pred(lo):
            return lo
        for _ in range(2000):
            if hi - lo <= rel_tol * (1.0 + abs(hi)):
                break
            mid = 0.5 * (lo + hi)
            if pred(mid):
                hi = mid
            else:
                lo = mid
        return hi

    def tail_inverse_bisect(self, v: float) -> float:
        """inf{x : 1 - F(x) <= v} by bisection on the monotone tail; any family."""
        v = float(v)
        if v <= 0.0:
            return self.rext
        return self._bisect(lambda x: self.tail(x) <= v)

    # -- tail functionals -------------------------------------------------

    def mean_excess(self, y: float) -> float:
        """R(y) = (1 - F(y))**-1 * integral of (1 - F) over [y, rext]."""
        lext, rext = self.lext, self.rext
        if not lext <= y < rext:
            raise DomainError(f"mean_excess needs lext <= y < rext, got y={y} with [{lext}, {rext}]")
        if self.family == "exponential":
            return 1.0 / self.rate
        if self.family == "pareto" and self.gamma <= 1.0:
            raise NotIntegrableError(f"pareto tail with gamma={self.gamma} <= 1 is not integrable")
        ty = float(self.tail(y))
        if ty <= 0.0:
            raise DomainError(f"tail vanishes at y={y}")
        kw = dict(epsabs=0.0, epsrel=1e-10, limit=500)
        if math.isinf(rext):
            # split at 2y so the infinite-range transform only sees the smooth far tail
            mid = 2.0 * y + 1.0
            near, _ = integrate.quad(self.tail, y, mid, **kw)
            far, _ = integrate.quad(self.tail, mid, math.inf, **kw)
            total = near + far
        else:
            pts = [x for x in self.xs if y < x < rext] if self.family == "tabulated" else None
            total, _ = integrate.quad(self.tail, y, rext, points=pts or None, **kw)
        return total / ty

    def classify_domain(self) -> Domain:
        if self.family == "pareto":
            return Domain("frechet", self.gamma)
        if self.family == "bounded_power":
            return Domain("weibull", self.gamma)
        if self.family == "exponential":
            return Domain("gumbel")
        return self._tabulated_diagnostic()

    def _tabulated_diagnostic(self) -> Domain:
        # regular-variation ratio at the largest knot y with y/2 and 2y inside the positive-tail range
        xs = [x for x, F in zip(self.xs, self.Fs) if F < 1.0]
        if not xs:
            return Domain("unknown")
        top = xs[-1]
        candidates = [y for y in xs if y > 0 and 2.0 * y <= top and 0.5 * y >= self.xs[0]]
        if not candidates:
            return Domain("unknown")
        y = candidates[-1]
        ty = self.tail(y)
        estimates = []
        for mult in (0.5, 2.0):
            ratio = self.tail(mult * y) / ty
            if not ratio > 0:
                return Domain("unknown")
            estimates.append(-math.log(ratio) / math.log(mult))
        g1, g2 = estimates
        if g1 <= 0 or g2 <= 0 or abs(g1 - g2) > 0.05 * max(g1, g2):
            return Domain("unknown")
        return Domain("frechet", 0.5 * (g1 + g2))
