"""Mixing laws for the limit variable Lambda.

Provides the Laplace--Stieltjes transform E exp(-Lambda z), power mixtures
of an extreme-value law, and the weighted moments
m_k(x) = integral of lambda**k H(x)**lambda dP(Lambda < lambda) consumed by
the general rate bound.  A divergent weighted moment is returned as
``math.inf`` (the "moment unavailable" signal) rather than raised, so bound
selection can fall back to the moment-free bound.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special, stats

from .errors import DomainError, TableFormatError
from .evt_laws import EvtLaw

KINDS = ("point", "gamma", "discrete", "density")

_QUAD = dict(epsabs=0.0, epsrel=1e-10, limit=500)
# exp(-37) < 1e-16: beyond lambda = 37 / theta the factor exp(-lambda theta) is negligible
_EXP_CUTOFF = 37.0


def sup_lambda_power(b: float, alpha: float) -> float:
    """sup over lambda >= 0 of lambda**b * alpha**lambda = (b / (e log(1/alpha)))**b."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    return (b / (math.e * -math.log(alpha))) ** b


@dataclass(frozen=True, eq=False)
class MixingLaw:
    kind: str
    lam0: float = 0.0
    shape: float = 1.0
    scale: float = 1.0
    atoms: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()
    pdf: Callable[[float], float] | None = None
    upper: float = math.inf
    tail_index: float | None = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def point(cls, lam0: float) -> "MixingLaw":
        if not lam0 >= 0:
            raise DomainError(f"point mass needs lambda0 >= 0, got {lam0}")
        return cls("point", lam0=float(lam0))

    @classmethod
    def gamma(cls, shape: float, scale: float = 1.0) -> "MixingLaw":
        if not (shape > 0 and scale > 0):
            raise DomainError(f"gamma needs shape > 0 and scale > 0, got {shape}, {scale}")
        return cls("gamma", shape=float(shape), scale=float(scale))

    @classmethod
    def discrete(cls, atoms: Sequence[float], probs: Sequence[float]) -> "MixingLaw":
        atoms = tuple(float(a) for a in atoms)
        probs = tuple(float(p) for p in probs)
        if len(atoms) == 0 or len(atoms) != len(probs):
            raise DomainError("discrete law needs equally many atoms and probabilities")
        if any(a < 0 for a in atoms) or any(p < 0 for p in probs):
            raise DomainError("discrete atoms and probabilities must be nonnegative")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise DomainError(f"discrete probabilities sum to {math.fsum(probs)!r}, not 1")
        return cls("discrete", atoms=atoms, probs=probs)

    @classmethod
    def density(
        cls,
        pdf: Callable[[float], float],
        upper: float = math.inf,
        tail_index: float | None = None,
    ) -> "MixingLaw":
        """Absolutely continuous law on [0, upper].

        ``upper`` is the support end or a point past which the mass is
        negligible; ``tail_index`` declares a polynomial tail
        P(Lambda > u) ~ u**-tail_index (None means all moments exist).
        """
        law = cls("density", pdf=pdf, upper=float(upper), tail_index=tail_index)
        mass = law._integrate(pdf, 0.0, law.upper)
        if abs(mass - 1.0) > 1e-8:
            raise DomainError(f"density integrates to {mass!r}, not 1")
        return law

    @classmethod
    def from_csv(cls, path: str | Path) -> "MixingLaw":
        """Discrete law from a CSV file with header ``lambda,p``."""
        atoms: list[float] = []
        probs: list[float] = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["lambda", "p"]:
                raise TableFormatError(f"{path}:1: expected header 'lambda,p', got {header!r}")
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != 2:
                    raise TableFormatError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
                try:
                    lam, p = float(row[0]), float(row[1])
                except ValueError:
                    raise TableFormatError(f"{path}:{lineno}: non-numeric value in {row!r}") from None
                if lam < 0 or not 0 <= p <= 1:
                    raise TableFormatError(f"{path}:{lineno}: need lambda >= 0 and p in [0, 1]")
                atoms.append(lam)
                probs.append(p)
        try:
            return cls.discrete(atoms, probs)
        except DomainError as exc:
            raise TableFormatError(f"{path}: {exc}") from None

    def as_density(self) -> "MixingLaw":
        """The same gamma law routed through the generic quadrature path."""
        if self.kind != "gamma":
            raise DomainError("as_density is only defined for gamma laws")
        dist = stats.gamma(self.shape, scale=self.scale)
        return MixingLaw.density(dist.pdf, upper=float(dist.isf(1e-17)))

    # -- helpers ----------------------------------------------------------

    def _integrate(self, fn, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        if math.isinf(hi):
            # finite head plus transformed far tail
            mid = lo + 1.0
            head, _ = integrate.quad(fn, lo, mid, **_QUAD)
            far, _ = integrate.quad(fn, mid, math.inf, **_QUAD)
            return head + far
        val, _ = integrate.quad(fn, lo, hi, **_QUAD)
        return val

    @property
    def zero_mass(self) -> float:
        """P(Lambda = 0)."""
        if self.kind == "point":
            return 1.0 if self.lam0 == 0 else 0.0
        if self.kind == "discrete":
            return math.fsum(p for a, p in zip(self.atoms, self.probs) if a == 0)
        return 0.0

    # -- transforms -------------------------------------------------------

    def ls_transform(self, z: float) -> float:
        """E exp(-Lambda z) for z >= 0 (z = inf gives P(Lambda = 0))."""
        z = float(z)
        if not z >= 0:
            raise DomainError(f"Laplace--Stieltjes transform needs z >= 0, got {z}")
        if math.isinf(z):
            return self.zero_mass
        if self.kind == "point":
            return math.exp(-self.lam0 * z)
        if self.kind == "gamma":
            return math.exp(-self.shape * math.log1p(self.scale * z))
        if self.kind == "discrete":
            return math.fsum(p * math.exp(-a * z) for a, p in zip(self.atoms, self.probs))
        if z == 0.0:
            return 1.0
        hi = min(self.upper, _EXP_CUTOFF / z)
        pdf = self.pdf
        return self._integrate(lambda lam: math.exp(-lam * z) * pdf(lam), 0.0, hi)

    def power_mixture(self, evt: EvtLaw, x: float) -> float:
        """Integral of H(x)**lambda dP(Lambda < lambda)."""
        return self.ls_transform(-float(evt.log_h(x)))

    def moment(self, k: float) -> float:
        """E Lambda**k, ``math.inf`` when it diverges."""
        if self.kind == "point":
            return self.lam0**k
        if self.kind == "gamma":
            return math.exp(special.gammaln(self.shape + k) - special.gammaln(self.shape)) * self.scale**k
        if self.kind == "discrete":
            return math.fsum(p * a**k for a, p in zip(self.atoms, self.probs))
        if self.tail_index is not None and k >= self.tail_index and math.isinf(self.upper):
            return math.inf
        pdf = self.pdf
        return self._integrate(lambda lam: lam**k * pdf(lam), 0.0, self.upper)

    def mean(self) -> float:
        """E Lambda (``math.inf`` when infinite)."""
        return self.moment(1)

    def weighted_moment(self, evt: EvtLaw, x: float, k: int) -> float:
        """m_k(x) = integral of lambda**k H(x)**lambda dP(Lambda < lambda)."""
        if k < 1:
            raise DomainError(f"k must be a positive integer, got {k}")
        theta = -float(evt.log_h(x))
        if math.isinf(theta):
            raise DomainError(f"H(x) = 0 at x={x}")
        if theta == 0.0:
            return self.moment(k)
        if self.kind == "point":
            return self.lam0**k * math.exp(-self.lam0 * theta)
        if self.kind == "gamma":
            # Gamma(r+k) s**k / (Gamma(r) (1 + s theta)**(r+k))
            r, s = self.shape, self.scale
            return math.exp(
                special.gammaln(r + k) - special.gammaln(r) + k * math.log(s) - (r + k) * math.log1p(s * theta)
            )
        if self.kind == "discrete":
            return math.fsum(p * a**k * math.exp(-a * theta) for a, p in zip(self.atoms, self.probs))
        hi = min(self.upper, (_EXP_CUTOFF + k * math.log(_EXP_CUTOFF / theta + 1.0)) / theta + k / theta)
        pdf = self.pdf
        return self._integrate(lambda lam: lam**k * math.exp(-lam * theta) * pdf(lam), 0.0, hi)

    # -- probabilities ----------------------------------------------------

    def tail_prob(self, u: float) -> float:
        """P(Lambda > u)."""
        u = float(u)
        if math.isinf(u):
            return 0.0
        if self.kind == "point":
            return 1.0 if self.lam0 > u else 0.0
        if self.kind == "gamma":
            return float(special.gammaincc(self.shape, max(u, 0.0) / self.scale))
        if self.kind == "discrete":
            return math.fsum(p for a, p in zip(self.atoms, self.probs) if a > u)
        if u >= self.upper:
            return 0.0
        return min(1.0, self._integrate(self.pdf, max(u, 0.0), self.upper))

    def cdf(self, lam: float) -> float:
        """P(Lambda < lam)."""
        lam = float(lam)
        if lam <= 0:
            return 0.0
        if self.kind == "point":
            return 1.0 if self.lam0 < lam else 0.0
        if self.kind == "gamma":
            return float(special.gammainc(self.shape, lam / self.scale))
        if self.kind == "discrete":
            return math.fsum(p for a, p in zip(self.atoms, self.probs) if a < lam)
        return min(1.0, self._integrate(self.pdf, 0.0, min(lam, self.upper)))

    def breakpoints(self) -> tuple[float, ...]:
        """Jump locations of the d.f. (for quadrature of integrands involving it)."""
        if self.kind == "point":
            return (self.lam0,)
        if self.kind == "discrete":
            return tuple(sorted(set(self.atoms)))
        return ()

    # -- sampling ---------------------------------------------------------

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "point":
            return np.full(size, self.lam0)
        if self.kind == "gamma":
            return rng.gamma(self.shape, self.scale, size=size)
        if self.kind == "discrete":
            return rng.choice(np.asarray(self.atoms), size=size, p=np.asarray(self.probs))
        return self._inverse_table()(rng.random(size))

    def _inverse_table(self):
        # tabulated inverse d.f. on a fine grid; accurate to the grid spacing only
        hi = self.upper
        if math.isinf(hi):
            hi = 1.0
            while self.tail_prob(hi) > 1e-12 and hi < 1e12:
                hi *= 2.0
        grid = np.linspace(0.0, hi, 20001)
        vals = np.array([self.pdf(g) for g in grid])
        cum = integrate.cumulative_trapezoid(vals, grid, initial=0.0)
        cum /= cum[-1]
        return lambda u: np.interp(u, cum, grid)
