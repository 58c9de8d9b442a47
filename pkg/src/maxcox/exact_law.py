"""Exact distributions of maxima over random sample sizes.

For a sample size N with generating function psi and i.i.d. marks with d.f. F,

    P(max_{k <= N} X_k < x) = psi(F(x)),

the empty sample (N = 0, maximum -inf) contributing P(N = 0) at every finite
x.  Evaluation goes through ``psi_tail(v) = psi(1 - v)`` with v = 1 - F(x) so
that deep-tail arguments keep their relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .mixing import MixingLaw
from .normalizer import NormalizationPlan
from .obs_dist import ObservationLaw

KINDS = ("fixed", "binomial", "poisson", "mixed_poisson", "neg_binomial")


@dataclass(frozen=True, eq=False)
class RandomSizeLaw:
    kind: str
    n: int = 0
    p: float = 0.0
    lam: float = 0.0
    r: float = 1.0
    mix: MixingLaw | None = None

    @classmethod
    def fixed(cls, n: int) -> "RandomSizeLaw":
        if n < 0 or int(n) != n:
            raise DomainError(f"fixed size needs an integer n >= 0, got {n}")
        return cls("fixed", n=int(n))

    @classmethod
    def binomial(cls, n: int, p: float) -> "RandomSizeLaw":
        if n < 0 or int(n) != n or not 0 <= p <= 1:
            raise DomainError(f"binomial needs integer n >= 0 and p in [0, 1], got {n}, {p}")
        return cls("binomial", n=int(n), p=float(p))

    @classmethod
    def poisson(cls, lam: float) -> "RandomSizeLaw":
        if not lam >= 0:
            raise DomainError(f"poisson needs lambda >= 0, got {lam}")
        return cls("poisson", lam=float(lam))

    @classmethod
    def mixed_poisson(cls, mix: MixingLaw) -> "RandomSizeLaw":
        """N(t) = N_1(Lambda t): a Cox process led by Lambda(t) = Lambda * t."""
        return cls("mixed_poisson", mix=mix)

    @classmethod
    def neg_binomial(cls, r: float, p: float) -> "RandomSizeLaw":
        """P(N = k) = Gamma(k+r) / (k! Gamma(r)) p**r (1-p)**k."""
        if not (r > 0 and 0 < p <= 1):
            raise DomainError(f"neg_binomial needs r > 0 and p in (0, 1], got {r}, {p}")
        return cls("neg_binomial", r=float(r), p=float(p))

    @property
    def horizon(self) -> float:
        """t = (1 - p) / p, the horizon at which NB(r, p) is gamma(r)-mixed Poisson."""
        if self.kind != "neg_binomial":
            raise DomainError("horizon is defined for neg_binomial laws only")
        return (1.0 - self.p) / self.p

    def limit_mixing(self, d_t: float = 1.0, t: float | None = None) -> MixingLaw:
        """Law of N's intensity divided by d(t): the Lambda of the power mixture."""
        if self.kind == "fixed":
            return MixingLaw.point(self.n / d_t)
        if self.kind == "binomial":
            return MixingLaw.point(self.n * self.p / d_t)
        if self.kind == "poisson":
            return MixingLaw.point(self.lam / d_t)
        if self.kind == "neg_binomial":
            scale = self.horizon / d_t
            return MixingLaw.gamma(self.r, 1.0 if scale == 1.0 else scale)
        if t is None:
            raise DomainError("mixed_poisson needs the horizon t")
        if t == d_t:
            return self.mix
        if self.mix.kind == "gamma":
            return MixingLaw.gamma(self.mix.shape, self.mix.scale * t / d_t)
        raise DomainError("rescaling a non-gamma mixing law is not supported; use t = d(t)")

    # -- generating function ---------------------------------------------

    def psi(self, s: float, t: float | None = None) -> float:
        """E s**N for 0 <= s <= 1."""
        if not 0 <= s <= 1:
            raise DomainError(f"generating function needs s in [0, 1], got {s}")
        if self.kind == "fixed":
            return float(s) ** self.n
        if self.kind == "binomial":
            return (1.0 - self.p + self.p * s) ** self.n
        return self.psi_tail(1.0 - s, t)

    def psi_tail(self, v: float, t: float | None = None) -> float:
        """psi(1 - v), evaluated without forming 1 - v where possible."""
        v = float(v)
        if self.kind == "fixed":
            if self.n == 0:
                return 1.0
            return 0.0 if v >= 1.0 else math.exp(self.n * math.log1p(-v))
        if self.kind == "binomial":
            if self.n == 0 or self.p == 0:
                return 1.0
            pv = self.p * v
            return 0.0 if pv >= 1.0 else math.exp(self.n * math.log1p(-pv))
        if self.kind == "poisson":
            return math.exp(-self.lam * v)
        if self.kind == "neg_binomial":
            return math.exp(-self.r * math.log1p(self.horizon * v))
        if t is None:
            raise DomainError("mixed_poisson needs the horizon t")
        return self.mix.ls_transform(t * v)

    # -- sampling ---------------------------------------------------------

    def sample_counts(self, rng: np.random.Generator, size: int, t: float | None = None) -> np.ndarray:
        if self.kind == "fixed":
            return np.full(size, self.n, dtype=np.int64)
        if self.kind == "binomial":
            return rng.binomial(self.n, self.p, size=size)
        if self.kind == "poisson":
            return rng.poisson(self.lam, size=size)
        if self.kind == "neg_binomial":
            return rng.negative_binomial(self.r, self.p, size=size)
        if t is None:
            raise DomainError("mixed_poisson needs the horizon t")
        lam = self.mix.sample(rng, size)
        return rng.poisson(lam * t)


def max_cdf(size: RandomSizeLaw, law: ObservationLaw, x, t: float | None = None):
    """P(max_{k <= N} X_k < x) = psi(F(x))."""
    if np.ndim(x):
        return np.array([size.psi_tail(v, t) for v in np.asarray(law.tail(x)).ravel()]).reshape(np.shape(x))
    return size.psi_tail(law.tail(x), t)


def normalized_max_cdf(size: RandomSizeLaw, plan: NormalizationPlan, t: float, x: float) -> float:
    """P((max - a(t)) / b(t) < x), computed from z_t(x) = d(t) tail(a + b x)."""
    z = plan.z_t(t, x)
    dt = float(plan.d(t))
    if size.kind == "poisson":
        return math.exp(-(size.lam / dt) * z)
    if size.kind == "neg_binomial":
        return math.exp(-size.r * math.log1p((size.horizon / dt) * z))
    if size.kind == "mixed_poisson":
        return size.mix.ls_transform((t / dt) * z)
    return size.psi_tail(z / dt, t)
