"""JSON scenario files for the command line front end.

A scenario names every input of a run::

    {
      "name": "example1",
      "observation": {"family": "pareto", "c": 1, "gamma": 1},
      "size": {"kind": "neg_binomial", "r": 1, "p": 0.2},
      "mixing": {"kind": "gamma", "shape": 1},              # optional limit Lambda
      "evt": {"form": "frechet", "gamma": 1},               # optional
      "normalization": {"mode": "frechet", "d": "identity"},
      "t": 4.0,
      "t_grid": [2, 10, 100],                               # for `normalize`
      "p_grid": [0.4, 0.2, 0.1, 0.01],                      # for `example1`
      "x_grid": {"start": 0.05, "stop": 50, "num": 2000, "spacing": "log"},
      "bounds": ["cor1"],
      "params": {"q": 0.5, "M": 1},
      "mc": {"n_samples": 100000, "seed": 1, "delta": 0.01}
    }

Unknown keys anywhere are rejected with the offending field path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DomainError, ScenarioError
from .evt_laws import EvtLaw
from .exact_law import RandomSizeLaw
from .mixing import MixingLaw
from .normalizer import NormalizationPlan, identity, make_plan
from .obs_dist import ObservationLaw
from .rate_bounds import BOUND_KINDS

TOP_KEYS = {
    "name", "observation", "size", "mixing", "evt", "normalization", "t", "t_grid",
    "p_grid", "x_grid", "bounds", "params", "mc",
}  # fmt: skip


@dataclass(frozen=True)
class PowerClock:
    """d(t) = scale * t**power."""

    scale: float = 1.0
    power: float = 1.0

    def __call__(self, t: float) -> float:
        return self.scale * t**self.power


@dataclass
class Scenario:
    name: str = "default"
    observation: dict = field(default_factory=lambda: {"family": "pareto", "c": 1.0, "gamma": 1.0})
    size: dict = field(default_factory=lambda: {"kind": "poisson", "lam": 10.0})
    mixing: dict | None = None
    evt: dict | None = None
    normalization: dict = field(default_factory=lambda: {"d": "identity"})
    t: float | None = None
    t_grid: list[float] = field(default_factory=list)
    p_grid: list[float] = field(default_factory=list)
    x_grid: Any = field(default_factory=lambda: {"start": 0.05, "stop": 50.0, "num": 200, "spacing": "log"})
    bounds: list[str] = field(default_factory=lambda: ["cor1"])
    params: dict = field(default_factory=dict)
    mc: dict = field(default_factory=lambda: {"n_samples": 100_000, "seed": 0, "delta": 0.01})
    base_dir: Path = field(default_factory=Path.cwd)

    # -- parsing ----------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> "Scenario":
        if not isinstance(data, dict):
            raise ScenarioError("scenario: top level must be a JSON object")
        unknown = set(data) - TOP_KEYS
        if unknown:
            raise ScenarioError(f"scenario: unknown key(s) {sorted(unknown)}")
        sc = cls(**{k: v for k, v in data.items()}, base_dir=base_dir or Path.cwd())
        sc.validate()
        return sc

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ScenarioError(f"{path}: cannot read scenario ({exc.strerror})") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None
        try:
            return cls.from_dict(data, base_dir=path.parent)
        except ScenarioError as exc:
            raise ScenarioError(f"{path}: {exc}") from None

    def validate(self) -> None:
        """Build every derived object once so errors surface before any output."""
        for key in ("bounds",):
            for kind in getattr(self, key):
                if kind not in BOUND_KINDS:
                    raise ScenarioError(f"bounds: unknown bound kind {kind!r}")
        _check_keys("params", self.params, {"q", "s", "M"})
        _check_keys("mc", self.mc, {"n_samples", "seed", "delta"})
        try:
            self.obs_law()
            self.size_law()
            self.limit_mix()
            self.plan()
            self.grid()
        except (DomainError, ArithmeticError, TypeError, ValueError) as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(str(exc)) from None

    # -- builders ---------------------------------------------------------

    def obs_law(self) -> ObservationLaw:
        spec = dict(self.observation)
        family = _pop(spec, "family", "observation")
        if family == "pareto":
            _check_keys("observation", spec, {"c", "gamma"})
            return ObservationLaw.pareto(float(spec.get("c", 1.0)), float(spec.get("gamma", 1.0)))
        if family == "exponential":
            _check_keys("observation", spec, {"rate"})
            return ObservationLaw.exponential(float(spec.get("rate", 1.0)))
        if family == "bounded_power":
            _check_keys("observation", spec, {"gamma", "rext", "lext"})
            return ObservationLaw.bounded_power(
                float(spec.get("gamma", 1.0)), float(spec.get("rext", 1.0)), spec.get("lext")
            )
        if family == "tabulated":
            _check_keys("observation", spec, {"csv", "x", "F"})
            if "csv" in spec:
                return ObservationLaw.from_csv(self.base_dir / spec["csv"])
            return ObservationLaw.tabulated(spec["x"], spec["F"])
        raise ScenarioError(f"observation.family: unknown family {family!r}")

    def _mix_from(self, where: str, spec: dict) -> MixingLaw:
        spec = dict(spec)
        kind = _pop(spec, "kind", where)
        if kind == "point":
            _check_keys(where, spec, {"lam0"})
            return MixingLaw.point(float(spec.get("lam0", 1.0)))
        if kind == "gamma":
            _check_keys(where, spec, {"shape", "scale"})
            return MixingLaw.gamma(float(spec.get("shape", 1.0)), float(spec.get("scale", 1.0)))
        if kind == "discrete":
            _check_keys(where, spec, {"atoms", "probs", "csv"})
            if "csv" in spec:
                return MixingLaw.from_csv(self.base_dir / spec["csv"])
            return MixingLaw.discrete(spec["atoms"], spec["probs"])
        raise ScenarioError(f"{where}.kind: unsupported mixing kind {kind!r}")

    def size_law(self) -> RandomSizeLaw:
        spec = dict(self.size)
        kind = _pop(spec, "kind", "size")
        if kind == "fixed":
            _check_keys("size", spec, {"n"})
            return RandomSizeLaw.fixed(int(spec["n"]))
        if kind == "binomial":
            _check_keys("size", spec, {"n", "p"})
            return RandomSizeLaw.binomial(int(spec["n"]), float(spec["p"]))
        if kind == "poisson":
            _check_keys("size", spec, {"lam"})
            return RandomSizeLaw.poisson(float(spec["lam"]))
        if kind == "neg_binomial":
            _check_keys("size", spec, {"r", "p"})
            return RandomSizeLaw.neg_binomial(float(spec["r"]), float(spec["p"]))
        if kind == "mixed_poisson":
            _check_keys("size", spec, {"mixing"})
            return RandomSizeLaw.mixed_poisson(self._mix_from("size.mixing", spec["mixing"]))
        raise ScenarioError(f"size.kind: unknown size law {kind!r}")

    def limit_mix(self) -> MixingLaw | None:
        if self.mixing is None:
            return None
        return self._mix_from("mixing", self.mixing)

    def evt_law(self) -> EvtLaw | None:
        if self.evt is None:
            return None
        spec = dict(self.evt)
        form = _pop(spec, "form", "evt")
        if form == "universal":
            _check_keys("evt", spec, {"tau"})
            return EvtLaw.universal(float(spec["tau"]))
        _check_keys("evt", spec, {"gamma"})
        if form == "frechet":
            return EvtLaw.frechet(float(spec["gamma"]))
        if form == "weibull":
            return EvtLaw.weibull(float(spec["gamma"]))
        if form == "gumbel":
            return EvtLaw.gumbel()
        raise ScenarioError(f"evt.form: unknown form {form!r}")

    def clock(self):
        d = self.normalization.get("d", "identity")
        if d == "identity":
            return identity
        if isinstance(d, dict):
            _check_keys("normalization.d", d, {"scale", "power"})
            return PowerClock(float(d.get("scale", 1.0)), float(d.get("power", 1.0)))
        raise ScenarioError(f"normalization.d: expected 'identity' or {{scale, power}}, got {d!r}")

    def plan(self) -> NormalizationPlan:
        _check_keys("normalization", self.normalization, {"mode", "d"})
        return make_plan(self.obs_law(), self.evt_law(), self.clock(), self.normalization.get("mode"))

    def horizon(self) -> float:
        if self.t is not None:
            return float(self.t)
        size = self.size_law()
        if size.kind == "neg_binomial":
            return size.horizon
        if size.kind == "poisson":
            return size.lam
        if size.kind in ("fixed", "binomial"):
            return float(size.n)
        raise ScenarioError("t: a horizon is required for mixed_poisson sizes")

    def grid(self) -> np.ndarray:
        g = self.x_grid
        if isinstance(g, list):
            return np.asarray([float(v) for v in g])
        if not isinstance(g, dict):
            raise ScenarioError("x_grid: expected a list or {start, stop, num, spacing}")
        _check_keys("x_grid", g, {"start", "stop", "num", "spacing"})
        start, stop, num = float(g["start"]), float(g["stop"]), int(g["num"])
        spacing = g.get("spacing", "linear")
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ScenarioError("x_grid: log spacing needs positive start and stop")
            return np.logspace(math.log10(start), math.log10(stop), num)
        if spacing == "linear":
            return np.linspace(start, stop, num)
        raise ScenarioError(f"x_grid.spacing: expected 'linear' or 'log', got {spacing!r}")

    def echo(self) -> dict:
        return {
            "name": self.name, "observation": self.observation, "size": self.size, "mixing": self.mixing,
            "evt": self.evt, "normalization": self.normalization, "t": self.horizon(), "bounds": self.bounds,
            "params": self.params, "mc": self.mc,
        }  # fmt: skip


def _pop(spec: dict, key: str, where: str):
    if not isinstance(spec, dict):
        raise ScenarioError(f"{where}: expected an object")
    if key not in spec:
        raise ScenarioError(f"{where}.{key}: required field missing")
    return spec.pop(key)


def _check_keys(where: str, spec: dict, allowed: set[str]) -> None:
    if not isinstance(spec, dict):
        raise ScenarioError(f"{where}: expected an object")
    unknown = set(spec) - allowed
    if unknown:
        raise ScenarioError(f"{where}: unknown key(s) {sorted(unknown)}")


# -- built-in scenarios ---------------------------------------------------------


def example1(p: float = 0.2, r: float = 1.0, gamma: float = 1.0, c: float = 1.0) -> Scenario:
    """Negative binomial size, Pareto marks, gamma(r) limit mixing, b(t) = F^-1(1 - 1/t)."""
    return Scenario.from_dict(
        {
            "name": "example1",
            "observation": {"family": "pareto", "c": c, "gamma": gamma},
            "size": {"kind": "neg_binomial", "r": r, "p": p},
            "mixing": {"kind": "gamma", "shape": r},
            "normalization": {"mode": "frechet", "d": "identity"},
            "p_grid": [0.4, 0.2, 0.1, 0.01, 0.001],
            "x_grid": {"start": 0.05, "stop": 50.0, "num": 2000, "spacing": "log"},
            "bounds": ["cor1"],
            "mc": {"n_samples": 100_000, "seed": 20180101, "delta": 0.01},
        }
    )


def example2(t: float = 1000.0) -> Scenario:
    """Poisson size lambda = t, exponential marks, a(t) = log t, b(t) = 1: exact Gumbel law."""
    return Scenario.from_dict(
        {
            "name": "example2",
            "observation": {"family": "exponential", "rate": 1.0},
            "size": {"kind": "poisson", "lam": t},
            "mixing": {"kind": "point", "lam0": 1.0},
            "normalization": {"mode": "gumbel", "d": "identity"},
            "t": t,
            "x_grid": {"start": -5.0, "stop": 10.0, "num": 301, "spacing": "linear"},
            "bounds": ["cor4"],
            "mc": {"n_samples": 100_000, "seed": 20180102, "delta": 0.01},
        }
    )


BUILTIN = {"example1": example1, "example2": example2}
