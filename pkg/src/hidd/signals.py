"""Deterministic test signals with optional uniform measurement noise."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

SEED_ENV = "HIDD_SEED"


@dataclass(frozen=True)
class Sine:
    amplitude: float = 1.0
    frequency: float = 1.0  # rad/s

    def __call__(self, t):
        return self.amplitude * np.sin(self.frequency * t)


@dataclass(frozen=True)
class SumOfSines:
    terms: tuple[tuple[float, float, float], ...]  # (amplitude, rad/s, phase)

    def __call__(self, t):
        out = np.zeros_like(t)
        for amp, freq, phase in self.terms:
            out = out + amp * np.sin(freq * t + phase)
        return out


@dataclass(frozen=True)
class Ramp:
    slope: float = 1.0

    def __call__(self, t):
        return self.slope * t


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple[float, ...]  # ascending powers of t

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, self.coeffs)


@dataclass(frozen=True)
class Zero:
    def __call__(self, t):
        return np.zeros_like(t)


Kind = Union[Sine, SumOfSines, Ramp, Polynomial, Zero]

# sin(t) + 0.5 cos(2t)
DEFAULT_KIND = SumOfSines(((1.0, 1.0, 0.0), (0.5, 2.0, math.pi / 2)))


@dataclass(frozen=True)
class SignalSpec:
    """Base signal plus uniform noise in ``[-noise_amplitude, noise_amplitude]``."""

    kind: Kind = field(default_factory=lambda: DEFAULT_KIND)
    noise_amplitude: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if not self.noise_amplitude >= 0:
            raise ValueError(f"noise_amplitude must be >= 0, got {self.noise_amplitude!r}")


def gen_signal(spec: SignalSpec, tau: float, steps: int) -> np.ndarray:
    """Samples ``f_k = base(k tau) + noise_k`` for ``k = 0..steps-1``.

    The same spec always yields a bitwise identical array.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps!r}")
    t = np.arange(steps, dtype=np.float64) * tau
    f = np.asarray(spec.kind(t), dtype=np.float64)
    if spec.noise_amplitude > 0:
        rng = np.random.default_rng(spec.seed)
        f = f + rng.uniform(-spec.noise_amplitude, spec.noise_amplitude, steps)
    return f


def env_seed(default: int) -> int:
    """``HIDD_SEED`` when set, else ``default``."""
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


NAMED = {
    "default": DEFAULT_KIND,
    "sine": Sine(1.0, 1.0),
    "ramp": Ramp(1.0),
    "zero": Zero(),
}


def kind_from(value) -> Kind:
    """Signal kind from a name in :data:`NAMED` or a ``{"kind": ...}`` mapping."""
    if isinstance(value, str):
        try:
            return NAMED[value]
        except KeyError:
            raise ValueError(f"unknown signal {value!r}; choose from {sorted(NAMED)}") from None
    d = dict(value)
    kind = d.pop("kind")
    if kind == "sine":
        return Sine(float(d.get("amplitude", 1.0)), float(d.get("frequency", 1.0)))
    if kind == "sum_of_sines":
        return SumOfSines(tuple((float(a), float(w), float(p)) for a, w, p in d["terms"]))
    if kind == "ramp":
        return Ramp(float(d.get("slope", 1.0)))
    if kind == "polynomial":
        return Polynomial(tuple(float(c) for c in d["coeffs"]))
    if kind == "zero":
        return Zero()
    raise ValueError(f"unknown signal kind {kind!r}")


def signal_from_mapping(cfg: Mapping) -> SignalSpec:
    """Read ``signal``, ``noise_amplitude`` and ``seed``; HIDD_SEED wins over ``seed``."""
    kind = kind_from(cfg.get("signal", "default"))
    return SignalSpec(
        kind=kind,
        noise_amplitude=float(cfg.get("noise_amplitude", 1e-3)),
        seed=env_seed(int(cfg.get("seed", 0))),
    )
