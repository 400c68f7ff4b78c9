"""Wall-clock benchmark of the five methods on pre-generated noisy signals.

Timing runs the compiled loops in :mod:`hidd.fast`. Operation tallies come
from the instrumented pure-Python path: the cost of a step depends only on
the method, the order and which of the three cases the step falls in, so a
cell's tally is the per-case tally weighted by the case counts of the run.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import IO, Mapping, Sequence

import numpy as np

from .counting import OpCounter, wrap
from .differentiator import advance, counted_source
from .errors import GainUnavailable, NonFiniteState, UnsupportedOrder
from .fast import runner
from .methods import PLAN, Method, Recomputed
from .params import Params, gains_for, make_params, nonrecursive_gains, precompute
from .signals import SignalSpec, gen_signal

# Recursive-form gains extended past the standard table; timing use only.
EXTENDED_RECURSIVE_10 = (1.1, 1.5, 2.0, 3.0, 5.0, 7.0, 10.0, 12.0, 14.0, 17.0, 20.0)

WARMUP_STEPS = 20_000

CSV_HEADER = ("method", "n", "horizon_s", "median_wall_s", "steps_per_s", "adds", "muls", "roots", "cmps")


def _default_gains() -> dict[int, tuple[float, ...]]:
    return {10: nonrecursive_gains(EXTENDED_RECURSIVE_10)}


@dataclass(frozen=True)
class BenchConfig:
    """Benchmark grid.

    Attributes
    ----------
    n_values : tuple of int
    tau : float
        Sampling period in seconds.
    horizons : tuple of float
        Simulated durations in seconds; each must be an integer multiple of ``tau``.
    methods : tuple of Method
    repetitions : int
        Timed runs per cell; the median is reported.
    L : float
    gains : dict
        Explicit gains by order, overriding the shipped defaults.
    warmup : bool
        Run and discard a short untimed pass before each cell.
    """

    n_values: tuple[int, ...] = (3, 7, 10)
    tau: float = 1e-3
    horizons: tuple[float, ...] = (2000.0, 10000.0, 25000.0, 50000.0)
    methods: tuple[Method, ...] = tuple(Method)
    repetitions: int = 3
    L: float = 10.0
    gains: Mapping[int, tuple[float, ...]] = field(default_factory=_default_gains)
    warmup: bool = True

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        for h in self.horizons:
            self.steps(h)

    def steps(self, horizon: float) -> int:
        k = round(horizon / self.tau)
        if k < 1 or not math.isclose(k * self.tau, horizon, rel_tol=1e-9):
            raise ValueError(f"horizon {horizon!r} is not a positive multiple of tau={self.tau!r}")
        return k

    def params_for(self, n: int) -> Params:
        if n in self.gains:
            lam = self.gains[n]
        else:
            try:
                lam = gains_for(n)
            except UnsupportedOrder as exc:
                raise GainUnavailable(f"no gains for n={n}; add them to BenchConfig.gains") from exc
        return make_params(n, self.L, lam, self.tau)


@dataclass(frozen=True)
class BenchRow:
    method: Method
    n: int
    horizon_s: float
    steps: int
    median_wall_s: float
    steps_per_s: float
    ops: OpCounter
    case_counts: tuple[int, int, int]  # neg, dead, pos
    wall_s: tuple[float, ...]

    def csv_fields(self) -> list:
        o = self.ops
        return [self.method.value, self.n, repr(self.horizon_s), repr(self.median_wall_s),
                repr(self.steps_per_s), o.adds, o.muls, o.roots, o.cmps]


@dataclass
class BenchReport:
    config: BenchConfig
    rows: list[BenchRow] = field(default_factory=list)

    def row(self, method: Method, n: int, horizon: float) -> BenchRow:
        for r in self.rows:
            if r.method is method and r.n == n and r.horizon_s == horizon:
                return r
        raise KeyError((method, n, horizon))

    def write_csv(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(r.csv_fields())

    def to_json(self) -> str:
        cfg = asdict(self.config)
        cfg["methods"] = [m.value for m in self.config.methods]
        cfg["gains"] = {str(k): list(v) for k, v in self.config.gains.items()}
        rows = []
        for r in self.rows:
            d = {k: getattr(r, k) for k in ("n", "horizon_s", "steps", "median_wall_s", "steps_per_s")}
            d["method"] = r.method.value
            d.update(asdict(r.ops))
            d["case_counts"] = dict(zip(("neg", "dead", "pos"), r.case_counts))
            d["wall_s"] = list(r.wall_s)
            rows.append(d)
        return json.dumps({"config": cfg, "rows": rows}, indent=2)


def case_tallies(params: Params, method: Method) -> tuple[OpCounter, OpCounter, OpCounter]:
    """Counted cost of one step in each case (neg, dead, pos) for ``method``."""
    strategy, form = PLAN[method]
    n = params.n
    a0 = precompute(params).a[0]
    out = []
    for f in (2 * a0 + 1.0, 0.0, -(2 * a0 + 1.0)):
        ops = OpCounter()
        if method is Method.NAIVE:
            src = Recomputed.from_params(params, ops)
        else:
            src = counted_source(precompute(params), ops)
        advance(src, wrap((0.0,) * (n + 1), ops), wrap(f, ops), n, strategy, form)
        out.append(ops)
    return tuple(out)


def tally(per_case: Sequence[OpCounter], counts) -> OpCounter:
    total = OpCounter()
    for ops, k in zip(per_case, counts):
        total = total + ops.scaled(int(k))
    return total


def run_bench(config: BenchConfig, signal: SignalSpec, clock=time.perf_counter) -> BenchReport:
    """Time every (method, n, horizon) cell of ``config``.

    Samples are generated once per horizon before any timing. Each cell gets
    an optional warm-up pass on a prefix of the samples, then
    ``config.repetitions`` timed runs from a zero state.
    """
    report = BenchReport(config)
    params = {n: config.params_for(n) for n in config.n_values}
    tallies = {(m, n): case_tallies(params[n], m) for n in config.n_values for m in config.methods}
    for horizon in config.horizons:
        steps = config.steps(horizon)
        samples = np.ascontiguousarray(gen_signal(signal, config.tau, steps))
        for n in config.n_values:
            for method in config.methods:
                fn = runner(params[n], method)
                if config.warmup:
                    fn(samples[: min(steps, WARMUP_STEPS)], np.zeros(n + 1))
                walls, seen = [], set()
                for _ in range(config.repetitions):
                    z0 = np.zeros(n + 1)
                    t0 = clock()
                    zf, counts = fn(samples, z0)
                    walls.append(clock() - t0)
                    seen.add(tuple(int(c) for c in counts))
                    if not np.isfinite(zf).all():
                        raise NonFiniteState(f"{method.value} n={n} horizon={horizon} diverged")
                if len(seen) != 1:
                    raise RuntimeError(f"non-deterministic case counts for {method.value} n={n}")
                counts = seen.pop()
                med = statistics.median(walls)
                report.rows.append(
                    BenchRow(
                        method=method,
                        n=n,
                        horizon_s=float(horizon),
                        steps=steps,
                        median_wall_s=med,
                        steps_per_s=steps / med if med > 0 else math.inf,
                        ops=tally(tallies[(method, n)], counts),
                        case_counts=counts,
                        wall_s=tuple(walls),
                    )
                )
        del samples
    return report


def config_from_mapping(cfg: Mapping) -> BenchConfig:
    """BenchConfig from JSON-style keys; unknown keys are ignored."""
    kw = {}
    if "n_values" in cfg:
        kw["n_values"] = tuple(int(n) for n in cfg["n_values"])
    if "tau" in cfg:
        kw["tau"] = float(cfg["tau"])
    if "horizons" in cfg:
        kw["horizons"] = tuple(float(h) for h in cfg["horizons"])
    if "methods" in cfg:
        kw["methods"] = tuple(Method(m) for m in cfg["methods"])
    if "repetitions" in cfg:
        kw["repetitions"] = int(cfg["repetitions"])
    if "L" in cfg:
        kw["L"] = float(cfg["L"])
    if "gains" in cfg:
        gains = _default_gains()
        gains.update({int(k): tuple(float(g) for g in v) for k, v in cfg["gains"].items()})
        kw["gains"] = gains
    return BenchConfig(**kw)
