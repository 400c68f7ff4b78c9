"""Self-contained validation suite behind ``hidd validate``.

Each check compares library output against an independent reference
(exact rational arithmetic, bisection, dense matrices) or a closed form and
returns a :class:`CheckResult`. The suite is small enough to run in seconds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .complexity import cost
from .counting import OpCounter
from .differentiator import State, UpdateForm, step
from .methods import Method
from .params import make_params, precompute
from .polyeval import EvalStrategy, PolySpec, evaluate
from .rootfind import classify, compute_bk, halley_solve, initial_guess, poly_for_case

STRATEGIES = tuple(EvalStrategy)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def random_case(rng: np.random.Generator, n_max: int = 12, dead: bool = False):
    """Random (params, tables, z, f, b_k), off the dead zone unless ``dead``."""
    while True:
        n = int(rng.integers(2, n_max + 1))
        params = make_params(
            n,
            float(10 ** rng.uniform(0, 2)),
            tuple(float(g) for g in rng.uniform(0.5, 10.0, n + 1)),
            float(10 ** rng.uniform(-3, -1.5)),
        )
        tables = precompute(params)
        a0 = tables.a[0]
        # state small enough that b_k near a_0 is representable
        z = tuple(float(v) for v in rng.normal(0.0, a0 * 10 ** rng.uniform(0, 3), n + 1))
        free = z[0] + sum(tables.w[l] * z[l] for l in range(1, n + 1))
        if dead:
            f = free + float(rng.uniform(-a0, a0))
        else:
            mag = a0 * (1.0 + 10 ** rng.uniform(-1, 6))
            f = free + (mag if rng.random() < 0.5 else -mag)
        b = compute_bk(tables, z, f)
        if (abs(b) <= a0) == dead:
            return params, tables, z, f, b


def exact_eval(spec: PolySpec, r: float):
    """p, p', p'' at ``r`` in exact rational arithmetic from the coefficients."""
    n = spec.n
    coeffs = [Fraction(spec.a[0]) + Fraction(spec.shift)] + [Fraction(x) for x in spec.a[1:]] + [Fraction(1)]
    x = Fraction(r)
    p = sum(c * x**i for i, c in enumerate(coeffs))
    dp = sum(i * c * x ** (i - 1) for i, c in enumerate(coeffs) if i >= 1)
    ddp = sum(i * (i - 1) * c * x ** (i - 2) for i, c in enumerate(coeffs) if i >= 2)
    return float(p), float(dp), float(ddp)


def bisect_root(spec: PolySpec, hi: float, iters: int = 200) -> float:
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if evaluate(EvalStrategy.HORNER_SEPARATE, spec, mid)[0] < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def check_closed_forms() -> CheckResult:
    hh7, d7 = cost(Method.HALF_HORNER, 7).total, cost(Method.DIRECT, 7).total
    d4, d5 = cost(Method.DIRECT, 4).total, cost(Method.DIRECT, 5).total
    fh4, st4 = cost(Method.FULL_HORNER, 4).total, cost(Method.SHAW_TRAUB, 4).total
    fh5, st5 = cost(Method.FULL_HORNER, 5).total, cost(Method.SHAW_TRAUB, 5).total
    ok = hh7 == 312 and d7 == 552 and d7 - hh7 == 240 and d4 < min(fh4, st4) and d5 > max(fh5, st5)
    return CheckResult("closed-forms", ok, f"HH(7)={hh7} Direct(7)={d7} Direct(4)={d4} Direct(5)={d5}")


def check_kernel_counts() -> CheckResult:
    worst = 0
    for n in range(2, 16):
        spec = PolySpec.from_coeffs([0.5] * n, -1.0)
        for method, strategy in ((Method.DIRECT, EvalStrategy.DIRECT), (Method.HALF_HORNER, EvalStrategy.HORNER_SEPARATE)):
            ops = OpCounter()
            evaluate(strategy, spec, 0.7, ops)
            row = cost(method, n)
            worst = max(worst, abs(ops.adds - row.adds_eval_per_iter), abs(ops.muls - row.muls_eval_per_iter))
    return CheckResult("kernel-counts", worst <= 2, f"max deviation {worst}")


def term_scale(spec: PolySpec, r: float) -> float:
    """Sum of absolute terms of p(r); the natural scale for errors in p."""
    return abs(spec.const_term) + sum(abs(spec.a[i]) * r**i for i in range(1, spec.n + 1)) + r ** (spec.n + 1)


def check_strategies(rng, cases: int = 50) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        params, tables, z, f, b = random_case(rng)
        spec = poly_for_case(classify(b, tables.a[0]), b, tables)
        r = initial_guess(b, tables.a[0], params.n)
        ref = exact_eval(spec, r)
        scales = (term_scale(spec, r), abs(ref[1]), abs(ref[2]))
        for s in STRATEGIES:
            got = evaluate(s, spec, r)
            worst = max(worst, *(abs(g - e) / sc for g, e, sc in zip(got, ref, scales)))
    return CheckResult("strategy-equivalence", worst <= 1e-9, f"worst relative error {worst:.3g}")


def check_roots(rng, cases: int = 50) -> CheckResult:
    """Three iterations: monotone approach to the bisection root, small residual.

    Convergence itself is checked with a longer solve against bisection.
    """
    bad, worst = 0, 0.0
    for _ in range(cases):
        params, tables, z, f, b = random_case(rng)
        spec = poly_for_case(classify(b, tables.a[0]), b, tables)
        r00 = initial_guess(b, tables.a[0], params.n)
        ref = bisect_root(spec, (abs(b) - tables.a[0]) ** (1.0 / (params.n + 1)))
        res = halley_solve(spec, r00)
        dist = [abs(r - ref) for r in res.iterates]
        monotone = all(d1 <= d0 + 4e-16 * ref for d0, d1 in zip(dist, dist[1:]))
        if not (monotone and res.residual <= 1e-9 * (1.0 + abs(spec.const_term))):
            bad += 1
        worst = max(worst, _rel(halley_solve(spec, r00, iters=12).r0, ref))
    ok = bad == 0 and worst <= 1e-9
    return CheckResult("root-vs-bisection", ok, f"{bad} bad 3-step solves; converged error {worst:.3g}")


def check_forms(rng, cases: int = 30) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        params, tables, z, f, _ = random_case(rng)
        s = State(z=z)
        outs = [step(s, f, tables, form=form).z for form in UpdateForm]
        for other in outs[1:]:
            worst = max(worst, max(_rel(x, y) for x, y in zip(outs[0], other)))
    return CheckResult("form-equivalence", worst <= 1e-12, f"worst relative error {worst:.3g}")


def check_dead_zone(rng, cases: int = 50) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        params, tables, z, f, _ = random_case(rng, dead=True)
        nxt = step(State(z=z), f, tables).z
        worst = max(worst, abs(nxt[0] - f) / (1.0 + abs(f) + max(abs(v) for v in z)))
    return CheckResult("dead-zone", worst <= 1e-12, f"worst scaled error {worst:.3g}")


def run_all(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    suite: list[Callable[[], CheckResult]] = [
        check_closed_forms,
        check_kernel_counts,
        lambda: check_strategies(rng),
        lambda: check_roots(rng),
        lambda: check_forms(rng),
        lambda: check_dead_zone(rng),
    ]
    out = []
    for fn in suite:
        try:
            out.append(fn())
        except Exception as exc:  # a crash is a failed check, not a crashed suite
            out.append(CheckResult(getattr(fn, "__name__", "check"), False, f"{type(exc).__name__}: {exc}"))
    return out
