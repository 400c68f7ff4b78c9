"""Acceptance criteria 1-8, each at its stated tolerance and time budget.

Every test appends one PASS/FAIL line to the terminal summary.
"""

from __future__ import annotations

import csv
import io
import time
from itertools import combinations

import numpy as np

from conftest import ACCEPTANCE_LINES
from hidd import gains_for, make_params, precompute
from hidd.bench import BenchConfig, run_bench
from hidd.cli import cli_main
from hidd.counting import OpCounter, wrap
from hidd.differentiator import State, UpdateForm, counted_source, run, step, update_horner, update_sum_of_powers
from hidd.methods import Method
from hidd.polyeval import EvalStrategy, PolySpec, evaluate
from hidd.rootfind import classify, compute_bk, halley_solve, initial_guess, poly_for_case
from hidd.signals import SignalSpec, Sine, gen_signal
from cases import hidd_cases
from oracles import bisect, exact_triple, step_poly_coeffs, term_scale


def record(k: int, ok: bool, detail: str, elapsed: float, budget: float):
    within = elapsed < budget
    line = f"criterion {k}: {'PASS' if ok and within else 'FAIL'} - {detail} [{elapsed:.2f}s of {budget:g}s]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, detail
    assert within, f"took {elapsed:.2f}s, budget {budget}s"


def random_step_polys(count: int, seed: int, n_max: int = 12):
    """(spec, coeffs, b, a0, n) for random parameters and random |b_k| > a_0."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, n_max + 1))
        lam = tuple(float(g) for g in rng.uniform(0.5, 50.0, n + 1))
        L, tau = float(10 ** rng.uniform(-1, 2)), float(10 ** rng.uniform(-4, -1))
        tables = precompute(make_params(n, L, lam, tau))
        a0 = tables.a[0]
        b = a0 * (1 + 10 ** rng.uniform(-2, 8)) * (1 if rng.random() < 0.5 else -1)
        spec = poly_for_case(classify(b, a0), b, tables)
        out.append((spec, step_poly_coeffs(n, L, lam, tau, b), b, a0, n))
    return out


def test_criterion_1_closed_forms(tmp_path, capsys):
    t0 = time.perf_counter()
    out = tmp_path / "complexity.csv"
    assert cli_main(["complexity", "--from", "2", "--to", "30", "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    T = {m: {int(r["n"]): int(r[m]) for r in rows} for m in ("direct", "half_horner", "full_horner", "shaw_traub")}
    D, HH, FH, ST = T["direct"], T["half_horner"], T["full_horner"], T["shaw_traub"]
    ok = (
        HH[7] == 312
        and D[7] == 552
        and D[7] - HH[7] == 240
        and D[4] < min(FH[4], ST[4])
        and D[5] > max(FH[5], ST[5])
    )
    detail = (f"HH(7)={HH[7]} Direct(7)={D[7]} diff={D[7] - HH[7]}; "
              f"n=4 D/FH/ST={D[4]}/{FH[4]}/{ST[4]}; n=5 D/FH/ST={D[5]}/{FH[5]}/{ST[5]}")
    record(1, ok, detail, time.perf_counter() - t0, 1.0)


def test_criterion_2_counters_vs_formulas():
    t0 = time.perf_counter()
    j = 3
    worst_eval, update_ok = 0, True
    for n in range(2, 16):
        spec = PolySpec.from_coeffs([0.25] * n, -2.0)
        formulas = {
            EvalStrategy.DIRECT: (j * (3 * n + 1), j * (3 * n * n + 3 * n) // 2),
            EvalStrategy.HORNER_SEPARATE: (j * (3 * n + 1), j * (3 * n - 1)),
        }
        for strategy, (na, nm) in formulas.items():
            ops = OpCounter()
            evaluate(strategy, spec, 0.6, ops)
            worst_eval = max(worst_eval, abs(ops.adds - na // j), abs(ops.muls - nm // j))
        tables = precompute(make_params(n, 2.0, [1.0] * (n + 1), 1e-2))
        for fn in (update_sum_of_powers, update_horner):
            ops = OpCounter()
            fn(counted_source(tables, ops), wrap((0.5,) * (n + 1), ops), wrap(0.3, ops), True, n)
            update_ok &= ops.adds == (n + 1) ** 2
            if fn is update_horner:
                update_ok &= ops.muls == n * (n + 1)
    ok = worst_eval <= 2 and update_ok
    detail = f"max per-evaluation deviation {worst_eval} (<= 2); update N_A1/N_A3/N_M3 exact: {update_ok}"
    record(2, ok, detail, time.perf_counter() - t0, 5.0)


def test_criterion_3_strategy_equivalence():
    t0 = time.perf_counter()
    worst_eval = worst_root = worst_exact = 0.0
    for spec, coeffs, b, a0, n in random_step_polys(200, seed=2024):
        r = initial_guess(b, a0, n)
        triples = {s: evaluate(s, spec, r) for s in EvalStrategy}
        ref = exact_triple(coeffs, r)
        scales = (term_scale(coeffs, r), abs(ref[1]), abs(ref[2]))
        for (_, x), (_, y) in combinations(triples.items(), 2):
            worst_eval = max(worst_eval, *(abs(u - v) / s for u, v, s in zip(x, y, scales)))
        for x in triples.values():
            worst_exact = max(worst_exact, *(abs(u - v) / s for u, v, s in zip(x, ref, scales)))
        roots = [halley_solve(spec, r, s).r0 for s in EvalStrategy]
        worst_root = max(worst_root, (max(roots) - min(roots)) / max(roots))
    ok = worst_eval <= 1e-9 and worst_root <= 1e-9
    detail = (f"worst pairwise (p,dp,ddp) rel {worst_eval:.2e}, vs exact {worst_exact:.2e}, "
              f"root spread {worst_root:.2e} (<= 1e-9)")
    record(3, ok, detail, time.perf_counter() - t0, 10.0)


def test_criterion_4_root_solver_quality():
    cases = hidd_cases(100, seed=4)
    t0 = time.perf_counter()
    bad_monotone = bad_residual = 0
    worst_rel = 0.0
    for params, tables, z, f, b in cases:
        n = params.n
        spec = poly_for_case(classify(b, tables.a[0]), b, tables)
        ref = bisect(step_poly_coeffs(n, params.L, params.lam, params.tau, b), (abs(b) - tables.a[0]) ** (1 / (n + 1)))
        res = halley_solve(spec, initial_guess(b, tables.a[0], n))
        dist = [abs(r - ref) for r in res.iterates]
        bad_monotone += not all(d1 <= d0 + 4e-16 * ref for d0, d1 in zip(dist, dist[1:]))
        bad_residual += not (res.iterations == 3 and res.residual <= 1e-9 * (1 + abs(spec.const_term)))
        worst_rel = max(worst_rel, dist[-1] / ref)
    ok = bad_monotone == 0 and bad_residual == 0
    detail = (f"100 cases: non-monotone {bad_monotone}, residual misses {bad_residual}; "
              f"worst root rel error after 3 iterations {worst_rel:.1e}")
    record(4, ok, detail, time.perf_counter() - t0, 10.0)


def test_criterion_5_form_equivalence():
    cases = hidd_cases(35, seed=5) + hidd_cases(15, seed=6, off_dead_zone=False)
    t0 = time.perf_counter()
    worst = 0.0
    for params, tables, z, f, _ in cases:
        outs = [np.array(step(State(z=z), f, tables, form=form).z) for form in UpdateForm]
        for x, y in combinations(outs, 2):
            worst = max(worst, float(np.max(np.abs(x - y) / np.maximum(np.maximum(np.abs(x), np.abs(y)), 1e-300))))
    ok = worst <= 1e-12
    record(5, ok, f"50 steps, worst relative gap between update forms {worst:.2e} (<= 1e-12)",
           time.perf_counter() - t0, 5.0)


def _steady_error(tau: float, horizon: float = 60.0) -> float:
    params = make_params(3, 1.0, gains_for(3), tau)
    steps = round(horizon / tau)
    f = gen_signal(SignalSpec(Sine(1.0, 1.0), 0.0), tau, steps)
    _, traces = run(params, f.tolist())
    tail = range(int(0.75 * steps), steps)
    return max(abs(traces[k].z[0] - f[k]) for k in tail)


def test_criterion_6_accuracy_scaling():
    t0 = time.perf_counter()
    coarse, fine = _steady_error(2e-3), _steady_error(1e-3)
    ratio = coarse / fine
    ok = 4 <= ratio <= 64
    detail = f"steady |z0-f|: tau=2e-3 {coarse:.3e}, tau=1e-3 {fine:.3e}, ratio {ratio:.2f} (in [4, 64])"
    record(6, ok, detail, time.perf_counter() - t0, 30.0)


def test_criterion_7_benchmark_orderings():
    t0 = time.perf_counter()
    signal = SignalSpec(seed=7)
    main = run_bench(
        BenchConfig(n_values=(7, 10), horizons=(2000.0,), methods=(Method.DIRECT, Method.HALF_HORNER), repetitions=3),
        signal,
    )
    naive = run_bench(
        BenchConfig(n_values=(10,), horizons=(2000.0,), methods=(Method.NAIVE, Method.HALF_HORNER), repetitions=1),
        signal,
    )
    t = {(r.method, r.n): r.median_wall_s for r in main.rows}
    hh10_naive = naive.row(Method.HALF_HORNER, 10, 2000.0).median_wall_s
    speedup = naive.row(Method.NAIVE, 10, 2000.0).median_wall_s / min(hh10_naive, t[(Method.HALF_HORNER, 10)])
    r7 = t[(Method.HALF_HORNER, 7)] / t[(Method.DIRECT, 7)]
    r10 = t[(Method.HALF_HORNER, 10)] / t[(Method.DIRECT, 10)]
    ok = speedup >= 3 and r7 <= 1.05 and r10 <= 1.05
    detail = f"naive/half-horner n=10 {speedup:.1f}x (>= 3); half-horner/direct n=7 {r7:.2f}, n=10 {r10:.2f} (<= 1.05)"
    record(7, ok, detail, time.perf_counter() - t0, 120.0)


def test_criterion_8_dead_zone_exactness():
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for _ in range(200):
        n = int(rng.integers(1, 11))
        params = make_params(n, float(10 ** rng.uniform(-1, 2)), tuple(rng.uniform(0.5, 20, n + 1)),
                             float(10 ** rng.uniform(-4, -1)))
        tables = precompute(params)
        # state scaled to a_0 so b_k is formed without cancellation
        z = tuple(float(v) for v in rng.normal(0, 1, n + 1) * tables.a[0] * 10 ** rng.uniform(0, 3))
        free = z[0] + sum(tables.w[l] * z[l] for l in range(1, n + 1))
        f = free + float(rng.uniform(-0.99, 0.99)) * tables.a[0]
        if abs(compute_bk(tables, z, f)) > tables.a[0]:
            continue
        nxt = step(State(z=z), f, tables).z
        worst = max(worst, abs(nxt[0] - f) / (1 + abs(f)))
        count += 1
    ok = count >= 190 and worst <= 1e-12
    record(8, ok, f"{count} dead-zone steps, worst |z0'-f|/(1+|f|) {worst:.1e} (<= 1e-12)",
           time.perf_counter() - t0, 1.0)
