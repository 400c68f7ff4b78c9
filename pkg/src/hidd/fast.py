"""Compiled simulation loops for wall-clock benchmarking.

These mirror the pure-Python kernels operation for operation (same order,
same association) so trajectories agree with the reference path to rounding.
They never count; operation tallies come from the instrumented Python path.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import NonFiniteState
from .methods import Method
from .params import Params, Tables, precompute

R_GUARD = 1e-300

# method codes
NAIVE, DIRECT, HALF_HORNER, FULL_HORNER, SHAW_TRAUB = 0, 1, 2, 3, 4
CODES = {
    Method.NAIVE: NAIVE,
    Method.DIRECT: DIRECT,
    Method.HALF_HORNER: HALF_HORNER,
    Method.FULL_HORNER: FULL_HORNER,
    Method.SHAW_TRAUB: SHAW_TRAUB,
}

# case slots in the returned counts
NEG, DEAD, POS = 0, 1, 2


@njit(cache=True, error_model="numpy")
def _power(r, m):
    pw = r
    for _ in range(m - 1):
        pw = pw * r
    return pw


@njit(cache=True, error_model="numpy")
def _eval_direct(n, a, shift, c, d, r):
    p = _power(r, n + 1)
    for i in range(n, 0, -1):
        p = p + a[i] * _power(r, i)
    p = p + (a[0] + shift)
    dp = c[n + 1] * _power(r, n)
    for i in range(n, 1, -1):
        dp = dp + c[i] * _power(r, i - 1)
    dp = dp + c[1]
    if n == 1:
        ddp = d[2]
    else:
        ddp = d[n + 1] * _power(r, n - 1)
        for i in range(n, 2, -1):
            ddp = ddp + d[i] * _power(r, i - 2)
        ddp = ddp + d[2]
    return p, dp, ddp


@njit(cache=True, error_model="numpy")
def _eval_horner_separate(n, a, shift, c, d, r):
    p = r + a[n]
    for i in range(n - 1, 0, -1):
        p = p * r + a[i]
    p = p * r + (a[0] + shift)
    dp = c[n + 1] * r + c[n]
    for i in range(n - 1, 0, -1):
        dp = dp * r + c[i]
    ddp = d[n + 1] * r + d[n]
    for i in range(n - 1, 1, -1):
        ddp = ddp * r + d[i]
    return p, dp, ddp


@njit(cache=True, error_model="numpy")
def _eval_horner_fused(n, a, shift, r):
    F = r + a[n]
    dF = r + F
    ddF = r + dF
    for i in range(n - 2):
        F = r * F + a[n - i - 1]
        dF = r * dF + F
        ddF = r * ddF + dF
    F_last = r * F + a[1]
    p = r * F_last + (a[0] + shift)
    dp = r * dF + F_last
    ddp = 2 * ddF
    return p, dp, ddp


@njit(cache=True, error_model="numpy")
def _eval_shaw_traub(n, a, shift, r, t):
    # t is caller-owned scratch of length n + 1 for the power table
    t[1] = r
    for i in range(2, n + 1):
        t[i] = t[i - 1] * r
    seed = t[n] * r
    # rolling T0/T1/T2 columns; same additions as the list form
    T0 = seed
    T1 = seed
    T2 = seed
    for i in range(1, n + 2):
        base = a[n - i + 1] * t[n - i + 1] if i <= n else a[0] + shift
        T0_prev = T0
        T1_prev = T1
        T0 = base + T0_prev
        if i >= 2:
            T1 = T0_prev + T1_prev
        if i >= 3:
            T2 = T1_prev + T2
    return T0, T1 / t[1], 2 * (T2 / t[2])


# One Halley solver per strategy keeps each inner loop specialised.

@njit(cache=True, error_model="numpy")
def _halley_direct(n, a, shift, c, d, r, iters):
    for _ in range(iters):
        p, dp, ddp = _eval_direct(n, a, shift, c, d, r)
        num = 2 * dp * p
        den = 2 * dp * dp - ddp * p
        if den == 0.0:
            break
        r = r - num / den
    return r


@njit(cache=True, error_model="numpy")
def _halley_separate(n, a, shift, c, d, r, iters):
    for _ in range(iters):
        p, dp, ddp = _eval_horner_separate(n, a, shift, c, d, r)
        num = 2 * dp * p
        den = 2 * dp * dp - ddp * p
        if den == 0.0:
            break
        r = r - num / den
    return r


@njit(cache=True, error_model="numpy")
def _halley_fused(n, a, shift, r, iters):
    for _ in range(iters):
        p, dp, ddp = _eval_horner_fused(n, a, shift, r)
        num = 2 * dp * p
        den = 2 * dp * dp - ddp * p
        if den == 0.0:
            break
        r = r - num / den
    return r


@njit(cache=True, error_model="numpy")
def _halley_shaw_traub(n, a, shift, c, d, r, iters, t):
    for _ in range(iters):
        if r > R_GUARD:
            p, dp, ddp = _eval_shaw_traub(n, a, shift, r, t)
        else:
            p, dp, ddp = _eval_horner_separate(n, a, shift, c, d, r)
        num = 2 * dp * p
        den = 2 * dp * dp - ddp * p
        if den == 0.0:
            break
        r = r - num / den
    return r


@njit(cache=True, error_model="numpy")
def _update_sum_of_powers(n, w, B, z, r, positive, out):
    for i in range(n + 1):
        acc = z[i]
        for j in range(i, n + 1):
            if j > i:
                acc = acc + w[j - i] * z[j]
            m = n - j
            term = B[i, j] * _power(r, m) if m else B[i, j]
            acc = acc - term if positive else acc + term
        out[i] = acc


@njit(cache=True, error_model="numpy")
def _update_horner(n, w, B, z, r, positive, out):
    for i in range(n + 1):
        s = z[i]
        for j in range(i + 1, n + 1):
            s = s + w[j - i] * z[j]
        h = B[i, i]
        for j in range(i + 1, n + 1):
            h = h * r + B[i, j]
        out[i] = s - h if positive else s + h


@njit(cache=True, error_model="numpy")
def _update_dead_zone(n, w, B, a0, z, bk, out):
    ratio = bk / a0
    z0 = bk + z[0]
    for j in range(1, n + 1):
        z0 = z0 + w[j] * z[j]
    out[0] = z0
    for i in range(1, n + 1):
        s = z[i]
        for j in range(i + 1, n + 1):
            s = s + w[j - i] * z[j]
        out[i] = B[i, n] * ratio + s


@njit(cache=True, error_model="numpy")
def simulate_tables(code, samples, z0, a, w, B, c, d, iters, record):
    """Run a table-based method; returns (final z, case counts).

    ``record`` is either an empty array or a (len(samples), n+1) buffer that
    receives every post-step state.
    """
    n = a.shape[0] - 1
    z = z0.copy()
    nxt = np.empty(n + 1)
    counts = np.zeros(3, dtype=np.int64)
    t = np.empty(n + 1)
    keep = record.shape[0] > 0
    a0 = a[0]
    for k in range(samples.shape[0]):
        f = samples[k]
        bk = f - z[0]
        for l in range(1, n + 1):
            bk = bk - w[l] * z[l]
        if bk > a0:
            positive = False
            counts[NEG] += 1
        elif bk < -a0:
            positive = True
            counts[POS] += 1
        else:
            counts[DEAD] += 1
            _update_dead_zone(n, w, B, a0, z, bk, nxt)
            z, nxt = nxt, z
            if keep:
                record[k, :] = z
            continue
        shift = bk if positive else -bk
        r = ((abs(bk) - a0) / 2) ** (1.0 / (n + 1))
        if n < 2 or code == DIRECT:
            r = _halley_direct(n, a, shift, c, d, r, iters)
        elif code == HALF_HORNER:
            r = _halley_separate(n, a, shift, c, d, r, iters)
        elif code == FULL_HORNER:
            r = _halley_fused(n, a, shift, r, iters)
        else:
            r = _halley_shaw_traub(n, a, shift, c, d, r, iters, t)
        if code == DIRECT:
            _update_sum_of_powers(n, w, B, z, r, positive, nxt)
        else:
            _update_horner(n, w, B, z, r, positive, nxt)
        z, nxt = nxt, z
        if keep:
            record[k, :] = z
    return z, counts


@njit(cache=True, error_model="numpy")
def _weight(tau, m):
    x = 1.0
    for q in range(1, m + 1):
        x = x * tau / q
    return x


@njit(cache=True, error_model="numpy")
def _a_naive(n, tau, L, lam, l):
    return _weight(tau, n - l + 1) * lam[l] * L ** ((n - l + 1) / (n + 1))


@njit(cache=True, error_model="numpy")
def _b_naive(n, tau, L, lam, i, j):
    return _weight(tau, j - i + 1) * lam[n - j] * L ** ((j + 1) / (n + 1))


@njit(cache=True, error_model="numpy")
def _eval_naive(n, tau, L, lam, shift, r):
    p = _power(r, n + 1)
    for i in range(n, 0, -1):
        p = p + _a_naive(n, tau, L, lam, i) * _power(r, i)
    p = p + (_a_naive(n, tau, L, lam, 0) + shift)
    dp = float(n + 1) * _power(r, n)
    for i in range(n, 1, -1):
        dp = dp + i * _a_naive(n, tau, L, lam, i) * _power(r, i - 1)
    dp = dp + 1 * _a_naive(n, tau, L, lam, 1)
    if n == 1:
        ddp = float(n * (n + 1))
    else:
        ddp = float(n * (n + 1)) * _power(r, n - 1)
        for i in range(n, 2, -1):
            ddp = ddp + i * (i - 1) * _a_naive(n, tau, L, lam, i) * _power(r, i - 2)
        ddp = ddp + 2 * 1 * _a_naive(n, tau, L, lam, 2)
    return p, dp, ddp


@njit(cache=True, error_model="numpy")
def simulate_naive(samples, z0, tau, L, lam, iters, record):
    """Direct evaluation with no stored constants: everything rebuilt per use."""
    n = lam.shape[0] - 1
    z = z0.copy()
    nxt = np.empty(n + 1)
    counts = np.zeros(3, dtype=np.int64)
    keep = record.shape[0] > 0
    for k in range(samples.shape[0]):
        f = samples[k]
        bk = f - z[0]
        for l in range(1, n + 1):
            bk = bk - _weight(tau, l) * z[l]
        a0 = _a_naive(n, tau, L, lam, 0)
        if bk > a0:
            positive = False
            counts[NEG] += 1
        elif bk < -a0:
            positive = True
            counts[POS] += 1
        else:
            counts[DEAD] += 1
            ratio = bk / _a_naive(n, tau, L, lam, 0)
            s0 = bk + z[0]
            for j in range(1, n + 1):
                s0 = s0 + _weight(tau, j) * z[j]
            nxt[0] = s0
            for i in range(1, n + 1):
                s = z[i]
                for j in range(i + 1, n + 1):
                    s = s + _weight(tau, j - i) * z[j]
                nxt[i] = _b_naive(n, tau, L, lam, i, n) * ratio + s
            z, nxt = nxt, z
            if keep:
                record[k, :] = z
            continue
        shift = bk if positive else -bk
        r = ((abs(bk) - a0) / 2) ** (1.0 / (n + 1))
        for _ in range(iters):
            p, dp, ddp = _eval_naive(n, tau, L, lam, shift, r)
            num = 2 * dp * p
            den = 2 * dp * dp - ddp * p
            if den == 0.0:
                break
            r = r - num / den
        for i in range(n + 1):
            acc = z[i]
            for j in range(i, n + 1):
                if j > i:
                    acc = acc + _weight(tau, j - i) * z[j]
                m = n - j
                bij = _b_naive(n, tau, L, lam, i, j)
                term = bij * _power(r, m) if m else bij
                acc = acc - term if positive else acc + term
            nxt[i] = acc
        z, nxt = nxt, z
        if keep:
            record[k, :] = z
    return z, counts


def table_arrays(tables: Tables):
    n = tables.n
    return (
        np.array(tables.a),
        np.array(tables.w),
        np.array(tables.bstar).reshape(n + 1, n + 1),
        np.array(tables.c),
        np.array(tables.d),
    )


def runner(params: Params, method: Method, tables: Tables | None = None, iters: int = 3):
    """Return ``fn(samples, z0) -> (z_final, case_counts)`` with all constants bound.

    Everything except the compiled loop itself happens here, so timing a call
    of ``fn`` measures the simulation only.
    """
    if method is Method.NAIVE:
        tau, L, lam = params.tau, params.L, np.array(params.lam)

        def fn(samples, z0, record=_NO_RECORD[params.n]):
            return simulate_naive(samples, z0, tau, L, lam, iters, record)

    else:
        tables = precompute(params) if tables is None else tables
        a, w, B, c, d = table_arrays(tables)
        code = CODES[method]

        def fn(samples, z0, record=_NO_RECORD[params.n]):
            return simulate_tables(code, samples, z0, a, w, B, c, d, iters, record)

    return fn


class _NoRecord(dict):
    def __missing__(self, n):
        buf = np.empty((0, n + 1))
        self[n] = buf
        return buf


_NO_RECORD = _NoRecord()


def run_fast(
    params: Params,
    samples,
    method: Method,
    z0=None,
    record: bool = False,
    tables: Tables | None = None,
    iters: int = 3,
):
    """Compiled run of ``method``.

    Returns ``(z_final, case_counts, trajectory)``; ``case_counts`` is
    ``[neg, dead, pos]`` and ``trajectory`` is ``None`` unless ``record``.
    """
    n = params.n
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    z = np.zeros(n + 1) if z0 is None else np.asarray(z0, dtype=np.float64).copy()
    buf = np.empty((samples.shape[0], n + 1)) if record else _NO_RECORD[n]
    zf, counts = runner(params, method, tables, iters)(samples, z, buf)
    if not np.isfinite(zf).all():
        raise NonFiniteState(f"compiled run of {method.value} produced a non-finite state")
    return zf, counts, (buf if record else None)
