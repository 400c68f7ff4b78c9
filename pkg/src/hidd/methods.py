"""The five benchmarked methodologies and a pure-Python driver for them."""

from __future__ import annotations

import enum
from typing import Iterable, Sequence

from .counting import OpCounter, plain, wrap
from .differentiator import State, StepTrace, UpdateForm, _check, _trace, advance, counted_source
from .params import Params, Tables, precompute
from .polyeval import EvalStrategy


class Method(enum.Enum):
    NAIVE = "naive"  # direct evaluation, every constant recomputed each step
    DIRECT = "direct"
    HALF_HORNER = "half-horner"
    FULL_HORNER = "full-horner"
    SHAW_TRAUB = "shaw-traub"


PLAN = {
    Method.NAIVE: (EvalStrategy.DIRECT, UpdateForm.SUM_OF_POWERS),
    Method.DIRECT: (EvalStrategy.DIRECT, UpdateForm.SUM_OF_POWERS),
    Method.HALF_HORNER: (EvalStrategy.HORNER_SEPARATE, UpdateForm.HORNER_IN_R),
    Method.FULL_HORNER: (EvalStrategy.HORNER_FUSED, UpdateForm.HORNER_IN_R),
    Method.SHAW_TRAUB: (EvalStrategy.SHAW_TRAUB, UpdateForm.HORNER_IN_R),
}


def taylor_weight(tau, m):
    x = 1.0
    for q in range(1, m + 1):
        x = x * tau / q
    return x


class _Lazy:
    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn

    def __getitem__(self, i):
        return self.fn(i)


class Recomputed:
    """Looks like :class:`~hidd.params.Tables` but rebuilds each entry on access.

    Every factorial, power of tau and fractional power of L is recomputed at
    the point of use. Accessing an entry costs what it cost to build the table
    entry in the first place, so this reproduces an implementation that keeps
    no precomputed constants.
    """

    def __init__(self, n, tau, L, lam):
        self.n = n

        def a(l):
            return taylor_weight(tau, n - l + 1) * lam[l] * L ** ((n - l + 1) / (n + 1))

        def bstar_row(i):
            return _Lazy(lambda j: taylor_weight(tau, j - i + 1) * lam[n - j] * L ** ((j + 1) / (n + 1)))

        self.a = _Lazy(a)
        self.w = _Lazy(lambda m: taylor_weight(tau, m))
        self.bstar = _Lazy(bstar_row)
        self.c = _Lazy(lambda i: float(n + 1) if i == n + 1 else i * a(i))
        self.d = _Lazy(lambda i: float(n * (n + 1)) if i == n + 1 else i * (i - 1) * a(i))

    @classmethod
    def from_params(cls, params: Params, ops: OpCounter | None = None) -> "Recomputed":
        return cls(params.n, wrap(params.tau, ops), wrap(params.L, ops), wrap(params.lam, ops))


def simulate(
    params: Params,
    samples: Iterable[float],
    method: Method = Method.HALF_HORNER,
    ops: OpCounter | None = None,
    z0: Sequence[float] | None = None,
    tables: Tables | None = None,
) -> tuple[State, list[StepTrace]]:
    """Run ``method`` over ``samples`` in pure Python; one trace per sample.

    With ``ops`` the operations are tallied and every trace carries its delta.
    """
    n = params.n
    strategy, form = PLAN[method]
    if method is Method.NAIVE:
        source = Recomputed.from_params(params, ops)
    else:
        tables = precompute(params) if tables is None else tables
        source = tables if ops is None else counted_source(tables, ops)

    state = State.zeros(n) if z0 is None else State(z=tuple(float(v) for v in z0))
    traces = []
    for f_k in samples:
        before = ops.snapshot() if ops is not None else None
        z = state.z if ops is None else wrap(state.z, ops)
        f = f_k if ops is None else wrap(f_k, ops)
        z_next, case, bk, r = advance(source, z, f, n, strategy, form)
        z_next = tuple(plain(v) for v in z_next)
        _check(z_next, state.k)
        delta = ops - before if ops is not None else None
        trace = _trace(state, f_k, plain(bk), case, plain(r), n, delta, z_next)
        state = State(z=z_next, k=state.k + 1, last=trace)
        traces.append(trace)
    if not traces:
        raise ValueError("simulate needs at least one sample")
    return state, traces
