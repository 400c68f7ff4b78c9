"""The implicit homogeneous differentiator, one sample at a time.

``step`` takes the estimate stack ``z`` (f and its first n derivatives),
one new sample, and returns the next stack. Off the dead zone the injection
term needs the positive root ``r0`` of the step polynomial; the stack update
itself is then a pair of short sums per row, written either as explicit
powers of ``r0`` or in Horner form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from types import SimpleNamespace
from typing import Iterable, Sequence

import numpy as np

from .counting import OpCounter, plain, wrap
from .errors import NonFiniteState
from .params import Params, Tables, precompute
from .polyeval import EvalStrategy, PolySpec, _power
from .rootfind import HALLEY_ITERS, Case, _bk, _halley, _initial, _variant


class UpdateForm(enum.Enum):
    SUM_OF_POWERS = "sum-of-powers"
    HORNER_IN_R = "horner"
    MATRIX_ORACLE = "matrix"  # dense reference, cubic cost; tests only


@dataclass(frozen=True)
class StepTrace:
    k: int
    f: float
    b_k: float
    case: Case
    r0: float
    sigma_tilde: float
    z: tuple[float, ...] = ()  # state after the step
    ops: OpCounter | None = None


@dataclass(frozen=True)
class State:
    z: tuple[float, ...]
    k: int = 0
    last: StepTrace | None = None

    @classmethod
    def zeros(cls, n: int) -> "State":
        return cls(z=(0.0,) * (n + 1))

    @property
    def n(self) -> int:
        return len(self.z) - 1


# Stack updates. ``src`` exposes table-like ``w``, ``bstar`` (and ``a`` for the
# dead zone); values may be plain floats or Counted scalars.

def update_sum_of_powers(src, z, r, positive: bool, n: int):
    """Row i: sum_{j>=i} (w_{j-i} z_j +/- bstar_{ij} r^{n-j}), powers built per term."""
    w, bstar = src.w, src.bstar
    out = []
    for i in range(n + 1):
        row = bstar[i]
        acc = z[i]
        for j in range(i, n + 1):
            if j > i:
                acc = acc + w[j - i] * z[j]
            m = n - j
            term = row[j] * _power(r, m) if m else row[j]
            acc = acc - term if positive else acc + term
        out.append(acc)
    return out


def update_horner(src, z, r, positive: bool, n: int):
    """Row i: (sum_{j>=i} w_{j-i} z_j) +/- Horner(bstar_{i,i..n}; r)."""
    w, bstar = src.w, src.bstar
    out = []
    for i in range(n + 1):
        row = bstar[i]
        s = z[i]
        for j in range(i + 1, n + 1):
            s = s + w[j - i] * z[j]
        h = row[i]
        for j in range(i + 1, n + 1):
            h = h * r + row[j]
        out.append(s - h if positive else s + h)
    return out


def update_dead_zone(src, z, bk, n: int):
    """Linear case: z_0 lands on the sample, higher rows get the xi-scaled injection."""
    w, bstar = src.w, src.bstar
    ratio = bk / src.a[0]
    z0 = bk + z[0]
    for j in range(1, n + 1):
        z0 = z0 + w[j] * z[j]
    out = [z0]
    for i in range(1, n + 1):
        s = z[i]
        for j in range(i + 1, n + 1):
            s = s + w[j - i] * z[j]
        out.append(bstar[i][n] * ratio + s)
    return out


_UPDATES = {
    UpdateForm.SUM_OF_POWERS: update_sum_of_powers,
    UpdateForm.HORNER_IN_R: update_horner,
}


def counted_source(tables: Tables, ops: OpCounter):
    return SimpleNamespace(
        a=wrap(tables.a, ops),
        w=wrap(tables.w, ops),
        bstar=wrap(tables.bstar, ops),
        c=wrap(tables.c, ops),
        d=wrap(tables.d, ops),
    )


def advance(src, z, f, n: int, strategy: EvalStrategy, form: UpdateForm, iters: int = HALLEY_ITERS):
    """One step on an arbitrary constant source; returns (z_next, case, b_k, r0)."""
    bk = _bk(src.w, z, f, n)
    a0 = src.a[0]
    case = _variant(bk, a0)
    if case is Case.DEAD_ZONE:
        return update_dead_zone(src, z, bk, n), case, bk, 0.0
    positive = case is Case.POS_BRANCH
    spec = PolySpec(n=n, a=src.a, shift=bk if positive else -bk, c=src.c, d=src.d)
    r, _, _ = _halley(spec, _initial(bk, a0, n), strategy, iters)
    return _UPDATES[form](src, z, r, positive, n), case, bk, r


def _check(z, k):
    if not all(math.isfinite(v) for v in z):
        raise NonFiniteState(f"state became non-finite at step {k}: {z}", index=k)


def _trace(state: State, f_k, bk, case, r0, n, ops, z_next=()):
    sign = {Case.NEG_BRANCH: -1.0, Case.POS_BRANCH: 1.0}.get(case, 0.0)
    sigma = sign * r0 ** (n + 1) if sign else 0.0
    return StepTrace(
        k=state.k, f=float(plain(f_k)), b_k=float(bk), case=case, r0=float(r0), sigma_tilde=sigma, z=z_next, ops=ops
    )


def step(
    state: State,
    f_k: float,
    tables: Tables,
    strategy: EvalStrategy = EvalStrategy.HORNER_SEPARATE,
    form: UpdateForm = UpdateForm.HORNER_IN_R,
    ops: OpCounter | None = None,
    iters: int = HALLEY_ITERS,
) -> State:
    """Advance ``state`` by one sample and return the new state.

    When ``ops`` is given, the operations of this step are added to it and the
    per-step delta is stored on ``State.last.ops``.
    """
    if form is UpdateForm.MATRIX_ORACLE:
        return step_matrix_oracle(state, f_k, tables, ops)
    n = tables.n
    if ops is None:
        z_next, case, bk, r = advance(tables, state.z, f_k, n, strategy, form, iters)
        delta = None
    else:
        before = ops.snapshot()
        z_next, case, bk, r = advance(
            counted_source(tables, ops), wrap(state.z, ops), wrap(f_k, ops), n, strategy, form, iters
        )
        delta = ops - before
    z_next = tuple(plain(v) for v in z_next)
    _check(z_next, state.k)
    trace = _trace(state, f_k, plain(bk), case, plain(r), n, delta, z_next)
    return State(z=z_next, k=state.k + 1, last=trace)


def injection_vector(params: Params, sigma_tilde: float, xi: float) -> np.ndarray:
    """v_i = -lambda_{n-i} L^{(i+1)/(n+1)} |sigma|^{(n-i)/(n+1)} xi, with |sigma|^0 = 1."""
    n, L, lam = params.n, params.L, params.lam
    mag = abs(sigma_tilde)
    v = np.empty(n + 1)
    for i in range(n + 1):
        e = (n - i) / (n + 1)
        v[i] = -lam[n - i] * L ** ((i + 1) / (n + 1)) * (mag**e if i < n else 1.0) * xi
    return v


def step_matrix_oracle(
    state: State, f_k: float, tables: Tables, ops: OpCounter | None = None
) -> State:
    """Reference step z' = Phi z + B* v(sigma) using dense matrices.

    Case selection and the root solve are shared with :func:`step` (and counted
    if ``ops`` is given); the propagation itself is never counted.
    """
    n = tables.n
    src = tables if ops is None else counted_source(tables, ops)
    zz = state.z if ops is None else wrap(state.z, ops)
    ff = f_k if ops is None else wrap(f_k, ops)
    bk = _bk(src.w, zz, ff, n)
    case = _variant(bk, src.a[0])
    bk = plain(bk)
    a0 = tables.a[0]
    if case is Case.DEAD_ZONE:
        r0, sigma, xi = 0.0, 0.0, -bk / a0
    else:
        xi = -1.0 if case is Case.NEG_BRANCH else 1.0
        spec = PolySpec(n=n, a=src.a, shift=-bk if xi < 0 else bk, c=src.c, d=src.d)
        r, _, _ = _halley(spec, _initial(wrap(bk, ops), a0, n), EvalStrategy.HORNER_SEPARATE, HALLEY_ITERS)
        r0 = plain(r)
        sigma = xi * r0 ** (n + 1)
    v = injection_vector(tables.params, sigma, xi)
    z = np.asarray(state.z, dtype=float)
    z_next = tuple(float(x) for x in tables.Phi @ z + tables.Bstar @ v)
    _check(z_next, state.k)
    trace = StepTrace(k=state.k, f=float(f_k), b_k=float(bk), case=case, r0=float(r0), sigma_tilde=sigma, z=z_next)
    return State(z=z_next, k=state.k + 1, last=trace)


def run(
    params: Params,
    samples: Iterable[float],
    strategy: EvalStrategy = EvalStrategy.HORNER_SEPARATE,
    form: UpdateForm = UpdateForm.HORNER_IN_R,
    z0: Sequence[float] | None = None,
    ops: OpCounter | None = None,
    tables: Tables | None = None,
) -> tuple[State, list[StepTrace]]:
    """Feed every sample through :func:`step`; returns the final state and one trace per sample."""
    tables = precompute(params) if tables is None else tables
    state = State.zeros(params.n) if z0 is None else State(z=tuple(float(v) for v in z0))
    traces = []
    for f_k in samples:
        state = step(state, f_k, tables, strategy, form, ops)
        traces.append(state.last)
    if not traces:
        raise ValueError("run needs at least one sample")
    return state, traces
