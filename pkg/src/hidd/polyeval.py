"""Value, first and second derivative of the monic root-finding polynomial.

The polynomial solved at every off-dead-zone step is

    p(r) = r^{n+1} + a_n r^n + ... + a_1 r + (a_0 + shift)

with ``shift = -b_k`` or ``+b_k`` depending on the branch. Four evaluation
schemes are provided; they return the same triple ``(p, dp, ddp)`` but spend
very different numbers of multiplications to get there.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .counting import OpCounter, plain, wrap
from .errors import NearZeroRadius, OrderTooSmall

R_GUARD = 1e-300


class EvalStrategy(enum.Enum):
    DIRECT = "direct"
    HORNER_SEPARATE = "horner-separate"
    HORNER_FUSED = "horner-fused"
    SHAW_TRAUB = "shaw-traub"


@dataclass(frozen=True)
class PolySpec:
    """Monic degree-(n+1) polynomial in the layout used by :class:`~hidd.params.Tables`.

    ``a[l]`` holds a_0..a_n, ``c[i]`` holds c_i for i=1..n+1 and ``d[i]``
    holds d_i for i=2..n+1 (lower slots are unused zeros). ``xi`` is the
    branch sign carried through to the root result.
    """

    n: int
    a: tuple
    shift: float
    c: tuple
    d: tuple
    xi: float = -1.0

    @property
    def const_term(self) -> float:
        return plain(self.a[0]) + plain(self.shift)

    @classmethod
    def from_coeffs(cls, coeffs, const_term: float, xi: float = -1.0) -> "PolySpec":
        """Build from a_1..a_n (ascending) and the constant term."""
        n = len(coeffs)
        a = (float(const_term),) + tuple(float(x) for x in coeffs)
        c = (0.0,) + tuple(i * a[i] for i in range(1, n + 1)) + (float(n + 1),)
        d = (0.0, 0.0) + tuple(i * (i - 1) * a[i] for i in range(2, n + 1)) + (float(n * (n + 1)),)
        return cls(n=n, a=a, shift=0.0, c=c, d=d, xi=xi)

    @classmethod
    def from_tables(cls, tables, shift: float, xi: float) -> "PolySpec":
        return cls(n=tables.n, a=tables.a, shift=shift, c=tables.c, d=tables.d, xi=xi)

    def counted(self, ops: OpCounter) -> "PolySpec":
        return PolySpec(
            n=self.n,
            a=wrap(self.a, ops),
            shift=wrap(self.shift, ops),
            c=wrap(self.c, ops),
            d=wrap(self.d, ops),
            xi=self.xi,
        )


def _power(r, m):
    # r^m by m-1 multiplications, m >= 1
    pw = r
    for _ in range(m - 1):
        pw = pw * r
    return pw


def _direct(s: PolySpec, r):
    n, a, c, d = s.n, s.a, s.c, s.d
    p = _power(r, n + 1)
    for i in range(n, 0, -1):
        p = p + a[i] * _power(r, i)
    p = p + (a[0] + s.shift)

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


def _horner_separate(s: PolySpec, r):
    n, a, c, d = s.n, s.a, s.c, s.d
    p = r + a[n]
    for i in range(n - 1, 0, -1):
        p = p * r + a[i]
    p = p * r + (a[0] + s.shift)

    dp = c[n + 1] * r + c[n]
    for i in range(n - 1, 0, -1):
        dp = dp * r + c[i]

    ddp = d[n + 1] * r + d[n]
    for i in range(n - 1, 1, -1):
        ddp = ddp * r + d[i]
    return p, dp, ddp


def _horner_fused(s: PolySpec, r):
    # triple synthetic division: F -> p, dF -> p', ddF -> p''/2
    n, a = s.n, s.a
    F = r + a[n]
    dF = r + F
    ddF = r + dF
    for i in range(n - 2):
        F = r * F + a[n - i - 1]
        dF = r * dF + F
        ddF = r * ddF + dF
    # F, dF, ddF now hold F_{n-2}, dF_{n-2}, ddF_{n-2}
    F_last = r * F + a[1]
    p = r * F_last + (a[0] + s.shift)
    dp = r * dF + F_last
    ddp = 2 * ddF
    return p, dp, ddp


def _shaw_traub(s: PolySpec, r):
    n, a = s.n, s.a
    t = [None, r]
    for i in range(2, n + 1):
        t.append(t[i - 1] * r)
    # T^{-1}_i for i = 0..n: the scaled terms of p below the leading one
    base = [a[n - i] * t[n - i] for i in range(n)]
    base.append(a[0] + s.shift)

    seed = t[n] * r  # T_0^0 == T_1^1 == T_2^2
    T0 = [seed]
    for i in range(1, n + 2):
        T0.append(base[i - 1] + T0[i - 1])
    T1 = [None, seed]
    for i in range(2, n + 2):
        T1.append(T0[i - 1] + T1[i - 1])
    T2 = [None, None, seed]
    for i in range(3, n + 2):
        T2.append(T1[i - 1] + T2[i - 1])

    p = T0[n + 1]
    dp = T1[n + 1] / t[1]
    ddp = 2 * (T2[n + 1] / t[2])
    return p, dp, ddp


_KERNELS = {
    EvalStrategy.DIRECT: _direct,
    EvalStrategy.HORNER_SEPARATE: _horner_separate,
    EvalStrategy.HORNER_FUSED: _horner_fused,
    EvalStrategy.SHAW_TRAUB: _shaw_traub,
}


def kernel_for(strategy: EvalStrategy, n: int):
    """Return the raw kernel for ``strategy``; order 1 always uses direct evaluation."""
    if n < 2:
        return _direct
    return _KERNELS[strategy]


def _run(kernel, spec, r, ops):
    if ops is not None:
        spec = spec.counted(ops)
        r = wrap(r, ops)
    p, dp, ddp = kernel(spec, r)
    return plain(p), plain(dp), plain(ddp)


def eval_direct(spec: PolySpec, r: float, ops: OpCounter | None = None):
    return _run(_direct, spec, r, ops)


def eval_horner_separate(spec: PolySpec, r: float, ops: OpCounter | None = None):
    if spec.n < 2:
        raise OrderTooSmall("separate Horner evaluation needs n >= 2")
    return _run(_horner_separate, spec, r, ops)


def eval_horner_fused(spec: PolySpec, r: float, ops: OpCounter | None = None):
    if spec.n < 2:
        raise OrderTooSmall("fused Horner evaluation needs n >= 2")
    return _run(_horner_fused, spec, r, ops)


def eval_shaw_traub(spec: PolySpec, r: float, ops: OpCounter | None = None):
    if spec.n < 2:
        raise OrderTooSmall("Shaw-Traub evaluation needs n >= 2")
    if not plain(r) > R_GUARD:
        raise NearZeroRadius(f"Shaw-Traub divides by r and r^2; got r={plain(r)!r}")
    return _run(_shaw_traub, spec, r, ops)


def evaluate(strategy: EvalStrategy, spec: PolySpec, r: float, ops: OpCounter | None = None):
    """Dispatch to ``strategy``; n = 1 and near-zero Shaw-Traub radii fall back."""
    if spec.n < 2:
        return eval_direct(spec, r, ops)
    if strategy is EvalStrategy.SHAW_TRAUB and not plain(r) > R_GUARD:
        return eval_horner_separate(spec, r, ops)
    return _run(_KERNELS[strategy], spec, r, ops)
