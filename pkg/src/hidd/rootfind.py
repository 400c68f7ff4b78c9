"""Per-step case selection and Halley solve for the implicit injection term."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .counting import OpCounter, plain, wrap
from .errors import DeadZoneInput, NonFiniteIterate
from .params import Tables
from .polyeval import R_GUARD, EvalStrategy, PolySpec, kernel_for

HALLEY_ITERS = 3


class Case(enum.Enum):
    NEG_BRANCH = "neg"  # b_k > a_0
    DEAD_ZONE = "dead"  # |b_k| <= a_0
    POS_BRANCH = "pos"  # b_k < -a_0


@dataclass(frozen=True)
class RootCase:
    variant: Case
    xi: float
    const_term: float  # a_0 -/+ b_k; NaN in the dead zone


@dataclass(frozen=True)
class RootResult:
    r0: float
    sigma_tilde: float
    iterations: int
    residual: float
    iterates: tuple[float, ...] = ()
    degenerate: bool = False


DEAD_RESULT = RootResult(r0=0.0, sigma_tilde=0.0, iterations=0, residual=0.0)


# Internal kernels. They accept plain floats or Counted scalars and never wrap.

def _bk(w, z, f, n):
    b = f - z[0]
    for l in range(1, n + 1):
        b = b - w[l] * z[l]
    return b


def _variant(bk, a0) -> Case:
    if bk > a0:
        return Case.NEG_BRANCH
    if bk < -a0:
        return Case.POS_BRANCH
    return Case.DEAD_ZONE


def _initial(bk, a0, n):
    return ((abs(bk) - a0) / 2) ** (1.0 / (n + 1))


def _halley(spec: PolySpec, r, strategy: EvalStrategy, iters: int, stop=None):
    """Return (r, history, degenerate); ``spec`` and ``r`` may be Counted."""
    n = spec.n
    kernel = kernel_for(strategy, n)
    guarded = strategy is EvalStrategy.SHAW_TRAUB and n >= 2
    history = [float(plain(r))]
    for _ in range(iters):
        if guarded and not plain(r) > R_GUARD:
            p, dp, ddp = kernel_for(EvalStrategy.HORNER_SEPARATE, n)(spec, r)
        else:
            p, dp, ddp = kernel(spec, r)
        if stop is not None and abs(plain(p)) <= stop:
            break
        num = 2 * dp * p
        den = 2 * dp * dp - ddp * p
        if plain(den) == 0.0:
            return r, history, True
        r = r - num / den
        rv = plain(r)
        if not math.isfinite(rv):
            raise NonFiniteIterate(f"Halley iterate became {rv!r} at iteration {len(history)}")
        history.append(float(rv))
    return r, history, False


# Public surface.

def compute_bk(tables: Tables, z, f_k: float, ops: OpCounter | None = None) -> float:
    """b_k = -(z_0 - f_k) - sum_{l=1}^{n} tau^l/l! z_l."""
    w = tables.w
    if ops is not None:
        z, f_k, w = wrap(tuple(z), ops), wrap(f_k, ops), wrap(w, ops)
    return plain(_bk(w, z, f_k, tables.n))


def classify(b_k: float, a0: float, ops: OpCounter | None = None) -> RootCase:
    variant = _variant(wrap(b_k, ops), a0)
    if variant is Case.NEG_BRANCH:
        return RootCase(variant, -1.0, a0 - b_k)
    if variant is Case.POS_BRANCH:
        return RootCase(variant, 1.0, a0 + b_k)
    return RootCase(variant, -b_k / a0, math.nan)


def initial_guess(b_k: float, a0: float, n: int, ops: OpCounter | None = None) -> float:
    """((|b_k| - a_0) / 2)^{1/(n+1)}, strictly inside the root bracket."""
    if not abs(b_k) > a0:
        raise DeadZoneInput(f"|b_k|={abs(b_k)!r} does not exceed a_0={a0!r}")
    return plain(_initial(wrap(b_k, ops), a0, n))


def halley_solve(
    spec: PolySpec,
    r00: float,
    strategy: EvalStrategy = EvalStrategy.HORNER_SEPARATE,
    iters: int = HALLEY_ITERS,
    ops: OpCounter | None = None,
    tol: float | None = None,
) -> RootResult:
    """Refine ``r00`` towards the unique positive root of ``spec`` with Halley steps.

    Each iteration costs one ``(p, p', p'')`` evaluation through ``strategy``
    plus six multiplications and two additions for the update itself. A zero
    Halley denominator stops the iteration and sets ``degenerate`` on the
    result, which then carries the last iterate.

    Parameters
    ----------
    tol : float, optional
        Stop early once ``|p(r_j)| <= tol * (1 + |const_term|)``. Off by default so
        that every solve performs exactly ``iters`` evaluations.
    """
    s = spec.counted(ops) if ops is not None else spec
    stop = None if tol is None else tol * (1.0 + abs(spec.const_term))
    r, history, degenerate = _halley(s, wrap(r00, ops), strategy, iters, stop)
    r0 = plain(r)
    # residual through separate Horner, uncounted
    residual = abs(kernel_for(EvalStrategy.HORNER_SEPARATE, spec.n)(spec, r0)[0])
    return RootResult(
        r0=r0,
        sigma_tilde=spec.xi * r0 ** (spec.n + 1),
        iterations=len(history) - 1,
        residual=residual,
        iterates=tuple(history),
        degenerate=degenerate,
    )


def poly_for_case(case: RootCase, b_k: float, tables: Tables) -> PolySpec:
    if case.variant is Case.DEAD_ZONE:
        raise DeadZoneInput("no polynomial to solve in the dead zone")
    shift = -b_k if case.variant is Case.NEG_BRANCH else b_k
    return PolySpec.from_tables(tables, shift, case.xi)
