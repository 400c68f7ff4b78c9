"""Closed-form operation counts and per-step time complexity for each method.

Totals ``T(n)`` count arithmetic, assignments, comparisons and the root
extraction per differentiator step with three Halley iterations. They are
evaluated in exact rational arithmetic and returned as ``int`` whenever the
value is integral (which it is for every n >= 1).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import IO

from .errors import BadRange, NoClosedForm
from .methods import Method

HALLEY_J = 3  # Halley iterations per step

CLOSED_FORM = (Method.DIRECT, Method.HALF_HORNER, Method.FULL_HORNER, Method.SHAW_TRAUB)
CSV_COLUMNS = {
    Method.DIRECT: "direct",
    Method.HALF_HORNER: "half_horner",
    Method.FULL_HORNER: "full_horner",
    Method.SHAW_TRAUB: "shaw_traub",
}


def _exact(x: Fraction):
    return int(x) if x.denominator == 1 else x


@dataclass(frozen=True)
class CostRow:
    """Operation counts for one method at order ``n``.

    Attributes
    ----------
    adds_update, muls_update : int
        Stack update once ``r0`` is known.
    adds_eval_per_iter, muls_eval_per_iter : int
        One evaluation of ``(p, p', p'')``.
    update_time, eval_time : int or Fraction
        Update and root-solve parts of the total, including assignments.
    total : int or Fraction
        Complete per-step time complexity ``T(n)``.
    """

    method: Method
    n: int
    adds_update: int
    muls_update: int
    adds_eval_per_iter: int
    muls_eval_per_iter: int
    update_time: int | Fraction
    eval_time: int | Fraction
    total: int | Fraction


def _update_counts(method: Method, n: int):
    if method is Method.DIRECT:
        muls = Fraction(n**3, 6) + n * n - Fraction(n, 6) - 1
        t1 = Fraction(n**3, 6) + 2 * n * n + Fraction(17 * n, 6) + 1
        return (n + 1) ** 2, _exact(muls), _exact(t1)
    # Horner-in-r update, shared by the three quadratic methods
    adds, muls = (n + 1) ** 2, n * (n + 1)
    return adds, muls, adds + muls + (n + 1)


def _eval_counts(method: Method, n: int):
    if method is Method.DIRECT:
        return 3 * n + 1, (3 * n * n + 3 * n) // 2, _exact(Fraction(9 * n * n, 2) + Fraction(27 * n, 2) + 46)
    if method is Method.HALF_HORNER:
        return 3 * n + 1, 3 * n - 1, 18 * n + 43
    if method is Method.FULL_HORNER:
        return 3 * n + 1, 3 * n - 2, 36 * n + 55
    return 3 * n + 1, 2 * n + 3, 30 * n + 70


def _total(method: Method, n: int):
    if method is Method.DIRECT:
        return _exact(Fraction(n**3, 6) + Fraction(13 * n * n, 2) + Fraction(110 * n, 6) + 48)
    linear = {Method.HALF_HORNER: 24 * n + 46, Method.FULL_HORNER: 42 * n + 58, Method.SHAW_TRAUB: 36 * n + 74}
    return 2 * n * n + linear[method]


def cost(method: Method, n: int) -> CostRow:
    """Operation counts and total time complexity of ``method`` at order ``n``.

    Raises
    ------
    NoClosedForm
        For :attr:`Method.NAIVE`, which is measured but never modelled.
    BadRange
        If ``n < 2``.
    """
    if method is Method.NAIVE:
        raise NoClosedForm("the naive method has no closed-form cost")
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise BadRange(f"closed forms need integer n >= 2, got {n!r}")
    n = int(n)
    au, mu, tu = _update_counts(method, n)
    ae, me, te = _eval_counts(method, n)
    return CostRow(method, n, au, mu, ae, me, tu, te, _total(method, n))


def complexity_table(n_lo: int, n_hi: int) -> dict[Method, list[CostRow]]:
    """Rows for every closed-form method and every n in ``[n_lo, n_hi]``."""
    if int(n_lo) != n_lo or int(n_hi) != n_hi or not 2 <= n_lo <= n_hi:
        raise BadRange(f"need 2 <= n_lo <= n_hi, got ({n_lo!r}, {n_hi!r})")
    ns = range(int(n_lo), int(n_hi) + 1)
    return {m: [cost(m, n) for n in ns] for m in CLOSED_FORM}


def write_csv(table: dict[Method, list[CostRow]], fh: IO[str]) -> None:
    """One row per n: ``n,direct,half_horner,full_horner,shaw_traub``."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["n"] + [CSV_COLUMNS[m] for m in CLOSED_FORM])
    for rows in zip(*(table[m] for m in CLOSED_FORM)):
        writer.writerow([rows[0].n] + [str(r.total) for r in rows])
