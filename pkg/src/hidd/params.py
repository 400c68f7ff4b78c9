"""Differentiator parameters and the constant tables hoisted out of the run loop."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Sequence

import numpy as np

from .errors import GainCountMismatch, NonPositiveError, TableOverflow, UnsupportedOrder

# Standard homogeneous-differentiator gains, lambda_0 first.
GAIN_TABLE = (1.1, 1.5, 2.0, 3.0, 5.0, 7.0, 10.0, 12.0)

# Published gains for the non-recursive form used here (lambda_0 first). The
# prefixes of GAIN_TABLE belong to the recursive form; nonrecursive_gains maps
# one to the other and reproduces these to the printed precision.
NONRECURSIVE_GAINS = {
    1: (1.1, 1.5),
    2: (1.1, 2.12, 2.0),
    3: (1.1, 3.06, 4.16, 3.0),
    4: (1.1, 4.57, 9.30, 10.03, 5.0),
    5: (1.1, 6.75, 20.26, 32.24, 23.72, 7.0),
}


@dataclass(frozen=True)
class Params:
    """Validated differentiator configuration.

    Attributes
    ----------
    n : int
        Differentiator order; derivatives 0..n are estimated.
    L : float
        Lipschitz bound of the n-th derivative of the input.
    lam : tuple of float
        Gains lambda_0..lambda_n.
    tau : float
        Sampling period in seconds.
    """

    n: int
    L: float
    lam: tuple[float, ...]
    tau: float


def make_params(n, L, lam, tau) -> Params:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise NonPositiveError(f"order n must be a positive integer, got {n!r}")
    n = int(n)
    if not L > 0 or not math.isfinite(L):
        raise NonPositiveError(f"Lipschitz constant L must be > 0, got {L!r}")
    if not tau > 0 or not math.isfinite(tau):
        raise NonPositiveError(f"sampling time tau must be > 0, got {tau!r}")
    lam = tuple(float(g) for g in lam)
    if len(lam) != n + 1:
        raise GainCountMismatch(f"order {n} needs {n + 1} gains, got {len(lam)}")
    for i, g in enumerate(lam):
        if not g > 0 or not math.isfinite(g):
            raise NonPositiveError(f"gain lambda_{i} must be > 0, got {g!r}")
    return Params(n=n, L=float(L), lam=lam, tau=float(tau))


def default_gains(n: int) -> tuple[float, ...]:
    if n < 1:
        raise NonPositiveError(f"order n must be >= 1, got {n}")
    if n + 1 > len(GAIN_TABLE):
        raise UnsupportedOrder(
            f"no default gains for n={n} (max {len(GAIN_TABLE) - 1}); supply lambda explicitly"
        )
    return GAIN_TABLE[: n + 1]


def nonrecursive_gains(recursive: Sequence[float]) -> tuple[float, ...]:
    """Map recursive-form gains to the non-recursive form used here.

    Row i of the injection gets ``prod_{m<i} lam_{n-m}^{(n-i)/(n-m)} * lam_{n-i}``;
    the result is returned lambda_0 first like every other gain tuple.
    """
    rec = tuple(float(g) for g in recursive)
    n = len(rec) - 1
    row = []
    for i in range(n + 1):
        k = rec[n - i]
        for m in range(i):
            k *= rec[n - m] ** ((n - i) / (n - m))
        row.append(k)
    return tuple(row[n - l] for l in range(n + 1))


def converging_gains(n: int) -> tuple[float, ...]:
    """Gains known to converge for this differentiator form (n <= 7)."""
    if n in NONRECURSIVE_GAINS:
        return NONRECURSIVE_GAINS[n]
    return nonrecursive_gains(default_gains(n))


def gains_for(n: int) -> tuple[float, ...]:
    """Default gain set for order ``n``; raises UnsupportedOrder above n = 7."""
    return converging_gains(n)


def load_params(source) -> Params:
    """Build :class:`Params` from a JSON file path or an already-parsed mapping.

    Recognised keys are ``n``, ``L``, ``lambda`` and ``tau``. ``lambda`` may be
    omitted when the order has a shipped gain set (see :func:`gains_for`).
    """
    if isinstance(source, (str, PathLike)):
        with open(source) as fh:
            source = json.load(fh)
    n = source["n"]
    lam = source.get("lambda")
    if lam is None:
        lam = gains_for(n)
    return make_params(n, source["L"], lam, source["tau"])


@dataclass(frozen=True, eq=False)
class Tables:
    """Every constant the step loop needs, computed once per :class:`Params`.

    Index conventions (all 0-based):

    * ``a[l]``       -- polynomial coefficient a_l, l = 0..n
    * ``w[m]``       -- Taylor weight tau^m / m!, m = 0..n+1 (so phi_i = w[i-1])
    * ``bstar[i][j]``-- injection weight for state row i and gain column j,
                        defined for 0 <= i <= j <= n (zero below the diagonal)
    * ``c[i]``       -- first-derivative coefficient c_i, i = 1..n+1 (``c[0]`` is 0)
    * ``d[i]``       -- second-derivative coefficient d_i, i = 2..n+1 (``d[0:2]`` are 0)
    * ``Phi``, ``Bstar`` -- dense (n+1)x(n+1) upper-triangular Toeplitz matrices
    """

    params: Params
    a: tuple[float, ...]
    w: tuple[float, ...]
    bstar: tuple[tuple[float, ...], ...]
    c: tuple[float, ...]
    d: tuple[float, ...]
    Phi: np.ndarray = field(repr=False)
    Bstar: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def phi(self) -> tuple[float, ...]:
        """phi_1..phi_{n+1}."""
        return self.w[: self.n + 1]

    def __eq__(self, other):
        if not isinstance(other, Tables):
            return NotImplemented
        return (
            self.params == other.params
            and self.a == other.a
            and self.w == other.w
            and self.bstar == other.bstar
            and self.c == other.c
            and self.d == other.d
            and np.array_equal(self.Phi, other.Phi)
            and np.array_equal(self.Bstar, other.Bstar)
        )


def taylor_weights(tau: float, count: int) -> list[float]:
    # running product, no factorials of large integers
    w = [1.0]
    for m in range(1, count):
        w.append(w[-1] * tau / m)
    return w


def precompute(params: Params) -> Tables:
    n, L, lam, tau = params.n, params.L, params.lam, params.tau
    w = taylor_weights(tau, n + 2)
    # L^{(j+1)/(n+1)} for gain column j
    Lpow = [L ** ((j + 1) / (n + 1)) for j in range(n + 1)]

    a = tuple(w[n - l + 1] * lam[l] * L ** ((n - l + 1) / (n + 1)) for l in range(n + 1))
    bstar = tuple(
        tuple(
            w[j - i + 1] * lam[n - j] * Lpow[j] if j >= i else 0.0 for j in range(n + 1)
        )
        for i in range(n + 1)
    )
    c = (0.0,) + tuple(i * a[i] for i in range(1, n + 1)) + (float(n + 1),)
    d = (0.0, 0.0) + tuple(i * (i - 1) * a[i] for i in range(2, n + 1)) + (float(n * (n + 1)),)

    Phi = np.zeros((n + 1, n + 1))
    Bstar = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(i, n + 1):
            Phi[i, j] = w[j - i]
            Bstar[i, j] = w[j - i + 1]
    Phi.flags.writeable = False
    Bstar.flags.writeable = False

    for name, values in (("a", a), ("w", w), ("c", c), ("d", d), ("bstar", np.ravel(bstar))):
        if not all(math.isfinite(v) for v in values):
            raise TableOverflow(f"non-finite entry in table {name!r} for {params}")
    if not (np.isfinite(Phi).all() and np.isfinite(Bstar).all()):
        raise TableOverflow(f"non-finite transition matrix for {params}")

    return Tables(params=params, a=a, w=tuple(w), bstar=bstar, c=c, d=d, Phi=Phi, Bstar=Bstar)


def as_params(n: int, L: float, tau: float, lam: Sequence[float] | None = None) -> Params:
    """Shorthand: ``make_params`` falling back to :func:`gains_for`."""
    return make_params(n, L, gains_for(n) if lam is None else lam, tau)
