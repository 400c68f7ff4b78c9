"""Exact operation tallies for the numerical kernels.

Kernels in this package are written once, over plain arithmetic. To count
them, their inputs are wrapped in :class:`Counted` scalars: every ``+``/``-``
increments ``adds``, every ``*``/``/`` increments ``muls``, ``**`` increments
``roots`` and every ordering comparison increments ``cmps``. Negation and
``abs`` are sign manipulations and are free. Passing plain floats (the
default, ``ops=None``) runs the very same code with no bookkeeping at all.

Counting convention:

* a literal 1 is never multiplied (monic leading term, phi_1, r^0);
* powers are built by repeated multiplication, one mul each;
* ``2 * x`` is one mul, a division is one mul;
* the constant term ``a_0 +/- b_k`` is re-formed on every evaluation, one add.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass
class OpCounter:
    adds: int = 0
    muls: int = 0
    roots: int = 0
    cmps: int = 0

    def snapshot(self) -> "OpCounter":
        return OpCounter(self.adds, self.muls, self.roots, self.cmps)

    def __sub__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(*(getattr(self, f.name) - getattr(other, f.name) for f in fields(self)))

    def __add__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def scaled(self, k: int) -> "OpCounter":
        return OpCounter(self.adds * k, self.muls * k, self.roots * k, self.cmps * k)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.adds, self.muls, self.roots, self.cmps)

    @property
    def total(self) -> int:
        return self.adds + self.muls + self.roots + self.cmps


def _v(x):
    return x.value if isinstance(x, Counted) else x


class Counted:
    """A float that reports each arithmetic operation to an :class:`OpCounter`."""

    __slots__ = ("value", "ops")

    def __init__(self, value, ops: OpCounter):
        self.value = float(_v(value))
        self.ops = ops

    def __repr__(self):
        return f"Counted({self.value!r})"

    def __float__(self):
        return self.value

    def _new(self, value):
        return Counted(value, self.ops)

    def __add__(self, other):
        self.ops.adds += 1
        return self._new(self.value + _v(other))

    def __radd__(self, other):
        self.ops.adds += 1
        return self._new(_v(other) + self.value)

    def __sub__(self, other):
        self.ops.adds += 1
        return self._new(self.value - _v(other))

    def __rsub__(self, other):
        self.ops.adds += 1
        return self._new(_v(other) - self.value)

    def __mul__(self, other):
        self.ops.muls += 1
        return self._new(self.value * _v(other))

    def __rmul__(self, other):
        self.ops.muls += 1
        return self._new(_v(other) * self.value)

    def __truediv__(self, other):
        self.ops.muls += 1
        return self._new(self.value / _v(other))

    def __rtruediv__(self, other):
        self.ops.muls += 1
        return self._new(_v(other) / self.value)

    def __pow__(self, other):
        self.ops.roots += 1
        return self._new(self.value ** _v(other))

    def __neg__(self):
        return self._new(-self.value)

    def __pos__(self):
        return self

    def __abs__(self):
        return self._new(abs(self.value))

    def __lt__(self, other):
        self.ops.cmps += 1
        return self.value < _v(other)

    def __le__(self, other):
        self.ops.cmps += 1
        return self.value <= _v(other)

    def __gt__(self, other):
        self.ops.cmps += 1
        return self.value > _v(other)

    def __ge__(self, other):
        self.ops.cmps += 1
        return self.value >= _v(other)


def plain(x) -> float:
    """Strip instrumentation; plain floats pass through."""
    return x.value if isinstance(x, Counted) else x


def wrap(values, ops: OpCounter | None):
    """Wrap a scalar or a (nested) tuple of scalars for counting; no-op if ``ops`` is None."""
    if ops is None:
        return values
    if isinstance(values, (tuple, list)):
        return tuple(wrap(v, ops) for v in values)
    return Counted(values, ops)
