import pytest
from hypothesis import given
from hypothesis import strategies as st

from hidd.counting import Counted, OpCounter, plain, wrap


def test_each_operator_class():
    ops = OpCounter()
    x, y = Counted(3.0, ops), Counted(2.0, ops)
    assert plain(x + y) == 5.0 and plain(x - y) == 1.0 and plain(1 - x) == -2.0
    assert ops.as_tuple() == (3, 0, 0, 0)
    assert plain(x * y) == 6.0 and plain(x / y) == 1.5 and plain(2 / y) == 1.0
    assert ops.muls == 3
    assert plain(x ** 0.5) == pytest.approx(3 ** 0.5) and ops.roots == 1
    assert (x > y) and not (x < y) and (x >= 3) and (y <= 2)
    assert ops.cmps == 4


def test_sign_ops_are_free():
    ops = OpCounter()
    x = Counted(-2.0, ops)
    assert plain(abs(-x)) == 2.0
    assert ops.total == 0


def test_wrap_none_is_identity():
    t = (1.0, (2.0, 3.0))
    assert wrap(t, None) is t
    w = wrap(t, OpCounter())
    assert isinstance(w[1][0], Counted)


def test_counter_algebra():
    a, b = OpCounter(1, 2, 3, 4), OpCounter(1, 1, 1, 1)
    assert (a - b).as_tuple() == (0, 1, 2, 3)
    assert (a + b).total == 14
    assert b.scaled(5).as_tuple() == (5, 5, 5, 5)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30))
def test_sum_costs_len_minus_one(xs):
    ops = OpCounter()
    vals = wrap(tuple(xs), ops)
    acc = vals[0]
    for v in vals[1:]:
        acc = acc + v
    assert ops.adds == len(xs) - 1
    assert plain(acc) == pytest.approx(sum(xs), abs=1e-6)
