import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hidd.errors import GainCountMismatch, NonPositiveError, TableOverflow, UnsupportedOrder
from hidd.params import (
    GAIN_TABLE,
    NONRECURSIVE_GAINS,
    default_gains,
    gains_for,
    load_params,
    make_params,
    nonrecursive_gains,
    precompute,
)
from oracles import mp_tables


def test_make_params_roundtrip():
    p = make_params(3, 10.0, [1.1, 3.06, 4.16, 3.0], 1e-3)
    assert p.n == 3 and p.lam == (1.1, 3.06, 4.16, 3.0) and p.tau == 1e-3


@pytest.mark.parametrize(
    "args, exc",
    [
        ((0, 1.0, [1.0], 1e-3), NonPositiveError),
        ((2, -1.0, [1, 1, 1], 1e-3), NonPositiveError),
        ((2, 1.0, [1, 1, 1], 0.0), NonPositiveError),
        ((2, 1.0, [1, 1], 1e-3), GainCountMismatch),
        ((2, 1.0, [1, -1, 1], 1e-3), NonPositiveError),
        ((2, math.nan, [1, 1, 1], 1e-3), NonPositiveError),
    ],
)
def test_make_params_rejects(args, exc):
    with pytest.raises(exc):
        make_params(*args)


def test_default_gains_prefix_and_limit():
    assert default_gains(3) == (1.1, 1.5, 2.0, 3.0)
    assert default_gains(7) == GAIN_TABLE
    with pytest.raises(UnsupportedOrder):
        default_gains(8)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_nonrecursive_map_matches_published(n):
    got = nonrecursive_gains(default_gains(n))
    assert got == pytest.approx(NONRECURSIVE_GAINS[n], abs=0.006)


def test_gains_for_covers_table_orders():
    for n in range(1, 8):
        assert len(gains_for(n)) == n + 1
    with pytest.raises(UnsupportedOrder):
        gains_for(8)


def test_tables_against_high_precision(params3, tables3):
    a, bstar = mp_tables(3, 10.0, params3.lam, 1e-3)
    assert tables3.a == pytest.approx(a, rel=1e-15)
    for row, ref in zip(tables3.bstar, bstar):
        assert row == pytest.approx(ref, rel=1e-15, abs=0)


def test_tables_frozen_values(tables3):
    # tau^4/4! * 1.1 * 10 and tau * 3 * 10^{1/4} ... computed at 50 digits
    assert tables3.a[0] == pytest.approx(4.583333333333334e-13, rel=1e-15)
    assert tables3.a[3] == pytest.approx(0.005334838230116768, rel=1e-15)


def test_a_equals_first_injection_row(tables3):
    n = tables3.n
    for l in range(n + 1):
        assert tables3.a[l] == tables3.bstar[0][n - l]


def test_c_d_layout(tables3):
    n = tables3.n
    assert tables3.c[n + 1] == n + 1 and tables3.d[n + 1] == n * (n + 1)
    assert tables3.c[2] == 2 * tables3.a[2] and tables3.d[3] == 6 * tables3.a[3]


def test_matrices_are_readonly_toeplitz(tables3):
    Phi, B = tables3.Phi, tables3.Bstar
    with pytest.raises(ValueError):
        Phi[0, 0] = 2.0
    assert np.allclose(np.triu(Phi), Phi) and np.all(np.diag(Phi) == 1.0)
    assert Phi[0, 2] == Phi[1, 3] and B[0, 1] == B[2, 3]


def test_precompute_deterministic(params3):
    assert precompute(params3) == precompute(params3)


def test_table_overflow():
    with pytest.raises(TableOverflow):
        precompute(make_params(2, 1e305, (1.0, 1.0, 1.0), 1e3))


def test_load_params(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"n": 2, "L": 5.0, "tau": 0.01}))
    p = load_params(path)
    assert p.lam == gains_for(2) and p.L == 5.0
    assert load_params({"n": 1, "L": 1, "tau": 0.1, "lambda": [2, 3]}).lam == (2.0, 3.0)


@settings(max_examples=50, deadline=None)
@given(
    n=st.integers(1, 10),
    tau=st.floats(1e-5, 1e-1),
    L=st.floats(1e-2, 1e3),
)
def test_tables_positive_and_decaying(n, tau, L):
    t = precompute(make_params(n, L, [1.0] * (n + 1), tau))
    assert all(x > 0 for x in t.a)
    assert all(t.w[m + 1] < t.w[m] for m in range(n + 1))
