import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hidd import gains_for, make_params, precompute
from hidd.counting import OpCounter, wrap
from hidd.differentiator import (
    State,
    UpdateForm,
    counted_source,
    injection_vector,
    run,
    step,
    update_horner,
    update_sum_of_powers,
)
from hidd.errors import HIDDError, NonFiniteState
from hidd.polyeval import EvalStrategy
from hidd.rootfind import Case
from cases import hidd_cases
from oracles import matrix_step

FORMS = list(UpdateForm)


def test_state_zeros():
    s = State.zeros(3)
    assert s.z == (0.0,) * 4 and s.n == 3 and s.k == 0


@pytest.mark.parametrize("n", range(1, 13))
def test_update_tallies(n):
    t = precompute(make_params(n, 1.0, [1.0] * (n + 1), 1e-2))
    for fn, muls in ((update_horner, n * (n + 1)), (update_sum_of_powers, None)):
        ops = OpCounter()
        fn(counted_source(t, ops), wrap((0.1,) * (n + 1), ops), wrap(0.3, ops), False, n)
        assert ops.adds == (n + 1) ** 2
        if muls is not None:
            assert ops.muls == muls
        else:
            # w_j z_j products, b* times r^m with r^m built from scratch
            assert ops.muls == n * (n + 1) // 2 + sum(1 + (m - 1) for m in range(1, n + 1) for _ in range(n + 1 - m))


def test_step_tallies_n3(tables3):
    z = (0.0,) * 4
    ops = OpCounter()
    step(State(z=z), 1.0, tables3, ops=ops)
    assert ops.as_tuple() == (57, 58, 1, 1)
    ops = OpCounter()
    s = step(State(z=z), 0.0, tables3, ops=ops)
    assert s.last.case is Case.DEAD_ZONE and ops.as_tuple() == (14, 13, 0, 2)
    assert s.last.ops.as_tuple() == (14, 13, 0, 2)


@pytest.mark.parametrize("case", hidd_cases(25, seed=3), ids=lambda c: f"n{c[0].n}")
def test_forms_match_dense_oracle(case):
    params, tables, z, f, _ = case
    ref = matrix_step(params.n, params.L, params.lam, params.tau, z, f)
    scale = 1.0 + max(abs(v) for v in z)
    for form in FORMS:
        got = step(State(z=z), f, tables, form=form).z
        assert np.max(np.abs(np.array(got) - ref)) <= 1e-9 * scale


@pytest.mark.parametrize("case", hidd_cases(20, seed=5, off_dead_zone=False), ids=lambda c: f"n{c[0].n}")
def test_dead_zone_lands_on_sample(case):
    params, tables, z, f, b = case
    s = step(State(z=z), f, tables)
    assert s.last.case is Case.DEAD_ZONE
    assert abs(s.z[0] - f) <= 1e-12 * (1 + abs(f))
    ref = matrix_step(params.n, params.L, params.lam, params.tau, z, f)
    # b_k is a cancellation; a few ulps of f move row i by bstar[i][n] / a_0 each
    n = params.n
    slack = [tables.bstar[i][n] / tables.a[0] * 4e-16 * (1 + abs(f)) for i in range(n + 1)]
    for got, want, extra in zip(s.z, ref, slack):
        assert abs(got - want) <= 1e-12 * (1 + abs(want)) + extra


def test_injection_vector_dead_zone_uses_unit_power(params3):
    v = injection_vector(params3, 0.0, 0.25)
    assert v[:-1].tolist() == [0.0, 0.0, 0.0]
    assert v[-1] == pytest.approx(-params3.lam[0] * params3.L * 0.25)


def test_traces_record_post_step_state(params3):
    st_, traces = run(params3, [0.1, 0.2, 0.3])
    assert [t.k for t in traces] == [0, 1, 2]
    assert traces[-1].z == st_.z and st_.k == 3


def test_nonfinite_state_raises():
    tables = precompute(make_params(3, 10.0, gains_for(3), 1.0))
    # b_k cancels to exactly zero (dead zone) and z_1 + z_2 overflows
    z = (0.0, 1e308, 1e308, 0.0)
    f = 1.5e308
    with pytest.raises(NonFiniteState) as info:
        step(State(z=z, k=5), f, tables)
    assert info.value.index == 5


def test_nonfinite_input_is_an_error(tables3):
    with pytest.raises(HIDDError):
        step(State(z=(math.inf, 0.0, 0.0, 0.0)), 0.0, tables3)


def test_empty_run_rejected(params3):
    with pytest.raises(ValueError):
        run(params3, [])


def test_exact_polynomial_is_tracked():
    # a cubic input has zero 4th derivative; after the transient z tracks it closely
    params = make_params(3, 1.0, gains_for(3), 1e-2)
    t = np.arange(3000) * 1e-2
    f = 0.01 * t**3 - 0.2 * t**2 + t
    st_, _ = run(params, f.tolist())
    T = t[-1]
    truth = (0.01 * T**3 - 0.2 * T**2 + T, 0.03 * T**2 - 0.4 * T + 1, 0.06 * T - 0.4, 0.06)
    assert st_.z[0] == pytest.approx(truth[0], abs=1e-9)
    assert st_.z[1] == pytest.approx(truth[1], abs=1e-4)
    assert st_.z[3] == pytest.approx(truth[3], abs=1e-2)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    strategy=st.sampled_from(list(EvalStrategy)),
)
def test_strategy_does_not_change_step(seed, strategy):
    rng = np.random.default_rng(seed)
    params = make_params(3, 10.0, gains_for(3), 1e-3)
    tables = precompute(params)
    z = tuple(rng.normal(0, 1, 4))
    f = float(rng.normal(0, 1))
    base = step(State(z=z), f, tables).z
    got = step(State(z=z), f, tables, strategy=strategy).z
    assert np.allclose(got, base, rtol=1e-12, atol=1e-15)
