import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cadlag_limits import (
    StepFunction,
    left_limit,
    m1_distance,
    m1_oracle,
    strong_m1_lower_bound,
    uniform_distance,
    weak_m1_distance,
)
from cadlag_limits.metrics import m1_decide, oracle_discretization_bound

from conftest import random_step

TOL = 1e-4
# discrete Frechet oracle on the 0.3 / 0.5 unit-jump pair at 2000 samples per segment
V_STAR = 0.2


def jump(t, v=1.0, x0=0.0):
    return StepFunction([x0], [t], [[v]])


def test_identity():
    x = jump(0.4)
    r = m1_distance(x, x, 1e-6)
    assert r.value <= 1e-6
    assert m1_oracle(x, x, 50) == 0.0


def test_shifted_jump_matches_fixture():
    x, y = jump(0.3), jump(0.5)
    assert m1_oracle(x, y, 2000) == pytest.approx(V_STAR, abs=1e-12)
    r = m1_distance(x, y, TOL)
    assert r.lower_bound <= V_STAR <= r.upper_bound
    assert r.value == r.upper_bound
    assert r.width <= TOL
    assert r.value <= 0.2 + TOL


def test_unit_jump_against_zero():
    r = m1_distance(jump(0.5), StepFunction([0.0]), TOL)
    assert r.value == pytest.approx(1.0, abs=TOL)
    assert m1_oracle(jump(0.5), StepFunction([0.0]), 200) == pytest.approx(1.0)


def test_oracle_ignores_null_structure():
    y = StepFunction([0.0], [0.2, 0.5], [[0.0], [1.0]])
    assert m1_oracle(jump(0.5), y, 100) == 0.0


def test_input_checks():
    with pytest.raises(ValueError):
        m1_distance(jump(0.5), jump(0.5), 0.0)
    with pytest.raises(ValueError):
        m1_distance(StepFunction([0.0, 0.0]), StepFunction([0.0, 0.0]))
    with pytest.raises(ValueError):
        m1_oracle(jump(0.5), jump(0.5), 1)
    with pytest.raises(ValueError):
        weak_m1_distance(StepFunction([0.0]), StepFunction([0.0, 0.0]))
    with pytest.raises(ValueError):
        strong_m1_lower_bound(StepFunction([0.0, 0.0]), StepFunction([0.0, 0.0]), [0, 0])


def test_monotone_path_sees_through_intermediate_steps():
    # two small steps against one big step: M1 matches them along the jump segment
    x = StepFunction([0.0], [0.5, 0.5001], [[0.5], [1.0]])
    r = m1_distance(x, jump(0.5), TOL)
    assert r.value <= 1e-4 + TOL
    assert uniform_distance(x, jump(0.5)) == 0.5


def test_uniform_distance():
    assert uniform_distance(jump(0.3), jump(0.3)) == 0.0
    assert uniform_distance(jump(0.3), jump(0.5)) == 1.0
    assert uniform_distance(StepFunction([1.0, 1.0]), StepFunction([0.0, 1.0])) == 1.0


def uniform_by_evaluation(x, y):
    ts = np.union1d(x.times, y.times)
    gap = np.max(np.abs(x.initial - y.initial))
    if ts.size:
        gap = max(gap, np.abs(x(ts) - y(ts)).max(), np.abs(left_limit(x, ts) - left_limit(y, ts)).max())
    return gap


def test_uniform_distance_against_evaluation(rng):
    for _ in range(300):
        d = int(rng.integers(1, 4))
        x, y = random_step(rng, 6, d), random_step(rng, 6, d)
        if rng.random() < 0.3:
            y = StepFunction(y.initial, x.times, y.values[: x.n_jumps] if y.n_jumps >= x.n_jumps else
                             np.resize(y.values, (x.n_jumps, d)))
        assert uniform_distance(x, y) == uniform_by_evaluation(x, y)


def test_weak_m1():
    x = StepFunction([0.0, 0.0], [0.3], [[1.0, 1.0]])
    y = StepFunction([0.0, 0.0], [0.5], [[1.0, 1.0]])
    assert weak_m1_distance(x, x).value == 0.0
    r = weak_m1_distance(x, y, TOL)
    assert r.lower_bound <= V_STAR <= r.upper_bound
    z = StepFunction([0.0, 0.0], [0.3, 0.5], [[1.0, 0.0], [1.0, 1.0]])
    scalar = m1_distance(StepFunction([0.0], [0.3], [[0.0]]), StepFunction([0.0], [0.5], [[1.0]]), TOL)
    assert weak_m1_distance(StepFunction([0.0, 0.0], [0.3], [[1.0, 0.0]]), z, TOL).value == scalar.value


def test_strong_lower_bound_examples():
    x = StepFunction([0.0, 0.0], [0.2], [[1.0, 1.0]])
    y = StepFunction([0.0, 0.0], [0.2, 0.4, 0.6], [[1.0, 1.0], [1.0, 2.0], [1.0, 1.0]])
    assert strong_m1_lower_bound(x, x, [1, -1]) == 0.0
    assert strong_m1_lower_bound(x, y, [1, -1]) == pytest.approx(0.5, abs=TOL)
    assert strong_m1_lower_bound(x, y, [1, -1]) <= uniform_distance(x, y)


def test_decide_consistent_with_bracket():
    x, y = jump(0.3), jump(0.5, 2.0)
    r = m1_distance(x, y, TOL)
    assert m1_decide(x, y, r.upper_bound)
    if r.lower_bound < r.upper_bound:
        assert not m1_decide(x, y, r.lower_bound - 1e-9)


def test_oracle_agreement_small_corpus(rng):
    for _ in range(10):
        x, y = random_step(rng, 3), random_step(rng, 3)
        m = 400
        o = m1_oracle(x, y, m)
        v = m1_distance(x, y, TOL).value
        assert abs(v - o) <= max(TOL, oracle_discretization_bound(x, y, m)) + 1e-9


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_metric_axioms(seed):
    rng = np.random.default_rng(seed)
    x, y, z = (random_step(rng, 4) for _ in range(3))
    dxy = m1_distance(x, y, TOL).value
    assert dxy == m1_distance(y, x, TOL).value
    assert m1_distance(x, x, TOL).value <= TOL
    assert dxy <= m1_distance(x, z, TOL).value + m1_distance(z, y, TOL).value + 3 * TOL
    assert dxy <= uniform_distance(x, y) + TOL
    lo = max(abs(x.initial[0] - y.initial[0]), abs(x.final[0] - y.final[0]))
    assert dxy >= lo - 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 3))
def test_domination_multivariate(seed, dim):
    rng = np.random.default_rng(seed)
    x, y = random_step(rng, 4, dim), random_step(rng, 4, dim)
    c = rng.normal(size=dim)
    u = uniform_distance(x, y)
    assert weak_m1_distance(x, y, TOL).value <= u + TOL
    assert strong_m1_lower_bound(x, y, c, TOL) <= u + 1e-12


def test_banded_decision_matches_plain(rng):
    from cadlag_limits import _kernels
    from cadlag_limits.paths import completed_graph

    for _ in range(300):
        x, y = random_step(rng, 30), random_step(rng, 30)
        P, Q = completed_graph(x).points, completed_graph(y).points
        for eps in rng.uniform(0.0, 1.5, 4):
            full = _kernels.frechet_decide(P, Q, eps, eps)
            assert _kernels.frechet_decide_banded(P, Q, eps) == full
            # a narrower time corridor can only reject more
            assert not _kernels.frechet_decide(P, Q, eps, eps / 3) or full


def test_cell_budget_keeps_bracket_certified(rng):
    for _ in range(50):
        x, y = random_step(rng, 40), random_step(rng, 40)
        exact = m1_distance(x, y, TOL)
        capped = m1_distance(x, y, TOL, max_cells=50)
        assert capped.lower_bound <= exact.upper_bound + 1e-12
        assert exact.lower_bound <= capped.upper_bound + 1e-12
        assert capped.value == capped.upper_bound


def test_range_lower_bound():
    # a shared excursion of height 1 against one of height 3
    x = StepFunction([0.0], [0.4, 0.6], [[1.0], [0.0]])
    y = StepFunction([0.0], [0.4, 0.6], [[3.0], [0.0]])
    r = m1_distance(x, y, TOL)
    assert r.lower_bound >= 2.0 - 1e-12
    assert r.value == pytest.approx(2.0, abs=TOL)
