import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cadlag_limits import (
    StepFunction,
    completed_graph,
    eval_path,
    left_limit,
    linear_combination,
    project,
    sup_norm,
)
from cadlag_limits.paths import graph_contains, graph_leq

from conftest import random_step


@pytest.fixture
def f2():
    return StepFunction([0.0, 0.0], [0.5], [[2.0, -3.0]])


def test_eval_right_continuous(f2):
    np.testing.assert_array_equal(eval_path(f2, 0.5), [2.0, -3.0])
    np.testing.assert_array_equal(eval_path(f2, 0.49), [0.0, 0.0])
    np.testing.assert_array_equal(f2(1.0), [2.0, -3.0])


def test_eval_constant_and_domain():
    f = StepFunction([1.0, 1.0])
    np.testing.assert_array_equal(eval_path(f, 0.7), [1.0, 1.0])
    with pytest.raises(ValueError):
        eval_path(f, 1.2)
    with pytest.raises(ValueError):
        eval_path(f, -0.1)


def test_left_limit(f2):
    np.testing.assert_array_equal(left_limit(f2, 0.5), [0.0, 0.0])
    np.testing.assert_array_equal(left_limit(f2, 0.7), [2.0, -3.0])
    np.testing.assert_array_equal(left_limit(StepFunction([1.0, 1.0]), 1.0), [1.0, 1.0])
    with pytest.raises(ValueError):
        left_limit(f2, 0.0)


def test_invariants_enforced():
    with pytest.raises(ValueError):
        StepFunction([0.0], [0.5, 0.5], [[1.0], [2.0]])
    with pytest.raises(ValueError):
        StepFunction([0.0], [0.0], [[1.0]])
    with pytest.raises(ValueError):
        StepFunction([0.0], [1.5], [[1.0]])
    with pytest.raises(ValueError):
        StepFunction([0.0], [0.5], [[np.nan]])


def test_null_jumps_dropped():
    f = StepFunction([0.0], [0.2, 0.4, 0.6], [[0.0], [1.0], [1.0]])
    assert f.n_jumps == 1
    np.testing.assert_array_equal(f.times, [0.4])


def test_immutable(f2):
    with pytest.raises(ValueError):
        f2.values[0, 0] = 5.0


def test_completed_graph_single_jump():
    f = StepFunction([0.0], [0.5], [[1.0]])
    np.testing.assert_array_equal(completed_graph(f).points, [[0, 0], [0.5, 0], [0.5, 1], [1, 1]])


def test_completed_graph_constant():
    g = completed_graph(StepFunction([3.0]))
    np.testing.assert_array_equal(g.points, [[0, 3], [1, 3]])


def test_completed_graph_jump_at_one():
    f = StepFunction([0.0], [1.0], [[1.0]])
    np.testing.assert_array_equal(completed_graph(f).points, [[0, 0], [1, 0], [1, 1]])


def test_completed_graph_2d_straight_segment(f2):
    pts = completed_graph(f2).points
    np.testing.assert_array_equal(pts, [[0, 0, 0], [0.5, 0, 0], [0.5, 2, -3], [1, 2, -3]])
    # points along the vertical segment stay in the product segment and are ordered
    mids = [np.array([0.5, 2 * s, -3 * s]) for s in np.linspace(0, 1, 11)]
    for p in mids:
        assert graph_contains(f2, p)
    for p, q in zip(mids, mids[1:]):
        assert graph_leq(f2, p, q)


def test_graph_order_random(rng):
    for _ in range(100):
        f = random_step(rng, 5, dim=int(rng.integers(1, 4)))
        pts = completed_graph(f).points
        assert pts[0, 0] == 0 and pts[-1, 0] == 1
        np.testing.assert_array_equal(pts[-1, 1:], f.final)
        np.testing.assert_array_equal(pts[0, 1:], f.initial)
        for p, q in zip(pts, pts[1:]):
            assert graph_leq(f, p, q)
            assert graph_contains(f, p)


def test_project(f2):
    p1, p2 = project(f2, 0), project(f2, 1)
    assert p1 == StepFunction([0.0], [0.5], [[2.0]])
    assert p2 == StepFunction([0.0], [0.5], [[-3.0]])
    g = StepFunction([0.0, 1.0], [0.3, 0.6], [[1.0, 1.0], [2.0, 1.0]])
    assert project(g, 1).n_jumps == 0
    with pytest.raises(IndexError):
        project(f2, 2)


def test_linear_combination(f2):
    assert linear_combination(f2, [1, 1]) == StepFunction([0.0], [0.5], [[-1.0]])
    assert linear_combination(f2, [1, 0]) == project(f2, 0)
    same = StepFunction([0.0, 0.0], [0.2, 0.7], [[1.0, 1.0], [3.0, 3.0]])
    assert linear_combination(same, [1, -1]) == StepFunction([0.0])
    with pytest.raises(ValueError):
        linear_combination(f2, [0, 0])


def test_sup_norm(f2):
    assert sup_norm(StepFunction([1.0, 1.0])) == 1.0
    assert sup_norm(f2) == 3.0
    assert sup_norm(StepFunction([0.0, 0.0])) == 0.0


def test_json_roundtrip(f2):
    text = f2.to_json()
    assert StepFunction.from_json(text) == f2
    data = f2.to_dict()
    assert data == {"dim": 2, "initial": [0.0, 0.0], "jumps": [{"t": 0.5, "v": [2.0, -3.0]}]}


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 3))
def test_properties(seed, dim):
    rng = np.random.default_rng(seed)
    f = random_step(rng, 6, dim)
    c = rng.normal(size=dim)
    ts = rng.uniform(0.001, 1.0, 20)
    off_jump = ~np.isin(ts, f.times)
    np.testing.assert_array_equal(left_limit(f, ts[off_jump]), eval_path(f, ts[off_jump]))
    assert sup_norm(linear_combination(f, c)) <= np.abs(c).sum() * sup_norm(f) + 1e-12
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        assert linear_combination(f, e) == project(f, j)
