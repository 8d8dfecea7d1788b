"""Cadlag step functions on [0, 1] and their completed graphs.

A path starts at ``initial`` and changes value only at its jump times,
which lie in (0, 1]. Values are stored per jump, so evaluation is
right-continuous by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np


def _as_matrix(values, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim in (None, 1) else arr.reshape(-1, dim)
    if arr.ndim != 2:
        raise ValueError("jump values must be a 2-d array of shape (k, d)")
    return arr


@dataclass(frozen=True, eq=False)
class StepFunction:
    """A d-dimensional cadlag step path on [0, 1].

    Parameters
    ----------
    initial : array_like, shape (d,)
        Value on [0, t_1).
    times : array_like, shape (k,)
        Strictly increasing jump times in (0, 1].
    values : array_like, shape (k, d)
        Path value from each jump time onward.

    Jumps that do not change the value are removed on construction.
    """

    initial: np.ndarray
    times: np.ndarray
    values: np.ndarray

    def __init__(self, initial, times=(), values=()):
        init = np.atleast_1d(np.asarray(initial, dtype=float)).copy()
        if init.ndim != 1 or init.size == 0:
            raise ValueError("initial value must be a non-empty vector")
        d = init.size
        t = np.asarray(times, dtype=float).reshape(-1).copy()
        v = _as_matrix(values, d).copy() if t.size else np.empty((0, d))
        if v.shape != (t.size, d):
            raise ValueError(f"values must have shape ({t.size}, {d}), got {v.shape}")
        if t.size:
            if not (np.all(t > 0.0) and np.all(t <= 1.0)):
                raise ValueError("jump times must lie in (0, 1]")
            if np.any(np.diff(t) <= 0.0):
                raise ValueError("jump times must be strictly increasing")
            if not np.all(np.isfinite(v)):
                raise ValueError("jump values must be finite")
            prev = np.vstack([init[None, :], v[:-1]])
            keep = np.any(v != prev, axis=1)
            if not keep.all():
                t, v = t[keep], v[keep]
        for arr in (init, t, v):
            arr.setflags(write=False)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.initial.size

    @property
    def n_jumps(self) -> int:
        return self.times.size

    @classmethod
    def constant(cls, value) -> "StepFunction":
        return cls(value)

    @classmethod
    def from_increments(cls, times, increments, initial=None) -> "StepFunction":
        """Path whose value at ``times[k]`` is ``initial + sum(increments[:k+1])``."""
        inc = np.asarray(increments, dtype=float)
        if inc.ndim == 1:
            inc = inc[:, None]
        init = np.zeros(inc.shape[1]) if initial is None else np.atleast_1d(initial)
        return cls(init, times, init + np.cumsum(inc, axis=0))

    @property
    def final(self) -> np.ndarray:
        return self.values[-1] if self.n_jumps else self.initial

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (
            np.array_equal(self.initial, other.initial)
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.initial.tobytes(), self.times.tobytes(), self.values.tobytes()))

    def __repr__(self) -> str:
        return f"StepFunction(dim={self.dim}, n_jumps={self.n_jumps})"

    # evaluation ---------------------------------------------------------

    def __call__(self, t):
        return eval_path(self, t)

    def all_values(self) -> np.ndarray:
        """Initial value followed by every stored value, shape (k + 1, d)."""
        return np.vstack([self.initial[None, :], self.values])

    # serialization ------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "initial": self.initial.tolist(),
            "jumps": [{"t": float(t), "v": v.tolist()} for t, v in zip(self.times, self.values)],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StepFunction":
        dim = int(data["dim"])
        initial = np.asarray(data["initial"], dtype=float).reshape(-1)
        if initial.size != dim:
            raise ValueError(f"initial has {initial.size} entries, expected dim={dim}")
        jumps = data.get("jumps", [])
        times = [float(j["t"]) for j in jumps]
        values = np.asarray([j["v"] for j in jumps], dtype=float).reshape(len(jumps), dim)
        return cls(initial, times, values)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "StepFunction":
        return cls.from_dict(json.loads(text))


def eval_path(f: StepFunction, t):
    """Right-continuous value of ``f`` at time(s) ``t``.

    Scalar ``t`` returns a vector of length d; an array of times returns
    an array of shape ``(len(t), d)``.
    """
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0.0) or np.any(ts > 1.0) or np.any(np.isnan(ts)):
        raise ValueError("evaluation time must lie in [0, 1]")
    idx = np.searchsorted(f.times, ts, side="right")
    out = f.all_values()[idx]
    return out


def left_limit(f: StepFunction, t):
    """Value of ``f`` just before ``t``; defined for t in (0, 1]."""
    ts = np.asarray(t, dtype=float)
    if np.any(ts <= 0.0) or np.any(ts > 1.0) or np.any(np.isnan(ts)):
        raise ValueError("left limit is defined only for t in (0, 1]")
    idx = np.searchsorted(f.times, ts, side="left")
    return f.all_values()[idx]


def project(f: StepFunction, j: int) -> StepFunction:
    """Coordinate ``j`` of ``f`` as a scalar path (0-based index)."""
    if not 0 <= j < f.dim:
        raise IndexError(f"coordinate {j} out of range for dim={f.dim}")
    return StepFunction(f.initial[j : j + 1], f.times, f.values[:, j : j + 1])


def linear_combination(f: StepFunction, c) -> StepFunction:
    """Scalar path t -> <c, f(t)>."""
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.size != f.dim:
        raise ValueError(f"coefficient vector has length {c.size}, expected {f.dim}")
    if not np.any(c != 0.0):
        raise ValueError("coefficient vector must be nonzero")
    return StepFunction([f.initial @ c], f.times, (f.values @ c)[:, None])


def sup_norm(f: StepFunction) -> float:
    """Supremum over [0, 1] of the max-norm of ``f``."""
    return float(np.max(np.abs(f.all_values())))


# completed graphs -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CompletedGraph:
    """Polyline through the completed graph of a step path.

    ``points`` has shape (m, 1 + d): column 0 is time, the rest the
    spatial coordinate. Consecutive points are joined by a horizontal
    segment (same z) or a vertical segment (same t) traversing the
    straight line from x(t-) to x(t).
    """

    points: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def space(self) -> np.ndarray:
        return self.points[:, 1:]

    @property
    def n_segments(self) -> int:
        return self.points.shape[0] - 1


def completed_graph(f: StepFunction) -> CompletedGraph:
    """Alternating horizontal/vertical polyline of ``f`` from (0, x(0)) to (1, x(1))."""
    k, d = f.n_jumps, f.dim
    vals = f.all_values()
    # (t_i, x(t_i-)) and (t_i, x(t_i)) for every jump, framed by the endpoints
    pts = np.empty((2 * k + 2, 1 + d))
    pts[0, 0], pts[0, 1:] = 0.0, f.initial
    pts[1 : 2 * k + 1 : 2, 0] = f.times
    pts[1 : 2 * k + 1 : 2, 1:] = vals[:-1]
    pts[2 : 2 * k + 2 : 2, 0] = f.times
    pts[2 : 2 * k + 2 : 2, 1:] = vals[1:]
    pts[-1, 0], pts[-1, 1:] = 1.0, vals[-1]
    if k and f.times[-1] == 1.0:
        pts = pts[:-1]
    return CompletedGraph(pts)


def graph_leq(f: StepFunction, p, q) -> bool:
    """Order on the completed graph of ``f``: is point ``p`` <= point ``q``?

    Points are (t, z_1, ..., z_d). Between distinct times the earlier point
    is smaller; at a common time the point closer to x(t-) in every
    coordinate is smaller.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p[0] != q[0]:
        return bool(p[0] < q[0])
    t = p[0]
    base = f.initial if t == 0.0 else left_limit(f, t)
    return bool(np.all(np.abs(base - p[1:]) <= np.abs(base - q[1:])))


def graph_contains(f: StepFunction, point, tol: float = 0.0) -> bool:
    """Whether ``point`` lies in the completed graph of ``f`` (within ``tol``)."""
    point = np.asarray(point, dtype=float)
    t, z = point[0], point[1:]
    if not 0.0 <= t <= 1.0:
        return False
    a = f.initial if t == 0.0 else left_limit(f, t)
    b = eval_path(f, t)
    lo, hi = np.minimum(a, b) - tol, np.maximum(a, b) + tol
    return bool(np.all((z >= lo) & (z <= hi)))
