"""Two-stage problem data and the plain-text matrix format used for fixtures.

Format: ``#`` starts a comment.  Blocks are ``matrix NAME ROWS COLS`` or
``vector NAME LEN`` followed by that many whitespace-separated numbers
(``inf``/``-inf`` allowed); ``name TEXT`` sets the problem name.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .._config import TOL

FIXTURES = ("example_3_1", "example_5_3", "example_5_4")


def _ro(a, dtype=np.float64):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TwoStageProblem:
    """min c.x + E[Phi(x, xi)] over X = {x_lb <= x <= x_ub, A_x x <= b_x},
    Phi(x, xi) = min{q.y : W y = h(xi) - T x, y >= 0},  h(xi) = (xi, h_bar),
    xi ~ N(mean, factor factor^T).
    """

    c: np.ndarray
    q: np.ndarray
    W: np.ndarray
    T: np.ndarray
    h_bar: np.ndarray
    mean: np.ndarray
    factor: np.ndarray | None = None
    x_lb: np.ndarray | None = None
    x_ub: np.ndarray | None = None
    A_x: np.ndarray | None = None
    b_x: np.ndarray | None = None
    name: str = "problem"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        c = _ro(np.ravel(self.c))
        q = _ro(np.ravel(self.q))
        W = _ro(np.atleast_2d(self.W))
        m, mbar, r = c.size, q.size, W.shape[0]
        if W.shape[1] != mbar:
            raise ValueError(f"W has {W.shape[1]} columns, q has {mbar} entries")
        T = _ro(np.asarray(self.T, dtype=np.float64).reshape(r, m))
        h_bar = _ro(np.ravel(self.h_bar))
        mean = _ro(np.ravel(self.mean))
        d = mean.size
        if d + h_bar.size != r:
            raise ValueError(f"dim(xi)={d} plus len(h_bar)={h_bar.size} must equal r={r}")
        factor = _ro(np.eye(d) if self.factor is None else np.asarray(self.factor).reshape(d, d))
        x_lb = _ro(np.full(m, -np.inf) if self.x_lb is None else np.broadcast_to(self.x_lb, (m,)))
        x_ub = _ro(np.full(m, np.inf) if self.x_ub is None else np.broadcast_to(self.x_ub, (m,)))
        A_x = _ro(np.zeros((0, m)) if self.A_x is None else np.asarray(self.A_x, float).reshape(-1, m))
        b_x = _ro(np.zeros(0) if self.b_x is None else np.ravel(self.b_x))
        if A_x.shape[0] != b_x.size:
            raise ValueError("A_x and b_x disagree in row count")
        for k, v in dict(c=c, q=q, W=W, T=T, h_bar=h_bar, mean=mean, factor=factor,
                         x_lb=x_lb, x_ub=x_ub, A_x=A_x, b_x=b_x).items():
            object.__setattr__(self, k, v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwoStageProblem):
            return NotImplemented
        keys = ("c", "q", "W", "T", "h_bar", "mean", "factor", "x_lb", "x_ub", "A_x", "b_x")
        return self.name == other.name and all(
            np.array_equal(getattr(self, k), getattr(other, k)) for k in keys)

    __hash__ = None

    @property
    def m(self) -> int:
        return self.c.size

    @property
    def mbar(self) -> int:
        return self.q.size

    @property
    def r(self) -> int:
        return self.W.shape[0]

    @property
    def d(self) -> int:
        return self.mean.size

    @property
    def covariance(self) -> np.ndarray:
        return self.factor @ self.factor.T

    def h(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=np.float64)
        tail = np.broadcast_to(self.h_bar, xi.shape[:-1] + (self.h_bar.size,))
        return np.concatenate([xi, tail], axis=-1)

    def rhs(self, x, xi) -> np.ndarray:
        """h(xi) - T x, row-wise for stacked xi."""
        xi = np.asarray(xi, dtype=np.float64)
        if xi.shape[-1] != self.d:
            raise ValueError(f"xi must have {self.d} components")
        return self.h(xi) - self.T @ np.asarray(x, dtype=np.float64)

    def contains(self, x, tol: float = TOL.feasibility) -> bool:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.m,):
            return False
        ok = np.all(x >= self.x_lb - tol) and np.all(x <= self.x_ub + tol)
        if self.A_x.shape[0]:
            ok = ok and np.all(self.A_x @ x <= self.b_x + tol * np.maximum(1, np.abs(self.b_x)))
        return bool(ok)

    def check_x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if not self.contains(x):
            raise ValueError("first-stage point x is not in X")
        return x

    def replace(self, **changes) -> "TwoStageProblem":
        kw = {k: getattr(self, k) for k in self.__dataclass_fields__}
        kw.update(changes)
        return TwoStageProblem(**kw)


# --- plain-text matrix files -------------------------------------------------

_MATRIX_KEYS = ("W", "T", "A_x", "factor")
_VECTOR_KEYS = ("c", "q", "h_bar", "mean", "x_lb", "x_ub", "b_x")


def _fmt(v: float) -> str:
    return repr(float(v)) if np.isfinite(v) else ("inf" if v > 0 else "-inf")


def dumps_problem(problem: TwoStageProblem, comment: str = "") -> str:
    out = [f"# {line}" for line in comment.splitlines()]
    out.append(f"name {problem.name}")
    for key in ("W", "q", "T", "h_bar", "c", "x_lb", "x_ub", "A_x", "b_x", "mean", "factor"):
        val = getattr(problem, key)
        if key in _MATRIX_KEYS:
            out.append(f"matrix {key} {val.shape[0]} {val.shape[1]}")
            out.extend(" ".join(_fmt(v) for v in row) for row in val)
        else:
            out.append(f"vector {key} {val.size}")
            if val.size:
                out.append(" ".join(_fmt(v) for v in val))
    return "\n".join(out) + "\n"


def loads_problem(text: str) -> TwoStageProblem:
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    data: dict = {}
    name = "problem"
    i = 0
    while i < len(tokens):
        kind = tokens[i]
        if kind == "name":
            name = tokens[i + 1]
            i += 2
        elif kind == "matrix":
            key, rows, cols = tokens[i + 1], int(tokens[i + 2]), int(tokens[i + 3])
            vals = [float(t) for t in tokens[i + 4:i + 4 + rows * cols]]
            if len(vals) != rows * cols:
                raise ValueError(f"matrix {key}: expected {rows * cols} values")
            data[key] = np.array(vals).reshape(rows, cols)
            i += 4 + rows * cols
        elif kind == "vector":
            key, n = tokens[i + 1], int(tokens[i + 2])
            vals = [float(t) for t in tokens[i + 3:i + 3 + n]]
            if len(vals) != n:
                raise ValueError(f"vector {key}: expected {n} values")
            data[key] = np.array(vals)
            i += 3 + n
        else:
            raise ValueError(f"unexpected token {kind!r}")
    unknown = set(data) - set(_MATRIX_KEYS) - set(_VECTOR_KEYS)
    if unknown:
        raise ValueError(f"unknown blocks: {sorted(unknown)}")
    missing = {"W", "q", "T", "c", "mean"} - set(data)
    if missing:
        raise ValueError(f"missing blocks: {sorted(missing)}")
    data.setdefault("h_bar", np.zeros(0))
    return TwoStageProblem(name=name, **data)


def load_problem(path) -> TwoStageProblem:
    path = Path(path)
    try:
        return loads_problem(path.read_text())
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def save_problem(problem: TwoStageProblem, path, comment: str = "") -> Path:
    path = Path(path)
    path.write_text(dumps_problem(problem, comment))
    return path


def load_fixture(name: str) -> TwoStageProblem:
    if name not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}; expected one of {FIXTURES}")
    text = resources.files("qmcsp.recourse").joinpath(f"data/{name}.txt").read_text()
    return loads_problem(text)
