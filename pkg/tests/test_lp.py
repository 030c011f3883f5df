import io

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from qmcsp.lp import LinearProgram, LpStatus, dump_lp, solve_lp


def random_lp(seed, m=None, n=None):
    """Feasible, bounded standard-form LP with a known primal/dual pair."""
    rng = np.random.default_rng(seed)
    m = m or int(rng.integers(1, 6))
    n = n or m + int(rng.integers(1, 6))
    A = rng.normal(size=(m, n))
    x0 = rng.random(n) * (rng.random(n) < 0.6)
    y0 = rng.normal(size=m)
    c = A.T @ y0 + rng.random(n)
    return LinearProgram(c, A, A @ x0)


def test_beale_cycling_example_terminates():
    # classic cycling instance; Bland's rule must reach the optimum -5/4
    c = np.array([-0.75, 20.0, -0.5, 6.0])
    A_ub = np.array([[0.25, -8.0, -1.0, 9.0], [0.5, -12.0, -0.5, 3.0], [0.0, 0.0, 1.0, 0.0]])
    lp = LinearProgram.from_inequalities(c, A_ub, np.array([0.0, 0.0, 1.0]))
    sol = solve_lp(lp)
    assert sol.status is LpStatus.OPTIMAL
    assert sol.value == pytest.approx(-1.25, abs=1e-12)
    assert np.allclose(sol.x[:4], [1.0, 0.0, 1.0, 0.0], atol=1e-12)


def test_textbook_lp():
    # max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
    lp = LinearProgram.from_inequalities([-3.0, -5.0], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    sol = solve_lp(lp)
    assert sol.value == pytest.approx(-36.0)
    assert np.allclose(sol.x[:2], [2.0, 6.0])


@given(st.integers(0, 2**32 - 1))
def test_matches_scipy_and_strong_duality(seed):
    lp = random_lp(seed)
    sol = solve_lp(lp)
    ref = linprog(lp.c, A_eq=lp.A_eq, b_eq=lp.b_eq, bounds=(0, None), method="highs")
    assert sol.status is LpStatus.OPTIMAL
    assert sol.value == pytest.approx(ref.fun, rel=1e-8, abs=1e-8)
    assert abs(lp.b_eq @ sol.dual - sol.value) <= 1e-7 * (1 + abs(sol.value))
    assert np.all(lp.A_eq.T @ sol.dual <= lp.c + 1e-8)
    assert np.allclose(lp.A_eq @ sol.x, lp.b_eq, atol=1e-8)
    assert np.all(sol.x >= -1e-10)


def test_infeasible_and_unbounded():
    inf = LinearProgram([1.0, 1.0], [[1.0, 1.0]], [-1.0])
    assert solve_lp(inf).status is LpStatus.INFEASIBLE
    unb = LinearProgram([-1.0, 0.0], [[1.0, -1.0]], [0.0])
    assert solve_lp(unb).status is LpStatus.UNBOUNDED


def test_bounds_and_free_variables():
    # min x1 - x2, x1 free, -2 <= x2 <= 3, x1 + x2 = 1 with x1 >= -5
    lp = LinearProgram.from_inequalities([1.0, -1.0], None, None, [[1.0, 1.0]], [1.0],
                                         lb=[-5.0, -2.0], ub=[np.inf, 3.0])
    sol = solve_lp(lp)
    assert sol.value == pytest.approx(-5.0)
    assert np.allclose(sol.x[:2], [-2.0, 3.0])
    free = LinearProgram([1.0], [[1.0]], [-4.0], lb=[-np.inf])
    assert solve_lp(free).x[0] == pytest.approx(-4.0)


def test_redundant_rows_handled():
    A = np.array([[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]])
    sol = solve_lp(LinearProgram([1.0, 2.0, 3.0], A, [1.0, 2.0]))
    assert sol.optimal and sol.value == pytest.approx(1.0)


def test_degenerate_rhs_zero():
    sol = solve_lp(LinearProgram([1.0, 1.0], [[1.0, -1.0]], [0.0]))
    assert sol.optimal and sol.value == 0.0


def test_dump_lp_lists_rows():
    buf = io.StringIO()
    text = dump_lp(LinearProgram([1.0, 2.0], [[1.0, 1.0]], [3.0]), buf)
    assert "3" in text and buf.getvalue() == text


def test_validation():
    with pytest.raises(ValueError):
        LinearProgram([1.0], [[1.0, 2.0]], [1.0])
