import random
from fractions import Fraction

import pytest
from scipy.optimize import linprog

from linkhomotopy.exact import (affinely_independent, barycentric_coords, fmt, linprog_max, max_dist, rat,
                                solve)


def test_rat_normalizes_strings():
    assert rat("2/4") == Fraction(1, 2)
    assert rat(" -6/8 ") == Fraction(-3, 4)
    assert rat(3) == Fraction(3)


@pytest.mark.parametrize("bad", [0.5, True, None, [1]])
def test_rat_refuses_inexact(bad):
    with pytest.raises(TypeError):
        rat(bad)


def test_fmt_round_trips():
    for q in (Fraction(0), Fraction(5), Fraction(-7, 3)):
        assert rat(fmt(q)) == q


def test_solve_and_barycentric():
    x = solve([[2, 1], [1, 3]], [3, 5])
    assert list(x) == [Fraction(4, 5), Fraction(7, 5)]
    lam = barycentric_coords((Fraction(1, 4), Fraction(1, 4)), [(0, 0), (1, 0), (0, 1)])
    assert list(lam) == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
    assert barycentric_coords((1, 1, 1), [(0, 0, 0), (1, 0, 0)]) is None


def test_affine_independence():
    assert affinely_independent([(0, 0), (1, 0), (0, 1)])
    assert not affinely_independent([(0, 0), (1, 1), (2, 2)])


def test_max_dist():
    assert max_dist((0, 0), (Fraction(1, 3), -1)) == 1


def test_lp_statuses():
    assert linprog_max([1], A_ub=[[1]], b_ub=[2]).value == 2
    assert linprog_max([1]).status == "unbounded"
    assert linprog_max([1], A_eq=[[1]], b_eq=[-1]).status == "infeasible"


def test_lp_matches_scipy():
    # oracle: floating-point HiGHS on random bounded feasible problems
    rng = random.Random(3)
    for _ in range(60):
        n, me, mu = rng.randint(1, 5), rng.randint(0, 2), rng.randint(1, 4)
        c = [rng.randint(-5, 5) for _ in range(n)]
        A_eq = [[rng.randint(0, 4) for _ in range(n)] for _ in range(me)]
        x0 = [Fraction(rng.randint(0, 4), rng.randint(1, 3)) for _ in range(n)]
        b_eq = [sum(a * x for a, x in zip(r, x0)) for r in A_eq]
        A_ub = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(mu)] + [[1] * n]
        b_ub = [sum(a * x for a, x in zip(r, x0)) + rng.randint(0, 3) for r in A_ub]
        ours = linprog_max(c, A_eq, b_eq, A_ub, b_ub)
        ref = linprog([-v for v in c], A_ub=A_ub, b_ub=[float(b) for b in b_ub],
                      A_eq=A_eq or None, b_eq=[float(b) for b in b_eq] or None, bounds=(0, None))
        assert ours.status == "optimal" and ref.status == 0
        assert abs(float(ours.value) + ref.fun) < 1e-7
        # the exact optimum is attained by the exact point
        assert sum(a * x for a, x in zip(c, ours.x)) == ours.value
        assert all(x >= 0 for x in ours.x)
