"""Deterministic exact linear algebra, cross-checked against the independent
Fraction-based oracle."""

import random
from fractions import Fraction

import sympy as sp

from novikov import linalg
from oracle import nullspace_frac, rank_frac

lam = sp.Symbol("lam")


def _random_matrix(rng, rows, cols):
    return [[Fraction(rng.randint(-4, 4), rng.randint(1, 3))
             for _ in range(cols)] for _ in range(rows)]


def test_rank_and_nullspace_match_oracle():
    rng = random.Random(5)
    for _ in range(40):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        m = _random_matrix(rng, rows, cols)
        sym = [[sp.Rational(x) for x in row] for row in m]
        assert linalg.rank(sym) == rank_frac(m)
        ns = linalg.nullspace(sym, cols)
        assert len(ns) == len(nullspace_frac(m, cols))
        for v in ns:
            for row in sym:
                assert sp.cancel(sum(a * b for a, b in zip(row, v))) == 0


def test_rref_is_deterministic():
    m = [[sp.Rational(1), sp.Rational(2)], [sp.Rational(2), sp.Rational(4)],
         [sp.Rational(0), sp.Rational(1)]]
    assert linalg.rref(m) == linalg.rref(m)
    red, pivots = linalg.rref(m)
    assert pivots == [0, 1]


def test_parametric_rank_is_generic():
    m = [[lam, sp.Integer(1)], [lam ** 2, lam]]
    assert linalg.rank(m) == 1
    m2 = [[lam, sp.Integer(1)], [sp.Integer(1), lam]]
    assert linalg.rank(m2) == 2  # lam^2 - 1 is not the zero function


def test_solve_and_invert():
    a = [[sp.Integer(2), sp.Integer(1)], [sp.Integer(1), sp.Integer(1)]]
    x = linalg.solve_right(a, [sp.Integer(3), sp.Integer(2)])
    assert x == (sp.Integer(1), sp.Integer(1))
    inv = linalg.invert(a)
    prod = [[sp.cancel(sum(a[i][k] * inv[k][j] for k in range(2)))
             for j in range(2)] for i in range(2)]
    assert prod == [[1, 0], [0, 1]]
    assert linalg.invert([[sp.Integer(1), sp.Integer(2)],
                          [sp.Integer(2), sp.Integer(4)]]) is None
    assert linalg.solve_right([[sp.Integer(0)]], [sp.Integer(1)]) is None


def test_det_parametric():
    m = [[lam, sp.Integer(1)], [sp.Integer(1), lam]]
    assert sp.cancel(linalg.det(m) - (lam ** 2 - 1)) == 0


def test_subspace_operations():
    e1, e2, e3 = (sp.Integer(1), sp.Integer(0), sp.Integer(0)), \
                 (sp.Integer(0), sp.Integer(1), sp.Integer(0)), \
                 (sp.Integer(0), sp.Integer(0), sp.Integer(1))
    u = [e1, e2]
    v = [(sp.Integer(1), sp.Integer(1), sp.Integer(0)), e2]
    assert linalg.subspace_equal(u, v)
    assert not linalg.subspace_equal(u, [e1, e3])
    assert linalg.in_span(u, (sp.Integer(2), sp.Integer(-3), sp.Integer(0)))
    inter = linalg.subspace_intersection(u, [e2, e3])
    assert len(inter) == 1 and linalg.in_span([e2], inter[0])
    assert linalg.subspace_intersection([e1], [e2]) == []


def test_intersection_dimension_matches_rank_formula():
    rng = random.Random(11)
    for _ in range(25):
        n = 4
        u = [tuple(sp.Rational(rng.randint(-3, 3)) for _ in range(n))
             for _ in range(rng.randint(1, 3))]
        v = [tuple(sp.Rational(rng.randint(-3, 3)) for _ in range(n))
             for _ in range(rng.randint(1, 3))]
        du, dv = linalg.span_rank(u), linalg.span_rank(v)
        d_sum = linalg.span_rank(list(u) + list(v))
        inter = linalg.subspace_intersection(u, v)
        assert len(inter) == du + dv - d_sum
