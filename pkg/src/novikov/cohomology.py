"""Second cohomology of structure-constant algebras and central extensions.

A 2-cocycle on an algebra A is a bilinear form theta satisfying the same two
identities that define the variety, with the outermost product replaced by
theta.  Cocycles are stored as n x n coefficient matrices against the basis
of elementary bilinear forms D_ij (D_ij(e_l, e_m) = delta_il delta_jm), so
the (i, j) entry of the matrix is theta(e_i, e_j).

Coboundaries are the forms (x, y) -> f(xy) for linear functionals f; their
matrices are exactly the spans of the structure-constant slices
C^(k)_ij = c_ij^k.  The quotient basis (representatives of Z^2 modulo B^2)
is chosen by deterministic completion, not by any hand-picked labels.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

import sympy as sp

from . import linalg
from .algebras import (Algebra, AlgebraError, Vector, annihilator_basis,
                       basis_vector, change_basis_table, multiply_table,
                       substitute)
from .scalars import T, grammar_str, parse_scalar

__all__ = [
    "Cocycle",
    "CocycleSpace",
    "Extension",
    "SplitExtension",
    "CocycleError",
    "NotAutomorphismError",
    "SingularMatrixError",
    "cocycle",
    "cocycle_from_expr",
    "cocycle_to_json",
    "cocycle_from_json",
    "cocycle_residuals",
    "is_cocycle",
    "coboundary_matrices",
    "cocycle_space",
    "cocycle_annihilator",
    "has_trivial_intersection",
    "central_extension",
    "split_central_extension",
    "is_automorphism",
    "act_on_cocycle",
    "ActionCase",
    "ActionCaseReport",
    "verify_action_formulas",
]


class CocycleError(AlgebraError):
    pass


class NotAutomorphismError(AlgebraError):
    pass


class SingularMatrixError(AlgebraError):
    pass


@dataclass(frozen=True)
class Cocycle:
    """Coefficient matrix of a bilinear form against the D_ij basis.

    The raw constructor performs no validation; inputs read from files are
    checked through :func:`is_cocycle`.
    """

    algebra: Algebra
    matrix: tuple[tuple[sp.Expr, ...], ...]

    def entry(self, i: int, j: int) -> sp.Expr:
        return self.matrix[i][j]

    def as_vector(self) -> Vector:
        n = self.algebra.dim
        return tuple(self.matrix[i][j] for i in range(n) for j in range(n))

    def value(self, x: Sequence, y: Sequence) -> sp.Expr:
        return sp.cancel(sum(self.matrix[i][j] * xi * yj
                             for i, xi in enumerate(x)
                             for j, yj in enumerate(y)
                             if xi != 0 and yj != 0))

    def __str__(self) -> str:
        n = self.algebra.dim
        parts = []
        for i in range(n):
            for j in range(n):
                c = self.matrix[i][j]
                if c == 0:
                    continue
                term = f"D{i + 1}{j + 1}"
                parts.append(term if c == 1 else f"({grammar_str(c)})*{term}")
        return " + ".join(parts) if parts else "0"


def cocycle(a: Algebra, entries: Sequence[tuple]) -> Cocycle:
    """Cocycle matrix from sparse 1-based entries (i, j, coefficient)."""
    n = a.dim
    grid = [[sp.Integer(0)] * n for _ in range(n)]
    for i, j, c in entries:
        if not (1 <= i <= n and 1 <= j <= n):
            raise CocycleError(f"entry index ({i},{j}) out of range")
        grid[i - 1][j - 1] += parse_scalar(c)
    return Cocycle(a, tuple(tuple(row) for row in grid))


def _matrix_cocycle(a: Algebra, rows: Sequence[Sequence]) -> Cocycle:
    return Cocycle(a, tuple(tuple(sp.sympify(x) for x in row) for row in rows))


def _vector_cocycle(a: Algebra, vec: Sequence) -> Cocycle:
    n = a.dim
    return Cocycle(a, tuple(tuple(sp.sympify(vec[i * n + j]) for j in range(n))
                            for i in range(n)))


def cocycle_from_expr(a: Algebra, text: str) -> Cocycle:
    """Parse 'D12 + alpha*D21'-style text (indices are single digits)."""
    expr = sp.expand(parse_scalar(text))
    n = a.dim
    grid = [[sp.Integer(0)] * n for _ in range(n)]
    rest = expr
    for i in range(n):
        for j in range(n):
            s = sp.Symbol(f"D{i + 1}{j + 1}")
            c = expr.coeff(s, 1)
            grid[i][j] = sp.cancel(c)
            rest = rest - c * s
    if sp.cancel(sp.expand(rest)) != 0:
        raise CocycleError(f"not a combination of D_ij forms: {text!r}")
    return Cocycle(a, tuple(tuple(row) for row in grid))


def cocycle_to_json(c: Cocycle) -> dict:
    n = c.algebra.dim
    entries = [{"i": i + 1, "j": j + 1, "c": grammar_str(c.matrix[i][j])}
               for i in range(n) for j in range(n) if c.matrix[i][j] != 0]
    return {"algebra": c.algebra.name, "entries": entries}


def cocycle_from_json(a: Algebra, obj: Mapping) -> Cocycle:
    return cocycle(a, [(e["i"], e["j"], e["c"]) for e in obj.get("entries", [])])


# ---------------------------------------------------------------------------
# Cocycle conditions and spaces
# ---------------------------------------------------------------------------

def cocycle_residuals(a: Algebra, theta: Cocycle) -> list[sp.Expr]:
    """The 2*n^3 linear conditions evaluated on theta (all zero iff cocycle)."""
    n = a.dim
    c = a.table
    th = theta.matrix
    res = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                r1 = sum(c[i][j][l] * th[l][k] - c[i][k][l] * th[l][j]
                         for l in range(n))
                r2 = sum(c[i][j][l] * th[l][k] - c[j][k][l] * th[i][l]
                         - c[j][i][l] * th[l][k] + c[i][k][l] * th[j][l]
                         for l in range(n))
                res.append(sp.cancel(r1))
                res.append(sp.cancel(r2))
    return res


def is_cocycle(a: Algebra, theta: Cocycle) -> bool:
    if theta.algebra.dim != a.dim:
        raise CocycleError("dimension mismatch")
    return all(r == 0 for r in cocycle_residuals(a, theta))


def _condition_rows(a: Algebra) -> list[list[sp.Expr]]:
    """Stacked cocycle conditions as rows over vec(theta), index (i,j) -> i*n+j."""
    n = a.dim
    c = a.table
    rows = []

    def blank():
        return [sp.Integer(0)] * (n * n)

    for i in range(n):
        for j in range(n):
            for k in range(n):
                row = blank()
                for l in range(n):
                    row[l * n + k] += c[i][j][l]
                    row[l * n + j] -= c[i][k][l]
                if any(x != 0 for x in row):
                    rows.append([sp.cancel(x) for x in row])
                row = blank()
                for l in range(n):
                    row[l * n + k] += c[i][j][l] - c[j][i][l]
                    row[i * n + l] -= c[j][k][l]
                    row[j * n + l] += c[i][k][l]
                if any(x != 0 for x in row):
                    rows.append([sp.cancel(x) for x in row])
    return rows


def coboundary_matrices(a: Algebra) -> list[Cocycle]:
    """The structure-constant slices C^(k); their span is B^2."""
    n = a.dim
    out = []
    for k in range(n):
        rows = tuple(tuple(a.table[i][j][k] for j in range(n)) for i in range(n))
        out.append(Cocycle(a, rows))
    return out


@dataclass(frozen=True)
class CocycleSpace:
    algebra: Algebra
    z2_basis: tuple[Cocycle, ...]
    b2_basis: tuple[Cocycle, ...]
    h2_reps: tuple[Cocycle, ...]

    @property
    def dims(self) -> tuple[int, int, int]:
        return (len(self.z2_basis), len(self.b2_basis), len(self.h2_reps))


def cocycle_space(a: Algebra) -> CocycleSpace:
    """Z^2, B^2 and deterministic H^2 representatives, exact and generic."""
    n = a.dim
    rows = _condition_rows(a)
    z2_vecs = linalg.nullspace(rows, n * n)
    b2_vecs: list[Vector] = []
    for slice_c in coboundary_matrices(a):
        v = slice_c.as_vector()
        if any(x != 0 for x in v) and not linalg.in_span(b2_vecs, v):
            b2_vecs.append(v)
    reps: list[Vector] = []
    span = list(b2_vecs)
    for v in z2_vecs:
        if not linalg.in_span(span, v):
            span.append(v)
            reps.append(v)
    return CocycleSpace(
        a,
        tuple(_vector_cocycle(a, v) for v in z2_vecs),
        tuple(_vector_cocycle(a, v) for v in b2_vecs),
        tuple(_vector_cocycle(a, v) for v in reps),
    )


def cocycle_annihilator(a: Algebra, thetas: Sequence[Cocycle]) -> list[Vector]:
    """Basis of {x : theta(x, A) = theta(A, x) = 0 for every theta}."""
    n = a.dim
    rows = []
    for theta in thetas:
        if theta.algebra.dim != n:
            raise CocycleError("dimension mismatch")
        for j in range(n):
            rows.append([theta.matrix[i][j] for i in range(n)])
            rows.append([theta.matrix[j][i] for i in range(n)])
    return linalg.nullspace(rows, n)


def has_trivial_intersection(a: Algebra, thetas: Sequence[Cocycle]) -> bool:
    ann_theta = cocycle_annihilator(a, thetas)
    ann_a = annihilator_basis(a)
    return not linalg.subspace_intersection(ann_theta, ann_a)


# ---------------------------------------------------------------------------
# Central extensions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Extension:
    base: Algebra
    cocycles: tuple[Cocycle, ...]
    result: Algebra


def central_extension(a: Algebra, thetas: Sequence[Cocycle],
                      name: str | None = None) -> Extension:
    """The (n+s)-dimensional algebra with products xy + sum_r theta_r(x,y) v_r.

    The new basis vectors v_r land in the annihilator of the result.
    """
    for theta in thetas:
        if not is_cocycle(a, theta):
            raise CocycleError("not a cocycle")
    n, s = a.dim, len(thetas)
    m = n + s
    grid = [[[sp.Integer(0)] * m for _ in range(m)] for _ in range(m)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                grid[i][j][k] = a.table[i][j][k]
            for r, theta in enumerate(thetas):
                grid[i][j][n + r] = theta.matrix[i][j]
    table = tuple(tuple(tuple(row) for row in plane) for plane in grid)
    syms = set(a.params)
    for theta in thetas:
        for row in theta.matrix:
            for x in row:
                syms |= (sp.sympify(x).free_symbols - {T})
    params = tuple(sorted(syms, key=str))
    label = name or f"{a.name}_ext{s}"
    result = Algebra(label, m, params, table, a.constraints)
    return Extension(a, tuple(thetas), result)


@dataclass(frozen=True)
class SplitExtension:
    quotient: Algebra
    cocycles: tuple[Cocycle, ...]
    basis_rows: tuple[Vector, ...]


def split_central_extension(a: Algebra, w_vectors: Sequence[Sequence]) -> SplitExtension:
    """Peel a central subspace W ⊆ Ann(A) off of A.

    Returns the quotient A/W presented on the complementary coordinates, the
    recovered cocycles, and the full change-of-basis rows (complement vectors
    first, then the W vectors).  Rebuilding with
    :func:`central_extension` reproduces A's constants in that basis.
    """
    n = a.dim
    w_rows = [[sp.cancel(sp.sympify(x)) for x in w] for w in w_vectors]
    s = len(w_rows)
    if s < 1:
        raise AlgebraError("W must have dimension >= 1")
    ann = annihilator_basis(a)
    for w in w_rows:
        if not linalg.in_span(ann, w):
            raise AlgebraError("W not contained in Ann")
    red, pivots = linalg.rref(w_rows)
    if len(pivots) != s:
        raise AlgebraError("W vectors are dependent")
    complement = [j for j in range(n) if j not in pivots]
    rows = [basis_vector(n, j) for j in complement] + [tuple(w) for w in w_rows]
    new_table = change_basis_table(a.table, rows)
    m = n - s
    for i in range(n):
        for j in range(n):
            if (i >= m or j >= m) and any(x != 0 for x in new_table[i][j]):
                raise AlgebraError("W not central in A")
    quot_table = tuple(tuple(tuple(new_table[i][j][k] for k in range(m))
                             for j in range(m)) for i in range(m))
    quotient = Algebra(f"{a.name}/W", m, a.params, quot_table, a.constraints)
    thetas = tuple(
        Cocycle(quotient, tuple(tuple(new_table[i][j][m + r] for j in range(m))
                                for i in range(m)))
        for r in range(s))
    return SplitExtension(quotient, thetas, tuple(tuple(r) for r in rows))


# ---------------------------------------------------------------------------
# Automorphism action on cocycles
# ---------------------------------------------------------------------------

def _subs_map(at: Mapping | None) -> dict:
    subs = {}
    for key, value in (at or {}).items():
        sym = key if isinstance(key, sp.Symbol) else sp.Symbol(str(key))
        subs[sym] = parse_scalar(value)
    return subs


def is_automorphism(a: Algebra, phi: Sequence[Sequence], at: Mapping | None = None) -> bool:
    """Check phi(e_i) phi(e_j) = phi(e_i e_j); columns of phi are the images.

    Symbols in phi (and remaining algebra parameters) are treated
    generically; ``at`` pins any of them to exact values.  Raises
    :class:`SingularMatrixError` if phi is singular at the assignment.
    """
    subs = _subs_map(at)
    n = a.dim
    p = [[sp.cancel(parse_scalar(x).subs(subs)) for x in row] for row in phi]
    table = tuple(tuple(tuple(sp.cancel(x.subs(subs)) for x in row) for row in plane)
                  for plane in a.table)
    if sp.cancel(linalg.det(p)) == 0:
        raise SingularMatrixError("singular matrix")
    cols = [tuple(p[r][i] for r in range(n)) for i in range(n)]
    for i in range(n):
        for j in range(n):
            lhs = multiply_table(table, cols[i], cols[j])
            prod = table[i][j]
            rhs = tuple(sp.cancel(sum(p[r][k] * prod[k] for k in range(n)))
                        for r in range(n))
            if any(sp.cancel(u - v) != 0 for u, v in zip(lhs, rhs)):
                return False
    return True


def act_on_cocycle(a: Algebra, phi: Sequence[Sequence], theta: Cocycle,
                   check: bool = True) -> Cocycle:
    """(phi . theta)(x, y) = theta(phi x, phi y), i.e. the matrix phi^T theta phi."""
    if check and not is_automorphism(a, phi):
        raise NotAutomorphismError("non-automorphism")
    n = a.dim
    p = [[parse_scalar(x) for x in row] for row in phi]
    out = [[sp.Integer(0)] * n for _ in range(n)]
    for l in range(n):
        for m in range(n):
            out[l][m] = sp.cancel(sum(
                p[pp][l] * theta.matrix[pp][qq] * p[qq][m]
                for pp in range(n) for qq in range(n)
                if theta.matrix[pp][qq] != 0))
    return Cocycle(a, tuple(tuple(row) for row in out))


# ---------------------------------------------------------------------------
# Sampled verification of published coefficient-action formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ActionCase:
    """One base algebra with its automorphism template and action formulas.

    ``nablas`` are the tracked quotient-class representatives; ``alpha_star``
    gives the claimed transformed coefficients in terms of the coefficient
    variables and template entries.  ``matrix_reading`` optionally records
    raw conjugated-matrix entries published alongside, which may differ from
    the class coefficients by a coboundary.
    """

    case_id: str
    base: Algebra
    template: tuple[tuple[sp.Expr, ...], ...]
    template_vars: tuple[sp.Symbol, ...]
    invertibility: tuple[sp.Expr, ...]
    nablas: tuple[Cocycle, ...]
    coeff_vars: tuple[sp.Symbol, ...]
    alpha_star: tuple[sp.Expr, ...]
    matrix_reading: tuple[tuple[int, int, sp.Expr], ...] = ()
    note: str = ""


@dataclass
class ActionCaseReport:
    case_id: str
    samples: int
    class_formulas_ok: bool
    matrix_entries_ok: bool | None
    counterexample: dict | None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.class_formulas_ok and (self.matrix_entries_ok is not False)

    def to_dict(self) -> dict:
        return {
            "case": self.case_id,
            "samples": self.samples,
            "class_formulas_ok": self.class_formulas_ok,
            "matrix_entries_ok": self.matrix_entries_ok,
            "counterexample": self.counterexample,
            "note": self.note,
            "passed": self.passed,
        }


def _random_rational(rng: random.Random) -> sp.Rational:
    num = rng.choice([n for n in range(-9, 10) if n != 0])
    den = rng.randint(1, 7)
    return sp.Rational(num, den)


def verify_action_formulas(case: ActionCase, samples: int = 20,
                           seed: int = 20260810) -> ActionCaseReport:
    """Check the published alpha -> alpha* formulas against direct conjugation.

    For each sampled assignment of the template entries (kept invertible) and
    the tracked coefficients, the conjugated cocycle is decomposed exactly in
    the basis (B^2 | nablas); the nabla coordinates must match the published
    class formulas, and any recorded raw matrix entries must match the
    conjugated matrix entry-for-entry.
    """
    rng = random.Random(seed)
    a = case.base
    n = a.dim
    free_syms = list(case.template_vars) + list(case.coeff_vars) + list(a.params)
    counterexample = None
    matrix_checked = bool(case.matrix_reading)
    matrix_ok = True if matrix_checked else None
    class_ok = True

    for _ in range(samples):
        for _attempt in range(200):
            assign = {s: _random_rational(rng) for s in free_syms}
            ok = all(sp.cancel(g.subs(assign)) != 0 for g in case.invertibility)
            ok = ok and all(sp.cancel(g.subs(assign)) != 0 for g in a.constraints)
            if not ok:
                continue
            phi = [[sp.cancel(x.subs(assign)) for x in row] for row in case.template]
            if sp.cancel(linalg.det(phi)) != 0:
                break
        else:
            raise AlgebraError(f"{case.case_id}: could not sample an invertible template")

        inst = substitute(a, {p: assign[p] for p in a.params}) if a.params else a
        nabla_mats = [
            Cocycle(inst, tuple(tuple(sp.cancel(x.subs(assign)) for x in row)
                                for row in nab.matrix))
            for nab in case.nablas]
        theta = Cocycle(inst, tuple(
            tuple(sp.cancel(sum(assign[c] * nab.matrix[i][j]
                                for c, nab in zip(case.coeff_vars, nabla_mats)))
                  for j in range(n)) for i in range(n)))
        conj = act_on_cocycle(inst, phi, theta, check=False)

        b2 = [c.as_vector() for c in coboundary_matrices(inst)]
        b2_indep = []
        for v in b2:
            if any(x != 0 for x in v) and not linalg.in_span(b2_indep, v):
                b2_indep.append(v)
        cols = b2_indep + [nm.as_vector() for nm in nabla_mats]
        system = [[cols[c][r] for c in range(len(cols))] for r in range(n * n)]
        sol = linalg.solve_right(system, list(conj.as_vector()))
        if sol is None or linalg.rank(system) != len(cols):
            raise AlgebraError(f"{case.case_id}: conjugated form left span(B2 | nablas)")
        got = sol[len(b2_indep):]
        expected = [sp.cancel(f.subs(assign)) for f in case.alpha_star]
        for idx, (g, e) in enumerate(zip(got, expected)):
            if sp.cancel(g - e) != 0:
                class_ok = False
                if counterexample is None:
                    counterexample = {
                        "assignment": {str(k): grammar_str(v) for k, v in assign.items()},
                        "formula_index": idx,
                        "expected": grammar_str(e),
                        "actual": grammar_str(sp.cancel(g)),
                        "reading": "class",
                    }
        for (i, j, entry) in case.matrix_reading:
            want = sp.cancel(entry.subs(assign))
            have = conj.matrix[i - 1][j - 1]
            if sp.cancel(want - have) != 0:
                matrix_ok = False
                if counterexample is None:
                    counterexample = {
                        "assignment": {str(k): grammar_str(v) for k, v in assign.items()},
                        "entry": [i, j],
                        "expected": grammar_str(want),
                        "actual": grammar_str(sp.cancel(have)),
                        "reading": "matrix",
                    }
    return ActionCaseReport(case.case_id, samples, class_ok, matrix_ok,
                            counterexample, case.note)
