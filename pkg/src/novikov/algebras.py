"""Structure-constant algebras and their isomorphism invariants.

An :class:`Algebra` is a finite-dimensional algebra over Q(i) given by
structure constants c_ij^k (exact scalars, possibly involving declared
parameters): e_i * e_j = sum_k c_ij^k e_k.  All decisions about parametrized
algebras are made generically, i.e. over the rational-function field in the
declared parameters; special parameter values are reached only through
explicit assignments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import sympy as sp

from . import linalg
from .scalars import T, grammar_str, parse_scalar

Vector = tuple[sp.Expr, ...]
Table = tuple[tuple[Vector, ...], ...]

__all__ = [
    "Algebra",
    "AlgebraError",
    "ConstraintViolation",
    "IdentityFlags",
    "InvariantProfile",
    "algebra",
    "algebra_from_json",
    "algebra_to_json",
    "basis_vector",
    "zero_vector",
    "vector_str",
    "parse_vector",
    "multiply",
    "multiply_table",
    "change_basis_table",
    "check_identities",
    "annihilator_basis",
    "derived_power_dims",
    "nilpotency_index",
    "derivation_dim",
    "substitute",
    "instantiate_table",
    "invariant_profile",
]


class AlgebraError(ValueError):
    pass


class ConstraintViolation(AlgebraError):
    """A parameter assignment hit a declared-nonzero constraint."""


@dataclass(frozen=True)
class Algebra:
    """Immutable structure-constant algebra."""

    name: str
    dim: int
    params: tuple[sp.Symbol, ...]
    table: Table
    constraints: tuple[sp.Expr, ...] = ()

    def product(self, i: int, j: int) -> Vector:
        """e_i * e_j in coordinates (0-based indices)."""
        return self.table[i][j]

    def __repr__(self) -> str:  # params shown for instantiated families
        ps = f"({', '.join(map(str, self.params))})" if self.params else ""
        return f"Algebra({self.name}{ps}, dim={self.dim})"


@dataclass(frozen=True)
class IdentityFlags:
    right_commutative: bool
    left_symmetric: bool
    novikov: bool
    two_step: bool

    def to_dict(self) -> dict:
        return {
            "right_commutative": self.right_commutative,
            "left_symmetric": self.left_symmetric,
            "novikov": self.novikov,
            "two_step": self.two_step,
        }


@dataclass(frozen=True)
class InvariantProfile:
    """Degeneration/isomorphism invariants of one algebra instance."""

    dim: int
    dim_ann: int
    dims_derived: tuple[int, ...]
    dim_der: int
    is_right_commutative: bool
    is_left_symmetric: bool
    is_novikov: bool
    is_two_step: bool
    nilpotency_index: int | None

    def as_tuple(self) -> tuple:
        return (self.dim, self.dim_ann, self.dims_derived, self.dim_der,
                self.is_right_commutative, self.is_left_symmetric,
                self.is_two_step, self.nilpotency_index)

    def to_dict(self) -> dict:
        d = {
            "dim": self.dim,
            "dim_ann": self.dim_ann,
            "dims_derived": list(self.dims_derived),
            "dim_der": self.dim_der,
            "is_right_commutative": self.is_right_commutative,
            "is_left_symmetric": self.is_left_symmetric,
            "is_novikov": self.is_novikov,
            "is_two_step": self.is_two_step,
            "nilpotency_index": self.nilpotency_index
            if self.nilpotency_index is not None else "not nilpotent",
        }
        return d


def zero_vector(n: int) -> Vector:
    return tuple(sp.Integer(0) for _ in range(n))


def basis_vector(n: int, i: int) -> Vector:
    return tuple(sp.Integer(1) if j == i else sp.Integer(0) for j in range(n))


def vector_str(v: Sequence[sp.Expr]) -> str:
    parts = []
    for idx, c in enumerate(v):
        c = sp.cancel(sp.sympify(c))
        if c == 0:
            continue
        if c == 1:
            parts.append(f"e{idx + 1}")
        else:
            parts.append(f"({grammar_str(c)})*e{idx + 1}")
    return " + ".join(parts) if parts else "0"


def parse_vector(text: str, dim: int) -> Vector:
    """Parse 'e1 + 2*e3'-style text into coordinates."""
    expr = parse_scalar(text)
    coords = []
    syms = [sp.Symbol(f"e{k + 1}") for k in range(dim)]
    poly = sp.expand(expr)
    for k, s in enumerate(syms):
        coords.append(sp.cancel(poly.coeff(s, 1)))
    leftover = sp.cancel(poly - sum(c * s for c, s in zip(coords, syms)))
    if leftover != 0:
        raise AlgebraError(f"not a vector in e1..e{dim}: {text!r}")
    return tuple(coords)


def algebra(name: str, dim: int, products: Iterable[tuple], params: Sequence = (),
            constraints: Sequence = ()) -> Algebra:
    """Build an algebra from 1-based sparse products (i, j, k, coefficient)."""
    param_syms = tuple(p if isinstance(p, sp.Symbol) else sp.Symbol(str(p))
                       for p in params)
    grid = [[[sp.Integer(0) for _ in range(dim)] for _ in range(dim)]
            for _ in range(dim)]
    for i, j, k, c in products:
        if not (1 <= i <= dim and 1 <= j <= dim and 1 <= k <= dim):
            raise AlgebraError(f"{name}: product index ({i},{j},{k}) out of range")
        grid[i - 1][j - 1][k - 1] += parse_scalar(c)
    table = tuple(tuple(tuple(sp.sympify(x) for x in row) for row in plane)
                  for plane in grid)
    allowed = set(param_syms)
    for plane in table:
        for row in plane:
            for x in row:
                extra = x.free_symbols - allowed
                if extra:
                    raise AlgebraError(
                        f"{name}: undeclared symbols {sorted(map(str, extra))}")
                if T in x.free_symbols:
                    raise AlgebraError(f"{name}: t may not appear in constants")
    cons = tuple(parse_scalar(c) for c in constraints)
    return Algebra(name, dim, param_syms, table, cons)


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------

def algebra_to_json(a: Algebra) -> dict:
    products = []
    for i in range(a.dim):
        for j in range(a.dim):
            for k in range(a.dim):
                c = a.table[i][j][k]
                if c != 0:
                    products.append({"i": i + 1, "j": j + 1, "k": k + 1,
                                     "c": grammar_str(c)})
    return {
        "name": a.name,
        "dim": a.dim,
        "params": [str(p) for p in a.params],
        "constraints_nonzero": [grammar_str(c) for c in a.constraints],
        "products": products,
    }


def algebra_from_json(obj: Mapping) -> Algebra:
    return algebra(
        obj["name"], int(obj["dim"]),
        [(p["i"], p["j"], p["k"], p["c"]) for p in obj.get("products", [])],
        params=obj.get("params", []),
        constraints=obj.get("constraints_nonzero", []),
    )


def load_algebra_file(path) -> Algebra:
    with open(path, "r", encoding="utf-8") as fh:
        return algebra_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# Multiplication
# ---------------------------------------------------------------------------

def multiply_table(table: Sequence, x: Sequence, y: Sequence) -> Vector:
    n = len(table)
    out = [sp.Integer(0)] * n
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        for j, yj in enumerate(y):
            if yj == 0:
                continue
            cij = table[i][j]
            for k in range(n):
                if cij[k] != 0:
                    out[k] += xi * yj * cij[k]
    return tuple(sp.cancel(v) for v in out)


def multiply(a: Algebra, x: Sequence, y: Sequence) -> Vector:
    if len(x) != a.dim or len(y) != a.dim:
        raise AlgebraError("dimension mismatch")
    return multiply_table(a.table, x, y)


def change_basis_table(table: Sequence, rows: Sequence[Sequence]) -> Table:
    """Structure constants in the basis E_i = sum_j rows[i][j] e_j.

    Requires ``rows`` invertible over the scalar field.
    """
    n = len(table)
    inv = linalg.invert([list(r) for r in rows])
    if inv is None:
        raise AlgebraError("singular basis matrix")
    new = []
    for i in range(n):
        plane = []
        for j in range(n):
            v = multiply_table(table, rows[i], rows[j])
            coords = tuple(
                sp.cancel(sum(v[l] * inv[l][k] for l in range(n)))
                for k in range(n))
            plane.append(coords)
        new.append(tuple(plane))
    return tuple(new)


# ---------------------------------------------------------------------------
# Identities
# ---------------------------------------------------------------------------

def _triple_left(table, i, j, k) -> Vector:
    """(e_i e_j) e_k"""
    n = len(table)
    return multiply_table(table, table[i][j], basis_vector(n, k))


def _triple_right(table, i, j, k) -> Vector:
    """e_i (e_j e_k)"""
    n = len(table)
    return multiply_table(table, basis_vector(n, i), table[j][k])


def check_identities(a: Algebra) -> IdentityFlags:
    """Decide the defining identities exactly, generically in the parameters."""
    n = a.dim
    table = a.table
    right_comm = True
    left_sym = True
    two_step = True
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs = _triple_left(table, i, j, k)
                if right_comm:
                    rhs = _triple_left(table, i, k, j)
                    if any(sp.cancel(u - v) != 0 for u, v in zip(lhs, rhs)):
                        right_comm = False
                if left_sym:
                    val = [sp.cancel(_triple_left(table, i, j, k)[m]
                                     - _triple_right(table, i, j, k)[m]
                                     - _triple_left(table, j, i, k)[m]
                                     + _triple_right(table, j, i, k)[m])
                           for m in range(n)]
                    if any(v != 0 for v in val):
                        left_sym = False
                if two_step:
                    if any(sp.cancel(v) != 0 for v in lhs) or \
                       any(sp.cancel(v) != 0 for v in _triple_right(table, i, j, k)):
                        two_step = False
                if not (right_comm or left_sym or two_step):
                    return IdentityFlags(False, False, False, False)
    return IdentityFlags(right_comm, left_sym, right_comm and left_sym, two_step)


# ---------------------------------------------------------------------------
# Annihilator, derived powers, derivations
# ---------------------------------------------------------------------------

def annihilator_basis(a: Algebra) -> list[Vector]:
    """Basis of Ann(A) = {x : xA = Ax = 0}, exact and deterministic."""
    n = a.dim
    rows = []
    for j in range(n):
        for k in range(n):
            rows.append([a.table[i][j][k] for i in range(n)])  # (x e_j)_k
            rows.append([a.table[j][i][k] for i in range(n)])  # (e_j x)_k
    return linalg.nullspace(rows, n)


def derived_power_dims(a: Algebra) -> list[int]:
    """Dims of A^1 ⊇ A^2 ⊇ ... with A^(k+1) = sum_{p+q=k+1} A^p A^q.

    Stops at the first zero power or when the dims stabilize above zero.
    """
    n = a.dim
    powers: list[list[Vector]] = [[basis_vector(n, i) for i in range(n)]]
    dims = [n]
    while dims[-1] > 0:
        k = len(powers) + 1
        candidates: list[Vector] = []
        for p in range(1, k):
            q = k - p
            for u in powers[p - 1]:
                for v in powers[q - 1]:
                    w = multiply_table(a.table, u, v)
                    if any(x != 0 for x in w):
                        candidates.append(w)
        red, pivots = linalg.rref(candidates) if candidates else ([], [])
        basis = [tuple(red[r]) for r in range(len(pivots))]
        dims.append(len(basis))
        powers.append(basis)
        if dims[-1] == dims[-2] and dims[-1] > 0:
            break
    return dims


def nilpotency_index(a: Algebra) -> int | None:
    dims = derived_power_dims(a)
    if dims[-1] == 0:
        return len(dims)
    return None


def derivation_dim(a: Algebra, at: Mapping | None = None) -> int:
    """dim of {D : D(xy) = D(x)y + xD(y)}.

    Generic over the parameter field when ``at`` is None, exact over Q(i)
    at the assignment otherwise.
    """
    if at:
        a = substitute(a, at)
    n = a.dim
    c = a.table

    def idx(p, q):
        return p * n + q

    rows = []
    for i in range(n):
        for j in range(n):
            for m in range(n):
                row = [sp.Integer(0)] * (n * n)
                for k in range(n):
                    if c[i][j][k] != 0:
                        row[idx(k, m)] += c[i][j][k]
                for p in range(n):
                    if c[p][j][m] != 0:
                        row[idx(i, p)] -= c[p][j][m]
                for q in range(n):
                    if c[i][q][m] != 0:
                        row[idx(j, q)] -= c[i][q][m]
                if any(x != 0 for x in row):
                    rows.append(row)
    return n * n - (linalg.rank(rows) if rows else 0)


def substitute(a: Algebra, at: Mapping, name: str | None = None) -> Algebra:
    """Instantiate every declared parameter at exact values.

    Raises :class:`ConstraintViolation` if a declared-nonzero expression
    vanishes at the assignment.
    """
    subs = {}
    for key, value in at.items():
        sym = key if isinstance(key, sp.Symbol) else sp.Symbol(str(key))
        subs[sym] = parse_scalar(value)
    missing = [p for p in a.params if p not in subs]
    if missing:
        raise AlgebraError(f"missing assignment for {[str(m) for m in missing]}")
    for cons in a.constraints:
        if sp.cancel(cons.subs(subs)) == 0:
            raise ConstraintViolation(
                f"constraint violated: {grammar_str(cons)} = 0 for {a.name}")
    table = tuple(tuple(tuple(sp.cancel(x.subs(subs)) for x in row)
                        for row in plane) for plane in a.table)
    label = name or (a.name + "(" + ", ".join(
        f"{p}={grammar_str(subs[p])}" for p in a.params) + ")" if a.params else a.name)
    return Algebra(label, a.dim, (), table, ())


def instantiate_table(a: Algebra, at: Mapping) -> Table:
    """Like :func:`substitute` but unrestricted: values may involve t or new
    symbols (used for parametrized-index degenerations).  Constraint check is
    'not identically zero' instead of 'nonzero value'."""
    subs = {}
    for key, value in at.items():
        sym = key if isinstance(key, sp.Symbol) else sp.Symbol(str(key))
        subs[sym] = parse_scalar(value)
    missing = [p for p in a.params if p not in subs]
    if missing:
        raise AlgebraError(f"missing assignment for {[str(m) for m in missing]}")
    return tuple(tuple(tuple(x.subs(subs) for x in row) for row in plane)
                 for plane in a.table)


def invariant_profile(a: Algebra, at: Mapping | None = None) -> InvariantProfile:
    if at:
        a = substitute(a, at)
    flags = check_identities(a)
    dims = derived_power_dims(a)
    idx = len(dims) if dims[-1] == 0 else None
    return InvariantProfile(
        dim=a.dim,
        dim_ann=len(annihilator_basis(a)),
        dims_derived=tuple(dims),
        dim_der=derivation_dim(a),
        is_right_commutative=flags.right_commutative,
        is_left_symmetric=flags.left_symmetric,
        is_novikov=flags.novikov,
        is_two_step=flags.two_step,
        nilpotency_index=idx,
    )
