"""Structure-constant algebra core: multiplication, identities, annihilators,
derived powers, derivations, profiles, and the JSON schema."""

from fractions import Fraction

import pytest
import sympy as sp

from novikov import algebras as alg
from novikov.algebras import (AlgebraError, ConstraintViolation, algebra,
                              algebra_from_json, algebra_to_json,
                              annihilator_basis, basis_vector, change_basis_table,
                              check_identities, derivation_dim,
                              derived_power_dims, invariant_profile, multiply,
                              parse_vector, substitute, vector_str, zero_vector)
from oracle import annihilator_dim, derivation_dim_frac, derived_dims, table


def e(n, i):
    return basis_vector(n, i - 1)


# ---------------------------------------------------------------------------
# Multiplication
# ---------------------------------------------------------------------------

def test_multiply_basis_products(cat):
    a = cat.get("N4_01")
    assert multiply(a, e(4, 1), e(4, 1)) == e(4, 2)
    a24 = cat.get("N4_24")
    assert multiply(a24, e(4, 2), e(4, 1)) == \
        tuple(sp.Integer(x) for x in (0, 0, 1, 1))


def test_multiply_is_bilinear(cat):
    a = cat.get("N4_05")
    x = (sp.Integer(2), sp.Integer(-1), sp.Rational(1, 3), sp.Integer(0))
    y = (sp.Integer(1), sp.Integer(4), sp.Integer(0), sp.Integer(7))
    z = zero_vector(4)
    assert multiply(a, z, y) == z
    lhs = multiply(a, tuple(2 * c for c in x), y)
    rhs = tuple(sp.cancel(2 * c) for c in multiply(a, x, y))
    assert lhs == rhs


def test_multiply_dimension_mismatch(cat):
    with pytest.raises(AlgebraError):
        multiply(cat.get("N4_01"), (sp.Integer(1),), e(4, 1))


# ---------------------------------------------------------------------------
# Identities
# ---------------------------------------------------------------------------

def test_identities_n4_22_generic(cat):
    flags = check_identities(cat.get("N4_22"))
    assert flags.novikov and not flags.two_step


def test_identities_zero_algebra(cat):
    flags = check_identities(cat.get("zero_4"))
    assert flags.right_commutative and flags.left_symmetric
    assert flags.novikov and flags.two_step


def test_identities_anticommutative_row(cat):
    # e2 e3 = e4 = -e3 e2 makes the triple products genuinely asymmetric.
    flags = check_identities(cat.get("N4_12"))
    assert flags.novikov and not flags.two_step


def test_identities_negative_control():
    bad = algebra("assoc_breaker", 2, [(1, 1, 2, 1), (2, 1, 1, 1)])
    flags = check_identities(bad)
    assert not flags.novikov


# ---------------------------------------------------------------------------
# Annihilator
# ---------------------------------------------------------------------------

def test_annihilator_n4_01(cat):
    a = cat.get("N4_01")
    basis = annihilator_basis(a)
    assert len(basis) == 2 == annihilator_dim(table(4, [(1, 1, 2, 1), (2, 1, 3, 1)]))
    assert [vector_str(v) for v in basis] == ["e3", "e4"]
    for v in basis:
        for j in range(4):
            assert multiply(a, v, e(4, j + 1)) == zero_vector(4)
            assert multiply(a, e(4, j + 1), v) == zero_vector(4)


def test_annihilator_n3_02_generic_and_sampled(cat):
    basis = annihilator_basis(cat.get("N3_02"))
    assert [vector_str(v) for v in basis] == ["e3"]
    assert annihilator_dim(table(3, [(1, 1, 2, 1), (1, 2, 3, 1),
                                     (2, 1, 3, Fraction(5))])) == 1


def test_annihilator_zero_algebra(cat):
    assert len(annihilator_basis(cat.get("zero_4"))) == 4


# ---------------------------------------------------------------------------
# Derived powers and nilpotency
# ---------------------------------------------------------------------------

def test_derived_powers_examples(cat):
    assert derived_power_dims(cat.get("zero_4")) == [4, 0]
    assert derived_power_dims(cat.get("N3_02")) == [3, 2, 1, 0]
    assert derived_power_dims(cat.get("N4_22")) == [4, 3, 2, 1, 0]


def test_derived_powers_match_oracle_at_sample(cat):
    lam = Fraction(3)
    tbl = table(4, [(1, 1, 2, 1), (1, 2, 3, 1), (1, 3, 4, 2 - lam),
                    (2, 1, 3, lam), (2, 2, 4, lam), (3, 1, 4, lam)])
    assert derived_dims(tbl) == [4, 3, 2, 1, 0]
    inst = substitute(cat.get("N4_22"), {"lam": 3})
    assert derived_power_dims(inst) == [4, 3, 2, 1, 0]


def test_not_nilpotent_detected():
    a = algebra("idempotent", 1, [(1, 1, 1, 1)])
    dims = derived_power_dims(a)
    assert dims[-1] != 0
    assert alg.nilpotency_index(a) is None


def test_derived_dims_non_increasing(cat):
    for name in ("N4_05", "N4_17", "N4_20", "Ntriv_2"):
        dims = derived_power_dims(cat.get(name))
        assert all(a >= b for a, b in zip(dims, dims[1:]))
        assert dims[-1] == 0


# ---------------------------------------------------------------------------
# Derivations
# ---------------------------------------------------------------------------

def test_derivation_dims_of_source_families(cat):
    assert derivation_dim(cat.get("N4_20")) == 3
    assert derivation_dim(cat.get("N4_22")) == 3
    assert derivation_dim(cat.get("zero_4")) == 16
    assert derivation_dim(cat.get("N4_20"), {"alpha": 2}) == 3


def test_derivation_dim_matches_oracle(cat):
    for name, prods in [
        ("N4_17", [(1, 2, 3, 1), (1, 3, 4, 1), (2, 1, 4, 1), (2, 2, 4, 1)]),
        ("N4_01", [(1, 1, 2, 1), (2, 1, 3, 1)]),
    ]:
        assert derivation_dim(cat.get(name)) == derivation_dim_frac(table(4, prods))


def test_generic_derivation_dim_bounds_samples(cat):
    a = cat.get("N4_22")
    generic = derivation_dim(a)
    for lam in (sp.Rational(5), sp.Rational(-2, 3), sp.Integer(0), sp.Integer(1)):
        assert generic <= derivation_dim(a, {"lam": lam})


def test_derivation_constraint_violation(cat):
    with pytest.raises(ConstraintViolation):
        derivation_dim(cat.get("N3s_04"), {"lam": 0})


# ---------------------------------------------------------------------------
# Profiles, substitution, basis changes
# ---------------------------------------------------------------------------

def test_invariant_profile_zero_4(cat):
    p = invariant_profile(cat.get("zero_4"))
    assert p.dim_ann == 4 and p.dims_derived == (4, 0)
    assert p.dim_der == 16 and p.nilpotency_index == 2
    assert p.is_novikov and p.is_two_step
    assert p.to_dict()["nilpotency_index"] == 2


def test_invariant_profile_n4_01(cat):
    p = invariant_profile(cat.get("N4_01"))
    assert p.dim_ann == 2 and not p.is_two_step


def test_invariant_profile_at_assignment(cat):
    p = invariant_profile(cat.get("N4_20"), {"alpha": 2})
    assert p.dim_der == 3


def test_substitute_validates(cat):
    a = cat.get("N4_06")
    with pytest.raises(ConstraintViolation):
        substitute(a, {"alpha": 0})
    inst = substitute(a, {"alpha": sp.Rational(1, 2)})
    assert inst.params == ()
    with pytest.raises(AlgebraError):
        substitute(cat.get("N4_06"), {})


def test_change_basis_roundtrip(cat):
    a = substitute(cat.get("N4_02"), {"lam": 3})
    rows = [(sp.Integer(1), sp.Integer(1), sp.Integer(0), sp.Integer(0)),
            (sp.Integer(0), sp.Integer(1), sp.Integer(0), sp.Integer(0)),
            (sp.Integer(0), sp.Integer(0), sp.Integer(2), sp.Integer(0)),
            (sp.Integer(0), sp.Integer(0), sp.Integer(1), sp.Integer(1))]
    conj = change_basis_table(a.table, rows)
    from novikov.linalg import invert
    inv = invert([list(r) for r in rows])
    back = change_basis_table(conj, [tuple(row) for row in inv])
    # conjugating by M then by M^-1 (expressed in the new coordinates) is the
    # identity on structure constants
    for i in range(4):
        for j in range(4):
            for k in range(4):
                assert sp.cancel(back[i][j][k] - a.table[i][j][k]) == 0


def test_change_basis_singular_rejected(cat):
    a = cat.get("zero_2")
    with pytest.raises(AlgebraError):
        change_basis_table(a.table, [(sp.Integer(1), sp.Integer(1)),
                                     (sp.Integer(2), sp.Integer(2))])


# ---------------------------------------------------------------------------
# Construction and JSON schema
# ---------------------------------------------------------------------------

def test_algebra_validation():
    with pytest.raises(AlgebraError):
        algebra("bad", 2, [(1, 3, 1, 1)])
    with pytest.raises(AlgebraError):
        algebra("bad", 2, [(1, 1, 2, "mu")])          # undeclared symbol
    with pytest.raises(AlgebraError):
        algebra("bad", 2, [(1, 1, 2, "t")], params=["t"])


def test_json_roundtrip(cat):
    a = cat.get("N4_22")
    b = algebra_from_json(algebra_to_json(a))
    assert b.dim == a.dim and b.params == a.params
    for i in range(4):
        for j in range(4):
            for k in range(4):
                assert sp.cancel(a.table[i][j][k] - b.table[i][j][k]) == 0


def test_parse_vector():
    v = parse_vector("e1 + 2*e3", 3)
    assert v == (sp.Integer(1), sp.Integer(0), sp.Integer(2))
    with pytest.raises(AlgebraError):
        parse_vector("e1*e2", 3)
    assert vector_str(zero_vector(2)) == "0"


def test_degenerate_dimensions(cat):
    # every operation stays defined at dim 1 and dim 0; the only nilpotent
    # 1-dimensional algebra is the zero product
    one = cat.get("zero_1")
    assert check_identities(one).novikov
    assert derived_power_dims(one) == [1, 0]
    assert len(annihilator_basis(one)) == 1
    assert derivation_dim(one) == 1
    empty = algebra("nothing", 0, [])
    assert derived_power_dims(empty) == [0]
    assert annihilator_basis(empty) == []
    assert derivation_dim(empty) == 0
    assert check_identities(empty).novikov
