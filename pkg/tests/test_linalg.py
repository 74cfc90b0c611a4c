from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from posetmod.errors import FieldError, IndefiniteGram, NotASubspace
from posetmod.linalg import (
    GF,
    QQ,
    Gram,
    Matrix,
    ModP,
    annihilator,
    canonical_span,
    complement_in,
    det,
    full_space,
    image,
    intersect,
    inverse,
    is_positive_definite,
    kernel,
    preimage,
    project_coordinates,
    rank,
    rel_orth_complement,
    solve,
    span_of,
    subspace_sum,
    zero_space,
)

from strategies import fields, matrices


def sym(m: Matrix) -> sympy.Matrix:
    return sympy.Matrix(m.rows, m.cols, lambda i, j: sympy.Rational(m[i, j].numerator, m[i, j].denominator))


def test_modp_arithmetic():
    a, b = ModP(3, 7), ModP(5, 7)
    assert a + b == ModP(1, 7)
    assert a * b == ModP(1, 7)
    assert a / b == ModP(2, 7)
    assert -a == ModP(4, 7)
    with pytest.raises(ZeroDivisionError):
        a / ModP(0, 7)


def test_field_parsing():
    assert QQ("3/4") == Fraction(3, 4)
    assert GF(5)(Fraction(1, 2)) == ModP(3, 5)
    with pytest.raises(FieldError):
        GF(6)


def test_kernel_of_difference():
    k = kernel(Matrix([[1, -1]]))
    assert k == span_of([[1, 1]], 2)


def test_preimage_under_shear():
    shear = Matrix([[1, 1], [0, 1]])
    e1 = span_of([[1, 0]], 2)
    assert preimage(shear, e1) == e1


def test_intersection_of_planes():
    a = span_of([[1, 0, 0], [0, 1, 0]], 3)
    b = span_of([[0, 1, 0], [0, 0, 1]], 3)
    assert intersect(a, b) == span_of([[0, 1, 0]], 3)
    assert subspace_sum(a, b) == full_space(3)


def test_orth_complement_identity_gram():
    e1 = span_of([[1, 0]], 2)
    assert rel_orth_complement(e1, full_space(2), Gram.identity(2)) == span_of([[0, 1]], 2)


def test_orth_complement_weighted():
    # <u, v> = 2 u1 v1 + u1 v2 + u2 v1 + u2 v2; complement of e1 is (1, -2)
    g = Gram(Matrix([[2, 1], [1, 1]]))
    assert rel_orth_complement(span_of([[1, 0]], 2), full_space(2), g) == span_of([[1, -2]], 2)


def test_complement_over_f2():
    f = GF(2)
    w = span_of([[1, 1]], 2, f)
    assert complement_in(w, full_space(2, f)) == span_of([[1, 0]], 2, f)


def test_orth_complement_rejects_bad_input():
    with pytest.raises(IndefiniteGram):
        rel_orth_complement(zero_space(2), full_space(2), Gram(Matrix([[1, 2], [2, 1]])))
    with pytest.raises(NotASubspace):
        rel_orth_complement(full_space(2), span_of([[1, 0]], 2), Gram.identity(2))
    with pytest.raises(FieldError):
        rel_orth_complement(zero_space(2, GF(3)), full_space(2, GF(3)), Gram.identity(2, GF(3)))


def test_positive_definite():
    assert is_positive_definite(Gram(Matrix([[2, 1], [1, 1]])))
    assert not is_positive_definite(Gram(Matrix([[1, 2], [2, 1]])))
    with pytest.raises(IndefiniteGram):
        Gram(Matrix([[1, 2], [3, 1]]))


def test_project_coordinates():
    target = span_of([[1, 0]], 2)
    along = span_of([[1, 1]], 2)
    assert project_coordinates((0, 1), target, along) == (Fraction(-1),)


@given(matrices())
def test_rank_and_kernel_match_sympy(m):
    s = sym(m)
    assert rank(m) == s.rank()
    assert kernel(m).rank == m.cols - s.rank()
    for v in kernel(m).vectors:
        assert all(x == 0 for x in m.apply(v))


@given(st.integers(1, 4).flatmap(lambda n: matrices(rows=n, cols=n)))
def test_det_and_inverse_match_sympy(m):
    s = sym(m)
    assert det(m) == s.det()
    if s.det() != 0:
        inv = inverse(m)
        assert (m @ inv).is_identity()
        assert sym(inv) == s.inv()


@given(matrices(rows=3), matrices(rows=3))
def test_zassenhaus_dimension_formula(a, b):
    u, w = canonical_span(a), canonical_span(b)
    i = intersect(u, w)
    assert i <= u and i <= w
    assert u.rank + w.rank == subspace_sum(u, w).rank + i.rank


@given(fields.flatmap(lambda f: st.tuples(matrices(field=f, rows=3), matrices(field=f, rows=3))))
def test_canonical_form_is_basis_independent(pair):
    a, b = pair
    cols = a.columns()
    extra = [tuple(x + y for x, y in zip(cols[0], cols[-1]))] if cols else []
    shuffled = Matrix.from_columns(cols[::-1] + extra, 3, a.field)
    assert canonical_span(shuffled) == canonical_span(a)
    both = canonical_span(Matrix.from_columns(cols + b.columns(), 3, a.field))
    assert both == subspace_sum(canonical_span(a), canonical_span(b))


@given(matrices(rows=3, cols=3), matrices(rows=3))
def test_preimage_definition(m, b):
    w = canonical_span(b)
    p = preimage(m, w)
    for v in p.vectors:
        assert w.contains_vector(m.apply(v))
    assert kernel(m) <= p
    assert p.rank == kernel(m).rank + intersect(image(m), w).rank


@given(matrices(rows=3))
def test_annihilator_kills_exactly_w(b):
    w = canonical_span(b)
    ann = annihilator(w)
    assert kernel(ann) == w


@given(matrices(rows=3, cols=3), matrices(rows=3, cols=1))
def test_solve(a, b):
    x = solve(a, b)
    consistent = rank(a) == rank(Matrix.from_columns(a.columns() + b.columns(), 3))
    assert (x is not None) == consistent
    if x is not None:
        assert a @ x == b


@given(matrices(rows=3), matrices(rows=3))
def test_complements(b1, b2):
    w1 = canonical_span(b1)
    w2 = subspace_sum(w1, canonical_span(b2))
    c = complement_in(w1, w2)
    assert c.rank + w1.rank == w2.rank
    assert subspace_sum(c, w1) == w2
    g = Gram(Matrix([[2, 1, 0], [1, 2, 1], [0, 1, 2]]))
    o = rel_orth_complement(w1, w2, g)
    assert o.rank + w1.rank == w2.rank
    assert all(g.form(u, v) == 0 for u in o.vectors for v in w1.vectors)
