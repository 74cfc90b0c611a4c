from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from posetmod.cmod import (
    composite,
    direct_sum,
    from_maps,
    gbc_module,
    is_module_morphism,
    random_module,
    restrict,
    validate,
    zero_module,
)
from posetmod.errors import DimensionMismatch, IncomparablePair, InadmissibleSubcategory, PathConflict
from posetmod.linalg import GF, Matrix
from posetmod.poset import chain, gamma1, gamma2, grid

from strategies import modules, posets


def test_noncommuting_square_is_rejected():
    m = from_maps(gamma1(), {x: 1 for x in "abcd"}, {("a", "b"): [[1]], ("b", "d"): [[1]], ("a", "c"): [[1]], ("c", "d"): [[2]]})
    with pytest.raises(PathConflict) as info:
        validate(m)
    assert (info.value.src, info.value.dst) == ("a", "d")


def test_composites_and_identities():
    m = from_maps(chain(3), {"1": 1, "2": 2, "3": 1}, {("1", "2"): [[1], [1]], ("2", "3"): [[1, -1]]})
    t = validate(m)
    assert t("1", "3") == Matrix([[0]])
    assert t("2", "2").is_identity()
    with pytest.raises(IncomparablePair):
        composite(t, "3", "1")


def test_shape_checks():
    with pytest.raises(DimensionMismatch):
        from_maps(chain(2), {"1": 1, "2": 2}, {("1", "2"): [[1, 0]]})


def test_restriction_uses_composites():
    m = from_maps(chain(3), {"1": 1, "2": 1, "3": 1}, {("1", "2"): [[2]], ("2", "3"): [[3]]})
    with pytest.raises(InadmissibleSubcategory):
        restrict(m, m.category.sub(["1", "3"]))
    r = restrict(m, m.category.sub(["2", "3"]))
    assert r.edge_maps[("2", "3")] == Matrix([[3]])


def test_gbc_module():
    g = gbc_module(gamma2(), gamma2().sub(["x1", "y1", "y2"]))
    assert g.dims == {"x1": 1, "x2": 0, "y1": 1, "y2": 1}
    validate(g)


def test_direct_sum_dims():
    a = gbc_module(gamma1(), gamma1().full())
    s = direct_sum(a, zero_module(gamma1()))
    assert s == a
    assert direct_sum(a, a).total_dim() == 8


def test_random_module_is_reproducible():
    assert random_module(grid(3, 3), 3, 7) == random_module(grid(3, 3), 3, 7)


@given(modules())
def test_random_modules_validate(m):
    validate(m)


@given(modules(field=GF(2)))
def test_random_modules_over_f2_validate(m):
    validate(m)


@given(modules())
def test_identity_is_a_morphism(m):
    ident = {x: Matrix.identity(m.dims[x], m.field) for x in m.category.objects}
    assert is_module_morphism(m, m, ident)


@given(modules(), st.integers(-2, 2))
def test_scalar_multiple_is_a_morphism(m, c):
    f = {x: Matrix.identity(m.dims[x], m.field).scale(Fraction(c)) for x in m.category.objects}
    assert is_module_morphism(m, m, f)
