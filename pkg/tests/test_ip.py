import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from posetmod.cmod import direct_sum, from_maps, random_module, validate
from posetmod.errors import FieldError, IpcConstructionFailed, NotProductOfChains
from posetmod.gallery import d5_module, grid_star
from posetmod.ip import (
    NO_OBSTRUCTION,
    OBSTRUCTED,
    VERIFIED,
    VIOLATED,
    WipStructure,
    _sweep,
    check_ipc,
    construct_ip_persistence,
    obstruction_scan,
)
from posetmod.linalg import GF, Gram, Matrix, block_diag
from posetmod.local import compute
from posetmod.poset import chain, gamma1, gamma2, grid

import oracles


def scalar_grams(**vals):
    return {x: Gram(Matrix([[v]])) for x, v in vals.items()}


def doubling():
    return from_maps(chain(2), {"1": 1, "2": 1}, {("1", "2"): [[2]]})


def test_identity_module_identity_grams():
    cat = gamma1()
    m = from_maps(cat, {x: 2 for x in "abcd"}, {e: [[1, 0], [0, 1]] for e in cat.hasse_edges})
    assert check_ipc(m, None, WipStructure.identity(m)).verdict == VERIFIED


def test_doubling_map():
    m = doubling()
    r = check_ipc(m, None, scalar_grams(**{"1": 1, "2": 1}))
    assert r.verdict == VIOLATED
    assert r.witness == ((Fraction(1),), (Fraction(1),))
    assert r.values == (1, 4)
    assert check_ipc(m, None, scalar_grams(**{"1": 4, "2": 1})).verdict == VERIFIED


def test_construct_doubling_map():
    m = doubling()
    w, _ = construct_ip_persistence(m)
    assert w["1"].matrix[0, 0] == 4 * w["2"].matrix[0, 0]
    assert check_ipc(m, None, w, composites=True).verdict == VERIFIED


def test_zero_maps_get_identity_grams():
    cat = grid(2, 2)
    m = from_maps(cat, {x: 2 for x in cat.objects}, {})
    w, _ = construct_ip_persistence(m)
    assert all(w[x].matrix.is_identity() for x in cat.objects)


def test_pushout_sweep_alone_can_fail():
    cat = grid(2, 2)
    m = from_maps(cat, {"0,0": 0, "0,1": 1, "1,0": 1, "1,1": 1}, {("0,1", "1,1"): [[2]], ("1,0", "1,1"): [[1]]})
    t = validate(m)
    fwd = _sweep(m, t, True, False)
    assert fwd["0,1"].matrix == fwd["1,0"].matrix  # both fixed before the top is seen
    w, strategy = construct_ip_persistence(m, t, strategies=("forward-sweep", "decomposition"))
    assert strategy == "decomposition"
    assert check_ipc(m, t, w, composites=True).verdict == VERIFIED


def test_edge_check_is_weaker_than_composite_check():
    m = grid_star()
    grams = scalar_grams(**{"0,1": 1, "0,2": 1, "1,0": 2, "1,2": 1})
    grams["0,0"] = Gram(Matrix.zeros(0, 0))
    grams["1,1"] = Gram(Matrix([[1, 1], [1, 2]]))
    assert check_ipc(m, None, grams).verdict == VERIFIED
    r = check_ipc(m, None, grams, composites=True)
    assert r.verdict == VIOLATED and r.edge == ("1,0", "1,2")


def test_grid_star_has_no_composite_ipc_from_any_strategy():
    m = grid_star()
    assert compute(m, validate(m)).total_excess == 1
    with pytest.raises(IpcConstructionFailed):
        construct_ip_persistence(m, composites=True)
    w, _ = construct_ip_persistence(m)
    assert check_ipc(m, None, w).verdict == VERIFIED


def test_construct_preconditions():
    with pytest.raises(NotProductOfChains):
        construct_ip_persistence(d5_module())
    with pytest.raises(FieldError):
        construct_ip_persistence(random_module(grid(2, 2), 2, 0, GF(3)))


def test_d5_obstruction():
    m = d5_module()
    r = obstruction_scan(compute(m, validate(m)))
    assert r.verdict == OBSTRUCTED
    assert r.operator == Matrix([[2]])
    assert r.loop.vertices == ["x1", "y1", "x2", "y2"]


def test_d5_with_unit_maps_is_unobstructed():
    m = d5_module(scale=1)
    assert obstruction_scan(compute(m, validate(m))).verdict == NO_OBSTRUCTION
    assert check_ipc(m, None, WipStructure.identity(m), composites=True).verdict == VERIFIED


@given(st.integers(0, 10**6))
def test_square_modules_are_unobstructed(seed):
    m = random_module(gamma1(), 3, seed)
    ls = compute(m, validate(m))
    assert obstruction_scan(ls).verdict == NO_OBSTRUCTION


@given(st.integers(0, 10**6))
def test_d5_rejects_random_grams(seed):
    rng = random.Random(seed)
    m = d5_module()
    grams = {x: oracles.random_pd_gram(rng, 1) for x in m.category.objects}
    assert check_ipc(m, None, grams).verdict == VIOLATED


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_direct_sum_verdict_is_conjunction(s1, s2):
    rng = random.Random(s1 ^ s2)
    cat = grid(2, 2)
    a, b = random_module(cat, 2, s1), random_module(cat, 2, s2)
    ga = {x: oracles.random_pd_gram(rng, a.dims[x]) for x in cat.objects}
    gb = {x: oracles.random_pd_gram(rng, b.dims[x]) for x in cat.objects}
    if rng.random() < 0.5:
        ga = dict(construct_ip_persistence(a)[0].grams)
    gs = {x: Gram(block_diag([ga[x].matrix, gb[x].matrix])) for x in cat.objects}
    both = check_ipc(direct_sum(a, b), None, gs).verdict == VERIFIED
    each = check_ipc(a, None, ga).verdict == VERIFIED and check_ipc(b, None, gb).verdict == VERIFIED
    assert both == each


@given(st.integers(0, 10**6))
def test_construction_on_excess_free_grid_modules(seed):
    m = random_module(grid(2, 3), 3, seed)
    t = validate(m)
    if compute(m, t).total_excess != 0:
        return
    w, _ = construct_ip_persistence(m, t, composites=True)
    assert check_ipc(m, t, w, composites=True).verdict == VERIFIED
