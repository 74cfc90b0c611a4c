import random

import pytest
from hypothesis import given, strategies as st

from posetmod.blocks import (
    barcode_1d,
    block_category,
    block_holonomy,
    enumerate_blocks,
    gbc_decompose,
    gbcd_vector,
    graded_elements,
    tame_cover,
)
from posetmod.cmod import direct_sum, from_maps, gbc_module, is_module_morphism, random_module, validate
from posetmod.errors import HolonomyPresent, InconsistentDims, NotStabilized, NoVerifiedIpc, ZeroPiece
from posetmod.gallery import d4_shear, d5_module, gamma1_block, three_lines
from posetmod.ip import WipStructure
from posetmod.linalg import Gram, Matrix, full_space, kernel, rank, span_of
from posetmod.local import compute
from posetmod.poset import chain, gamma1, gamma2, grid

import oracles


def ls_of(m):
    return compute(m, validate(m))


def chain_example():
    return from_maps(chain(3), {"1": 1, "2": 1, "3": 1}, {("1", "2"): [[1]], ("2", "3"): [[0]]})


def test_gbc_on_chain_is_one_block():
    cat = chain(4)
    ls = ls_of(gbc_module(cat, cat.full()))
    [b] = enumerate_blocks(ls)
    assert b.key() == ("1", "2", "3", "4") and b.dim == 1


def test_block_category_of_kernel_piece():
    m = chain_example()
    ls = ls_of(m)
    ker = kernel(m.edge_maps[("2", "3")])
    assert block_category(ls, "2", ker).ordered() == ["1", "2"]
    with pytest.raises(ZeroPiece):
        block_category(ls, "2", span_of([], 1))


def test_d5_block_covers_everything():
    ls = ls_of(d5_module())
    assert block_category(ls, "x1", full_space(1)).ordered() == ["x1", "x2", "y1", "y2"]


def test_chain_example_blocks_and_gbcd():
    ls = ls_of(chain_example())
    assert [(b.key(), b.dim) for b in enumerate_blocks(ls)] == [(("1", "2"), 1), (("3",), 1)]
    assert gbcd_vector(ls) == {("1", "2"): 1, ("3",): 1}
    assert barcode_1d(chain_example()).bars == ((1, 2), (3, 3))


def test_barcode_small_cases():
    z = from_maps(chain(2), {"1": 0, "2": 0}, {})
    assert barcode_1d(z).bars == ()
    m = from_maps(chain(2), {"1": 1, "2": 1}, {("1", "2"): [[0]]})
    assert barcode_1d(m).bars == ((1, 1), (2, 2))


def test_two_gbcs_give_two_blocks():
    cat = gamma2()
    m = direct_sum(gbc_module(cat, cat.sub(["x1", "y1", "y2"])), gbc_module(cat, cat.sub(["x2", "y2"])))
    got = {(b.key(), b.dim) for b in enumerate_blocks(ls_of(m))}
    assert got == {(("x1", "y1", "y2"), 1), (("x2", "y2"), 1)}


def test_gbcd_doubles_under_self_sum():
    cat = gamma1()
    g = gbc_module(cat, cat.sub(["a", "b"]))
    assert gbcd_vector(ls_of(g)) == {("a", "b"): 1}
    assert gbcd_vector(ls_of(direct_sum(g, g))) == {("a", "b"): 2}


def test_d5_holonomy_is_two():
    [b] = enumerate_blocks(ls_of(d5_module()))
    [op] = block_holonomy(b)
    assert op == Matrix([[2]])
    with pytest.raises(HolonomyPresent):
        gbc_decompose(b)


def test_tree_support_has_no_loops():
    cat = chain(3)
    [b] = enumerate_blocks(ls_of(gbc_module(cat, cat.full())))
    assert block_holonomy(b) == []
    [g] = gbc_decompose(b)
    assert g.dim == 1 and g.support == b.support


def test_gamma1_block_splits():
    m = gamma1_block()
    [b] = enumerate_blocks(ls_of(m))
    assert b.dim == 2
    assert all(op.is_identity() for op in block_holonomy(b))
    parts = gbc_decompose(b)
    assert len(parts) == 2 and all(p.dim == 1 and p.support == b.support for p in parts)


def test_tame_cover_three_lines():
    m = three_lines()
    ls = ls_of(m)
    grams = {"a": Gram(Matrix([[1]])), "b": Gram(Matrix([[1]])), "c": Gram(Matrix([[2]])), "o": Gram.identity(2)}
    cov = tame_cover(ls, WipStructure(grams))
    assert cov.kernel_dims == {"a": 0, "b": 0, "c": 0, "o": 1}
    assert cov.total_kernel == ls.total_excess == 1
    assert rank(cov.projection["o"]) == 2


def test_tame_cover_requires_ipc():
    m = d5_module()
    ls = ls_of(m)
    with pytest.raises(NoVerifiedIpc):
        tame_cover(ls, None)
    with pytest.raises(NoVerifiedIpc):
        tame_cover(ls, WipStructure.identity(m))


def test_not_stabilized():
    m = d4_shear()
    ls = compute(m, validate(m), max_iters=3)
    with pytest.raises(NotStabilized):
        enumerate_blocks(ls)


def test_inconsistent_dims_on_excess_grid_module():
    m = random_module(grid(3, 3), 3, 21)
    with pytest.raises(InconsistentDims):
        enumerate_blocks(ls_of(m))


@given(st.integers(0, 10**6))
def test_barcode_matches_rank_oracle(seed):
    rng = random.Random(seed)
    m = random_module(chain(rng.randint(1, 6)), 4, seed)
    assert list(barcode_1d(m).bars) == oracles.rank_barcode(m)


@given(st.integers(0, 10**6))
def test_weakly_tame_modules_recover_blocks(seed):
    rng = random.Random(seed)
    cat = rng.choice([grid(2, 3), gamma1(), chain(4), grid(2, 2, 2)])
    m, expected = oracles.random_weakly_tame(cat, rng, rng.randint(1, 3))
    ls = ls_of(m)
    assert ls.total_excess == 0
    blocks = enumerate_blocks(ls)
    assert {b.key(): b.dim for b in blocks} == expected


@given(st.integers(0, 10**6))
def test_block_invariants(seed):
    m = random_module(grid(2, 3), 3, seed)
    ls = ls_of(m)
    try:
        blocks = enumerate_blocks(ls)
    except InconsistentDims:
        assert ls.total_excess > 0
        return
    for b in blocks:
        assert m.category.is_admissible(b.support)
        assert all(p.rank == b.dim for p in b.pieces.values())
        assert all(rank(t) == b.dim for t in b.transports.values())
    # one graded element per (object, block)
    per_object = graded_elements(ls)
    for x in m.category.objects:
        assert len(per_object[x]) == sum(1 for b in blocks if x in b.support)


@given(st.integers(0, 10**6))
def test_cover_dimension_accounting(seed):
    rng = random.Random(seed)
    cat = rng.choice([grid(2, 3), gamma1()])
    m, _ = oracles.random_weakly_tame(cat, rng, rng.randint(1, 3))
    from posetmod.ip import construct_ip_persistence

    w, _ = construct_ip_persistence(m)
    ls = ls_of(m)
    cov = tame_cover(ls, w)
    for x in cat.objects:
        assert cov.cover.dims[x] - m.dims[x] == ls.excess_at(x) == cov.kernel_dims[x] == 0
        assert rank(cov.projection[x]) == m.dims[x]
    assert is_module_morphism(cov.cover, m, cov.projection)


@given(st.integers(0, 10**6))
def test_gbc_split_is_an_isomorphism(seed):
    rng = random.Random(seed)
    cat = rng.choice([gamma1(), grid(2, 3), grid(3, 3)])
    support = oracles.random_support(cat, rng)
    m = oracles.block_module(cat, support, rng.randint(1, 4), rng)
    [b] = enumerate_blocks(ls_of(m))
    parts = gbc_decompose(b)
    assert len(parts) == b.dim
    for x in b.support.ordered():
        f = Matrix.from_columns([p.frame[x][0] for p in parts], m.dims[x])
        assert rank(f) == b.dim
    for (x, y) in b.transports:
        fx = Matrix.from_columns([p.frame[x][0] for p in parts], m.dims[x])
        fy = Matrix.from_columns([p.frame[y][0] for p in parts], m.dims[y])
        assert m.edge_maps[(x, y)] @ fx == fy
