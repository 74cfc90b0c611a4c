"""Blocks, tame covers, generalized barcodes and GBCD vectors.

Works from a stabilized local structure.  Every nonzero graded element
(x, W) is linked to (y, M(x->y)(W)) along each Hasse edge on which its
piece survives; since the graded quotient W / (lower sum) maps
isomorphically in that case, the linked elements have equal piece
dimensions.  The connected classes of this relation are the blocks: their
object sets are the block categories, and the induced maps on graded
quotients are the transports.

A class meeting some object twice means the graded elements do not
determine disjoint supports at that object.  This happens for modules
with nonzero excess in which two pieces at one object transport onto the
same piece elsewhere; it is reported as :class:`InconsistentDims`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cmod import CModule, ModuleMorphismTable, from_maps, validate
from .errors import (
    HolonomyPresent,
    InconsistentDims,
    LoopExitsSupport,
    NotStabilized,
    NoVerifiedIpc,
    ZeroPiece,
)
from .linalg import (
    Gram,
    Matrix,
    Subspace,
    block_diag,
    image,
    inverse,
    project_coordinates,
    rank,
    span_of,
)
from .local import LocalStructure, compute
from .multiflag import GradedDecomposition, graded
from .poset import Edge, PosetCategory, Subcategory, ZigZagLoop


@dataclass(frozen=True)
class GradedElement:
    object: str
    member: Subspace
    piece: Subspace

    @property
    def piece_dim(self) -> int:
        return self.piece.rank


@dataclass(frozen=True)
class Block:
    """A block: support, constant dimension, per-object pieces and the
    induced maps between them.

    ``transports[(x, y)]`` is the matrix, in the ``frame`` bases, of the map
    piece(x) -> piece(y) induced on graded quotients along the Hasse edge.
    The frame defaults to the canonical basis of each piece.
    """

    support: Subcategory
    dim: int
    members: Mapping[str, Subspace] = field(repr=False)
    pieces: Mapping[str, Subspace] = field(repr=False)
    transports: Mapping[Edge, Matrix] = field(repr=False)
    frame: Mapping[str, tuple] = field(repr=False, default=None)

    def key(self) -> tuple:
        return self.support.key()

    def basis(self, x: str) -> tuple:
        """Ambient vectors forming the frame at x."""
        if self.frame is not None:
            return self.frame[x]
        return self.pieces[x].vectors


@dataclass(frozen=True)
class TameCover:
    blocks: tuple
    cover: CModule
    projection: Mapping[str, Matrix]
    kernel_dims: Mapping[str, int]

    @property
    def total_kernel(self) -> int:
        return sum(self.kernel_dims.values())

    def is_isomorphism(self) -> bool:
        return self.total_kernel == 0


@dataclass(frozen=True)
class Barcode:
    bars: tuple

    def multiplicities(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for b in self.bars:
            out[b] = out.get(b, 0) + 1
        return out


GbcdVector = dict


# --------------------------------------------------------------------------


def _require_stable(ls: LocalStructure):
    if not ls.stabilized:
        raise NotStabilized(f"local structure not stabilized ({ls.reason})")


def _grams_of(policy) -> Mapping[str, Gram] | None:
    if policy is None:
        return None
    return getattr(policy, "grams", policy)


def graded_structure(ls: LocalStructure, policy=None) -> dict[str, GradedDecomposition]:
    """Per-object associated graded under a Gram assignment (or the
    pivot-complement policy when ``policy`` is None)."""
    grams = _grams_of(policy)
    return {
        x: graded(ls.flags[x], None if grams is None else grams[x])
        for x in ls.module.category.objects
    }


def graded_elements(ls: LocalStructure, policy=None) -> dict[str, list[GradedElement]]:
    _require_stable(ls)
    gr = graded_structure(ls, policy)
    return {
        x: [GradedElement(x, w, gr[x].pieces[w]) for w in ls.flags[x].members if gr[x].pieces[w].rank]
        for x in ls.module.category.objects
    }


class _Classes:
    """Union-find over graded elements keyed by (object, member)."""

    def __init__(self):
        self.parent = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb, key=str)] = min(ra, rb, key=str)


def _transport_classes(ls: LocalStructure, gr: Mapping[str, GradedDecomposition]):
    m = ls.module
    cat = m.category
    classes = _Classes()
    links = {}
    for x in cat.objects:
        for w in ls.flags[x].members:
            if gr[x].pieces[w].rank:
                classes.find((x, w))
    for e in cat.hasse_edges:
        x, y = e
        a = m.edge_maps[e]
        for w in ls.flags[x].members:
            p = gr[x].pieces[w]
            if not p.rank:
                continue
            if rank(a @ p.basis) == 0:
                continue
            v = image(a, w)
            if v not in ls.flags[y] or gr[y].pieces[v].rank != p.rank:
                raise InconsistentDims(
                    [x, y], f"piece of dim {p.rank} at {x} does not land on a graded element at {y}"
                )
            classes.union((x, w), (y, v))
            links[(x, w, y)] = v
    return classes, links


def _assemble(ls, gr, classes, links) -> list[Block]:
    m = ls.module
    cat = m.category
    groups: dict = {}
    for node in list(classes.parent):
        groups.setdefault(classes.find(node), []).append(node)
    blocks = []
    for nodes in groups.values():
        objs = [x for x, _ in nodes]
        if len(set(objs)) != len(objs):
            dup = sorted({x for x in objs if objs.count(x) > 1}, key=cat.index.__getitem__)
            raise InconsistentDims(
                sorted(set(objs), key=cat.index.__getitem__),
                f"transport class meets {dup} more than once, so the module is not a direct sum of blocks",
            )
        members = dict(nodes)
        support = cat.sub(objs)
        dims = {gr[x].pieces[w].rank for x, w in nodes}
        if len(dims) != 1:
            raise InconsistentDims(support.ordered(), "piece dimensions differ")
        pieces = {x: gr[x].pieces[w] for x, w in nodes}
        transports = {}
        for e in cat.hasse_edges:
            x, y = e
            if x in members and y in members:
                a = m.edge_maps[e]
                py, vy = pieces[y], members[y]
                along = gr[y].lower_sums[vy]
                cols = [project_coordinates(a.apply(b), py, along) for b in pieces[x].vectors]
                transports[e] = Matrix.from_columns(cols, py.rank, m.field)
        blocks.append(Block(support, dims.pop(), members, pieces, transports))
    blocks.sort(key=lambda b: ([cat.index[x] for x in b.support.ordered()], b.dim))
    return blocks


def enumerate_blocks(ls: LocalStructure, policy=None) -> list[Block]:
    """All blocks of a stabilized local structure, in deterministic order."""
    _require_stable(ls)
    gr = graded_structure(ls, policy)
    classes, links = _transport_classes(ls, gr)
    blocks = _assemble(ls, gr, classes, links)
    for b in blocks:
        if not ls.module.category.is_admissible(b.support):
            raise InconsistentDims(b.support.ordered(), "support is not admissible")
    return blocks


def block_category(ls: LocalStructure, x: str, w: Subspace, policy=None) -> Subcategory:
    _require_stable(ls)
    gr = graded_structure(ls, policy)
    if w not in ls.flags[x] or not gr[x].pieces[w].rank:
        raise ZeroPiece(f"{w} has no nonzero graded piece at {x}")
    for b in enumerate_blocks(ls, policy):
        if b.members.get(x) == w:
            return b.support
    raise ZeroPiece(f"{w} at {x} belongs to no block")


def block_module(b: Block, cat: PosetCategory) -> CModule:
    """The block as a module of its own: k^dim on the support, the
    transports inside, zero elsewhere."""
    field = next(iter(b.pieces.values())).field
    dims = {x: (b.dim if x in b.support else 0) for x in cat.objects}
    return from_maps(cat, dims, dict(b.transports), field)


def tame_cover(ls: LocalStructure, verified_ipc) -> TameCover:
    """Direct sum of all blocks with the projection given by inclusion of
    pieces.  Requires a Gram assignment that passes :func:`check_ipc`."""
    from .ip import VERIFIED, check_ipc

    _require_stable(ls)
    m = ls.module
    if verified_ipc is None or not m.field.is_rational:
        raise NoVerifiedIpc("tame cover needs a verified inner-product structure over Q")
    report = check_ipc(m, ls.table, verified_ipc)
    if report.verdict != VERIFIED:
        raise NoVerifiedIpc(f"inner-product structure rejected: {report.describe()}")
    blocks = enumerate_blocks(ls, verified_ipc)
    cat = m.category
    cover = direct_sum_of_blocks(blocks, cat, m.field)
    projection = {}
    kernel_dims = {}
    for x in cat.objects:
        cols = [v for b in blocks if x in b.support for v in b.basis(x)]
        p = Matrix.from_columns(cols, m.dims[x], m.field)
        projection[x] = p
        kernel_dims[x] = p.cols - rank(p)
    return TameCover(tuple(blocks), cover, projection, kernel_dims)


def direct_sum_of_blocks(blocks: Sequence[Block], cat: PosetCategory, field) -> CModule:
    dims = {x: sum(b.dim for b in blocks if x in b.support) for x in cat.objects}
    maps = {}
    for e in cat.hasse_edges:
        x, y = e
        parts = []
        for b in blocks:
            inx, iny = x in b.support, y in b.support
            if inx and iny:
                parts.append(b.transports[e])
            elif inx:
                parts.append(Matrix.zeros(0, b.dim, field))
            elif iny:
                parts.append(Matrix.zeros(b.dim, 0, field))
        maps[e] = block_diag(parts, field) if parts else Matrix.zeros(dims[y], dims[x], field)
    return from_maps(cat, dims, maps, field)


# --------------------------------------------------------------------------
# holonomy and splitting


def support_loops(b: Block) -> list[ZigZagLoop]:
    return b.support.parent.cycle_basis(within=b.support.objects)


def loop_operator(b: Block, loop: ZigZagLoop) -> Matrix:
    """Composite of transports (and inverses of backward steps) around a
    loop, acting on the frame at the loop's base object."""
    if any(v not in b.support for v in loop.vertices):
        raise LoopExitsSupport(f"loop {loop.vertices} leaves support {b.support.ordered()}")
    field = next(iter(b.pieces.values())).field
    op = Matrix.identity(b.dim, field)
    for e, fwd in loop.steps:
        t = b.transports[e]
        op = (t if fwd else inverse(t)) @ op
    return op


def block_holonomy(b: Block, loops: Sequence[ZigZagLoop] | None = None) -> list[Matrix]:
    if loops is None:
        loops = support_loops(b)
    return [loop_operator(b, l) for l in loops]


def gbc_decompose(b: Block, loops: Sequence[ZigZagLoop] | None = None) -> list[Block]:
    """Split a holonomy-free block into ``dim`` rank-one blocks.

    The canonical frame at the first support object is carried along a
    spanning tree of the support; every returned block records its frame,
    in which all transports are 1.
    """
    if loops is None:
        loops = support_loops(b)
    for l in loops:
        op = loop_operator(b, l)
        if not op.is_identity():
            raise HolonomyPresent(l.vertices, op)
    frames = compatible_frames(b)
    field = next(iter(b.pieces.values())).field
    one = Matrix([[1]], field)
    out = []
    for i in range(b.dim):
        frame = {}
        pieces = {}
        for x in b.support.ordered():
            coords = frames[x].column(i)
            vec = _combine(b.basis(x), coords, b.pieces[x].ambient_dim, field)
            frame[x] = (vec,)
            pieces[x] = span_of([vec], b.pieces[x].ambient_dim, field)
        transports = {e: one for e in b.transports}
        out.append(Block(b.support, 1, b.members, pieces, transports, frame))
    return out


def compatible_frames(b: Block) -> dict[str, Matrix]:
    """Change-of-basis matrices P_x (frame coordinates) obtained by
    transporting the identity frame from the base object along a BFS tree."""
    cat = b.support.parent
    order = b.support.ordered()
    field = next(iter(b.pieces.values())).field
    frames = {order[0]: Matrix.identity(b.dim, field)}
    queue = [order[0]]
    while queue:
        x = queue.pop(0)
        for (s, d), t in b.transports.items():
            if s == x and d not in frames:
                frames[d] = t @ frames[x]
                queue.append(d)
            elif d == x and s not in frames:
                frames[s] = inverse(t) @ frames[x]
                queue.append(s)
    return frames


def _combine(vectors, coords, n, field):
    out = [field.zero] * n
    for c, v in zip(coords, vectors):
        if c:
            out = [a + c * x for a, x in zip(out, v)]
    return tuple(out)


# --------------------------------------------------------------------------
# invariants


def gbcd_vector(ls: LocalStructure, policy=None) -> dict[tuple, int]:
    """Support key (objects in declared order) -> total block dimension."""
    out: dict[tuple, int] = {}
    for b in enumerate_blocks(ls, policy):
        out[b.key()] = out.get(b.key(), 0) + b.dim
    return dict(sorted(out.items(), key=lambda kv: [ls.module.category.index[x] for x in kv[0]]))


def barcode_1d(m: CModule, t: ModuleMorphismTable | None = None, max_iters: int = 64) -> Barcode:
    """Barcode of a module over a chain, read off the block supports.

    Bars are (birth, death) with 1-based positions along the chain.
    """
    order = m.category.chain_order()
    pos = {x: i + 1 for i, x in enumerate(order)}
    t = t or validate(m)
    ls = compute(m, t, max_iters)
    bars = []
    for b in enumerate_blocks(ls):
        ps = sorted(pos[x] for x in b.support.objects)
        bars.extend([(ps[0], ps[-1])] * b.dim)
    return Barcode(tuple(sorted(bars)))
