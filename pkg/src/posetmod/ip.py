"""Inner-product structures on modules: checking, construction, obstructions.

An assignment of Gram matrices is an IP structure when every map restricts
to an isometry on the orthogonal complement of its kernel.  Checking runs
over Hasse edges by default; ``composites=True`` checks every comparable
pair.  The two are not equivalent in general: partial isometries need not
compose to partial isometries (a projection following an isometric
embedding can shrink vectors lying in the complement of the composite's
kernel), so the edge check is a necessary condition only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cmod import CModule, ModuleMorphismTable, validate
from .errors import (
    DimensionMismatch,
    FieldError,
    IndefiniteGram,
    InconsistentDims,
    IpcConstructionFailed,
    NotProductOfChains,
)
from .linalg import (
    Gram,
    Matrix,
    Subspace,
    block_diag,
    complement_in,
    det,
    full_space,
    hstack,
    inverse,
    is_positive_definite,
    kernel,
    rank,
    rel_orth_complement,
    solve,
    span_of,
)
from .poset import Edge, ZigZagLoop

VERIFIED = "verified"
VIOLATED = "violated"
OBSTRUCTED = "obstructed"
NO_OBSTRUCTION = "no_obstruction_found"


@dataclass(frozen=True)
class WipStructure:
    """One Gram matrix per object (a weak inner-product structure)."""

    grams: Mapping[str, Gram]

    def __getitem__(self, x: str) -> Gram:
        return self.grams[x]

    def check_against(self, m: CModule) -> None:
        if set(self.grams) != set(m.category.objects):
            raise DimensionMismatch("Gram assignment must cover every object")
        if not m.field.is_rational:
            raise FieldError("inner-product structures are only defined over Q")
        for x in m.category.objects:
            g = self.grams[x]
            if g.dim != m.dims[x]:
                raise DimensionMismatch(f"Gram at {x} has size {g.dim}, module has {m.dims[x]}")
            if g.dim and not is_positive_definite(g):
                raise IndefiniteGram(f"Gram at {x} is not positive definite")

    @classmethod
    def identity(cls, m: CModule) -> "WipStructure":
        return cls({x: Gram.identity(m.dims[x], m.field) for x in m.category.objects})


@dataclass(frozen=True)
class IpcReport:
    verdict: str
    edge: Edge | None = None
    witness: tuple | None = None
    values: tuple | None = None
    loop: ZigZagLoop | None = field(default=None, repr=False)
    operator: Matrix | None = None
    support: tuple | None = None
    strategy: str | None = None

    @property
    def ok(self) -> bool:
        return self.verdict in (VERIFIED, NO_OBSTRUCTION)

    def describe(self) -> str:
        if self.verdict == VIOLATED:
            v, w = self.witness
            a, b = self.values
            return (
                f"violated on {self.edge[0]}->{self.edge[1]}: "
                f"<v,w>_x = {a} but <phi v, phi w>_y = {b} for v={_fmt(v)}, w={_fmt(w)}"
            )
        if self.verdict == OBSTRUCTED:
            return (
                f"obstructed: holonomy {_fmt_matrix(self.operator)} around {self.loop.vertices} "
                f"on block {list(self.support)} has |det| != 1"
            )
        if self.verdict == NO_OBSTRUCTION:
            return "no obstruction found (not a proof that an IP structure exists)"
        return "verified"


def _fmt(v) -> str:
    return "(" + ", ".join(str(c) for c in v) + ")"


def _fmt_matrix(a: Matrix) -> str:
    return "[" + "; ".join(" ".join(str(c) for c in r) for r in a.data) + "]"


# --------------------------------------------------------------------------
# checking


def _edge_violation(a: Matrix, gx: Gram, gy: Gram):
    n = a.cols
    k = kernel(a)
    perp = rel_orth_complement(k, full_space(n, a.field), gx, check=False)
    vs = perp.vectors
    imgs = [a.apply(v) for v in vs]
    for i in range(len(vs)):
        for j in range(i, len(vs)):
            lhs = gx.form(vs[i], vs[j])
            rhs = gy.form(imgs[i], imgs[j])
            if lhs != rhs:
                return (vs[i], vs[j]), (lhs, rhs)
    return None


def check_ipc(
    m: CModule,
    t: ModuleMorphismTable | None,
    w: WipStructure | Mapping[str, Gram],
    composites: bool = False,
) -> IpcReport:
    """Test the isometry-on-kernel-complement condition.

    Hasse edges are checked by default.  With ``composites=True`` every
    comparable pair x < y is checked as well, which is the full condition.
    """
    if not isinstance(w, WipStructure):
        w = WipStructure(dict(w))
    w.check_against(m)
    if composites:
        t = t or validate(m)
        pairs = [(x, y) for x, y in m.category.comparable_pairs() if x != y]
        maps = {e: t.composites[e] for e in pairs}
    else:
        pairs = list(m.category.hasse_edges)
        maps = m.edge_maps
    for e in pairs:
        x, y = e
        bad = _edge_violation(maps[e], w[x], w[y])
        if bad is not None:
            return IpcReport(VIOLATED, edge=e, witness=bad[0], values=bad[1])
    return IpcReport(VERIFIED)


# --------------------------------------------------------------------------
# construction


def _gram_from_basis(basis: Matrix, coords_gram: Matrix) -> Gram:
    """Gram whose matrix in the columns of ``basis`` is ``coords_gram``."""
    inv = inverse(basis)
    return Gram(inv.T @ coords_gram @ inv)


def _push(maps: Sequence[Matrix], grams: Sequence[Gram], n: int, f) -> Gram:
    """Gram on k^n pushed forward from the Gram direct sum of the sources
    along [A_1 | ... | A_k]: the orthogonal complement of the kernel maps
    isometrically onto the image; a pivot complement of the image gets the
    identity and is declared orthogonal to it."""
    psi = hstack(list(maps), n, f)
    g = Gram(block_diag([h.matrix for h in grams], f))
    k = kernel(psi)
    q = rel_orth_complement(k, full_space(psi.cols, f), g, check=False)
    img = [psi.apply(v) for v in q.vectors]
    comp = complement_in(span_of(img, n, f), full_space(n, f)).vectors
    basis = Matrix.from_columns(img + list(comp), n, f)
    qm = Matrix([[g.form(a, b) for b in q.vectors] for a in q.vectors], f, shape=(q.rank, q.rank))
    return _gram_from_basis(basis, block_diag([qm, Matrix.identity(len(comp), f)], f))


def _pull(maps: Sequence[Matrix], grams: Sequence[Gram], n: int, f) -> Gram:
    """Gram on k^n pulled back along the stacked map [A_1; ...; A_k] on a
    pivot complement of its kernel, identity on the kernel, the two
    declared orthogonal."""
    rows = [r for a in maps for r in a.data]
    phi = Matrix(rows, f, shape=(len(rows), n))
    g = block_diag([h.matrix for h in grams], f)
    k = kernel(phi)
    c = list(complement_in(k, full_space(n, f)).vectors)
    basis = Matrix.from_columns(c + list(k.vectors), n, f)
    if c:
        pc = phi @ Matrix.from_columns(c, n, f)
        pulled = pc.T @ g @ pc
    else:
        pulled = Matrix.zeros(0, 0, f)
    return _gram_from_basis(basis, block_diag([pulled, Matrix.identity(k.rank, f)], f))


def _sweep(m: CModule, t: ModuleMorphismTable, forward: bool, composites: bool) -> WipStructure:
    """Greedy sweep along a linear extension (reversed when ``forward`` is
    False).  At each object every neighbour it must be checked against is
    already fixed, so several candidate Grams are tried in turn (the joint
    push/pull over all Hasse neighbours, then each single neighbour) and
    the first one passing the local conditions is kept."""
    cat, f = m.category, m.field
    grams: dict[str, Gram] = {}
    order = cat.linear_extension if forward else list(reversed(cat.linear_extension))
    for x in order:
        n = m.dims[x]
        if forward:
            near = cat.predecessors(x)
            far = [z for z in cat.down_set(x) if z != x] if composites else near
            pairs = [(z, x) for z in far]
        else:
            near = cat.successors(x)
            far = [y for y in cat.up_set(x) if y != x] if composites else near
            pairs = [(x, y) for y in far]
        if not near or n == 0:
            grams[x] = Gram.identity(n, f)
            continue
        groups = [near] + [[z] for z in far] if len(near) > 1 or far != near else [near]
        cands = []
        for grp in groups:
            if forward:
                cands.append(_push([t.composites[(z, x)] for z in grp], [grams[z] for z in grp], n, f))
            else:
                cands.append(_pull([t.composites[(x, y)] for y in grp], [grams[y] for y in grp], n, f))
        chosen = cands[0]
        for g in cands:
            trial = dict(grams)
            trial[x] = g
            if all(_edge_violation(t.composites[e], trial[e[0]], trial[e[1]]) is None for e in pairs):
                chosen = g
                break
        grams[x] = chosen
    return WipStructure(grams)


def _block_lifts(m: CModule, ls, b) -> dict[str, Matrix] | None:
    """Lifts s_x = P_x + D_x C_x of a block's pieces with phi s_x = s_y T on
    support edges and phi s_x = 0 on edges leaving the support.  Returns
    None when the linear system has no solution."""
    from .multiflag import lower_sums

    f = m.field
    cat = m.category
    d = b.dim
    piece = {x: b.pieces[x].basis for x in b.support.ordered()}
    low = {}
    for x in b.support.ordered():
        low[x] = lower_sums(ls.flags[x])[b.members[x]].basis
    index = {}
    for x in b.support.ordered():
        for i in range(low[x].cols):
            for j in range(d):
                index[(x, i, j)] = len(index)
    nvar = len(index)
    eqs, rhs = [], []
    for e in cat.hasse_edges:
        x, y = e
        if x not in b.support:
            continue
        a = m.edge_maps[e]
        ad = a @ low[x]
        ap = a @ piece[x]
        if y in b.support:
            tr = b.transports[e]
            target = piece[y] @ tr
            for r in range(m.dims[y]):
                for c in range(d):
                    row = [f.zero] * nvar
                    for i in range(ad.cols):
                        row[index[(x, i, c)]] += ad[r, i]
                    for i in range(low[y].cols):
                        for j in range(d):
                            coef = low[y][r, i] * tr[j, c]
                            if coef:
                                row[index[(y, i, j)]] -= coef
                    eqs.append(row)
                    rhs.append(target[r, c] - ap[r, c])
        else:
            for r in range(m.dims[y]):
                for c in range(d):
                    row = [f.zero] * nvar
                    for i in range(ad.cols):
                        row[index[(x, i, c)]] += ad[r, i]
                    eqs.append(row)
                    rhs.append(-ap[r, c])
    if nvar == 0:
        sol = None
        if any(v != 0 for v in rhs):
            return None
    elif eqs:
        sol = solve(Matrix(eqs, f, shape=(len(eqs), nvar)), Matrix([[v] for v in rhs], f, shape=(len(rhs), 1)))
        if sol is None:
            return None
    else:
        sol = Matrix.zeros(nvar, 1, f)
    out = {}
    for x in b.support.ordered():
        cx = Matrix(
            [[sol[index[(x, i, j)], 0] for j in range(d)] for i in range(low[x].cols)],
            f,
            shape=(low[x].cols, d),
        )
        out[x] = piece[x] + low[x] @ cx if low[x].cols else piece[x]
    return out


def _by_decomposition(m: CModule, t: ModuleMorphismTable, max_iters: int) -> WipStructure | None:
    """Split M into blocks with explicit lifts and make the lifted,
    holonomy-trivialized frames orthonormal."""
    from .blocks import compatible_frames, enumerate_blocks
    from .local import compute

    ls = compute(m, t, max_iters)
    if not ls.stabilized or ls.total_excess != 0:
        return None
    try:
        blocks = enumerate_blocks(ls)
    except InconsistentDims:
        return None
    f = m.field
    cols: dict[str, list] = {x: [] for x in m.category.objects}
    for b in blocks:
        lifts = _block_lifts(m, ls, b)
        if lifts is None:
            return None
        frames = compatible_frames(b)
        for x in b.support.ordered():
            cols[x].extend((lifts[x] @ frames[x]).columns())
    grams = {}
    for x in m.category.objects:
        n = m.dims[x]
        basis = Matrix.from_columns(cols[x], n, f)
        if basis.shape != (n, n) or rank(basis) != n:
            return None
        grams[x] = _gram_from_basis(basis, Matrix.identity(n, f))
    return WipStructure(grams)


STRATEGIES = ("decomposition", "forward-sweep", "backward-sweep")


def construct_ip_persistence(
    m: CModule,
    t: ModuleMorphismTable | None = None,
    max_iters: int = 64,
    strategies: Sequence[str] = STRATEGIES,
    composites: bool = False,
) -> tuple[WipStructure, str]:
    """Build an IP structure for a module over a product of chains.

    Candidates are produced in order (block decomposition, forward pushout
    sweep, backward pullback sweep) and each is validated with
    :func:`check_ipc` (Hasse edges, or every comparable pair when
    ``composites`` is set); the first that passes is returned with the name
    of the strategy that produced it.  The decomposition strategy always
    yields a structure valid on composites too.
    """
    if not m.category.is_product_of_chains():
        raise NotProductOfChains("construction needs a product-of-chains category")
    if not m.field.is_rational:
        raise FieldError("inner-product structures are only defined over Q")
    t = t or validate(m)
    tried = []
    for name in strategies:
        if name == "decomposition":
            w = _by_decomposition(m, t, max_iters)
        elif name == "forward-sweep":
            w = _sweep(m, t, True, composites)
        elif name == "backward-sweep":
            w = _sweep(m, t, False, composites)
        else:
            raise ValueError(f"unknown strategy {name!r}")
        if w is None:
            tried.append(f"{name}: not applicable")
            continue
        rep = check_ipc(m, t, w, composites=composites)
        if rep.verdict == VERIFIED:
            return w, name
        tried.append(f"{name}: {rep.describe()}")
    raise IpcConstructionFailed("; ".join(tried))


# --------------------------------------------------------------------------
# obstructions


def obstruction_scan(ls, loops: Sequence[ZigZagLoop] | None = None) -> IpcReport:
    """Look for a block holonomy with |det| != 1.

    Holonomy operators act on graded quotients, so they do not depend on
    the complement chosen for the pieces.  Any IP structure would make
    them isometries, hence |det| = 1; finding another value rules IP
    structures out.  Not finding one proves nothing.
    """
    from .blocks import enumerate_blocks, loop_operator, support_loops

    if not ls.module.field.is_rational:
        raise FieldError("the determinant certificate needs Q")
    for b in enumerate_blocks(ls):
        cand = support_loops(b) if loops is None else [
            l for l in loops if all(v in b.support for v in l.vertices)
        ]
        for l in cand:
            op = loop_operator(b, l)
            if abs(det(op)) != 1:
                return IpcReport(OBSTRUCTED, loop=l, operator=op, support=b.key())
    return IpcReport(NO_OBSTRUCTION)
