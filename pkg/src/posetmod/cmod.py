"""Concrete modules over poset categories.

A :class:`CModule` assigns a dimension to every object and a matrix to
every Hasse edge.  :func:`validate` checks that all composites along
different directed paths agree and returns the table of composites, which
every later stage reads from.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from .errors import CategoryError, DimensionMismatch, IncomparablePair, PathConflict
from .linalg import QQ, Field, Matrix, block_diag, kernel
from .poset import Edge, PosetCategory, Subcategory

SCALAR_POOL = (-2, -1, 0, 1, 2)


@dataclass(frozen=True)
class CModule:
    category: PosetCategory
    field: Field
    dims: Mapping[str, int]
    edge_maps: Mapping[Edge, Matrix]

    def __post_init__(self):
        cat = self.category
        if set(self.dims) != set(cat.objects):
            raise DimensionMismatch("dims must list every object exactly once")
        if set(self.edge_maps) != set(cat.hasse_edges):
            raise DimensionMismatch("edge_maps must cover exactly the Hasse edges")
        for (x, y), m in self.edge_maps.items():
            if m.shape != (self.dims[y], self.dims[x]):
                raise DimensionMismatch(
                    f"map on ({x}, {y}) has shape {m.shape}, expected {(self.dims[y], self.dims[x])}"
                )
            if m.field != self.field:
                raise DimensionMismatch(f"map on ({x}, {y}) is over the wrong field")

    def __eq__(self, other):
        if not isinstance(other, CModule):
            return NotImplemented
        return (
            self.category == other.category
            and self.field == other.field
            and dict(self.dims) == dict(other.dims)
            and dict(self.edge_maps) == dict(other.edge_maps)
        )

    def __hash__(self):
        return hash((self.category, self.field, tuple(sorted(self.dims.items()))))

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def __repr__(self):
        d = ", ".join(f"{x}:{self.dims[x]}" for x in self.category.objects)
        return f"CModule({self.field.describe()}; {d})"


@dataclass(frozen=True)
class ModuleMorphismTable:
    """All composites ``M(x <= y)``, identities included."""

    module: CModule
    composites: Mapping[Edge, Matrix]

    def __call__(self, x: str, y: str) -> Matrix:
        return composite(self, x, y)

    def outgoing(self, x: str) -> list[tuple[str, Matrix]]:
        return [(y, self.composites[(x, y)]) for y in self.module.category.up_set(x)]

    def incoming(self, x: str) -> list[tuple[str, Matrix]]:
        return [(z, self.composites[(z, x)]) for z in self.module.category.down_set(x)]


def validate(m: CModule) -> ModuleMorphismTable:
    """Check functoriality with one forward sweep per source object."""
    cat = m.category
    comps: dict[Edge, Matrix] = {}
    order = cat.linear_extension
    for x in cat.objects:
        comps[(x, x)] = Matrix.identity(m.dims[x], m.field)
        up = set(cat.up_set(x))
        for y in order:
            if y == x or y not in up:
                continue
            found = None
            for p in cat.predecessors(y):
                if p not in up:
                    continue
                cand = m.edge_maps[(p, y)] @ comps[(x, p)]
                if found is None:
                    found = cand
                elif cand != found:
                    for i in range(cand.rows):
                        for j in range(cand.cols):
                            if cand[i, j] != found[i, j]:
                                raise PathConflict(x, y, (i, j), found[i, j], cand[i, j])
            comps[(x, y)] = found
    return ModuleMorphismTable(m, comps)


def composite(t: ModuleMorphismTable, x: str, y: str) -> Matrix:
    try:
        return t.composites[(x, y)]
    except KeyError:
        raise IncomparablePair(f"{x} is not below {y}") from None


def from_maps(cat: PosetCategory, dims: Mapping[str, int], maps: Mapping[Edge, object], field: Field = QQ) -> CModule:
    """Build a module from nested lists (or Matrix values) per Hasse edge.

    Edges omitted from ``maps`` get zero matrices.
    """
    edge_maps = {}
    for x, y in cat.hasse_edges:
        raw = maps.get((x, y))
        shape = (dims[y], dims[x])
        if raw is None:
            edge_maps[(x, y)] = Matrix.zeros(*shape, field)
        elif isinstance(raw, Matrix):
            edge_maps[(x, y)] = raw
        else:
            edge_maps[(x, y)] = Matrix(raw, field, shape=shape)
    return CModule(cat, field, dict(dims), edge_maps)


def zero_module(cat: PosetCategory, field: Field = QQ) -> CModule:
    return from_maps(cat, {x: 0 for x in cat.objects}, {}, field)


def direct_sum(a: CModule, b: CModule) -> CModule:
    if a.category != b.category or a.field != b.field:
        raise CategoryError("direct sum needs modules over the same category and field")
    dims = {x: a.dims[x] + b.dims[x] for x in a.category.objects}
    maps = {e: block_diag([a.edge_maps[e], b.edge_maps[e]], a.field) for e in a.category.hasse_edges}
    return CModule(a.category, a.field, dims, maps)


def direct_sum_all(mods: list[CModule]) -> CModule:
    out = mods[0]
    for m in mods[1:]:
        out = direct_sum(out, m)
    return out


def restrict(m: CModule, s: Subcategory, t: ModuleMorphismTable | None = None) -> CModule:
    """The functor restricted to a full admissible subcategory.

    Hasse edges of the subcategory that are composites in the parent take
    the composite matrix.
    """
    m.category.require_admissible(s)
    t = t or validate(m)
    sub = m.category.induced(s)
    dims = {x: m.dims[x] for x in sub.objects}
    maps = {e: t.composites[e] for e in sub.hasse_edges}
    return CModule(sub, m.field, dims, maps)


def gbc_module(cat: PosetCategory, s: Subcategory, field: Field = QQ) -> CModule:
    """Generalized barcode: k on ``s``, identities inside, zero elsewhere."""
    cat.require_admissible(s)
    dims = {x: (1 if x in s else 0) for x in cat.objects}
    maps = {(x, y): [[1]] for x, y in cat.hasse_edges if x in s and y in s}
    return from_maps(cat, dims, maps, field)


def _draw(rng: random.Random, field: Field):
    if field.is_rational:
        return field(rng.choice(SCALAR_POOL))
    return field(rng.randrange(field.p))


def random_module(
    cat: PosetCategory,
    max_dim: int,
    seed,
    field: Field = QQ,
    min_dim: int = 0,
) -> CModule:
    """Reproducible random module.

    Objects are visited in the category's linear extension.  At each new
    object t the incoming Hasse maps, stacked side by side as one matrix
    A = [A_1 | ... | A_k], must satisfy A_i M(x->p_i) = A_j M(x->p_j) for
    every x below two predecessors; the rows of A are drawn as random
    combinations (coefficients from the scalar pool) of a basis of the
    solution space, so every draw commutes by construction.
    """
    rng = random.Random(seed)
    dims = {x: rng.randint(min_dim, max_dim) for x in cat.objects}
    maps: dict[Edge, Matrix] = {}
    comps: dict[Edge, Matrix] = {}
    for t in cat.linear_extension:
        comps[(t, t)] = Matrix.identity(dims[t], field)
        preds = cat.predecessors(t)
        offsets = []
        total = 0
        for p in preds:
            offsets.append(total)
            total += dims[p]
        constraints = []
        below = {}
        for i, p in enumerate(preds):
            for x in cat.down_set(p):
                below.setdefault(x, []).append(i)
        z = field.zero
        for x, idxs in below.items():
            for a, b in zip(idxs, idxs[1:]):
                ca, cb = comps[(x, preds[a])], comps[(x, preds[b])]
                for col in range(dims[x]):
                    v = [z] * total
                    for r in range(dims[preds[a]]):
                        v[offsets[a] + r] = ca[r, col]
                    for r in range(dims[preds[b]]):
                        v[offsets[b] + r] = v[offsets[b] + r] - cb[r, col]
                    constraints.append(v)
        if constraints:
            sol = kernel(Matrix(constraints, field, shape=(len(constraints), total))).vectors
        else:
            sol = tuple(
                tuple(field.one if j == i else z for j in range(total)) for i in range(total)
            )
        rows = []
        for _ in range(dims[t]):
            row = [z] * total
            for v in sol:
                c = _draw(rng, field)
                if c:
                    row = [a + c * b for a, b in zip(row, v)]
            rows.append(row)
        for i, p in enumerate(preds):
            mat = Matrix(
                [r[offsets[i] : offsets[i] + dims[p]] for r in rows], field, shape=(dims[t], dims[p])
            )
            maps[(p, t)] = mat
            for x in cat.down_set(p):
                if (x, t) not in comps:
                    comps[(x, t)] = mat @ comps[(x, p)]
    return CModule(cat, field, dims, maps)


def is_module_morphism(a: CModule, b: CModule, f: Mapping[str, Matrix]) -> bool:
    """Whether the per-object matrices ``f[x]: a(x) -> b(x)`` commute with
    every Hasse edge."""
    for e in a.category.hasse_edges:
        x, y = e
        if b.edge_maps[e] @ f[x] != f[y] @ a.edge_maps[e]:
            return False
    return True
