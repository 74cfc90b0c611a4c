"""Finite simplicial complexes, diagrams of them, and homology functors.

Simplices are stored as tuples of vertices sorted by the complex's vertex
order.  A simplicial map acts on oriented simplices by the sign of the
permutation that sorts the image, or by 0 when two vertices collide.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .cmod import CModule, from_maps, validate
from .errors import SimplicialError
from .linalg import (
    QQ,
    Field,
    Gram,
    Matrix,
    Subspace,
    complement_in,
    image,
    kernel,
    project_coordinates,
    restrict_to,
)
from .poset import Edge, PosetCategory, gamma2


@dataclass(frozen=True)
class SimplicialComplex:
    vertices: tuple
    simplices: frozenset

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise SimplicialError("duplicate vertex")
        pos = {v: i for i, v in enumerate(self.vertices)}
        for s in self.simplices:
            if not s or any(v not in vs for v in s):
                raise SimplicialError(f"simplex {s} uses unknown vertices")
            if list(s) != sorted(s, key=pos.__getitem__) or len(set(s)) != len(s):
                raise SimplicialError(f"simplex {s} is not sorted by vertex order")
            for k in range(1, len(s)):
                for face in combinations(s, k):
                    if face not in self.simplices:
                        raise SimplicialError(f"face {face} of {s} missing")
        for v in self.vertices:
            if (v,) not in self.simplices:
                raise SimplicialError(f"vertex {v} has no 0-simplex")

    @classmethod
    def from_maximal(cls, vertices: Sequence, facets: Iterable[Iterable]) -> "SimplicialComplex":
        """Complex generated by the given simplices (all faces added)."""
        pos = {v: i for i, v in enumerate(vertices)}
        out = {(v,) for v in vertices}
        for f in facets:
            s = sorted(set(f), key=pos.__getitem__)
            for k in range(1, len(s) + 1):
                out.update(combinations(s, k))
        return cls(tuple(vertices), frozenset(out))

    def index(self, v) -> int:
        return self.vertices.index(v)

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def n_simplices(self, n: int) -> list[tuple]:
        pos = {v: i for i, v in enumerate(self.vertices)}
        return sorted((s for s in self.simplices if len(s) == n + 1), key=lambda s: [pos[v] for v in s])

    def euler_characteristic(self) -> int:
        return sum((-1) ** (len(s) - 1) for s in self.simplices)


@dataclass(frozen=True)
class SimplicialMap:
    source: SimplicialComplex
    target: SimplicialComplex
    vertex_map: Mapping

    def __post_init__(self):
        if set(self.vertex_map) != set(self.source.vertices):
            raise SimplicialError("vertex map must be defined on every source vertex")
        for s in self.source.simplices:
            img = self.image_simplex(s)
            if img not in self.target.simplices:
                raise SimplicialError(f"image of {s} is not a simplex of the target")

    def image_simplex(self, s: tuple) -> tuple:
        pos = {v: i for i, v in enumerate(self.target.vertices)}
        return tuple(sorted({self.vertex_map[v] for v in s}, key=pos.__getitem__))

    def is_injective(self) -> bool:
        return len(set(self.vertex_map.values())) == len(self.vertex_map)


def _sign_of_sort(seq: list[int]) -> int:
    sign = 1
    a = list(seq)
    for i in range(len(a)):
        for j in range(len(a) - 1 - i):
            if a[j] > a[j + 1]:
                a[j], a[j + 1] = a[j + 1], a[j]
                sign = -sign
    return sign


def boundary_matrix(c: SimplicialComplex, n: int, field: Field = QQ) -> Matrix:
    """Matrix of d_n: C_n -> C_{n-1}; column j is the boundary of the j-th
    n-simplex, with sign (-1)^i on the face omitting position i."""
    if n < 0:
        raise ValueError("n must be non-negative")
    cols_s = c.n_simplices(n)
    if n == 0:
        return Matrix.zeros(0, len(cols_s), field)
    rows_s = c.n_simplices(n - 1)
    row = {s: i for i, s in enumerate(rows_s)}
    data = [[field.zero] * len(cols_s) for _ in rows_s]
    for j, s in enumerate(cols_s):
        for i in range(len(s)):
            face = s[:i] + s[i + 1 :]
            data[row[face]][j] = field(-1 if i % 2 else 1)
    return Matrix(data, field, shape=(len(rows_s), len(cols_s)))


def chain_map(f: SimplicialMap, n: int, field: Field = QQ) -> Matrix:
    src = f.source.n_simplices(n)
    tgt = f.target.n_simplices(n)
    row = {s: i for i, s in enumerate(tgt)}
    pos = {v: i for i, v in enumerate(f.target.vertices)}
    data = [[field.zero] * len(src) for _ in tgt]
    for j, s in enumerate(src):
        img = [f.vertex_map[v] for v in s]
        if len(set(img)) < len(img):
            continue
        sgn = _sign_of_sort([pos[v] for v in img])
        data[row[f.image_simplex(s)]][j] = field(sgn)
    return Matrix(data, field, shape=(len(tgt), len(src)))


@dataclass(frozen=True)
class Homology:
    """H_n of one complex with a fixed basis of coset representatives."""

    cycles: Subspace
    boundaries: Subspace
    representatives: Subspace

    @property
    def dim(self) -> int:
        return self.representatives.rank

    def coordinates(self, z: Sequence) -> tuple:
        """Class of a cycle in the representative basis."""
        return project_coordinates(z, self.representatives, self.boundaries)


def homology(c: SimplicialComplex, n: int, field: Field = QQ) -> Homology:
    z = kernel(boundary_matrix(c, n, field))
    b = image(boundary_matrix(c, n + 1, field))
    return Homology(z, b, complement_in(b, z))


@dataclass(frozen=True)
class ComplexDiagram:
    category: PosetCategory
    complexes: Mapping[str, SimplicialComplex]
    maps: Mapping[Edge, SimplicialMap]

    def __post_init__(self):
        cat = self.category
        if set(self.complexes) != set(cat.objects):
            raise SimplicialError("every object needs a complex")
        if set(self.maps) != set(cat.hasse_edges):
            raise SimplicialError("every Hasse edge needs a simplicial map")
        for (x, y), f in self.maps.items():
            if f.source != self.complexes[x] or f.target != self.complexes[y]:
                raise SimplicialError(f"map on ({x}, {y}) has the wrong source or target")
        self.composites()

    def composites(self) -> dict[Edge, dict]:
        """Composed vertex maps for every comparable pair; raises on a
        functoriality violation."""
        cat = self.category
        out: dict[Edge, dict] = {}
        for x in cat.objects:
            out[(x, x)] = {v: v for v in self.complexes[x].vertices}
            up = set(cat.up_set(x))
            for y in cat.linear_extension:
                if y == x or y not in up:
                    continue
                found = None
                for p in cat.predecessors(y):
                    if p not in up:
                        continue
                    vm = self.maps[(p, y)].vertex_map
                    cand = {v: vm[w] for v, w in out[(x, p)].items()}
                    if found is None:
                        found = cand
                    elif cand != found:
                        raise SimplicialError(f"vertex maps {x} -> {y} disagree along different paths")
                out[(x, y)] = found
        return out

    def is_injective(self) -> bool:
        return all(f.is_injective() for f in self.maps.values())


def homology_functor(d: ComplexDiagram, n: int, field: Field = QQ) -> CModule:
    """H_n of the diagram as a module; maps in the representative bases."""
    hs = {x: homology(d.complexes[x], n, field) for x in d.category.objects}
    maps = {}
    for e, f in d.maps.items():
        x, y = e
        cm = chain_map(f, n, field)
        cols = [hs[y].coordinates(cm.apply(r)) for r in hs[x].representatives.vectors]
        maps[e] = Matrix.from_columns(cols, hs[y].dim, field)
    m = from_maps(d.category, {x: hs[x].dim for x in d.category.objects}, maps, field)
    validate(m)
    return m


@dataclass(frozen=True)
class IpcPresentation:
    boundaries: CModule
    cycles: CModule
    inclusion: Mapping[str, Matrix]
    boundary_grams: Mapping[str, Gram]
    cycle_grams: Mapping[str, Gram]

    def cokernel_dims(self) -> dict[str, int]:
        return {x: self.cycles.dims[x] - self.boundaries.dims[x] for x in self.cycles.category.objects}


def _dot_gram(w: Subspace, field: Field) -> Gram:
    b = w.basis
    return Gram(b.T @ b)


def ipc_presentation(d: ComplexDiagram, n: int, field: Field = QQ) -> IpcPresentation:
    """B_n inside Z_n, both as submodules of the chain module with the
    Gram matrices inherited from the simplex basis."""
    if not d.is_injective():
        raise SimplicialError("IPC presentation needs injective simplicial maps")
    cat = d.category
    hs = {x: homology(d.complexes[x], n, field) for x in cat.objects}
    cm = {e: chain_map(f, n, field) for e, f in d.maps.items()}

    def sub_module(attr):
        spaces = {x: getattr(hs[x], attr) for x in cat.objects}
        maps = {e: restrict_to(cm[e], spaces[e[0]], spaces[e[1]]) for e in cat.hasse_edges}
        return from_maps(cat, {x: spaces[x].rank for x in cat.objects}, maps, field), spaces

    bmod, bsp = sub_module("boundaries")
    zmod, zsp = sub_module("cycles")
    incl = {x: restrict_to(Matrix.identity(zsp[x].ambient_dim, field), bsp[x], zsp[x]) for x in cat.objects}
    return IpcPresentation(
        bmod,
        zmod,
        incl,
        {x: _dot_gram(bsp[x], field) for x in cat.objects},
        {x: _dot_gram(zsp[x], field) for x in cat.objects},
    )


def gallery_D7() -> ComplexDiagram:
    """Hexagon over Gamma_2 mapping to three triangle boundaries.

    x1 carries the hexagon w0..w5; x2, y1, y2 carry the triangle boundary
    t0 t1 t2.  x1 -> y1 wraps the hexagon twice around the triangle,
    x1 -> y2 collapses every other edge, and x2 -> y1, x2 -> y2 are the
    identity.
    """
    cat = gamma2()
    tri = SimplicialComplex.from_maximal(["t0", "t1", "t2"], [("t0", "t1"), ("t1", "t2"), ("t0", "t2")])
    ws = [f"w{i}" for i in range(6)]
    hexagon = SimplicialComplex.from_maximal(ws, [(ws[i], ws[(i + 1) % 6]) for i in range(6)])
    wrap = {f"w{i}": f"t{i % 3}" for i in range(6)}
    collapse = {"w0": "t0", "w1": "t1", "w2": "t1", "w3": "t2", "w4": "t2", "w5": "t0"}
    ident = {v: v for v in tri.vertices}
    return ComplexDiagram(
        cat,
        {"x1": hexagon, "x2": tri, "y1": tri, "y2": tri},
        {
            ("x1", "y1"): SimplicialMap(hexagon, tri, wrap),
            ("x1", "y2"): SimplicialMap(hexagon, tri, collapse),
            ("x2", "y1"): SimplicialMap(tri, tri, ident),
            ("x2", "y2"): SimplicialMap(tri, tri, ident),
        },
    )
