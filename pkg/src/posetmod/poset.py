"""Finite poset categories given by their Hasse diagrams.

A :class:`PosetCategory` stores the atomic morphisms (Hasse edges) and
derives the order relation from them.  Besides validation this module
answers structural questions used elsewhere: admissibility of full
subcategories, fundamental zig-zag loops, recognition of products of
chains, and a bounded search for strong holonomy-freeness.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from .errors import CategoryError, InadmissibleSubcategory, PathCountExceeded

Edge = tuple[str, str]

YES = "yes"
UNKNOWN = "unknown"

DEFAULT_PATH_GUARD = 10**6


@dataclass(frozen=True)
class ZigZagLoop:
    """Closed walk in the Hasse graph.

    ``steps[i] = ((src, dst), forward)``; a forward step walks src -> dst,
    a backward step walks dst -> src against the arrow.
    """

    steps: tuple

    @property
    def vertices(self) -> list[str]:
        out = []
        for (s, d), fwd in self.steps:
            out.append(s if fwd else d)
        return out

    @property
    def base(self) -> str:
        return self.vertices[0]

    def zigzag_length(self) -> int:
        """Number of maximal same-direction runs around the loop."""
        dirs = [fwd for _, fwd in self.steps]
        if len(set(dirs)) <= 1:
            return 1 if dirs else 0
        return sum(1 for i in range(len(dirs)) if dirs[i] != dirs[i - 1])

    def is_closed(self) -> bool:
        vs = self.vertices
        for i, ((s, d), fwd) in enumerate(self.steps):
            end = d if fwd else s
            if end != vs[(i + 1) % len(vs)]:
                return False
        return True

    def is_simple(self) -> bool:
        vs = self.vertices
        return len(set(vs)) == len(vs)


@dataclass(frozen=True)
class Subcategory:
    """Full subcategory on a set of objects."""

    parent: "PosetCategory" = field(repr=False, compare=False)
    objects: frozenset

    def ordered(self) -> list[str]:
        return [x for x in self.parent.objects if x in self.objects]

    def key(self) -> tuple:
        return tuple(self.ordered())

    def __len__(self):
        return len(self.objects)

    def __contains__(self, x):
        return x in self.objects


class PosetCategory:
    """Connected finite poset, presented by its Hasse diagram."""

    def __init__(self, objects: Sequence[str], hasse_edges: Iterable[Edge], *, _grid=None):
        self.objects = tuple(str(o) for o in objects)
        self.hasse_edges = tuple((str(a), str(b)) for a, b in hasse_edges)
        self.index = {o: i for i, o in enumerate(self.objects)}
        self._grid = _grid
        self._validate()

    # -- construction ------------------------------------------------------

    def _validate(self):
        if len(set(self.objects)) != len(self.objects):
            raise CategoryError("duplicate object names")
        if not self.objects:
            raise CategoryError("a category needs at least one object")
        g = nx.DiGraph()
        g.add_nodes_from(self.objects)
        for a, b in self.hasse_edges:
            if a not in self.index or b not in self.index:
                raise CategoryError(f"edge ({a}, {b}) uses an unknown object")
            if a == b:
                raise CategoryError(f"self-loop at {a}")
            if g.has_edge(a, b):
                raise CategoryError(f"duplicate edge ({a}, {b})")
            g.add_edge(a, b)
        if not nx.is_directed_acyclic_graph(g):
            cyc = nx.find_cycle(g)
            raise CategoryError(f"cycle detected: {cyc}")
        if not nx.is_weakly_connected(g):
            raise CategoryError("the Hasse graph is disconnected")
        for a, b in self.hasse_edges:
            g.remove_edge(a, b)
            implied = nx.has_path(g, a, b)
            g.add_edge(a, b)
            if implied:
                raise CategoryError(f"edge ({a}, {b}) is implied by a composite")
        self.graph = g

    @classmethod
    def from_hasse(cls, objects: Sequence[str], edges: Iterable[Edge]) -> "PosetCategory":
        return cls(objects, edges)

    # -- order relation ----------------------------------------------------

    @cached_property
    def _up(self) -> dict[str, frozenset]:
        out = {}
        for x in reversed(list(nx.topological_sort(self.graph))):
            s = {x}
            for y in self.graph.successors(x):
                s |= out[y]
            out[x] = frozenset(s)
        return out

    def leq(self, x: str, y: str) -> bool:
        return y in self._up[x]

    def up_set(self, x: str) -> list[str]:
        return [y for y in self.objects if y in self._up[x]]

    def down_set(self, x: str) -> list[str]:
        return [y for y in self.objects if x in self._up[y]]

    def comparable_pairs(self) -> list[Edge]:
        """All (x, y) with x <= y, including identities, in declared order."""
        return [(x, y) for x in self.objects for y in self.up_set(x)]

    def successors(self, x: str) -> list[str]:
        return sorted(self.graph.successors(x), key=self.index.__getitem__)

    def predecessors(self, x: str) -> list[str]:
        return sorted(self.graph.predecessors(x), key=self.index.__getitem__)

    @cached_property
    def linear_extension(self) -> list[str]:
        """Topological order breaking ties by declared object order."""
        return list(nx.lexicographical_topological_sort(self.graph, key=self.index.__getitem__))

    def is_chain(self) -> bool:
        return all(self.graph.out_degree(x) <= 1 and self.graph.in_degree(x) <= 1 for x in self.objects)

    def chain_order(self) -> list[str]:
        if not self.is_chain():
            raise CategoryError("category is not a chain")
        return self.linear_extension

    # -- subcategories -----------------------------------------------------

    def sub(self, objects: Iterable[str]) -> Subcategory:
        objs = frozenset(objects)
        unknown = objs - set(self.objects)
        if unknown:
            raise CategoryError(f"unknown objects {sorted(unknown)}")
        return Subcategory(self, objs)

    def full(self) -> Subcategory:
        return Subcategory(self, frozenset(self.objects))

    def induced(self, s: Subcategory | Iterable[str]) -> "PosetCategory":
        """The full subcategory as a category of its own (Hasse edges
        recomputed inside the subset)."""
        objs = s.objects if isinstance(s, Subcategory) else frozenset(s)
        ordered = [x for x in self.objects if x in objs]
        edges = []
        for x in ordered:
            for y in ordered:
                if x != y and self.leq(x, y):
                    if not any(z != x and z != y and self.leq(x, z) and self.leq(z, y) for z in ordered):
                        edges.append((x, y))
        return PosetCategory(ordered, edges)

    def is_admissible(self, s: Subcategory | Iterable[str], path_guard: int = DEFAULT_PATH_GUARD) -> bool:
        """Connected and pathwise full.

        Pathwise fullness on full subcategories reduces to convexity: every
        object lying on a directed path between two members is a member.
        Paths are counted (with memoized reachability) only to honour
        ``path_guard``.
        """
        objs = s.objects if isinstance(s, Subcategory) else frozenset(s)
        if not objs:
            return False
        if not nx.is_weakly_connected(self.graph.subgraph(objs)):
            return False
        count = 0
        for u in objs:
            for v in objs:
                if u == v or not self.leq(u, v):
                    continue
                for w in self.objects:
                    if w in objs:
                        continue
                    count += 1
                    if count > path_guard:
                        raise PathCountExceeded(f"admissibility check exceeded {path_guard} steps")
                    if self.leq(u, w) and self.leq(w, v):
                        return False
        return True

    def require_admissible(self, s: Subcategory):
        if not self.is_admissible(s):
            raise InadmissibleSubcategory(f"{s.ordered()} is not admissible")

    # -- loops -------------------------------------------------------------

    def _loop_from_vertices(self, cyc: list[str]) -> ZigZagLoop:
        i0 = min(range(len(cyc)), key=lambda i: self.index[cyc[i]])
        cyc = cyc[i0:] + cyc[:i0]
        if len(cyc) > 2 and self.index[cyc[-1]] < self.index[cyc[1]]:
            cyc = [cyc[0]] + cyc[1:][::-1]
        steps = []
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if self.graph.has_edge(a, b):
                steps.append(((a, b), True))
            else:
                steps.append(((b, a), False))
        return ZigZagLoop(tuple(steps))

    def cycle_basis(self, within: Iterable[str] | None = None) -> list[ZigZagLoop]:
        """Fundamental cycles of the undirected Hasse graph.

        Each loop starts at its earliest declared object and heads first to
        the earlier-declared of its two neighbours.
        """
        nodes = self.objects if within is None else [x for x in self.objects if x in set(within)]
        ug = nx.Graph()
        ug.add_nodes_from(nodes)
        ug.add_edges_from((a, b) for a, b in self.hasse_edges if a in ug and b in ug)
        root = nodes[0] if nodes else None
        loops = [self._loop_from_vertices(list(c)) for c in nx.cycle_basis(ug, root)]
        return sorted(loops, key=lambda l: [self.index[v] for v in l.vertices])

    # -- products of chains --------------------------------------------------

    @cached_property
    def product_shape(self) -> tuple[tuple[int, ...], dict[str, tuple[int, ...]]] | None:
        """``(shape, coords)`` when the poset is a product of chains.

        ``coords`` sends each object to its multi-index.  Categories built by
        :func:`grid` carry their coordinates; others are matched against
        every candidate grid of the right size.
        """
        if self._grid is not None:
            return self._grid
        n = len(self.objects)
        if n == 1:
            return ((1,), {self.objects[0]: (0,)})
        mins = [x for x in self.objects if self.graph.in_degree(x) == 0]
        if len(mins) != 1:
            return None
        ndims = self.graph.out_degree(mins[0])
        for shape in _factorizations(n, ndims):
            cand = grid(*shape)
            if cand.graph.number_of_edges() != self.graph.number_of_edges():
                continue
            m = DiGraphMatcher(self.graph, cand.graph)
            if m.is_isomorphic():
                ccoords = cand._grid[1]
                return (shape, {x: ccoords[m.mapping[x]] for x in self.objects})
        return None

    def is_product_of_chains(self) -> bool:
        return self.product_shape is not None

    # -- export --------------------------------------------------------------

    def to_dot(self, highlight: Iterable[Iterable[str]] = ()) -> str:
        palette = ["lightblue", "lightpink", "palegreen", "khaki", "plum", "lightsalmon"]
        colors: dict[str, str] = {}
        for i, objs in enumerate(highlight):
            for x in objs:
                colors.setdefault(x, palette[i % len(palette)])
        lines = ["digraph G {"]
        for x in self.objects:
            attr = f' [style=filled, fillcolor="{colors[x]}"]' if x in colors else ""
            lines.append(f'  "{x}"{attr};')
        for a, b in self.hasse_edges:
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        if not isinstance(other, PosetCategory):
            return NotImplemented
        return self.objects == other.objects and set(self.hasse_edges) == set(other.hasse_edges)

    def __hash__(self):
        return hash((self.objects, frozenset(self.hasse_edges)))

    def __repr__(self):
        return f"PosetCategory({len(self.objects)} objects, {len(self.hasse_edges)} edges)"


def from_hasse(objects: Sequence[str], edges: Iterable[Edge]) -> PosetCategory:
    return PosetCategory(objects, edges)


def _factorizations(n: int, k: int, lo: int = 2):
    """Non-decreasing k-tuples of integers >= lo whose product is n."""
    if k == 0:
        if n == 1:
            yield ()
        return
    for f in range(lo, n + 1):
        if n % f == 0:
            for rest in _factorizations(n // f, k - 1, f):
                yield (f,) + rest


def grid_name(idx: Sequence[int]) -> str:
    return ",".join(str(i) for i in idx)


def grid(*shape: int) -> PosetCategory:
    """Product of chains of the given lengths (an n-D persistence category).

    Objects are named ``"i,j,..."`` with 0-based coordinates.
    """
    coords = list(itertools.product(*(range(m) for m in shape)))
    names = [grid_name(c) for c in coords]
    edges = []
    for c in coords:
        for d in range(len(shape)):
            if c[d] + 1 < shape[d]:
                e = list(c)
                e[d] += 1
                edges.append((grid_name(c), grid_name(e)))
    return PosetCategory(
        names, edges, _grid=(tuple(shape), {grid_name(c): tuple(c) for c in coords})
    )


def chain(n: int) -> PosetCategory:
    """The totally ordered category 1 < 2 < ... < n, objects named "1".."n"."""
    names = [str(i) for i in range(1, n + 1)]
    return PosetCategory(names, list(zip(names, names[1:])))


def zigzag_grid(*directions: Sequence[bool]) -> PosetCategory:
    """Product of zig-zag posets.

    ``directions[d][i]`` is True when coordinate d has i < i+1 and False when
    i > i+1.  Objects are named like :func:`grid`.
    """
    shape = [len(ds) + 1 for ds in directions]
    coords = list(itertools.product(*(range(m) for m in shape)))
    edges = []
    for c in coords:
        for d in range(len(shape)):
            if c[d] + 1 < shape[d]:
                e = list(c)
                e[d] += 1
                a, b = grid_name(c), grid_name(e)
                edges.append((a, b) if directions[d][c[d]] else (b, a))
    return PosetCategory([grid_name(c) for c in coords], edges)


def gamma1() -> PosetCategory:
    """Commuting square: one initial and one terminal object."""
    return PosetCategory(["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])


def gamma2() -> PosetCategory:
    """Two sources x1, x2 each mapping to two sinks y1, y2."""
    return PosetCategory(
        ["x1", "x2", "y1", "y2"], [("x1", "y1"), ("x1", "y2"), ("x2", "y1"), ("x2", "y2")]
    )


# --------------------------------------------------------------------------
# strong holonomy-freeness


def _normalize(cat: PosetCategory, loop: tuple) -> list[tuple]:
    """Shorten a cyclic vertex sequence without changing its holonomy.

    Drops spurs (a, b, a) and any vertex whose two neighbours are comparable
    (three pairwise comparable objects form a commuting triangle).  Loops
    revisiting a vertex split into two loops there.
    """
    work = [list(loop)]
    done = []
    while work:
        cyc = work.pop()
        changed = True
        while changed and len(cyc) > 2:
            changed = False
            n = len(cyc)
            for i in range(n):
                a, c = cyc[i - 1], cyc[(i + 1) % n]
                if a == c:
                    drop = {i, (i + 1) % n}
                elif cat.leq(a, c) or cat.leq(c, a):
                    drop = {i}
                else:
                    continue
                cyc = [v for j, v in enumerate(cyc) if j not in drop]
                changed = True
                break
            if not changed:
                seen = {}
                for i, v in enumerate(cyc):
                    if v in seen:
                        j = seen[v]
                        work.append(cyc[j:i])
                        cyc = cyc[:j] + cyc[i:]
                        changed = True
                        break
                    seen[v] = i
        if len(cyc) > 2:
            done.append(_canon_cycle(cat, cyc))
    return sorted(done)


def _canon_cycle(cat: PosetCategory, cyc: list[str]) -> tuple:
    idx = [cat.index[v] for v in cyc]
    best = None
    n = len(idx)
    for seq in (idx, idx[::-1]):
        for r in range(n):
            cand = tuple(seq[r:] + seq[:r])
            if best is None or cand < best:
                best = cand
    return tuple(cat.objects[i] for i in best)


def _moves(cat: PosetCategory, cyc: tuple):
    """Elementary homotopies: a local source A between C and B becomes a
    common upper bound D, a local sink D becomes a common lower bound A."""
    n = len(cyc)
    for i in range(n):
        c, a, b = cyc[i - 1], cyc[i], cyc[(i + 1) % n]
        if cat.leq(a, c) and cat.leq(a, b):
            for d in cat.objects:
                if d != a and cat.leq(c, d) and cat.leq(b, d):
                    yield cyc[:i] + (d,) + cyc[i + 1 :]
        if cat.leq(c, a) and cat.leq(b, a):
            for d in cat.objects:
                if d != a and cat.leq(d, c) and cat.leq(d, b):
                    yield cyc[:i] + (d,) + cyc[i + 1 :]


def _loop_reduces(cat: PosetCategory, start: tuple, budget: int) -> bool:
    start_state = tuple(_normalize(cat, start))
    if not start_state:
        return True
    seen = {start_state}
    queue = deque([start_state])
    used = 0
    while queue:
        state = queue.popleft()
        for k, cyc in enumerate(state):
            for new in _moves(cat, cyc):
                used += 1
                if used > budget:
                    return False
                parts = _normalize(cat, new)
                nxt = tuple(sorted(list(state[:k]) + list(state[k + 1 :]) + parts))
                if not nxt:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return False


def strongly_h_free(cat: PosetCategory, budget: int = 10_000) -> str:
    """``"yes"`` when every fundamental loop contracts under elementary
    homotopies within ``budget`` rewrites, otherwise ``"unknown"``.

    Products of chains are answered directly without searching.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    if cat.is_product_of_chains():
        return YES
    for loop in cat.cycle_basis():
        if not _loop_reduces(cat, tuple(loop.vertices), budget):
            return UNKNOWN
    return YES
