"""Local structure of a module: iterated kernels, images and preimages.

Stage 0 at an object x is the multi-flag generated by the kernels of all
maps out of x and the images of all maps into x (identities included).
Each later stage adds the preimages of the neighbours' members under the
outgoing composites and the images of their members under the incoming
composites.  The iteration either reaches a fixpoint or runs into the
configured caps; both outcomes are ordinary return values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .cmod import CModule, ModuleMorphismTable
from .errors import ClosureCapExceeded, DimensionMismatch
from .linalg import image, kernel, preimage
from .multiflag import DEFAULT_FLAG_CAP, MultiFlag, close, excess, extend

DEFAULT_MAX_ITERS = 64

STABILIZED = "stabilized"
CAP_HIT = "cap_hit"


@dataclass(frozen=True)
class FlagAssignment:
    per_object: Mapping[str, MultiFlag]

    def __getitem__(self, x):
        return self.per_object[x]

    def sizes(self) -> dict[str, int]:
        return {x: len(f) for x, f in self.per_object.items()}

    def __eq__(self, other):
        if not isinstance(other, FlagAssignment):
            return NotImplemented
        return dict(self.per_object) == dict(other.per_object)

    def __hash__(self):
        return hash(tuple(sorted(self.per_object.items())))


@dataclass(frozen=True)
class LocalStructure:
    module: CModule = field(repr=False)
    table: ModuleMorphismTable = field(repr=False)
    flags: FlagAssignment = field(repr=False)
    status: str
    index: int | None
    iterations: int
    trace: tuple = ()
    reason: str = ""

    @property
    def per_object(self) -> Mapping[str, MultiFlag]:
        return self.flags.per_object

    @property
    def stabilized(self) -> bool:
        return self.status == STABILIZED

    def excess_at(self, x: str) -> int:
        return excess(self.flags[x])

    @property
    def total_excess(self) -> int | None:
        """Sum of per-object excesses; None while not stabilized."""
        if not self.stabilized:
            return None
        return sum(self.excess_at(x) for x in self.module.category.objects)


def initial_flag(m: CModule, t: ModuleMorphismTable, cap: int = DEFAULT_FLAG_CAP) -> FlagAssignment:
    out = {}
    for x in m.category.objects:
        gens = [kernel(a) for _, a in t.outgoing(x)]
        gens += [image(a) for _, a in t.incoming(x)]
        out[x] = close(m.dims[x], gens, m.field, cap)
    return FlagAssignment(out)


def refine_step(
    m: CModule, t: ModuleMorphismTable, current: FlagAssignment, cap: int = DEFAULT_FLAG_CAP
) -> FlagAssignment:
    out = {}
    for x in m.category.objects:
        gens = []
        for y, a in t.outgoing(x):
            if y != x:
                gens.extend(preimage(a, w) for w in current[y].members)
        for z, a in t.incoming(x):
            if z != x:
                gens.extend(image(a, w) for w in current[z].members)
        out[x] = extend(current[x], gens, cap)
    return FlagAssignment(out)


def _iterate(
    m: CModule,
    t: ModuleMorphismTable,
    start: FlagAssignment,
    max_iters: int,
    cap: int,
) -> LocalStructure:
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    cur = start
    trace = [cur.sizes()]
    for n in range(max_iters):
        try:
            nxt = refine_step(m, t, cur, cap)
        except ClosureCapExceeded as exc:
            return LocalStructure(m, t, cur, CAP_HIT, None, n, tuple(trace), str(exc))
        if nxt == cur:
            return LocalStructure(m, t, cur, STABILIZED, n, n + 1, tuple(trace))
        cur = nxt
        trace.append(cur.sizes())
    return LocalStructure(
        m, t, cur, CAP_HIT, None, max_iters, tuple(trace), f"no fixpoint after {max_iters} refinements"
    )


def compute(
    m: CModule,
    t: ModuleMorphismTable,
    max_iters: int = DEFAULT_MAX_ITERS,
    cap: int = DEFAULT_FLAG_CAP,
) -> LocalStructure:
    """Iterate refinement from the initial flag until nothing changes.

    ``index`` is the first stage N with F_{N+1} = F_N.  On CapHit ``trace``
    holds the per-object flag sizes of every stage reached.
    """
    try:
        start = initial_flag(m, t, cap)
    except ClosureCapExceeded as exc:
        empty = FlagAssignment({})
        return LocalStructure(m, t, empty, CAP_HIT, None, 0, (), str(exc))
    return _iterate(m, t, start, max_iters, cap)


def relative_compute(
    m: CModule,
    t: ModuleMorphismTable,
    f: FlagAssignment | Mapping,
    max_iters: int = DEFAULT_MAX_ITERS,
    cap: int = DEFAULT_FLAG_CAP,
) -> LocalStructure:
    """Local structure relative to a seed assignment.

    ``f`` maps objects to a MultiFlag or to any iterable of subspaces; the
    seed at x is the closure of the initial flag together with f(x).
    """
    per = f.per_object if isinstance(f, FlagAssignment) else f
    start = initial_flag(m, t, cap)
    seeded = {}
    for x in m.category.objects:
        extra = list(per.get(x, ()))
        for w in extra:
            if w.ambient_dim != m.dims[x]:
                raise DimensionMismatch(f"seed subspace at {x} has the wrong ambient dimension")
        seeded[x] = extend(start[x], extra, cap)
    return _iterate(m, t, FlagAssignment(seeded), max_iters, cap)
