"""Multi-flags: intersection-closed families of subspaces of one space.

The associated graded of a multi-flag assigns to each member W a
complement of the sum of the members strictly inside W.  The dimensions of
these pieces do not depend on how the complement is chosen, which is what
makes :func:`excess` a purely combinatorial quantity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ClosureCapExceeded, DimensionMismatch
from .linalg import (
    QQ,
    Field,
    Gram,
    Subspace,
    complement_in,
    full_space,
    intersect,
    rel_orth_complement,
    sum_all,
    zero_space,
)

DEFAULT_FLAG_CAP = 4096


@dataclass(frozen=True)
class MultiFlag:
    ambient_dim: int
    members: tuple
    field: Field = QQ

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, w: Subspace):
        return w in self._set

    @property
    def _set(self) -> frozenset:
        s = self.__dict__.get("_memberset")
        if s is None:
            s = frozenset(self.members)
            object.__setattr__(self, "_memberset", s)
        return s

    def is_semi_flag(self) -> bool:
        return all(a <= b for a, b in zip(self.members, self.members[1:]))


@dataclass(frozen=True)
class GradedDecomposition:
    flag: MultiFlag
    pieces: Mapping[Subspace, Subspace]
    lower_sums: Mapping[Subspace, Subspace]
    excess: int
    policy: str

    def piece_dim(self, w: Subspace) -> int:
        return self.pieces[w].rank

    def piece_dims(self) -> list[int]:
        return [self.pieces[w].rank for w in self.flag.members]


def _sorted(members: Iterable[Subspace]) -> tuple:
    return tuple(sorted(members, key=Subspace.key))


def close(
    ambient_dim: int,
    generators: Iterable[Subspace],
    field: Field = QQ,
    cap: int = DEFAULT_FLAG_CAP,
) -> MultiFlag:
    """Smallest intersection-closed family containing the generators, 0 and V."""
    members = {zero_space(ambient_dim, field), full_space(ambient_dim, field)}
    work = []
    for g in generators:
        if g.ambient_dim != ambient_dim:
            raise DimensionMismatch("generator outside the ambient space")
        if g not in members:
            members.add(g)
            work.append(g)
    return _saturate(members, work, ambient_dim, field, cap)


def _saturate(members: set, work: list, ambient_dim: int, field: Field, cap: int) -> MultiFlag:
    if len(members) > cap:
        raise ClosureCapExceeded(cap, len(members))
    while work:
        w = work.pop()
        for u in list(members):
            if u is w or u.rank in (0, ambient_dim):
                continue  # the intersection is already a member
            v = intersect(u, w)
            if v not in members:
                members.add(v)
                work.append(v)
                if len(members) > cap:
                    raise ClosureCapExceeded(cap, len(members))
    return MultiFlag(ambient_dim, _sorted(members), field)


def extend(f: MultiFlag, extra: Iterable[Subspace], cap: int = DEFAULT_FLAG_CAP) -> MultiFlag:
    """Close ``f`` together with more generators, reusing f's closedness."""
    members = set(f.members)
    work = []
    for g in extra:
        if g not in members:
            members.add(g)
            work.append(g)
    if not work:
        return f
    return _saturate(members, work, f.ambient_dim, f.field, cap)


def lower_sums(f: MultiFlag) -> dict[Subspace, Subspace]:
    """Sum of the members strictly contained in each member (0 if none).

    Members are visited by increasing rank so each sum can be assembled
    from the maximal proper sub-members and their own, already known, sums.
    The result is cached on the (immutable) flag.
    """
    cached = f.__dict__.get("_lower_sums")
    if cached is not None:
        return dict(cached)
    out: dict[Subspace, Subspace] = {}
    done: list[Subspace] = []
    for w in f.members:
        below = [u for u in done if u.rank < w.rank and u <= w]
        maximal = [u for u in below if not any(u.rank < v.rank and u <= v for v in below)]
        out[w] = sum_all(maximal, f.ambient_dim, f.field)
        done.append(w)
    object.__setattr__(f, "_lower_sums", out)
    return dict(out)


def graded(f: MultiFlag, gram: Gram | None = None) -> GradedDecomposition:
    """Associated graded pieces of ``f``.

    With a Gram matrix each piece is the relative orthogonal complement of
    the lower sum; with ``gram=None`` the pivot-greedy complement is used
    (the only choice available over F_p).
    """
    sums = lower_sums(f)
    pieces = {}
    if gram is not None and gram.dim != f.ambient_dim:
        raise DimensionMismatch("Gram size differs from the flag's ambient dimension")
    check = gram is not None
    for w in f.members:
        if gram is None:
            pieces[w] = complement_in(sums[w], w)
        else:
            pieces[w] = rel_orth_complement(sums[w], w, gram, check=check)
            check = False
    total = sum(p.rank for p in pieces.values())
    return GradedDecomposition(
        f, pieces, sums, total - f.ambient_dim, "orthogonal" if gram is not None else "complement"
    )


def excess(f: MultiFlag) -> int:
    sums = lower_sums(f)
    return sum(w.rank - sums[w].rank for w in f.members) - f.ambient_dim


def is_general_position(f: MultiFlag) -> bool:
    return excess(f) == 0
