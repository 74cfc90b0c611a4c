"""Small named modules used throughout the tests, demos and CLI."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .cmod import CModule, from_maps
from .linalg import QQ
from .poset import PosetCategory, chain, gamma1, gamma2
from .simplicial import ComplexDiagram, gallery_D7, homology_functor


@dataclass(frozen=True)
class GalleryItem:
    name: str
    module: CModule
    summary: str
    diagram: ComplexDiagram | None = None


def gamma1_block() -> CModule:
    """A 2-dimensional block on the commuting square; both paths compose to
    the same shear, so the holonomy is trivial."""
    shear = [[1, 1], [0, 1]]
    eye = [[1, 0], [0, 1]]
    return from_maps(
        gamma1(),
        {x: 2 for x in "abcd"},
        {("a", "b"): shear, ("b", "d"): eye, ("a", "c"): eye, ("c", "d"): shear},
    )


def d5_module(scale=2) -> CModule:
    """Gamma_2 with k everywhere; x1 -> y1 is multiplication by ``scale``."""
    return from_maps(
        gamma2(),
        {x: 1 for x in ("x1", "x2", "y1", "y2")},
        {("x1", "y1"): [[scale]], ("x1", "y2"): [[1]], ("x2", "y1"): [[1]], ("x2", "y2"): [[1]]},
    )


def three_lines() -> CModule:
    """Three distinct lines of k^2 arriving from three copies of k."""
    cat = PosetCategory(["a", "b", "c", "o"], [("a", "o"), ("b", "o"), ("c", "o")])
    return from_maps(
        cat,
        {"a": 1, "b": 1, "c": 1, "o": 2},
        {("a", "o"): [[1], [0]], ("b", "o"): [[0], [1]], ("c", "o"): [[1], [1]]},
    )


def d4_shear() -> CModule:
    """Gamma_2 with k^2 everywhere and a shear on x1 -> y1 (infinite-order
    holonomy), plus a line x = k injected into x1 along e2, which is not
    an eigenvector of the shear."""
    objs = ["x", "x1", "x2", "y1", "y2"]
    cat = PosetCategory(objs, [("x", "x1"), ("x1", "y1"), ("x1", "y2"), ("x2", "y1"), ("x2", "y2")])
    eye = [[1, 0], [0, 1]]
    return from_maps(
        cat,
        {"x": 1, "x1": 2, "x2": 2, "y1": 2, "y2": 2},
        {
            ("x", "x1"): [[0], [1]],
            ("x1", "y1"): [[1, 1], [0, 1]],
            ("x1", "y2"): eye,
            ("x2", "y1"): eye,
            ("x2", "y2"): eye,
        },
    )


def chain_example() -> CModule:
    """k --1--> k --0--> k."""
    return from_maps(chain(3), {"1": 1, "2": 1, "3": 1}, {("1", "2"): [[1]], ("2", "3"): [[0]]})


def grid_star() -> CModule:
    """A 2x3 grid module with three lines meeting at the centre.

    It passes the IP condition on Hasse edges for suitable Grams but admits
    no Grams satisfying it on all composites.
    """
    from .poset import grid

    return from_maps(
        grid(2, 3),
        {"0,0": 0, "0,1": 1, "0,2": 1, "1,0": 1, "1,1": 2, "1,2": 1},
        {
            ("0,1", "1,1"): [[1], [0]],
            ("1,0", "1,1"): [[0], [1]],
            ("1,1", "1,2"): [[1, 1]],
            ("0,1", "0,2"): [[1]],
            ("0,2", "1,2"): [[1]],
        },
    )


def _d7() -> GalleryItem:
    d = gallery_D7()
    return GalleryItem("d7-geometric", homology_functor(d, 1, QQ), "H_1 of the hexagon/triangle diagram", d)


_BUILDERS: dict[str, Callable[[], GalleryItem]] = {
    "gamma1-block": lambda: GalleryItem("gamma1-block", gamma1_block(), "rank-2 block on the commuting square"),
    "d5-obstruction": lambda: GalleryItem("d5-obstruction", d5_module(), "Gamma_2 with holonomy 2"),
    "d7-geometric": _d7,
    "three-lines": lambda: GalleryItem("three-lines", three_lines(), "excess-1 star"),
    "d4-shear": lambda: GalleryItem("d4-shear", d4_shear(), "non-stabilizing shear holonomy"),
    "chain-example": lambda: GalleryItem("chain-example", chain_example(), "k -1-> k -0-> k"),
}

NAMES = tuple(_BUILDERS)


def get(name: str) -> GalleryItem:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown gallery item {name!r}; choose from {', '.join(NAMES)}") from None
