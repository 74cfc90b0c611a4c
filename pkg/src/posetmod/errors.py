"""Exception hierarchy shared by every posetmod submodule."""


class PosetModError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(PosetModError, ValueError):
    pass


class FieldError(PosetModError, ValueError):
    """Raised when an operation is not available over the given field."""


class NotASubspace(PosetModError, ValueError):
    pass


class IndefiniteGram(PosetModError, ValueError):
    pass


class CategoryError(PosetModError, ValueError):
    """Invalid poset data: cycle, redundant edge, disconnected graph."""


class InadmissibleSubcategory(PosetModError, ValueError):
    pass


class PathCountExceeded(PosetModError, RuntimeError):
    pass


class PathConflict(PosetModError, ValueError):
    """Two directed paths between the same pair of objects compose differently."""

    def __init__(self, src, dst, entry, first, second):
        self.src = src
        self.dst = dst
        self.entry = entry
        self.first = first
        self.second = second
        super().__init__(
            f"composites {src}->{dst} disagree at entry {entry}: {first} != {second}"
        )


class IncomparablePair(PosetModError, KeyError):
    pass


class ClosureCapExceeded(PosetModError, RuntimeError):
    def __init__(self, cap, size):
        self.cap = cap
        self.size = size
        super().__init__(f"multi-flag closure exceeded {cap} members (reached {size})")


class NotStabilized(PosetModError, RuntimeError):
    pass


class ZeroPiece(PosetModError, ValueError):
    pass


class InconsistentDims(PosetModError, RuntimeError):
    """A transport class meets an object twice or changes dimension."""

    def __init__(self, support, detail=""):
        self.support = support
        super().__init__(f"inconsistent block on support {list(support)}: {detail}")


class NoVerifiedIpc(PosetModError, RuntimeError):
    pass


class LoopExitsSupport(PosetModError, ValueError):
    pass


class HolonomyPresent(PosetModError, RuntimeError):
    def __init__(self, loop, operator):
        self.loop = loop
        self.operator = operator
        rows = "; ".join(" ".join(str(c) for c in r) for r in operator.data)
        super().__init__(f"non-identity holonomy [{rows}] around {loop}")


class NotProductOfChains(PosetModError, ValueError):
    pass


class IpcConstructionFailed(PosetModError, RuntimeError):
    pass


class SimplicialError(PosetModError, ValueError):
    pass


class FormatError(PosetModError, ValueError):
    """Malformed JSON input."""
