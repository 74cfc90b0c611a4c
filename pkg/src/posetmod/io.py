"""JSON reading and writing for modules, Gram assignments and diagrams.

Layout::

    {"field": {"type": "Q"} | {"type": "Fp", "p": 5},
     "objects": [{"name": "a", "dim": 2}, ...],
     "edges": [{"src": "a", "dst": "b", "matrix": [[1, "1/2"], ...]}, ...],
     "grams": {"a": [[...]], ...},                         # optional
     "complexes": {"a": {"vertices": [...], "simplices": [[...], ...]}},
     "complex_maps": [{"src": "a", "dst": "b", "vertex_map": {"v": "w"}}]}

Edges must be the Hasse diagram (transitive reduction) of the order.
Matrix entries are integers or "a/b" strings.  ``simplices`` lists
generating simplices; faces are added automatically.  For a diagram-only
file ``dim`` and ``matrix`` may be omitted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

from .cmod import CModule, from_maps
from .errors import FormatError, PosetModError
from .linalg import QQ, GF, Field, Gram, Matrix, ModP
from .poset import PosetCategory
from .simplicial import ComplexDiagram, SimplicialComplex, SimplicialMap


@dataclass(frozen=True)
class Document:
    category: PosetCategory
    field: Field
    module: CModule | None
    grams: Mapping[str, Gram] | None
    diagram: ComplexDiagram | None


def encode_scalar(x) -> int | str:
    if isinstance(x, ModP):
        return int(x)
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    raise TypeError(f"cannot encode {x!r}")


def to_plain(obj: Any) -> Any:
    """Recursively turn library values into JSON-ready data."""
    if isinstance(obj, (Fraction, ModP)):
        return encode_scalar(obj)
    if isinstance(obj, Matrix):
        return [[encode_scalar(c) for c in r] for r in obj.data]
    if isinstance(obj, Gram):
        return to_plain(obj.matrix)
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else "->".join(map(str, k)): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_plain(obj), indent=2, ensure_ascii=True) + "\n"


def _field_json(f: Field) -> dict:
    return {"type": "Q"} if f.is_rational else {"type": "Fp", "p": f.p}


def module_to_json(
    m: CModule,
    grams: Mapping[str, Gram] | None = None,
    diagram: ComplexDiagram | None = None,
) -> dict:
    cat = m.category
    doc: dict[str, Any] = {
        "field": _field_json(m.field),
        "objects": [{"name": x, "dim": m.dims[x]} for x in cat.objects],
        "edges": [{"src": x, "dst": y, "matrix": to_plain(m.edge_maps[(x, y)])} for x, y in cat.hasse_edges],
    }
    if grams is not None:
        doc["grams"] = {x: to_plain(grams[x]) for x in cat.objects}
    if diagram is not None:
        doc.update(diagram_to_json(diagram))
    return doc


def diagram_to_json(d: ComplexDiagram) -> dict:
    return {
        "complexes": {
            x: {
                "vertices": list(c.vertices),
                "simplices": [list(s) for s in _maximal(c)],
            }
            for x, c in ((x, d.complexes[x]) for x in d.category.objects)
        },
        "complex_maps": [
            {"src": x, "dst": y, "vertex_map": dict(d.maps[(x, y)].vertex_map)} for x, y in d.category.hasse_edges
        ],
    }


def _maximal(c: SimplicialComplex) -> list[tuple]:
    out = []
    for s in sorted(c.simplices, key=lambda s: (-len(s), [c.index(v) for v in s])):
        if not any(set(s) < set(t) for t in out):
            out.append(s)
    return sorted(out, key=lambda s: (len(s), [c.index(v) for v in s]))


def _scalar(raw, f: Field):
    if isinstance(raw, bool) or not isinstance(raw, (int, str)):
        raise FormatError(f"matrix entry {raw!r} must be an integer or an 'a/b' string")
    try:
        if isinstance(raw, str):
            q = Fraction(raw.strip())
            return f(q)
        return f(raw)
    except (ValueError, ZeroDivisionError, PosetModError) as exc:
        raise FormatError(f"bad matrix entry {raw!r}: {exc}") from None


def _matrix(raw, rows: int, cols: int, f: Field, where: str) -> Matrix:
    if not isinstance(raw, list) or len(raw) != rows:
        raise FormatError(f"{where}: expected {rows} rows")
    data = []
    for r in raw:
        if not isinstance(r, list) or len(r) != cols:
            raise FormatError(f"{where}: expected rows of length {cols}")
        data.append([_scalar(v, f) for v in r])
    return Matrix(data, f, shape=(rows, cols))


def _field(raw) -> Field:
    if raw is None:
        return QQ
    if not isinstance(raw, dict) or raw.get("type") not in ("Q", "Fp"):
        raise FormatError('field must be {"type": "Q"} or {"type": "Fp", "p": <prime>}')
    if raw["type"] == "Q":
        return QQ
    p = raw.get("p")
    if not isinstance(p, int):
        raise FormatError("Fp field needs an integer p")
    try:
        return GF(p)
    except PosetModError as exc:
        raise FormatError(str(exc)) from None


def from_json(doc: Any) -> Document:
    if not isinstance(doc, dict):
        raise FormatError("top level must be an object")
    f = _field(doc.get("field"))
    objs = doc.get("objects")
    if not isinstance(objs, list) or not objs:
        raise FormatError("objects must be a non-empty list")
    names = []
    dims: dict[str, int] = {}
    for o in objs:
        if not isinstance(o, dict) or not isinstance(o.get("name"), str):
            raise FormatError("each object needs a string name")
        names.append(o["name"])
        if "dim" in o:
            if not isinstance(o["dim"], int) or isinstance(o["dim"], bool) or o["dim"] < 0:
                raise FormatError(f"dim of {o['name']} must be a non-negative integer")
            dims[o["name"]] = o["dim"]
    edges = doc.get("edges", [])
    if not isinstance(edges, list):
        raise FormatError("edges must be a list")
    pairs = []
    for e in edges:
        if not isinstance(e, dict) or not isinstance(e.get("src"), str) or not isinstance(e.get("dst"), str):
            raise FormatError("each edge needs string src and dst")
        pairs.append((e["src"], e["dst"]))
    cat = PosetCategory(names, pairs)
    module = None
    if len(dims) == len(names) and all("matrix" in e for e in edges):
        maps = {
            (e["src"], e["dst"]): _matrix(e["matrix"], dims[e["dst"]], dims[e["src"]], f, f"edge {e['src']}->{e['dst']}")
            for e in edges
        }
        module = from_maps(cat, dims, maps, f)
    elif dims or any("matrix" in e for e in edges):
        if "complexes" not in doc:
            raise FormatError("every object needs a dim and every edge a matrix")
    grams = None
    if "grams" in doc:
        if module is None:
            raise FormatError("grams given without a module")
        raw = doc["grams"]
        if not isinstance(raw, dict) or set(raw) != set(names):
            raise FormatError("grams must map every object name to a matrix")
        try:
            grams = {x: Gram(_matrix(raw[x], dims[x], dims[x], f, f"gram {x}")) for x in names}
        except FormatError:
            raise
        except PosetModError as exc:
            raise FormatError(f"bad Gram matrix: {exc}") from None
    diagram = _diagram(doc, cat) if "complexes" in doc else None
    return Document(cat, f, module, grams, diagram)


def _diagram(doc: dict, cat: PosetCategory) -> ComplexDiagram:
    raw = doc["complexes"]
    if not isinstance(raw, dict) or set(raw) != set(cat.objects):
        raise FormatError("complexes must map every object name to a complex")
    try:
        cx = {
            x: SimplicialComplex.from_maximal(list(raw[x]["vertices"]), raw[x].get("simplices", []))
            for x in cat.objects
        }
        maps = {}
        for e in doc.get("complex_maps", []):
            key = (e["src"], e["dst"])
            maps[key] = SimplicialMap(cx[key[0]], cx[key[1]], dict(e["vertex_map"]))
        return ComplexDiagram(cat, cx, maps)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed complex data: {exc}") from None


def loads(text: str) -> Document:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    return from_json(doc)


def read(path: str) -> Document:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None
    return loads(text)


def write_module(m: CModule, grams=None, diagram=None) -> str:
    return dumps(module_to_json(m, grams, diagram))
