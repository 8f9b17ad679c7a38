"""JSON readers and writers for algebras, cobordisms, tunneling graphs and functor graphs.

Every parser raises :class:`SchemaError` with a JSON path such as
``$.mul[1][0]`` on malformed input.  Writers emit plain dicts; dumping them
with :func:`dumps` (sorted keys, fixed indentation) gives byte-stable output.
"""

from __future__ import annotations

import json
import os

from .colimit import FunctorGraph
from .comb2cat import DecoratedCobordism
from .exactalg import Poly, Ring, StructuralError, SparseMatrix
from .frobenius import BUILTIN_NAMES, FrobeniusAlgebra, builtin
from .skein import Component, LoopEdge, Part, SurfaceVertex, TunnelingEdge, TunnelingGraph
from .tensorcat import Handle, Kill, Permute, Split, TensorObject, realize

__all__ = [
    "SchemaError",
    "dumps",
    "load_json",
    "parse_algebra",
    "algebra_to_json",
    "parse_cobordism",
    "cobordism_to_json",
    "parse_graph",
    "graph_to_json",
    "parse_functor_graph",
    "functor_graph_to_json",
    "format_scalar",
    "resolve_algebra",
]


class SchemaError(StructuralError):
    def __init__(self, path, msg):
        super().__init__(f"{path}: {msg}")
        self.path = path


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON in {path}: {exc}") from None


def _expect(cond, path, msg):
    if not cond:
        raise SchemaError(path, msg)


def _req(obj, key, path):
    _expect(key in obj, f"{path}.{key}", "missing required field")
    return obj[key]


def _list(obj, path):
    _expect(isinstance(obj, list), path, f"expected a list, got {type(obj).__name__}")
    return obj


def _dict(obj, path):
    _expect(isinstance(obj, dict), path, f"expected an object, got {type(obj).__name__}")
    return obj


def _str_list(obj, path):
    for i, x in enumerate(_list(obj, path)):
        _expect(isinstance(x, str), f"{path}[{i}]", "expected a string label")
    return list(obj)


def _nat(obj, path):
    _expect(isinstance(obj, int) and not isinstance(obj, bool) and obj >= 0, path,
            "expected a nonnegative integer")
    return obj


def format_scalar(ring, x):
    return ring.format(x)


def _scalar(ring, x, path):
    if isinstance(x, bool):
        raise SchemaError(path, "booleans are not scalars")
    if isinstance(x, int):
        return ring.coerce(x)
    _expect(isinstance(x, str), path, "expected a coefficient string")
    try:
        return ring.coerce(ring.parse(x))
    except (ValueError, ZeroDivisionError, StructuralError) as exc:
        raise SchemaError(path, f"bad coefficient {x!r}: {exc}") from None


# ---------------------------------------------------------------------------
# algebras


def _ring(obj, path):
    obj = _dict(obj, path)
    kind = obj.get("kind")
    _expect(kind in ("int", "rat", "poly_int"), f"{path}.kind", "expected 'int', 'rat' or 'poly_int'")
    vars = tuple(_str_list(obj.get("vars", []), f"{path}.vars"))
    _expect(kind == "poly_int" or not vars, f"{path}.vars", "only poly_int rings take variables")
    _expect(kind != "poly_int" or vars, f"{path}.vars", "poly_int rings need variables")
    return Ring(kind, vars)


def parse_algebra(obj, verify=True, base_dir=None):
    """A built-in name, a path to a JSON file, or an inline algebra object."""
    if isinstance(obj, str):
        if obj in BUILTIN_NAMES:
            return builtin(obj)
        path = obj if base_dir is None else os.path.join(base_dir, obj)
        if not os.path.exists(path):
            raise SchemaError("$", f"{obj!r} is neither a built-in algebra ({', '.join(BUILTIN_NAMES)}) nor a file")
        return parse_algebra(load_json(path), verify=verify)
    obj = _dict(obj, "$")
    if "builtin" in obj:
        return parse_algebra(obj["builtin"], verify=verify)
    ring = _ring(obj.get("ring"), "$.ring")
    basis = _str_list(obj.get("basis"), "$.basis")
    r = len(basis)
    _expect(r > 0, "$.basis", "algebra needs at least one basis element")

    def vec(v, path):
        _expect(isinstance(v, list) and len(v) == r, path, f"expected a list of {r} coefficients")
        return [_scalar(ring, x, f"{path}[{i}]") for i, x in enumerate(v)]

    unit = vec(obj.get("unit"), "$.unit")
    counit = vec(obj.get("counit"), "$.counit")
    mul = _list(obj.get("mul"), "$.mul")
    _expect(len(mul) == r, "$.mul", f"expected {r} rows")
    mul = [[vec(x, f"$.mul[{i}][{j}]") for j, x in enumerate(_list(row, f"$.mul[{i}]"))]
           for i, row in enumerate(mul)]
    for i, row in enumerate(mul):
        _expect(len(row) == r, f"$.mul[{i}]", f"expected {r} entries, got {len(row)}")
    comul = None
    if obj.get("comul") is not None:
        raw = _list(obj["comul"], "$.comul")
        _expect(len(raw) == r, "$.comul", f"expected {r} entries")
        comul = []
        for i, terms in enumerate(raw):
            d = {}
            for t, term in enumerate(_list(terms, f"$.comul[{i}]")):
                p = f"$.comul[{i}][{t}]"
                _expect(isinstance(term, list) and len(term) == 3, p, "expected [j, k, coefficient]")
                j, k = term[0], term[1]
                _expect(isinstance(j, int) and isinstance(k, int) and 0 <= j < r and 0 <= k < r, p,
                        "basis index out of range")
                d[(j, k)] = d.get((j, k), ring.zero) + _scalar(ring, term[2], f"{p}[2]")
            comul.append(d)
    try:
        return FrobeniusAlgebra(ring, basis, mul, counit, unit, comul=comul,
                                name=obj.get("name"), verify=verify)
    except StructuralError as exc:
        raise SchemaError("$", str(exc)) from None


def algebra_to_json(A):
    f = A.ring.format
    out = {
        "ring": A.ring.to_json(),
        "basis": list(A.basis),
        "unit": [f(c) for c in A.unit],
        "counit": [f(c) for c in A.counit],
        "mul": [[[f(c) for c in vec] for vec in row] for row in A.mul],
        "comul": [[[j, k, f(c)] for (j, k), c in sorted(d.items())] for d in A.comul],
    }
    if A.name:
        out["name"] = A.name
    return out


def algebra_ref_to_json(A):
    if A.name in BUILTIN_NAMES and builtin(A.name) is A:
        return A.name
    return algebra_to_json(A)


# ---------------------------------------------------------------------------
# cobordisms


def parse_cobordism(obj):
    obj = _dict(obj, "$")
    inputs = _str_list(_req(obj, "inputs", "$"), "$.inputs")
    outputs = _str_list(_req(obj, "outputs", "$"), "$.outputs")
    comps = []
    for i, c in enumerate(_list(_req(obj, "components", "$"), "$.components")):
        p = f"$.components[{i}]"
        c = _dict(c, p)
        _expect(isinstance(c.get("id"), str), f"{p}.id", "expected a string id")
        comps.append((c["id"], _nat(c.get("genus", 0), f"{p}.genus"),
                      _str_list(c.get("in", []), f"{p}.in"), _str_list(c.get("out", []), f"{p}.out")))
    try:
        C = DecoratedCobordism.from_components(inputs, outputs, comps)
    except StructuralError as exc:
        raise SchemaError("$", str(exc)) from None
    missing = set(inputs) - set(C.phi1) or set(outputs) - set(C.phi2)
    _expect(not missing, "$.components", f"boundary labels {sorted(missing)} lie on no component")
    return C


def cobordism_to_json(C):
    return {
        "inputs": list(C.J1),
        "outputs": list(C.J2),
        "components": [{"id": k, "genus": g, "in": list(i), "out": list(o)} for k, g, i, o in C.components()],
    }


# ---------------------------------------------------------------------------
# tunneling graphs


def parse_graph(obj, verify=True, base_dir=None):
    obj = _dict(obj, "$")
    _expect("algebra" in obj, "$.algebra", "missing algebra reference")
    try:
        A = parse_algebra(obj["algebra"], verify=verify, base_dir=base_dir)
    except SchemaError as exc:
        raise SchemaError("$.algebra" + exc.path[1:], str(exc).split(": ", 1)[-1]) from None
    boundary = _str_list(_req(obj, "boundary", "$"), "$.boundary")
    verts = []
    for i, v in enumerate(_list(_req(obj, "vertices", "$"), "$.vertices")):
        p = f"$.vertices[{i}]"
        v = _dict(v, p)
        _expect(isinstance(v.get("id"), str), f"{p}.id", "expected a string id")
        comps = []
        for k, c in enumerate(_list(_req(v, "components", p), f"{p}.components")):
            q = f"{p}.components[{k}]"
            c = _dict(c, q)
            _expect(isinstance(c.get("label"), str), f"{q}.label", "expected a string label")
            comps.append(Component(c["label"], _nat(c.get("genus", 0), f"{q}.genus"),
                                   frozenset(_str_list(c.get("boundary", []), f"{q}.boundary"))))
        verts.append(SurfaceVertex(v["id"], comps))
    edges = []
    for i, e in enumerate(_list(obj.get("edges", []), "$.edges")):
        p = f"$.edges[{i}]"
        e = _dict(e, p)
        for key in ("src", "dst"):
            _expect(isinstance(e.get(key), str), f"{p}.{key}", "expected a vertex id")
        parts = []
        for k, part in enumerate(_list(_req(e, "parts", p), f"{p}.parts")):
            q = f"{p}.parts[{k}]"
            part = _dict(part, q)
            parts.append(Part(frozenset(_str_list(_req(part, "src", q), f"{q}.src")),
                              frozenset(_str_list(_req(part, "dst", q), f"{q}.dst")),
                              _nat(part.get("tau", 0), f"{q}.tau")))
        edges.append(TunnelingEdge(e["src"], e["dst"], parts, id=e.get("id")))
    loops = []
    for i, lp in enumerate(_list(obj.get("loops", []), "$.loops")):
        p = f"$.loops[{i}]"
        lp = _dict(lp, p)
        _expect(isinstance(lp.get("vertex"), str), f"{p}.vertex", "expected a vertex id")
        perm = _dict(lp.get("permutation", {}), f"{p}.permutation")
        loops.append(LoopEdge(lp["vertex"], dict(perm), id=lp.get("id")))
    T = TunnelingGraph(A, tuple(boundary), verts, edges, loops, algebra_ref=obj["algebra"])
    try:
        T.validate()
    except StructuralError as exc:
        raise SchemaError("$", str(exc)) from None
    return T


def graph_to_json(T):
    ref = T.algebra_ref if T.algebra_ref is not None else algebra_ref_to_json(T.algebra)
    return {
        "algebra": ref,
        "boundary": list(T.boundary),
        "vertices": [
            {"id": v.id, "components": [
                {"label": c.label, "genus": c.genus, "boundary": sorted(c.boundary)} for c in v.components]}
            for v in T.vertices
        ],
        "edges": [
            {"id": e.id, "src": e.src, "dst": e.dst,
             "parts": [{"src": sorted(p.src), "dst": sorted(p.dst), "tau": p.tau} for p in e.parts]}
            for e in T.edges
        ],
        "loops": [{"id": lp.id, "vertex": lp.vertex, "permutation": dict(sorted(lp.permutation.items()))}
                  for lp in T.loops],
    }


# ---------------------------------------------------------------------------
# functor graphs


def _step(obj, path):
    obj = _dict(obj, path)
    if "split" in obj:
        return Split(obj["split"], obj.get("new"), frozenset(obj.get("moved", [])))
    if "handle" in obj:
        return Handle(obj["handle"], _nat(obj.get("power", 1), f"{path}.power"))
    if "kill" in obj:
        return Kill(obj["kill"])
    if "permute" in obj:
        return Permute(_dict(obj["permute"], f"{path}.permute"))
    raise SchemaError(path, "expected one of split/handle/kill/permute")


def _key(x, path):
    if isinstance(x, list):
        for i, a in enumerate(x):
            _expect(isinstance(a, int) and not isinstance(a, bool), f"{path}[{i}]", "expected a basis index")
        return tuple(x)
    _expect(isinstance(x, int) and not isinstance(x, bool), path, "expected an index or index list")
    return x


def parse_functor_graph(obj, verify=True, base_dir=None):
    """Returns ``(FunctorGraph, algebra, objects, terminal)``."""
    obj = _dict(obj, "$")
    A = parse_algebra(obj["algebra"], verify=verify, base_dir=base_dir) if "algebra" in obj else None
    ring = obj.get("ring", "q")
    _expect(ring in ("q", "z"), "$.ring", "expected 'q' or 'z'")
    G = FunctorGraph(ring)
    objects = {}
    for i, v in enumerate(_list(obj.get("vertices", []), "$.vertices")):
        p = f"$.vertices[{i}]"
        v = _dict(v, p)
        _expect(isinstance(v.get("id"), str), f"{p}.id", "expected a string id")
        if "object" in v:
            _expect(A is not None, f"{p}.object", "tensor-object vertices need an algebra")
            o = _dict(v["object"], f"{p}.object")
            try:
                t = TensorObject(_str_list(o.get("J", []), f"{p}.object.J"),
                                 _str_list(o.get("K", []), f"{p}.object.K"),
                                 _dict(o.get("phi", {}), f"{p}.object.phi"))
            except StructuralError as exc:
                raise SchemaError(f"{p}.object", str(exc)) from None
            objects[v["id"]] = t
            G.add_vertex(v["id"], t, A)
        else:
            G.add_vertex(v["id"], _nat(v.get("rank"), f"{p}.rank"))
    scalar_ring = A.ring if A is not None else Ring("rat")
    for i, e in enumerate(_list(obj.get("edges", []), "$.edges")):
        p = f"$.edges[{i}]"
        e = _dict(e, p)
        src, dst = e.get("src"), e.get("dst")
        _expect(src in G.vertices, f"{p}.src", f"unknown vertex {src!r}")
        _expect(dst in G.vertices, f"{p}.dst", f"unknown vertex {dst!r}")
        m = _dict(e.get("map"), f"{p}.map")
        try:
            if "program" in m:
                _expect(src in objects and dst in objects, f"{p}.map.program",
                        "programs need tensor-object vertices")
                steps = [_step(s, f"{p}.map.program[{k}]")
                         for k, s in enumerate(_list(m["program"], f"{p}.map.program"))]
                end, lm = realize(A, steps, objects[src])
                _expect(end == objects[dst], f"{p}.map.program", "program does not end at the target object")
                mat = lm.mat
            else:
                data = {}
                for k, t in enumerate(_list(m.get("entries", []), f"{p}.map.entries")):
                    q = f"{p}.map.entries[{k}]"
                    _expect(isinstance(t, list) and len(t) == 3, q, "expected [row, col, coefficient]")
                    r, c = _key(t[0], f"{q}[0]"), _key(t[1], f"{q}[1]")
                    data.setdefault(c, {})[r] = _scalar(scalar_ring, t[2], f"{q}[2]")
                mat = SparseMatrix(G.vertices[dst], G.vertices[src], data)
            G.add_edge(e.get("id", f"e{i}"), src, dst, mat)
        except StructuralError as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(p, str(exc)) from None
    terminal = obj.get("terminal")
    if terminal is not None:
        terminal = _str_list(terminal, "$.terminal")
    return G, A, objects, terminal


def _fmt_any(x):
    if isinstance(x, Poly):
        return str(x)
    return Ring("rat").format(x) if not isinstance(x, int) else str(x)


def functor_graph_to_json(G, algebra=None, objects=None, terminal=None):
    objects = objects or {}
    out = {"ring": G.ring, "vertices": [], "edges": []}
    if algebra is not None:
        out["algebra"] = algebra_ref_to_json(algebra)
    for vid, keys in G.vertices.items():
        if vid in objects:
            o = objects[vid]
            out["vertices"].append({"id": vid, "object": {
                "J": list(o.J), "K": list(o.K), "phi": dict(sorted(o.phi.items()))}})
        else:
            out["vertices"].append({"id": vid, "rank": len(keys)})
    for e in G.edges:
        entries = sorted(
            ([list(r) if isinstance(r, tuple) else r, list(c) if isinstance(c, tuple) else c, _fmt_any(v)]
             for c, col in e.map.data.items() for r, v in col.items()),
            key=lambda t: (json.dumps(t[1]), json.dumps(t[0])))
        out["edges"].append({"id": e.id, "src": e.src, "dst": e.dst, "map": {"entries": entries}})
    if terminal is not None:
        out["terminal"] = list(terminal)
    return out


def resolve_algebra(ref, verify=True):
    return parse_algebra(ref, verify=verify)

