"""Z^d-periodic operator specifications: parsing, validation, builtins.

An operator is given either as a periodic labeled graph (vertices with
exact rational potentials plus weighted edges carrying integer cell
offsets) or directly as a matrix of Laurent polynomials in z.

Conventions (fixed once, used by every other module):

* An edge record (to=v, from=w, offset=o, weight=a) means the operator
  sends ``f`` to a function receiving ``a * f(w (+) m (+) o)`` at vertex
  ``v (+) m``.  The matrix entry (v, w) therefore accumulates ``a * z^o``.
* With ``hermitian_closure`` (the default) each listed edge implies the
  reverse edge (w, v, -o, conj(a)); self-adjointness additionally needs
  real potentials, and is always computed from the data, never declared.

The JSON file format is documented in the README; rational values are
strings like "-1", "2/3" or "1/2+1/3i" (floats rejected).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .exact import GR_ZERO, GaussianRational, format_rational
from .laurent import LaurentMatrix, LaurentPoly


class SpecError(ValueError):
    """Raised for malformed or inconsistent operator specifications."""


@dataclass(frozen=True)
class EdgeRecord:
    to_vertex: str
    from_vertex: str
    offset: tuple[int, ...]
    weight: GaussianRational

    def reversed(self) -> "EdgeRecord":
        return EdgeRecord(
            self.from_vertex,
            self.to_vertex,
            tuple(-o for o in self.offset),
            self.weight.conjugate(),
        )

    def triple(self):
        return (self.to_vertex, self.from_vertex, self.offset)


@dataclass(frozen=True)
class PeriodicGraph:
    dimension: int
    vertices: tuple[tuple[str, GaussianRational], ...]
    edges: tuple[EdgeRecord, ...]
    hermitian_closure: bool

    @property
    def vertex_names(self) -> list[str]:
        return [name for name, _ in self.vertices]

    def potential(self, name: str) -> GaussianRational:
        for n, v in self.vertices:
            if n == name:
                return v
        raise KeyError(name)


class OperatorSpec:
    """Validated operator: a closed periodic graph or a direct matrix."""

    def __init__(
        self,
        dimension: int,
        graph: PeriodicGraph | None = None,
        matrix: LaurentMatrix | None = None,
        vertex_names: Sequence[str] | None = None,
    ):
        if (graph is None) == (matrix is None):
            raise SpecError("exactly one of graph / matrix must be given")
        self.dimension = dimension
        self.graph = graph
        self.matrix = matrix
        if graph is not None:
            self.vertex_names = list(graph.vertex_names)
        else:
            self.vertex_names = list(
                vertex_names or (f"v{i+1}" for i in range(matrix.size))
            )
            if len(self.vertex_names) != matrix.size:
                raise SpecError("vertex name count does not match matrix size")
        self.size = len(self.vertex_names)
        self.self_adjoint = self._compute_self_adjoint()

    # -- structure ------------------------------------------------------
    @property
    def is_graph(self) -> bool:
        return self.graph is not None

    def operator_range(self) -> int:
        """Minimal R with a(m) = 0 for |m|_inf > R (graph specs)."""
        if self.graph is None:
            r = 0
            for row in self.matrix.entries:
                for e in row:
                    for (zexp, _) in e.terms:
                        r = max(r, max((abs(v) for v in zexp), default=0))
            return r
        return max(
            (max(abs(o) for o in e.offset) if e.offset else 0 for e in self.graph.edges),
            default=0,
        )

    def _compute_self_adjoint(self) -> bool:
        if self.graph is not None:
            if any(not pot.is_real() for _, pot in self.graph.vertices):
                return False
            weights = {e.triple(): e.weight for e in self.graph.edges}
            for e in self.graph.edges:
                rev = e.reversed()
                w = weights.get(rev.triple())
                if w is None or w != rev.weight:
                    return False
            return True
        m = self.matrix
        return m.reflect_conjugate_transpose() == m

    def __eq__(self, other):
        if not isinstance(other, OperatorSpec):
            return NotImplemented
        if self.dimension != other.dimension or self.is_graph != other.is_graph:
            return False
        if self.is_graph:
            return (
                self.graph.vertices == other.graph.vertices
                and set(self.graph.edges) == set(other.graph.edges)
                and self.graph.hermitian_closure == other.graph.hermitian_closure
            )
        return self.vertex_names == other.vertex_names and self.matrix == other.matrix

    # -- serialization ----------------------------------------------------
    def to_json_obj(self) -> dict:
        if self.graph is not None:
            g = self.graph
            return {
                "dimension": self.dimension,
                "hermitian_closure": g.hermitian_closure,
                "vertices": [
                    {"name": name, "potential": str(pot)} for name, pot in g.vertices
                ],
                "edges": [
                    {
                        "to": e.to_vertex,
                        "from": e.from_vertex,
                        "offset": list(e.offset),
                        "weight": _weight_json(e.weight),
                    }
                    for e in sorted(
                        g.edges, key=lambda e: (e.to_vertex, e.from_vertex, e.offset)
                    )
                ],
            }
        return {
            "dimension": self.dimension,
            "vertex_names": list(self.vertex_names),
            "direct_matrix": [
                [
                    {"coeff": _weight_json(coeff), "exponents": list(zexp)}
                    for (zexp, _), coeff in entry.sorted_terms()
                ]
                for row in self.matrix.entries
                for entry in row
            ],
        }

    def serialize(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)


def _weight_json(w: GaussianRational):
    if w.im == 0:
        return format_rational(w.re)
    return {"re": format_rational(w.re), "im": format_rational(w.im)}


def _parse_weight(obj) -> GaussianRational:
    if isinstance(obj, str):
        return GaussianRational.parse(obj)
    if isinstance(obj, Mapping):
        return GaussianRational(
            Fraction(obj.get("re", "0")), Fraction(obj.get("im", "0"))
        )
    if isinstance(obj, int):
        return GaussianRational(obj)
    raise SpecError(f"weight must be a rational string or re/im object, got {obj!r}")


def _close_edges(edges: list[EdgeRecord], apply_closure: bool) -> list[EdgeRecord]:
    """Collapse exact duplicates, reject conflicts, optionally add reverses."""
    seen: dict[tuple, GaussianRational] = {}
    order: list[EdgeRecord] = []

    def put(e: EdgeRecord, implied: bool):
        key = e.triple()
        if key in seen:
            if seen[key] != e.weight:
                kind = "implied reverse of an" if implied else "duplicate"
                raise SpecError(
                    f"conflicting {kind} edge {key}: weights "
                    f"{seen[key]} vs {e.weight}"
                )
            return
        seen[key] = e.weight
        order.append(e)

    for e in edges:
        put(e, implied=False)
    if apply_closure:
        for e in list(order):
            put(e.reversed(), implied=True)
    return order


def make_graph_spec(
    dimension: int,
    vertices: Sequence[tuple[str, object]],
    edges: Sequence[tuple[str, str, Sequence[int], object]],
    hermitian_closure: bool = True,
) -> OperatorSpec:
    """Validate and build a graph-backed OperatorSpec (closure applied)."""
    if dimension < 1:
        raise SpecError("dimension must be a positive integer")
    names = [n for n, _ in vertices]
    if len(set(names)) != len(names):
        raise SpecError("vertex names must be unique")
    vtuple = tuple(
        (str(n), GaussianRational.coerce(p)) for n, p in vertices
    )
    recs = []
    for to, frm, offset, weight in edges:
        if to not in names:
            raise SpecError(f"edge endpoint {to!r} names no vertex")
        if frm not in names:
            raise SpecError(f"edge endpoint {frm!r} names no vertex")
        off = tuple(int(o) for o in offset)
        if len(off) != dimension:
            raise SpecError(
                f"edge ({to},{frm}) offset arity {len(off)} != dimension {dimension}"
            )
        w = GaussianRational.coerce(weight)
        if w.is_zero():
            raise SpecError(f"edge ({to},{frm},{off}) has zero weight")
        if to == frm and all(o == 0 for o in off):
            raise SpecError(
                f"zero-offset self loop on {to!r}: use the vertex potential instead"
            )
        recs.append(EdgeRecord(to, frm, off, w))
    closed = _close_edges(recs, hermitian_closure)
    graph = PeriodicGraph(dimension, vtuple, tuple(closed), hermitian_closure)
    return OperatorSpec(dimension, graph=graph)


def make_direct_spec(
    dimension: int,
    entries: list[list[LaurentPoly]],
    vertex_names: Sequence[str] | None = None,
) -> OperatorSpec:
    for row in entries:
        for e in row:
            if e.lambda_degree() != 0:
                raise SpecError("direct matrix entries must be energy-free")
    return OperatorSpec(
        dimension,
        matrix=LaurentMatrix(dimension, entries),
        vertex_names=vertex_names,
    )


def parse_spec(text: str) -> OperatorSpec:
    """Parse the JSON graph file format into a validated OperatorSpec."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed document: {exc}") from exc
    if not isinstance(obj, Mapping):
        raise SpecError("top level must be an object")
    try:
        dimension = int(obj["dimension"])
    except KeyError:
        raise SpecError("missing required field 'dimension'")
    if "direct_matrix" in obj:
        flat = obj["direct_matrix"]
        size = round(len(flat) ** 0.5)
        if size * size != len(flat):
            raise SpecError("direct_matrix must have a square number of entries")
        entries = [
            [
                _parse_matrix_entry(dimension, flat[i * size + j])
                for j in range(size)
            ]
            for i in range(size)
        ]
        return make_direct_spec(dimension, entries, obj.get("vertex_names"))
    closure = bool(obj.get("hermitian_closure", True))
    try:
        vertices = [
            (v["name"], GaussianRational.parse(str(v.get("potential", "0"))))
            for v in obj.get("vertices", [])
        ]
        edges = [
            (e["to"], e["from"], e["offset"], _parse_weight(e["weight"]))
            for e in obj.get("edges", [])
        ]
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed vertex or edge record: {exc}") from exc
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    return make_graph_spec(dimension, vertices, edges, closure)


def _parse_matrix_entry(dimension: int, terms) -> LaurentPoly:
    out = LaurentPoly(dimension)
    for t in terms:
        coeff = _parse_weight(t["coeff"])
        zexp = tuple(int(e) for e in t["exponents"])
        if len(zexp) != dimension:
            raise SpecError("direct_matrix exponent arity mismatch")
        out = out + LaurentPoly(dimension, {(zexp, 0): coeff})
    return out


# ---------------------------------------------------------------------
# Builtin lattices
# ---------------------------------------------------------------------

BUILTIN_PARAMS = {
    "line": ("V",),
    "square_lattice": ("V",),
    "hexagonal": ("a", "b", "c", "Vv", "Vw"),
    "lieb": ("Vc", "Va", "Vb"),
    "ab_bilayer": ("Delta", "gamma1", "gamma4"),
    "fik": ("a", "b", "c", "d", "e", "Vu", "Vv"),
}


def builtin(name: str, params: Mapping[str, object] | None = None, **kw) -> OperatorSpec:
    """Construct a documented builtin lattice from named rational values.

    line:           1-D chain, nearest-neighbor weight -1, potential V.
    square_lattice: 2-D grid, nearest-neighbor weight -1, potential V.
    hexagonal:      honeycomb with edge labels a, b, c on the three bond
                    orbits and sublattice potentials Vv, Vw.
    lieb:           3-vertex cell (hub c of degree 4; a, b of degree 2),
                    unit weights, potentials Vc, Va, Vb.
    ab_bilayer:     4x4 direct matrix (basis 1A,1B,2A,2B) with intralayer
                    hopping zeta = 1 + x + y, on-site +-Delta, interlayer
                    gamma1 and skew gamma4 couplings.
    fik:            two square sublattices u, v joined by five edge orbits
                    a (offset 0), b/d (offsets +-x), c/e (offsets +-y);
                    with b=d and c=e the coupling is a+b(x+1/x)+c(y+1/y).
    """
    merged = dict(params or {})
    merged.update(kw)
    if name not in BUILTIN_PARAMS:
        raise SpecError(f"unknown builtin {name!r}")
    required = BUILTIN_PARAMS[name]
    missing = [p for p in required if p not in merged]
    if missing:
        raise SpecError(f"builtin {name!r} missing parameter(s): {', '.join(missing)}")
    extra = [p for p in merged if p not in required]
    if extra:
        raise SpecError(f"builtin {name!r} got unknown parameter(s): {', '.join(extra)}")
    p = {k: GaussianRational.coerce(v) for k, v in merged.items()}

    if name == "line":
        return make_graph_spec(
            1,
            [("v", p["V"])],
            [("v", "v", (1,), -1), ("v", "v", (-1,), -1)],
        )
    if name == "square_lattice":
        return make_graph_spec(
            2,
            [("v", p["V"])],
            [
                ("v", "v", (1, 0), -1),
                ("v", "v", (-1, 0), -1),
                ("v", "v", (0, 1), -1),
                ("v", "v", (0, -1), -1),
            ],
        )
    if name == "hexagonal":
        return make_graph_spec(
            2,
            [("v", p["Vv"]), ("w", p["Vw"])],
            [
                ("v", "w", (0, 0), p["a"]),
                ("v", "w", (-1, 0), p["b"]),
                ("v", "w", (0, -1), p["c"]),
            ],
        )
    if name == "lieb":
        return make_graph_spec(
            2,
            [("c", p["Vc"]), ("a", p["Va"]), ("b", p["Vb"])],
            [
                ("c", "a", (0, 0), 1),
                ("a", "c", (1, 0), 1),
                ("c", "b", (0, 0), 1),
                ("b", "c", (0, 1), 1),
            ],
        )
    if name == "fik":
        return make_graph_spec(
            2,
            [("u", p["Vu"]), ("v", p["Vv"])],
            [
                ("u", "v", (0, 0), p["a"]),
                ("u", "v", (1, 0), p["b"]),
                ("u", "v", (-1, 0), p["d"]),
                ("u", "v", (0, 1), p["c"]),
                ("u", "v", (0, -1), p["e"]),
            ],
        )
    # ab_bilayer
    d = 2
    zeta = (
        LaurentPoly.constant(d, 1)
        + LaurentPoly.monomial(d, (1, 0))
        + LaurentPoly.monomial(d, (0, 1))
    )
    zetap = (
        LaurentPoly.constant(d, 1)
        + LaurentPoly.monomial(d, (-1, 0))
        + LaurentPoly.monomial(d, (0, -1))
    )
    delta = LaurentPoly.constant(d, p["Delta"])
    g1 = LaurentPoly.constant(d, p["gamma1"])
    g4z = zeta.scale(p["gamma4"])
    g4zp = zetap.scale(p["gamma4"])
    zero = LaurentPoly.zero(d)
    entries = [
        [delta, zetap, g4zp, zero],
        [zeta, delta, g1, g4zp],
        [g4z, g1, -delta, zetap],
        [zero, g4z, zeta, -delta],
    ]
    return make_direct_spec(d, entries, vertex_names=["1A", "1B", "2A", "2B"])


def ab_composite_variable() -> LaurentPoly:
    """The composite momentum zeta*zeta' of the AB bilayer, xi = g(z)."""
    d = 2
    zeta = (
        LaurentPoly.constant(d, 1)
        + LaurentPoly.monomial(d, (1, 0))
        + LaurentPoly.monomial(d, (0, 1))
    )
    zetap = (
        LaurentPoly.constant(d, 1)
        + LaurentPoly.monomial(d, (-1, 0))
        + LaurentPoly.monomial(d, (0, -1))
    )
    return zeta * zetap


def build_multilayer(
    base: OperatorSpec, coupling: Sequence[Sequence[object]]
) -> OperatorSpec:
    """Stack s copies of base coupled by a Hermitian rational matrix K.

    The result represents I_s (x) A + K (x) I: each layer carries a full
    copy of the base operator, diagonal K entries shift layer potentials,
    and off-diagonal entries couple aligned vertices across layers.
    Layer-l copies of vertex v are named "l:v" (1-based).
    """
    K = [[GaussianRational.coerce(v) for v in row] for row in coupling]
    s = len(K)
    if any(len(row) != s for row in K):
        raise SpecError("coupling matrix must be square")
    for i in range(s):
        for j in range(s):
            if K[i][j] != K[j][i].conjugate():
                raise SpecError("coupling matrix must be Hermitian")
    if base.is_graph:
        vertices = []
        edges = []
        for layer in range(1, s + 1):
            for name, pot in base.graph.vertices:
                vertices.append((f"{layer}:{name}", pot + K[layer - 1][layer - 1]))
            for e in base.graph.edges:
                edges.append(
                    (
                        f"{layer}:{e.to_vertex}",
                        f"{layer}:{e.from_vertex}",
                        e.offset,
                        e.weight,
                    )
                )
        zero_off = (0,) * base.dimension
        for i in range(s):
            for j in range(s):
                if i != j and not K[i][j].is_zero():
                    for name, _ in base.graph.vertices:
                        edges.append((f"{i+1}:{name}", f"{j+1}:{name}", zero_off, K[i][j]))
        return make_graph_spec(
            base.dimension, vertices, edges, base.graph.hermitian_closure
        )
    # direct-matrix base: block form I_s (x) M + K (x) I
    from .floquet import floquet_matrix

    m = floquet_matrix(base)
    n = m.size
    dim = base.dimension
    zero = LaurentPoly.zero(dim)
    entries = [[zero for _ in range(s * n)] for _ in range(s * n)]
    for i in range(s):
        for a in range(n):
            for b in range(n):
                entries[i * n + a][i * n + b] = m.entries[a][b]
            for j in range(s):
                if not K[i][j].is_zero():
                    entries[i * n + a][j * n + a] = entries[i * n + a][j * n + a] + (
                        LaurentPoly.constant(dim, K[i][j])
                    )
    names = [f"{i+1}:{v}" for i in range(s) for v in base.vertex_names]
    return make_direct_spec(dim, entries, vertex_names=names)
