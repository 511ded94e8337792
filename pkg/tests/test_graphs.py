import json

import numpy as np
import pytest

from blochlab.exact import GaussianRational as G
from blochlab.floquet import dispersion, floquet_matrix
from blochlab.graphs import (
    SpecError,
    build_multilayer,
    builtin,
    make_graph_spec,
    parse_spec,
)

LINE_DOC = {
    "dimension": 1,
    "hermitian_closure": True,
    "vertices": [{"name": "v", "potential": "2/3"}],
    "edges": [{"to": "v", "from": "v", "offset": [1], "weight": "-1"}],
}

ALL_BUILTINS = [
    ("line", dict(V="1/2")),
    ("square_lattice", dict(V=0)),
    ("hexagonal", dict(a=-1, b=-2, c=-3, Vv="1/2", Vw="1/3")),
    ("lieb", dict(Vc=0, Va="1/3", Vb="1/3")),
    ("ab_bilayer", dict(Delta=1, gamma1="2/3", gamma4="1/5")),
    ("fik", dict(a=1, b=1, c=1, d=1, e=1, Vu=0, Vv=1)),
]


def test_parse_line_graph_document():
    spec = parse_spec(json.dumps(LINE_DOC))
    assert spec.dimension == 1
    assert spec.size == 1
    assert len(spec.graph.edges) == 2  # closure adds the reverse
    offsets = sorted(e.offset for e in spec.graph.edges)
    assert offsets == [(-1,), (1,)]
    assert spec.self_adjoint


def test_parse_potential_only():
    doc = {"dimension": 2, "vertices": [{"name": "v", "potential": "5"}], "edges": []}
    spec = parse_spec(json.dumps(doc))
    assert spec.size == 1
    assert floquet_matrix(spec).entries[0][0] == dispersion(spec).substitute_lambda(0)


def test_closure_adds_conjugate_reverse():
    doc = {
        "dimension": 2,
        "vertices": [{"name": "v", "potential": "0"}, {"name": "w", "potential": "0"}],
        "edges": [
            {"to": "v", "from": "w", "offset": [1, 0], "weight": {"re": "0", "im": "2"}}
        ],
    }
    spec = parse_spec(json.dumps(doc))
    rev = [e for e in spec.graph.edges if e.to_vertex == "w"]
    assert len(rev) == 1
    assert rev[0].offset == (-1, 0)
    assert rev[0].weight == G(0, -2)
    assert spec.self_adjoint


def test_parse_errors():
    with pytest.raises(SpecError):
        parse_spec("not json at all {")
    bad_vertex = dict(LINE_DOC, edges=[{"to": "x", "from": "v", "offset": [1], "weight": "1"}])
    with pytest.raises(SpecError, match="names no vertex"):
        parse_spec(json.dumps(bad_vertex))
    bad_arity = dict(LINE_DOC, edges=[{"to": "v", "from": "v", "offset": [1, 0], "weight": "1"}])
    with pytest.raises(SpecError, match="arity"):
        parse_spec(json.dumps(bad_arity))
    bad_weight = dict(LINE_DOC, edges=[{"to": "v", "from": "v", "offset": [1], "weight": "0.5"}])
    with pytest.raises(SpecError):
        parse_spec(json.dumps(bad_weight))
    conflict = dict(
        LINE_DOC,
        edges=[
            {"to": "v", "from": "v", "offset": [1], "weight": "1"},
            {"to": "v", "from": "v", "offset": [1], "weight": "2"},
        ],
    )
    with pytest.raises(SpecError, match="conflicting"):
        parse_spec(json.dumps(conflict))
    zero_w = dict(LINE_DOC, edges=[{"to": "v", "from": "v", "offset": [1], "weight": "0"}])
    with pytest.raises(SpecError, match="zero weight"):
        parse_spec(json.dumps(zero_w))
    loop = dict(LINE_DOC, edges=[{"to": "v", "from": "v", "offset": [0], "weight": "1"}])
    with pytest.raises(SpecError, match="self loop"):
        parse_spec(json.dumps(loop))
    with pytest.raises(SpecError, match="dimension"):
        parse_spec(json.dumps({"vertices": []}))


def test_duplicate_identical_edges_collapse():
    doc = dict(
        LINE_DOC,
        edges=[
            {"to": "v", "from": "v", "offset": [1], "weight": "-1"},
            {"to": "v", "from": "v", "offset": [1], "weight": "-1"},
        ],
    )
    spec = parse_spec(json.dumps(doc))
    assert len(spec.graph.edges) == 2


@pytest.mark.parametrize("name,params", ALL_BUILTINS)
def test_round_trip_builtins(name, params):
    spec = builtin(name, params)
    again = parse_spec(spec.serialize())
    assert again == spec
    assert dispersion(again) == dispersion(spec)


def test_round_trip_complex_weight_spec():
    spec = make_graph_spec(
        2,
        [("u", "1/2"), ("w", 0)],
        [("u", "w", (1, -1), G.parse("1/2+1/3i"))],
    )
    assert parse_spec(spec.serialize()) == spec
    assert spec.self_adjoint


def test_non_self_adjoint_detection():
    spec = make_graph_spec(
        1,
        [("v", 0)],
        [("v", "v", (1,), 1), ("v", "v", (-1,), 2)],
        hermitian_closure=False,
    )
    assert not spec.self_adjoint
    complex_pot = make_graph_spec(1, [("v", G(0, 1))], [])
    assert not complex_pot.self_adjoint


def test_builtin_hexagonal_shape():
    spec = builtin("hexagonal", a=-1, b=-1, c=-1, Vv=0, Vw=0)
    assert spec.size == 2
    assert len(spec.graph.edges) == 6  # 3 orbits plus Hermitian reverses


def test_builtin_errors():
    with pytest.raises(SpecError, match="unknown builtin"):
        builtin("nope")
    with pytest.raises(SpecError, match="missing parameter"):
        builtin("hexagonal", a=1)
    with pytest.raises(SpecError, match="unknown parameter"):
        builtin("line", V=0, bogus=1)


def test_reflection_property_all_builtins():
    """A(conj(z)^-1) == A(z)^* entrywise, exactly, then spot-checked."""
    rng = np.random.default_rng(61)
    for name, params in ALL_BUILTINS:
        spec = builtin(name, params)
        assert spec.self_adjoint
        m = floquet_matrix(spec)
        assert m.reflect_conjugate_transpose() == m
        for _ in range(100):
            z = tuple(
                rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
                for _ in range(spec.dimension)
            )
            zbar_inv = tuple(1.0 / np.conj(v) for v in z)
            lhs = m.evaluate(zbar_inv)
            rhs = m.evaluate(z).conj().T
            assert np.max(np.abs(lhs - rhs)) <= 1e-9 * max(1.0, np.max(np.abs(rhs)))


def test_direct_matrix_reflection_checked():
    spec = builtin("ab_bilayer", Delta=1, gamma1="2/3", gamma4="1/5")
    assert not spec.is_graph
    assert spec.self_adjoint
    assert spec.vertex_names == ["1A", "1B", "2A", "2B"]


def test_ab_bilayer_matrix_exact():
    """At Delta=0, gamma1=1/2, gamma4=0 the 4x4 entries are fixed."""
    from blochlab.laurent import LaurentPoly as P

    spec = builtin("ab_bilayer", Delta=0, gamma1="1/2", gamma4=0)
    m = floquet_matrix(spec)
    one = P.constant(2, 1)
    zeta = one + P.monomial(2, (1, 0)) + P.monomial(2, (0, 1))
    zetap = one + P.monomial(2, (-1, 0)) + P.monomial(2, (0, -1))
    zero = P.zero(2)
    half = P.constant(2, "1/2")
    expected = [
        [zero, zetap, zero, zero],
        [zeta, zero, half, zero],
        [zero, half, zero, zetap],
        [zero, zero, zeta, zero],
    ]
    for i in range(4):
        for j in range(4):
            assert m.entries[i][j] == expected[i][j]


def test_multilayer_requires_hermitian():
    base = builtin("line", V=0)
    with pytest.raises(SpecError, match="Hermitian"):
        build_multilayer(base, [[0, 1], [2, 0]])


def test_multilayer_zero_coupling_power():
    base = builtin("line", V="1/3")
    spec = build_multilayer(base, [[0, 0], [0, 0]])
    d0 = dispersion(base)
    assert dispersion(spec) == d0 * d0


def test_multilayer_single_layer_shift():
    base = builtin("line", V=0)
    spec = build_multilayer(base, [["1/2"]])
    assert dispersion(spec) == dispersion(base).shift_lambda("1/2")


def test_multilayer_diagonal_coupling_exact_product():
    base = builtin("hexagonal", a=-1, b=-1, c=-1, Vv=0, Vw=0)
    mus = ["1/2", "-1/3", "2"]
    spec = build_multilayer(base, [[mus[0], 0, 0], [0, mus[1], 0], [0, 0, mus[2]]])
    expected = dispersion(base).shift_lambda(mus[0])
    for mu in mus[1:]:
        expected = expected * dispersion(base).shift_lambda(mu)
    assert dispersion(spec) == expected


def test_multilayer_vertex_names():
    base = builtin("hexagonal", a=-1, b=-1, c=-1, Vv=0, Vw=0)
    spec = build_multilayer(base, [["0", "1/2"], ["1/2", "0"]])
    assert spec.vertex_names == ["1:v", "1:w", "2:v", "2:w"]
    assert spec.self_adjoint


def test_multilayer_direct_matrix_base():
    base = builtin("ab_bilayer", Delta=0, gamma1="1/2", gamma4=0)
    spec = build_multilayer(base, [["0", "1/4"], ["1/4", "0"]])
    assert spec.size == 8
    d = dispersion(spec)
    expected = dispersion(base).shift_lambda("1/4") * dispersion(base).shift_lambda("-1/4")
    assert d == expected
