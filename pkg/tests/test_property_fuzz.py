"""Seeded randomized sweeps beyond the builtin lattices.

Random periodic graphs exercise the whole exact pipeline: closure,
self-adjointness, the reflection identity, dispersion versus a numeric
determinant, quasi-periodic covariance, and round trips.  The Newton
polytope's exact normalized volume is cross-checked against an
independent floating-point hull (Qhull via scipy) when available.
"""

from fractions import Fraction

import numpy as np
import pytest

from blochlab.critical import newton_polytope
from blochlab.exact import GaussianRational as G
from blochlab.floquet import QuasiPeriodicMode, apply_operator, dispersion, floquet_matrix
from blochlab.graphs import builtin, make_graph_spec, parse_spec
from blochlab.laurent import LaurentPoly as P, composite_rewrite


def random_graph_spec(rng, dim, n_vertices, n_edges, complex_weights=True):
    names = [f"v{i}" for i in range(n_vertices)]
    vertices = [
        (n, G(Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))))
        for n in names
    ]
    edges = []
    taken = set()  # triples already used, including implied reverses
    for _ in range(n_edges):
        to = names[int(rng.integers(0, n_vertices))]
        frm = names[int(rng.integers(0, n_vertices))]
        offset = tuple(int(rng.integers(-2, 3)) for _ in range(dim))
        if to == frm and all(o == 0 for o in offset):
            continue
        triple = (to, frm, offset)
        reverse = (frm, to, tuple(-o for o in offset))
        if triple in taken or reverse in taken:
            continue
        re = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
        im = Fraction(int(rng.integers(-2, 3)), int(rng.integers(1, 3))) if complex_weights else Fraction(0)
        w = G(re, im)
        if w.is_zero():
            continue
        taken.add(triple)
        taken.add(reverse)
        edges.append((to, frm, offset, w))
    if not edges:
        edges = [(names[0], names[-1], (1,) * dim, G(1))]
    return make_graph_spec(dim, vertices, edges, hermitian_closure=True)


@pytest.mark.parametrize("dim", [1, 2])
def test_fuzz_closure_gives_self_adjoint_reflection(dim):
    rng = np.random.default_rng(100 + dim)
    for _ in range(15):
        spec = random_graph_spec(rng, dim, int(rng.integers(1, 4)), int(rng.integers(1, 6)))
        assert spec.self_adjoint
        m = floquet_matrix(spec)
        assert m.reflect_conjugate_transpose() == m
        d = dispersion(spec)
        assert d.reflect_conjugate() == d
        # round trip through the file format is term-for-term
        assert parse_spec(spec.serialize()) == spec


@pytest.mark.parametrize("dim", [1, 2])
def test_fuzz_dispersion_matches_numeric_determinant(dim):
    rng = np.random.default_rng(200 + dim)
    for _ in range(10):
        spec = random_graph_spec(rng, dim, int(rng.integers(1, 5)), int(rng.integers(2, 8)))
        d = dispersion(spec)
        m = floquet_matrix(spec)
        assert d.lambda_degree() == spec.size
        for _ in range(5):
            z = tuple(
                rng.uniform(0.7, 1.4) * np.exp(1j * rng.uniform(0, 2 * np.pi))
                for _ in range(dim)
            )
            lam = complex(rng.normal(), rng.normal())
            num = np.linalg.det(m.evaluate(z) - lam * np.eye(spec.size))
            assert abs(d.evaluate(z, lam) - num) <= 1e-9 * max(1.0, abs(num))


def test_fuzz_quasi_periodic_covariance_random_graphs():
    rng = np.random.default_rng(300)
    for _ in range(8):
        spec = random_graph_spec(rng, 2, int(rng.integers(1, 4)), int(rng.integers(2, 6)))
        m = floquet_matrix(spec)
        box = [(-3, 3), (-3, 3)]
        g = rng.normal(size=spec.size) + 1j * rng.normal(size=spec.size)
        zeta = tuple(
            rng.uniform(0.85, 1.2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            for _ in range(2)
        )
        q = QuasiPeriodicMode(zeta, g)
        lhs = apply_operator(spec, q.sample(box))
        rhs = QuasiPeriodicMode(zeta, m.evaluate(zeta) @ g).sample(lhs.box)
        scale = np.max(np.abs(rhs.values)) or 1.0
        assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-10 * scale


def test_fuzz_composite_rewrite_round_trip():
    """Recover planted coefficients: p = sum c_m g^m -> rewrite finds c."""
    rng = np.random.default_rng(400)
    one = P.constant(2, 1)
    g = one + P.monomial(2, (1, 0)) + P.monomial(2, (0, 1), coeff="1/2") + P.monomial(2, (-1, -1), coeff=-2)
    for _ in range(10):
        degree = int(rng.integers(1, 4))
        coeffs = [
            G(Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 3))))
            for _ in range(degree + 1)
        ]
        if coeffs[-1].is_zero():
            coeffs[-1] = G(1)
        p = P.zero(2)
        power = one
        for c in coeffs:
            p = p + power.scale(c)
            power = power * g
        got = composite_rewrite(p, g)
        assert got == coeffs


def test_fuzz_polytope_volume_against_qhull():
    """Exact normalized volume vs an independent floating-point hull."""
    scipy_spatial = pytest.importorskip("scipy.spatial")
    rng = np.random.default_rng(500)
    checked = 0
    while checked < 12:
        spec = random_graph_spec(rng, 2, int(rng.integers(1, 4)), int(rng.integers(2, 7)))
        poly = newton_polytope(dispersion(spec))
        pts = np.array(poly.support, dtype=float)
        if poly.degenerate:
            # Qhull cannot build a 3-D hull either; just confirm flatness
            assert np.linalg.matrix_rank(pts - pts[0]) < 3
            continue
        hull = scipy_spatial.ConvexHull(pts)
        assert abs(poly.normalized_volume - 6.0 * hull.volume) < 1e-6
        checked += 1


def test_fuzz_polytope_faces_support_everything():
    """Every support point lies on or inside each facet's halfspace."""
    rng = np.random.default_rng(600)
    for _ in range(10):
        spec = random_graph_spec(rng, 2, int(rng.integers(1, 4)), int(rng.integers(2, 7)))
        poly = newton_polytope(dispersion(spec))
        if poly.degenerate:
            continue
        assert poly.faces
        for face in poly.faces:
            for p in poly.support:
                val = sum(n * x for n, x in zip(face.normal, p))
                assert val <= face.offset
        # hull vertices lie on at least three facets
        for v in poly.hull_vertices:
            incident = sum(
                1
                for f in poly.faces
                if sum(n * x for n, x in zip(f.normal, v)) == f.offset
            )
            assert incident >= 3


def test_polytope_higher_dimension_support_only():
    p = P(3, {((1, 0, 0), 0): G(1), ((0, 1, 0), 0): G(1), ((0, 0, 1), 1): G(1)})
    poly = newton_polytope(p)
    assert not poly.hull_supported
    assert poly.support
    assert poly.faces == [] and poly.normalized_volume == 0


def test_fuzz_multilayer_diagonal_identity():
    """Diagonal coupling: dispersion equals the exact product of shifts."""
    rng = np.random.default_rng(700)
    for _ in range(5):
        spec = random_graph_spec(rng, 1, int(rng.integers(1, 3)), int(rng.integers(1, 4)))
        from blochlab.graphs import build_multilayer

        mus = [Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3))) for _ in range(2)]
        coupling = [[mus[0], 0], [0, mus[1]]]
        stacked = build_multilayer(spec, coupling)
        expected = dispersion(spec).shift_lambda(mus[0]) * dispersion(spec).shift_lambda(mus[1])
        assert dispersion(stacked) == expected
