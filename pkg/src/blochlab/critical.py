"""Critical points of band functions and the Newton polytope bound.

Symbolic side: the critical point equations are the dispersion
polynomial together with its Euler derivatives z_i dD/dz_i (multiplying
by z_i adds no solutions on the algebraic torus); their supports live in
the support of D, whose convex hull is the Newton polytope.  The
polytope is built with exact integer arithmetic (vertex coordinates are
exponents), so the normalized volume (d+1)! * vol, the Kushnirenko bound
on the number of isolated critical points, is an exact integer.  Facial
forms (terms supported on a face) and vertical faces (affine hull
containing the energy direction, which always carry solutions of the
facial subsystem) are exposed for export and sharpness checks.

Numeric side: seeds from a band grid are polished by damped Newton on
the band gradient, computed from first-order eigenvalue perturbation
(psi* dA/dk psi) with the standard second-order formula for the Hessian;
near-crossings are classified separately since perturbation theory
breaks there.  Only real momenta (the spectrum-relevant torus) are
searched; complex solutions of the critical point equations are out of
numerical scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .floquet import dispersion, floquet_matrix, matrix_on_grid
from .graphs import OperatorSpec, SpecError
from .laurent import LaurentMatrix, LaurentPoly
from .spectrum import BandGrid, SpectralReport


def cpe_system(d: LaurentPoly) -> list[LaurentPoly]:
    """[D, z_1 dD/dz_1, ..., z_d dD/dz_d], exactly."""
    if d.is_zero():
        raise ValueError("zero dispersion polynomial")
    return [d] + [d.euler_derivative(i) for i in range(d.dim)]


# ---------------------------------------------------------------------
# Newton polytope with exact integer arithmetic
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    """A facet given by its primitive outer normal and incidence set."""

    normal: tuple[int, ...]
    offset: int
    points: tuple[tuple[int, ...], ...]  # support points lying on the facet

    @property
    def is_vertical(self) -> bool:
        """Affine hull contains the energy direction (zero last component)."""
        return self.normal[-1] == 0


@dataclass
class NewtonPolytope:
    support: list[tuple[int, ...]]
    hull_vertices: list[tuple[int, ...]]
    faces: list[Face]
    normalized_volume: int
    degenerate: bool
    hull_supported: bool  # False for ambient dimension > 3

    def to_json_obj(self) -> dict:
        return {
            "support": [list(p) for p in self.support],
            "hull_vertices": [list(p) for p in self.hull_vertices],
            "faces": [
                {
                    "normal": list(f.normal),
                    "offset": f.offset,
                    "points": [list(p) for p in f.points],
                }
                for f in self.faces
            ],
            "normalized_volume": self.normalized_volume,
            "degenerate": self.degenerate,
            "hull_supported": self.hull_supported,
        }


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return tuple(x // g for x in v) if g else tuple(v)


def _hull_2d(points):
    """Monotone-chain hull of integer points, counterclockwise."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _orient3(a, b, c, d):
    """Sign of det[b-a, c-a, d-a] (exact integers)."""
    m = [
        [b[i] - a[i] for i in range(3)],
        [c[i] - a[i] for i in range(3)],
        [d[i] - a[i] for i in range(3)],
    ]
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def _hull_3d(points):
    """Exact incremental convex hull; returns outward-oriented triangles."""
    pts = sorted(set(points))
    # seed tetrahedron: four affinely independent points
    p0 = pts[0]
    p1 = next((p for p in pts if p != p0), None)
    p2 = next(
        (
            p
            for p in pts
            if _nonzero_cross(p0, p1, p)
        ),
        None,
    )
    if p1 is None or p2 is None:
        return None
    p3 = next((p for p in pts if _orient3(p0, p1, p2, p) != 0), None)
    if p3 is None:
        return None
    if _orient3(p0, p1, p2, p3) > 0:
        p1, p2 = p2, p1
    tris = [(p0, p1, p2), (p0, p3, p1), (p0, p2, p3), (p1, p3, p2)]
    for q in pts:
        if q in (p0, p1, p2, p3):
            continue
        visible = [t for t in tris if _orient3(t[0], t[1], t[2], q) > 0]
        if not visible:
            continue
        visible_set = set(visible)
        horizon = []
        for t in visible:
            for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                # an edge is on the horizon if its mirrored copy belongs
                # to no visible triangle
                twin_owner = None
                for t2 in tris:
                    if t2 in visible_set:
                        continue
                    if (e[1], e[0]) in (
                        (t2[0], t2[1]),
                        (t2[1], t2[2]),
                        (t2[2], t2[0]),
                    ):
                        twin_owner = t2
                        break
                if twin_owner is not None:
                    horizon.append(e)
        tris = [t for t in tris if t not in visible_set]
        for a, b in horizon:
            tris.append((a, b, q))
    return tris


def _nonzero_cross(a, b, c):
    u = [b[i] - a[i] for i in range(3)]
    v = [c[i] - a[i] for i in range(3)]
    w = (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )
    return any(w)


def newton_polytope(d: LaurentPoly) -> NewtonPolytope:
    """Exact Newton polytope of the dispersion polynomial (d <= 2)."""
    support = sorted(set(d.support()))
    if not support:
        raise ValueError("zero polynomial has no Newton polytope")
    ambient = len(support[0])
    if ambient > 3:
        return NewtonPolytope(support, [], [], 0, False, hull_supported=False)
    if ambient == 2:
        return _polytope_2d(support)
    return _polytope_3d(support)


def _polytope_2d(support):
    hull = _hull_2d(support)
    if len(hull) <= 2:
        return NewtonPolytope(support, hull, [], 0, True, True)
    # shoelace, counterclockwise: 2 * area is the normalized volume (d=1)
    twice_area = 0
    n = len(hull)
    faces = []
    for i in range(n):
        a, b = hull[i], hull[(i + 1) % n]
        twice_area += a[0] * b[1] - b[0] * a[1]
        normal = _primitive((b[1] - a[1], a[0] - b[0]))  # outward for CCW
        offset = normal[0] * a[0] + normal[1] * a[1]
        pts = tuple(
            p for p in support if normal[0] * p[0] + normal[1] * p[1] == offset
        )
        faces.append(Face(normal, offset, pts))
    return NewtonPolytope(support, hull, faces, abs(twice_area), False, True)


def _polytope_3d(support):
    tris = _hull_3d(support)
    if tris is None:
        hull = _degenerate_hull_vertices(support)
        return NewtonPolytope(support, hull, [], 0, True, True)
    # merge coplanar triangles into facets keyed by (primitive normal, offset)
    planes = {}
    for a, b, c in tris:
        u = [b[i] - a[i] for i in range(3)]
        v = [c[i] - a[i] for i in range(3)]
        raw = (
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        )
        normal = _primitive(raw)
        # orient outward: triangles from the incremental hull wind so that
        # inside points see negative orientation; fix sign via any point
        offset = sum(n * x for n, x in zip(normal, a))
        inside = _interior_reference(support)
        if sum(n * q for n, q in zip(normal, inside)) > offset:
            normal = tuple(-n for n in normal)
            offset = -offset
        planes.setdefault((normal, offset), []).append((a, b, c))
    faces = []
    hull_vertices = set()
    for (normal, offset), group in sorted(planes.items()):
        pts = tuple(
            p for p in support if sum(n * x for n, x in zip(normal, p)) == offset
        )
        faces.append(Face(normal, offset, pts))
        for t in group:
            hull_vertices.update(t)
    # normalized volume: 3! * vol via the divergence theorem over the
    # outward-oriented triangles, exact in integers
    six_vol = 0
    for a, b, c in tris:
        det = (
            a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0])
        )
        six_vol += det
    six_vol = abs(six_vol)
    verts = sorted(_filter_vertices_3d(hull_vertices, faces))
    return NewtonPolytope(support, verts, faces, six_vol, False, True)


def _interior_reference(support):
    # rational centroid of the support; only used for sign checks
    n = len(support)
    return tuple(Fraction(sum(p[i] for p in support), n) for i in range(3))


def _filter_vertices_3d(candidates, faces):
    """Keep only true vertices: points on >= 3 facets with full rank."""
    out = []
    for p in candidates:
        incident = [f for f in faces if sum(n * x for n, x in zip(f.normal, p)) == f.offset]
        if len(incident) >= 3:
            mat = np.array([f.normal for f in incident], dtype=float)
            if np.linalg.matrix_rank(mat) == 3:
                out.append(p)
        # triangulation artifacts (edge/face-interior points) drop out
    return out


def _degenerate_hull_vertices(support):
    """Extreme points of a lower-dimensional support set (best effort)."""
    if len(support) == 1:
        return list(support)
    base = support[0]
    dirs = [tuple(p[i] - base[i] for i in range(3)) for p in support[1:]]
    rank_dirs = []
    for v in dirs:
        if not any(v):
            continue
        if not rank_dirs:
            rank_dirs.append(v)
        elif len(rank_dirs) == 1 and _nonzero_cross((0, 0, 0), rank_dirs[0], v):
            rank_dirs.append(v)
    if len(rank_dirs) <= 1:
        # collinear: endpoints by parameter along the direction
        key = lambda p: sum((p[i] - base[i]) * rank_dirs[0][i] for i in range(3)) if rank_dirs else 0
        return [min(support, key=key), max(support, key=key)]
    # planar: project onto two independent axes and take the 2-D hull
    idx = _projection_axes(rank_dirs)
    proj = {(p[idx[0]], p[idx[1]]): p for p in sorted(support, reverse=True)}
    hull2 = _hull_2d(list(proj))
    return [proj[q] for q in hull2]


def _projection_axes(rank_dirs):
    u, v = rank_dirs[0], rank_dirs[1]
    normal = (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )
    drop = max(range(3), key=lambda i: abs(normal[i]))
    return [i for i in range(3) if i != drop]


def facial_form(d: LaurentPoly, face: Face | None) -> LaurentPoly:
    """Terms of D supported on the given face (None = improper face = D)."""
    if face is None:
        return d
    out = LaurentPoly(d.dim)
    terms = {}
    for (zexp, lam), coeff in d.terms.items():
        point = zexp + (lam,)
        if sum(n * x for n, x in zip(face.normal, point)) == face.offset:
            terms[(zexp, lam)] = coeff
    if not terms:
        raise ValueError("face is not incident to the polynomial's polytope")
    out.terms = terms
    return out


def vertical_faces(polytope: NewtonPolytope) -> list[Face]:
    """Facets whose affine hull contains the energy direction.

    These automatically carry solutions of the facial subsystem of the
    critical point equations, so their presence rules out sharpness of
    the Kushnirenko bound.
    """
    return [f for f in polytope.faces if f.is_vertical]


# ---------------------------------------------------------------------
# Numerical critical points on the torus
# ---------------------------------------------------------------------

@dataclass
class CriticalPoint:
    k: np.ndarray
    band: int
    energy: float
    gradient_norm: float
    hessian: np.ndarray | None
    classification: str  # min | max | saddle | degenerate-hessian | band-crossing
    isolated: bool
    kernel_dimension: int = 1

    def to_json_obj(self) -> dict:
        return {
            "k": [float(v) for v in self.k],
            "band": self.band,
            "energy": self.energy,
            "gradient_norm": self.gradient_norm,
            "hessian": None if self.hessian is None else self.hessian.tolist(),
            "classification": self.classification,
            "isolated": self.isolated,
            "kernel_dimension": self.kernel_dimension,
        }


class _BandCalculus:
    """Eigenvalue, perturbation gradient and Hessian of one band at k."""

    def __init__(self, spec: OperatorSpec):
        self.spec = spec
        m = floquet_matrix(spec)
        self.m = m
        d = spec.dimension
        self.deriv = [[[e.euler_derivative(p) for e in row] for row in m.entries] for p in range(d)]
        self.deriv2 = [
            [[[e.euler_derivative(q) for e in row] for row in self.deriv[p]] for q in range(d)]
            for p in range(d)
        ]
        self.dim = d
        self.size = spec.size

    def _eval_matrix(self, entries, z):
        out = np.empty((self.size, self.size), dtype=complex)
        for i in range(self.size):
            for j in range(self.size):
                e = entries[i][j]
                out[i, j] = e.evaluate(z) if e.terms else 0.0
        return out

    def eig(self, k):
        z = np.exp(1j * np.asarray(k, dtype=float))
        h = self._eval_matrix(self.m.entries, z)
        vals, vecs = np.linalg.eigh(h)
        return z, vals, vecs

    def gradient_hessian(self, k, band):
        """First/second-order perturbation formulas (simple eigenvalues).

        dA/dk_p = i * (Euler_p A) at z = e^{ik}; both derivatives are
        Hermitian matrices so the gradient and Hessian are real.
        """
        z, vals, vecs = self.eig(k)
        psi = vecs[:, band]
        lam = vals[band]
        d = self.dim
        da = [1j * self._eval_matrix(self.deriv[p], z) for p in range(d)]
        grad = np.array([(psi.conj() @ da[p] @ psi).real for p in range(d)])
        hess = np.empty((d, d))
        other = [m for m in range(self.size) if m != band]
        for p in range(d):
            for q in range(p, d):
                d2 = -self._eval_matrix(self.deriv2[p][q], z)
                val = (psi.conj() @ d2 @ psi).real
                for m in other:
                    gap = lam - vals[m]
                    if abs(gap) < 1e-14:
                        continue
                    val += 2.0 * (
                        (psi.conj() @ da[p] @ vecs[:, m])
                        * (vecs[:, m].conj() @ da[q] @ psi)
                    ).real / gap
                hess[p, q] = hess[q, p] = val
        return vals, grad, hess

    def band_gap(self, vals, band):
        gaps = []
        if band > 0:
            gaps.append(vals[band] - vals[band - 1])
        if band < len(vals) - 1:
            gaps.append(vals[band + 1] - vals[band])
        return min(gaps) if gaps else np.inf


def _torus_delta(a, b):
    d = np.mod(np.abs(np.asarray(a) - np.asarray(b)), 2 * np.pi)
    return np.sqrt((np.minimum(d, 2 * np.pi - d) ** 2).sum())


def find_critical_points(
    spec: OperatorSpec,
    grid: BandGrid,
    refine_tol: float = 1e-10,
    cluster_tol: float = 1e-6,
    gap_tol_rel: float = 1e-6,
    chain_length: int = 8,
    max_newton: int = 80,
) -> list[CriticalPoint]:
    """Locate and classify the critical points of every band function.

    Seeds are grid points that are local extrema among their neighbors or
    have a small central-difference gradient; each seed is polished by
    damped Newton on the perturbation gradient.  Points whose band gap is
    below gap_tol_rel * spectral width are band crossings: they are
    located by direct gap minimization instead (perturbation formulas
    break down there) and carry the kernel dimension of the Floquet
    matrix at the touching energy.  Converged points closer than
    cluster_tol merge; connected chains of at least `chain_length`
    refined points that survive refinement are flagged non-isolated.
    """
    if not spec.self_adjoint:
        raise SpecError("critical point search requires a self-adjoint spec")
    if spec.dimension > 2:
        raise SpecError("numerical refinement is implemented for d <= 2")
    calc = _BandCalculus(spec)
    width = grid.spectral_width
    gap_tol = gap_tol_rel * width
    d = spec.dimension
    res = grid.resolution
    hs = [2 * np.pi / g for g in res]

    points: list[CriticalPoint] = []
    for band in range(grid.n_bands):
        vals = grid.energies[..., band]
        seeds = _collect_seeds(vals, hs, width)
        crossings = _collect_crossing_seeds(grid, band, width)
        refined: list[tuple[np.ndarray, float, np.ndarray, np.ndarray]] = []
        for seed in seeds:
            k = np.array([seed[i] * hs[i] for i in range(d)])
            out = _newton_refine(calc, k, band, refine_tol, gap_tol, max_newton)
            if out is not None:
                refined.append(out)
        clusters = _cluster([r[0] for r in refined], cluster_tol)
        chains = _chain_components(
            [refined[i][0] for cl in clusters for i in cl[:1]], 3.0 * max(hs)
        )
        big_chain_members = set()
        for comp in chains:
            if len(comp) >= chain_length:
                big_chain_members.update(comp)
        for ci, cl in enumerate(clusters):
            k, energy, grad, hess = refined[cl[0]]
            isolated = ci not in big_chain_members
            cls = _classify(hess, width)
            points.append(
                CriticalPoint(
                    k % (2 * np.pi),
                    band,
                    float(energy),
                    float(np.linalg.norm(grad)),
                    hess,
                    cls,
                    isolated,
                )
            )
        for seed in crossings:
            k0 = np.array([seed[i] * hs[i] for i in range(d)])
            out = _refine_crossing(calc, k0, band, gap_tol)
            if out is None:
                continue
            k, energy, kdim = out
            dup = any(
                p.classification == "band-crossing"
                and _torus_delta(p.k, k % (2 * np.pi)) < max(cluster_tol, 1e-4)
                for p in points
            )
            if not dup:
                points.append(
                    CriticalPoint(
                        k % (2 * np.pi),
                        band,
                        float(energy),
                        0.0,
                        None,
                        "band-crossing",
                        True,
                        kernel_dimension=kdim,
                    )
                )
    return points


def _collect_seeds(vals: np.ndarray, hs, width):
    d = vals.ndim
    neighbors = []
    for axis in range(d):
        neighbors.append(np.roll(vals, 1, axis=axis))
        neighbors.append(np.roll(vals, -1, axis=axis))
    if d == 2:
        for sx in (1, -1):
            for sy in (1, -1):
                neighbors.append(np.roll(np.roll(vals, sx, axis=0), sy, axis=1))
    stack = np.stack(neighbors)
    is_max = (vals >= stack.max(axis=0))
    is_min = (vals <= stack.min(axis=0))
    grad2 = np.zeros_like(vals)
    for axis in range(d):
        cd = (np.roll(vals, -1, axis=axis) - np.roll(vals, 1, axis=axis)) / (2 * hs[axis])
        grad2 = grad2 + cd**2
    small_grad = np.sqrt(grad2) < width * max(hs)
    return [tuple(idx) for idx in np.argwhere(is_max | is_min | small_grad)]


def _collect_crossing_seeds(grid: BandGrid, band: int, width: float):
    e = grid.energies
    if band >= e.shape[-1] - 1:
        return []
    gap = e[..., band + 1] - e[..., band]
    neighbors = [gap]
    d = gap.ndim
    for axis in range(d):
        neighbors.append(np.roll(gap, 1, axis=axis))
        neighbors.append(np.roll(gap, -1, axis=axis))
    local_min = gap <= np.stack(neighbors).min(axis=0)
    small = gap < 0.15 * width
    return [tuple(idx) for idx in np.argwhere(local_min & small)]


def _newton_refine(calc, k, band, refine_tol, gap_tol, max_newton):
    k = np.array(k, dtype=float)
    vals, grad, hess = calc.gradient_hessian(k, band)
    if calc.band_gap(vals, band) < gap_tol:
        return None  # handled by the crossing path
    gnorm = np.linalg.norm(grad)
    for _ in range(max_newton):
        if gnorm < refine_tol:
            return k % (2 * np.pi), vals[band], grad, hess
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            step = -grad
        # damping: halve until the gradient norm does not increase
        scale = 1.0
        for _ in range(20):
            trial = k + scale * step
            tvals, tgrad, thess = calc.gradient_hessian(trial, band)
            if calc.band_gap(tvals, band) < gap_tol:
                scale *= 0.5
                continue
            if np.linalg.norm(tgrad) <= gnorm or scale < 1e-6:
                k, vals, grad, hess = trial, tvals, tgrad, thess
                gnorm = np.linalg.norm(grad)
                break
            scale *= 0.5
        else:
            return None
    if gnorm < refine_tol:
        return k % (2 * np.pi), vals[band], grad, hess
    return None


def _refine_crossing(calc, k, band, gap_tol, iters=200):
    """Pattern search minimizing the gap (non-smooth at conical points)."""
    d = k.size

    def gap_at(kk):
        _, vals, _ = calc.eig(kk)
        return vals[band + 1] - vals[band], vals

    step = 2 * np.pi / 64
    g, vals = gap_at(k)
    for _ in range(iters):
        improved = False
        for axis in range(d):
            for sign in (1.0, -1.0):
                trial = k.copy()
                trial[axis] += sign * step
                tg, tvals = gap_at(trial)
                if tg < g:
                    k, g, vals = trial, tg, tvals
                    improved = True
        if not improved:
            step *= 0.5
            if step < 1e-10:
                break
    if g >= gap_tol:
        return None
    energy = 0.5 * (vals[band] + vals[band + 1])
    from .floquet import floquet_mode

    mode = floquet_mode(calc.spec, tuple(np.exp(1j * k)), energy)
    kdim = max(mode.kernel_dimension, 2)
    return k, energy, kdim


def _classify(hess: np.ndarray, width: float, tol_rel: float = 1e-7) -> str:
    eigs = np.linalg.eigvalsh(hess)
    tol = tol_rel * max(width, 1.0)
    if np.any(np.abs(eigs) <= tol):
        return "degenerate-hessian"
    if np.all(eigs > 0):
        return "min"
    if np.all(eigs < 0):
        return "max"
    return "saddle"


def _cluster(points: list[np.ndarray], tol: float) -> list[list[int]]:
    clusters: list[list[int]] = []
    for i, p in enumerate(points):
        for cl in clusters:
            if _torus_delta(points[cl[0]], p) < tol:
                cl.append(i)
                break
        else:
            clusters.append([i])
    return clusters


def _chain_components(reps: list[np.ndarray], link: float) -> list[list[int]]:
    """Union-find over torus points, bucketed so flat bands stay cheap."""
    n = len(reps)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    n_cells = max(1, int(2 * np.pi // link))
    width = 2 * np.pi / n_cells  # >= link, so neighbors live in adjacent cells

    def cell_of(p):
        return tuple(int((x % (2 * np.pi)) // width) % n_cells for x in p)

    buckets: dict[tuple, list[int]] = {}
    for i, p in enumerate(reps):
        buckets.setdefault(cell_of(p), []).append(i)
    d = reps[0].size if n else 0
    offsets = [()]
    for _ in range(d):
        offsets = [o + (s,) for o in offsets for s in (-1, 0, 1)]
    for c, members in buckets.items():
        for off in offsets:
            nb = tuple((ci + oi) % n_cells for ci, oi in zip(c, off))
            for i in members:
                for j in buckets.get(nb, ()):
                    if i < j and _torus_delta(reps[i], reps[j]) < link:
                        parent[find(i)] = find(j)
    comps: dict[int, list[int]] = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    return list(comps.values())


# ---------------------------------------------------------------------
# Spectral edge audit
# ---------------------------------------------------------------------

@dataclass
class EdgeAudit:
    band: int
    side: str  # "min" | "max"
    energy: float
    attaining: list[int]  # indices into the critical point list
    verdict: str  # nondegenerate-unique | nondegenerate-multiple | degenerate | unresolved

    def to_json_obj(self) -> dict:
        return {
            "band": self.band,
            "side": self.side,
            "energy": self.energy,
            "attaining": self.attaining,
            "verdict": self.verdict,
        }


def spectral_edge_report(
    points: list[CriticalPoint],
    report: SpectralReport,
    match_tol_rel: float = 1e-8,
    hess_tol: float = 1e-7,
) -> list[EdgeAudit]:
    """Audit each band-interval endpoint against the critical points.

    A resolved edge is nondegenerate-unique / -multiple when every
    attaining critical point has a full-rank Hessian (|det H| above
    hess_tol scaled by the spectral width); flat or rank-deficient
    attainment is degenerate; an endpoint with no matching critical
    point is unresolved.
    """
    width = max((hi - lo for lo, hi in report.union), default=1.0) or 1.0
    match_tol = max(match_tol_rel * width, 1e-12)
    audits = []
    for band, (lo, hi) in enumerate(report.bands):
        band_energies = [p.energy for p in points if p.band == band]
        for side, edge in (("min", lo), ("max", hi)):
            wanted = {"min"} if side == "min" else {"max"}
            # grid extrema only bracket the true edge; refined critical
            # energies are exact band values, so they sharpen the endpoint
            if band_energies:
                edge = (
                    min(edge, min(band_energies))
                    if side == "min"
                    else max(edge, max(band_energies))
                )
            idxs = [
                i
                for i, p in enumerate(points)
                if p.band == band and abs(p.energy - edge) <= max(match_tol, 10 * abs(edge) * 1e-12)
            ]
            flat_edge = any(
                abs(fb.energy - edge) <= match_tol for fb in report.flat_bands
            )
            if flat_edge or any(not points[i].isolated for i in idxs):
                verdict = "degenerate"
            elif not idxs:
                verdict = "unresolved"
            else:
                extremal = [
                    i
                    for i in idxs
                    if points[i].classification in wanted | {"band-crossing", "degenerate-hessian"}
                ]
                if not extremal:
                    verdict = "unresolved"
                elif any(
                    points[i].classification in ("degenerate-hessian", "band-crossing")
                    or points[i].hessian is None
                    or abs(np.linalg.det(points[i].hessian)) <= hess_tol * max(width, 1.0)
                    for i in extremal
                ):
                    verdict = "degenerate"
                else:
                    verdict = (
                        "nondegenerate-unique"
                        if len(extremal) == 1
                        else "nondegenerate-multiple"
                    )
                idxs = extremal or idxs
            audits.append(EdgeAudit(band, side, float(edge), idxs, verdict))
    return audits
