"""Fermi sections and reducibility certificates.

A Fermi section is the fixed-energy cross-section of the dispersion
relation: the exact polynomial D(z, lambda0) plus, for two-dimensional
self-adjoint operators at real energy, the real solution curves in the
momentum torus extracted by marching squares (D is then real-valued on
the torus).  Conical touchings that cross zero without a sign change are
reported as isolated points rather than polylines.

A factorization certificate records a verified product decomposition of
the dispersion polynomial produced by one of three mechanisms: a unitary
symmetry commuting with the operator, uniform-coupling multilayer
structure, or reduction to a single composite momentum variable.  Exact
certificates re-expand term-for-term on creation; numeric ones are
validated at fresh random sample points.  Absence of a certificate is
never a claim of irreducibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import GR_ONE, GR_ZERO, GaussianRational, rational_roots
from .floquet import dispersion, floquet_matrix, poly_on_grid
from .graphs import OperatorSpec, SpecError, build_multilayer
from .laurent import LaurentMatrix, LaurentPoly, composite_rewrite
from .exact import exact_column_basis, invert_exact


# ---------------------------------------------------------------------
# Fermi sections
# ---------------------------------------------------------------------

@dataclass
class FermiSection:
    energy: complex
    energy_exact: GaussianRational | None
    polynomial: LaurentPoly
    curves: list[np.ndarray]  # each (n, 2) vertex array in [0, 2pi)^2
    points: list[np.ndarray]  # isolated zeros
    curve_kind: str  # "sign-change" | "abs-threshold" | "none"
    grid_bound: float  # documented per-cell interpolation bound eps(grid)

    def to_json_obj(self) -> dict:
        return {
            "lambda0": [self.energy.real, self.energy.imag],
            "lambda0_exact": str(self.energy_exact) if self.energy_exact else None,
            "polynomial": self.polynomial.to_json_obj(),
            "curves": [c.tolist() for c in self.curves],
            "points": [p.tolist() for p in self.points],
            "curve_kind": self.curve_kind,
            "grid_bound": self.grid_bound,
        }


def fermi_section(
    spec: OperatorSpec,
    lam0,
    resolution: int = 256,
    extract_curves: bool | None = None,
) -> FermiSection:
    """Exact section polynomial plus real torus curves (d = 2 only)."""
    exact = None
    if isinstance(lam0, (int, str, Fraction, GaussianRational)):
        exact = GaussianRational.coerce(lam0)
        lam_c = exact.to_complex()
    else:
        lam_c = complex(lam0)
        exact = GaussianRational.from_complex(lam_c)
    poly = dispersion(spec).substitute_lambda(exact)
    if extract_curves is None:
        extract_curves = spec.dimension == 2
    if not extract_curves:
        return FermiSection(lam_c, exact, poly, [], [], "none", 0.0)
    if spec.dimension != 2:
        raise SpecError("real Fermi curves are only extracted for d = 2")

    real_level = spec.self_adjoint and abs(lam_c.imag) == 0.0
    axes = [2.0 * np.pi * np.arange(resolution) / resolution] * 2
    vals = poly_on_grid(poly, axes)
    if real_level:
        # self-adjointness makes the section real-valued on the torus
        vscale = float(np.max(np.abs(vals))) or 1.0
        if float(np.max(np.abs(vals.imag))) > 1e-9 * vscale:
            raise SpecError("section is not real on the torus; spec is not self-adjoint")
        field = vals.real
        fscale = float(np.max(np.abs(field))) or 1.0
        # clamp rounding noise so exact zeros (conical touchings) do not
        # read as sign changes
        field = np.where(np.abs(field) < 1e-12 * fscale, 0.0, field)
        kind = "sign-change"
        level_shift = 0.0
    else:
        # |D|^2 has no signs to march on; use a small positive threshold
        # and flag the output as lower-confidence
        field = np.abs(vals) ** 2
        scale = float(field.max()) or 1.0
        level_shift = 1e-6 * scale
        field = field - level_shift
        kind = "abs-threshold"

    curves = _marching_squares_torus(field, resolution)
    points = _isolated_zeros(poly, field, resolution) if real_level else []
    # remove point candidates that in fact sit on an extracted curve
    kept = []
    for p in points:
        on_curve = any(
            np.min(_torus_dist(c, p)) < 2.0 * (2 * np.pi / resolution) for c in curves if len(c)
        )
        if not on_curve:
            kept.append(p)
    h = 2 * np.pi / resolution
    grad_bound = _max_grid_gradient(field, h)
    eps = 4.0 * h * grad_bound + level_shift
    return FermiSection(lam_c, exact, poly, curves, kept, kind, float(eps))


def _torus_dist(curve: np.ndarray, p: np.ndarray) -> np.ndarray:
    d = np.abs(curve - p[None, :])
    d = np.minimum(d, 2 * np.pi - d)
    return np.sqrt((d**2).sum(axis=1))


def _max_grid_gradient(field: np.ndarray, h: float) -> float:
    gx = np.abs(np.roll(field, -1, axis=0) - field) / h
    gy = np.abs(np.roll(field, -1, axis=1) - field) / h
    return float(max(gx.max(), gy.max()))


def _marching_squares_torus(field: np.ndarray, g: int) -> list[np.ndarray]:
    """Zero contours of a periodic scalar grid, chained into polylines.

    Values within 1e-12 of the field scale are clamped to zero first, so
    an energy level that merely touches zero (conical point) produces no
    spurious sliver contours from rounding noise.
    """
    h = 2 * np.pi / g
    scale = float(np.max(np.abs(field))) or 1.0
    field = np.where(np.abs(field) < 1e-12 * scale, 0.0, field)
    f00 = field
    f10 = np.roll(field, -1, axis=0)
    f01 = np.roll(field, -1, axis=1)
    f11 = np.roll(f10, -1, axis=1)

    segments = []
    cells = np.argwhere(
        ~(
            ((f00 > 0) & (f10 > 0) & (f01 > 0) & (f11 > 0))
            | ((f00 < 0) & (f10 < 0) & (f01 < 0) & (f11 < 0))
        )
    )
    for i, j in cells:
        c00, c10, c01, c11 = f00[i, j], f10[i, j], f01[i, j], f11[i, j]
        bottom = top = left = right = None
        if (c00 > 0) != (c10 > 0) and (c00 != 0 or c10 != 0):
            bottom = (i + c00 / (c00 - c10), j)
        if (c01 > 0) != (c11 > 0) and (c01 != 0 or c11 != 0):
            top = (i + c01 / (c01 - c11), j + 1)
        if (c00 > 0) != (c01 > 0) and (c00 != 0 or c01 != 0):
            left = (i, j + c00 / (c00 - c01))
        if (c10 > 0) != (c11 > 0) and (c10 != 0 or c11 != 0):
            right = (i + 1, j + c10 / (c10 - c11))
        pts = [p for p in (bottom, top, left, right) if p is not None]
        if len(pts) == 2:
            segments.append((pts[0], pts[1]))
        elif len(pts) == 4:
            # ambiguous saddle cell: the corner pair sharing the center's
            # sign stays connected through the cell
            center = (c00 + c10 + c01 + c11) / 4.0
            if (center > 0) == (c00 > 0):
                segments.append((bottom, right))
                segments.append((left, top))
            else:
                segments.append((bottom, left))
                segments.append((top, right))

    # chain segments into polylines by matching endpoints (grid-unit coords)
    def key(p):
        return (round(p[0] * 4096) % (g * 4096), round(p[1] * 4096) % (g * 4096))

    adj: dict[tuple, list[int]] = {}
    for idx, (a, b) in enumerate(segments):
        adj.setdefault(key(a), []).append(idx)
        adj.setdefault(key(b), []).append(idx)
    used = [False] * len(segments)
    polylines = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        a, b = segments[start]
        chain = [a, b]
        for endpoint_side in (1, 0):
            while True:
                tip = chain[-1] if endpoint_side == 1 else chain[0]
                cands = [i for i in adj.get(key(tip), []) if not used[i]]
                if not cands:
                    break
                nxt = cands[0]
                used[nxt] = True
                pa, pb = segments[nxt]
                other = pb if key(pa) == key(tip) else pa
                if endpoint_side == 1:
                    chain.append(other)
                else:
                    chain.insert(0, other)
        arr = np.array([((p[0] % g) * h, (p[1] % g) * h) for p in chain])
        polylines.append(arr)
    return polylines


def _isolated_zeros(poly: LaurentPoly, field: np.ndarray, g: int) -> list[np.ndarray]:
    """Conical touchings: local |field| minima near zero without sign change."""
    h = 2 * np.pi / g
    absf = np.abs(field)
    scale = float(absf.max()) or 1.0
    neighborhood_min = absf.copy()
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            neighborhood_min = np.minimum(
                neighborhood_min, np.roll(np.roll(absf, dx, axis=0), dy, axis=1)
            )
    local_min = absf <= neighborhood_min + 0.0
    small = absf < scale * (4.0 / g) ** 2 * 16.0
    cand = np.argwhere(local_min & small)
    found = []
    for i, j in cand:
        block = field[
            np.ix_([(i - 1) % g, i % g, (i + 1) % g], [(j - 1) % g, j % g, (j + 1) % g])
        ]
        if (block > 0).any() and (block < 0).any():
            continue  # a sign change: curve territory
        k = np.array([i * h, j * h])
        k = _refine_extremum(poly, k)
        if k is None:
            continue
        val = abs(poly.evaluate(np.exp(1j * k)))
        if val < 1e-8 * scale:
            if not any(np.min(_torus_dist(np.array([q]), k)) < 1e-4 for q in found):
                found.append(k % (2 * np.pi))
    return [np.asarray(p) for p in found]


def _refine_extremum(poly: LaurentPoly, k: np.ndarray, iters: int = 60):
    """Newton on grad F for F(k) = poly(e^{ik}) using exact Euler derivatives."""
    d = poly.dim
    eulers = [poly.euler_derivative(i) for i in range(d)]
    hessians = [[eulers[i].euler_derivative(j) for j in range(d)] for i in range(d)]
    k = np.array(k, dtype=float)
    for _ in range(iters):
        z = np.exp(1j * k)
        grad = np.array([-(e.evaluate(z)).imag for e in eulers])
        hess = np.array([[-(hessians[i][j].evaluate(z)).real for j in range(d)] for i in range(d)])
        if np.linalg.norm(grad) < 1e-12:
            return k
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            return None
        if np.linalg.norm(step) > 1.0:
            step = step / np.linalg.norm(step)
        k = k + step
    return k if np.linalg.norm(
        [-(e.evaluate(np.exp(1j * k))).imag for e in eulers]
    ) < 1e-8 else None


# ---------------------------------------------------------------------
# Factorization certificates
# ---------------------------------------------------------------------

class CertificateError(ValueError):
    """A claimed factorization failed its verification."""


@dataclass
class FactorizationCertificate:
    kind: str  # "exact" | "numeric"
    factors: list[LaurentPoly]
    provenance: str  # "symmetry" | "multilayer" | "composite" | "flatband"
    residual: float | None  # numeric kind: max relative error at samples
    sample_count: int
    seed: int | None

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "provenance": self.provenance,
            "factors": [f.to_json_obj() for f in self.factors],
            "residual": self.residual,
            "sample_count": self.sample_count,
            "seed": self.seed,
        }


def _product(factors, dim) -> LaurentPoly:
    acc = LaurentPoly.constant(dim, 1)
    for f in factors:
        acc = acc * f
    return acc


def _random_points(dim, lam_scale, rng, n):
    ks = rng.uniform(0.0, 2 * np.pi, size=(n, dim))
    lams = rng.uniform(-lam_scale, lam_scale, size=n) + 1j * rng.uniform(
        -lam_scale, lam_scale, size=n
    )
    return [tuple(np.exp(1j * k)) for k in ks], lams


def certify(
    target: LaurentPoly,
    factors: list[LaurentPoly],
    kind: str,
    provenance: str,
    seed: int = 20240901,
    samples: int = 100,
    tol: float = 1e-8,
) -> FactorizationCertificate:
    """Verify a claimed factorization and wrap it into a certificate.

    Exact: the factor product must equal the target term-for-term.
    Numeric: relative residual at `samples` fresh random points (never
    the points a mechanism used for construction) must stay below tol.
    """
    if kind == "exact":
        if _product(factors, target.dim) != target:
            raise CertificateError("exact factor product differs from the target")
        return FactorizationCertificate("exact", factors, provenance, None, 0, None)
    rng = np.random.default_rng(seed)
    lam_scale = 1.0 + max(
        (abs(c.to_complex()) for c in target.terms.values()), default=1.0
    )
    zs, lams = _random_points(target.dim, lam_scale, rng, samples)
    dvals = np.array([target.evaluate(z, l) for z, l in zip(zs, lams)])
    pvals = np.ones(samples, dtype=complex)
    for f in factors:
        pvals *= np.array([f.evaluate(z, l) for z, l in zip(zs, lams)])
    scale = float(np.max(np.abs(dvals))) or 1.0
    residual = float(np.max(np.abs(dvals - pvals)) / scale)
    if residual > tol:
        raise CertificateError(
            f"numeric factorization residual {residual:.3e} exceeds {tol:.1e}"
        )
    return FactorizationCertificate(
        "numeric", factors, provenance, residual, samples, seed
    )


# -- multilayer --------------------------------------------------------

def multilayer_factorize(
    base: OperatorSpec, coupling, seed: int = 20240901
) -> FactorizationCertificate:
    """Factor the dispersion of I_s (x) A + K (x) I through K's spectrum.

    With K's eigenvalues mu_j (multiplicity s_j) the multilayer
    dispersion equals prod_j D_base(z, lambda - mu_j)^{s_j}.  Rational
    spectrum (decided exactly from K's characteristic polynomial) gives
    an exact term-for-term certificate; otherwise the eigenvalues are
    numeric and the certificate is sample-validated.
    """
    K = [[GaussianRational.coerce(v) for v in row] for row in coupling]
    s = len(K)
    spec = build_multilayer(base, K)
    target = dispersion(spec)
    d_base = dispersion(base)

    charpoly = LaurentMatrix(
        0, [[LaurentPoly(0, {((), 0): K[i][j]}) for j in range(s)] for i in range(s)]
    ).minus_lambda_identity().determinant()
    rational, leftovers = rational_roots(charpoly.to_univariate())
    total_mult = sum(m for _, m in rational)
    if total_mult == s:
        factors = []
        for mu, mult in rational:
            shifted = d_base.shift_lambda(mu)
            factors.extend([shifted] * mult)
        return certify(target, factors, "exact", "multilayer")
    # irrational coupling spectrum: fall back to numeric eigenvalues
    kmat = np.array([[K[i][j].to_complex() for j in range(s)] for i in range(s)])
    mus = np.linalg.eigvalsh(kmat)
    factors = [d_base.shift_lambda(GaussianRational.from_complex(mu)) for mu in mus]
    return certify(target, factors, "numeric", "multilayer", seed=seed)


# -- symmetry ----------------------------------------------------------

def _rationalize_matrix(m: np.ndarray, max_den: int = 10**6):
    out = []
    for row in m:
        new = []
        for v in row:
            re = Fraction(float(v.real)).limit_denominator(max_den)
            im = Fraction(float(v.imag)).limit_denominator(max_den)
            if abs(re - v.real) > 1e-10 or abs(im - v.imag) > 1e-10:
                return None
            new.append(GaussianRational(re, im))
        out.append(new)
    return out


def symmetry_factorize(
    spec: OperatorSpec, unitary, seed: int = 20240901
) -> FactorizationCertificate:
    """Factor the dispersion through a commuting unitary's eigenspaces.

    The unitary must commute with A(zeta) (checked at 20 random torus
    points).  Its eigenspaces block-diagonalize A; block characteristic
    polynomials are reconstructed by torus-grid interpolation (numeric
    certificate), upgraded to an exact certificate whenever the spectral
    projections of the unitary are Gaussian-rational and commute with
    the Floquet matrix exactly.
    """
    u = np.asarray(unitary, dtype=complex)
    n = spec.size
    if u.shape != (n, n):
        raise SpecError(f"unitary must be {n}x{n}")
    if np.linalg.norm(u.conj().T @ u - np.eye(n)) > 1e-10:
        raise SpecError("matrix is not unitary")
    m = floquet_matrix(spec)
    rng = np.random.default_rng(seed)
    for _ in range(20):
        zeta = tuple(np.exp(1j * rng.uniform(0, 2 * np.pi, spec.dimension)))
        a = m.evaluate(zeta)
        defect = np.linalg.norm(u @ a - a @ u)
        if defect > 1e-10 * max(1.0, np.linalg.norm(a)):
            raise SpecError(
                f"unitary does not commute with the Floquet matrix at zeta={zeta}"
            )
    target = m.minus_lambda_identity().determinant()

    eigvals, eigvecs = np.linalg.eig(u)
    clusters: list[list[int]] = []
    for i, ev in enumerate(eigvals):
        for cl in clusters:
            if abs(eigvals[cl[0]] - ev) < 1e-8:
                cl.append(i)
                break
        else:
            clusters.append([i])

    # exact-upgrade attempt: rational spectral projections commuting exactly
    exact_blocks = []
    for cl in clusters:
        basis = eigvecs[:, cl]
        q, _ = np.linalg.qr(basis)
        proj = q @ q.conj().T
        pr = _rationalize_matrix(proj)
        if pr is None:
            exact_blocks = None
            break
        if not _is_exact_projection(pr) or not _commutes_exactly(pr, m):
            exact_blocks = None
            break
        exact_blocks.append(pr)
    if exact_blocks:
        factors = []
        for pr in exact_blocks:
            block = _exact_invariant_block(pr, m)
            factors.append(block.minus_lambda_identity().determinant())
        try:
            return certify(target, factors, "exact", "symmetry")
        except CertificateError:
            pass  # fall through to the numeric route

    factors = []
    for cl in clusters:
        q, _ = np.linalg.qr(eigvecs[:, cl])
        factors.append(_interpolate_block_charpoly(m, q))
    return certify(target, factors, "numeric", "symmetry", seed=seed + 1)


def _is_exact_projection(p) -> bool:
    n = len(p)
    for i in range(n):
        for j in range(n):
            if p[i][j] != p[j][i].conjugate():
                return False
            acc = GR_ZERO
            for k in range(n):
                acc = acc + p[i][k] * p[k][j]
            if not (acc == p[i][j]):
                return False
    return True


def _commutes_exactly(p, m: LaurentMatrix) -> bool:
    n = m.size
    for i in range(n):
        for j in range(n):
            left = LaurentPoly.zero(m.dim)
            right = LaurentPoly.zero(m.dim)
            for k in range(n):
                left = left + m.entries[i][k] * p[k][j]
                right = right + m.entries[k][j] * p[i][k]
            if left != right:
                return False
    return True


def _exact_invariant_block(p, m: LaurentMatrix) -> LaurentMatrix:
    """Restriction of m to the range of the exact projection p."""
    n = m.size
    cols = [[p[i][j] for i in range(n)] for j in range(n)]
    basis = exact_column_basis(cols)  # each a length-n column
    r = len(basis)
    # choose r independent rows of the basis matrix
    rows = []
    row_idx = []
    for i in range(n):
        cand = rows + [[basis[j][i] for j in range(r)]]
        if len(exact_column_basis([list(c) for c in zip(*cand)])) == len(cand):
            rows = cand
            row_idx.append(i)
        if len(rows) == r:
            break
    s_inv = invert_exact(rows)
    # coordinates of A*basis in the chosen rows: block = S^-1 * (A basis)|rows
    block = [[LaurentPoly.zero(m.dim) for _ in range(r)] for _ in range(r)]
    for bcol in range(r):
        # column vector A * basis[bcol]
        av = []
        for i in range(n):
            acc = LaurentPoly.zero(m.dim)
            for k in range(n):
                if not m.entries[i][k].is_zero():
                    acc = acc + m.entries[i][k] * LaurentPoly.constant(m.dim, basis[bcol][k])
            av.append(acc)
        for brow in range(r):
            acc = LaurentPoly.zero(m.dim)
            for t in range(r):
                acc = acc + av[row_idx[t]] * LaurentPoly.constant(m.dim, s_inv[brow][t])
            block[brow][bcol] = acc
    return LaurentMatrix(m.dim, block)


def _interpolate_block_charpoly(m: LaurentMatrix, q: np.ndarray) -> LaurentPoly:
    """det(B(z) - lambda I) for B = Q* A Q, reconstructed by torus FFT."""
    s = q.shape[1]
    span = 0
    for row in m.entries:
        for e in row:
            for (zexp, _) in e.terms:
                span = max(span, max((abs(v) for v in zexp), default=0))
    half = s * span
    size = 2 * half + 1
    axes = [2.0 * np.pi * np.arange(size) / size for _ in range(m.dim)]
    from .floquet import matrix_on_grid

    a = matrix_on_grid(m, axes)
    b = np.einsum("ij,...jk,kl->...il", q.conj().T, a, q)
    coeffs = np.empty(b.shape[:-2] + (s + 1,), dtype=complex)
    flat = b.reshape(-1, s, s)
    for idx in range(flat.shape[0]):
        c = np.poly(flat[idx])  # monic in lambda, descending
        coeffs.reshape(-1, s + 1)[idx] = c[::-1] * (-1) ** s
    poly = LaurentPoly(m.dim)
    scale = float(np.max(np.abs(coeffs))) or 1.0
    for j in range(s + 1):
        grid = coeffs[..., j]
        four = np.fft.ifftn(grid)
        for zexp in np.ndindex(*four.shape):
            c = four[zexp]
            if abs(c) < 1e-9 * scale:
                continue
            exps = tuple((e if e <= half else e - size) for e in zexp)
            poly = poly + LaurentPoly(
                m.dim, {(exps, j): GaussianRational.from_complex(c)}
            )
    return poly


# -- composite variable ------------------------------------------------

def composite_factorize(
    spec: OperatorSpec, lam0, g: LaurentPoly, seed: int = 20240901
) -> FactorizationCertificate | None:
    """Factor the Fermi section through a composite variable xi = g(z).

    Rewrites D(z, lam0) exactly as P(xi); returns numeric linear factors
    g(z) - xi_j from the roots of P, scaled by P's leading coefficient.
    If the direct rewrite fails, a per-axis minimal monomial (a unit) is
    factored out first and recorded as an extra exact factor.  Returns
    None when no rewrite exists within the documented degree bound.
    """
    lam0 = GaussianRational.coerce(lam0)
    section = dispersion(spec).substitute_lambda(lam0)
    monomial = None
    coeffs = composite_rewrite(section, g)
    if coeffs is None:
        mins = section.min_z_exponents()
        if any(m != 0 for m in mins):
            shifted = section.monomial_shift(tuple(-m for m in mins))
            coeffs = composite_rewrite(shifted, g)
            if coeffs is not None:
                monomial = LaurentPoly.monomial(section.dim, mins)
        if coeffs is None:
            return None
    arr = np.array([c.to_complex() for c in coeffs])
    deg = len(arr) - 1
    factors: list[LaurentPoly] = []
    if monomial is not None:
        factors.append(monomial)
    if deg == 0:
        factors.append(LaurentPoly.constant(section.dim, coeffs[0]))
    else:
        roots = np.roots(arr[::-1])
        lead = GaussianRational.coerce(coeffs[-1])
        for idx, xi in enumerate(roots):
            f = g - LaurentPoly.constant(g.dim, GaussianRational.from_complex(xi))
            if idx == 0:
                f = f.scale(lead)
            factors.append(f)
    return certify(section, factors, "numeric", "composite", seed=seed)
