"""Sparse exact Laurent polynomials in z_1..z_d and an energy variable.

A :class:`LaurentPoly` stores a sparse map from exponent keys
``(z_exponents, energy_power)``, z exponents in Z^d and energy power >= 0,
to nonzero :class:`~blochlab.exact.GaussianRational` coefficients.  All
arithmetic is exact; canonical form (no stored zeros) is maintained by
construction, so two construction orders yield identical term maps.

:class:`LaurentMatrix` is a square matrix of such polynomials; its exact
determinant (memoized cofactor expansion over column subsets) produces
the dispersion polynomial det(A(z) - lambda*I) used everywhere else.

Serialization: ``to_json_obj`` emits the canonical sorted term list
``{exponents, lambda_power, coeff_re, coeff_im}``; the pretty printer
uses the same deterministic order (energy power, then graded lex on the
z exponents).
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .exact import (
    GR_ONE,
    GR_ZERO,
    GaussianRational,
    format_rational,
    gauss_solve,
    uni_gcd,
    uni_trim,
)

Key = tuple[tuple[int, ...], int]


def _term_sort_key(key: Key):
    zexp, lam = key
    return (lam, sum(abs(e) for e in zexp), zexp)


class LaurentPoly:
    """Exact sparse Laurent polynomial over the Gaussian rationals."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict[Key, GaussianRational] | None = None):
        self.dim = dim
        self.terms: dict[Key, GaussianRational] = {}
        if terms:
            for (zexp, lam), coeff in terms.items():
                if len(zexp) != dim:
                    raise ValueError(f"exponent arity {len(zexp)} != dimension {dim}")
                if lam < 0:
                    raise ValueError("negative energy power")
                if not coeff.is_zero():
                    self.terms[(tuple(zexp), lam)] = coeff

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "LaurentPoly":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, value) -> "LaurentPoly":
        return cls(dim, {((0,) * dim, 0): GaussianRational.coerce(value)})

    @classmethod
    def monomial(cls, dim: int, zexp: Sequence[int], lam: int = 0, coeff=1) -> "LaurentPoly":
        return cls(dim, {(tuple(zexp), lam): GaussianRational.coerce(coeff)})

    @classmethod
    def variable(cls, dim: int, axis: int) -> "LaurentPoly":
        zexp = [0] * dim
        zexp[axis] = 1
        return cls.monomial(dim, zexp)

    @classmethod
    def energy(cls, dim: int) -> "LaurentPoly":
        return cls(dim, {((0,) * dim, 1): GR_ONE})

    # -- basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def lambda_degree(self) -> int:
        return max((lam for (_, lam) in self.terms), default=0)

    def support(self) -> list[tuple[int, ...]]:
        """Exponent vectors (n, m) in Z^{d+1} of all terms."""
        return [zexp + (lam,) for (zexp, lam) in self.terms]

    def z_span(self) -> int:
        """Maximum per-axis exponent range (L-infinity spread)."""
        if not self.terms or self.dim == 0:
            return 0
        spans = []
        for axis in range(self.dim):
            vals = [zexp[axis] for (zexp, _) in self.terms]
            spans.append(max(vals) - min(vals))
        return max(spans)

    def coefficient(self, zexp: Sequence[int], lam: int = 0) -> GaussianRational:
        return self.terms.get((tuple(zexp), lam), GR_ZERO)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    # -- ring operations ---------------------------------------------------
    def _check(self, other: "LaurentPoly"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            acc = out.get(key)
            s = coeff if acc is None else acc + coeff
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        result = LaurentPoly(self.dim)
        result.terms = out
        return result

    def __neg__(self) -> "LaurentPoly":
        result = LaurentPoly(self.dim)
        result.terms = {k: -c for k, c in self.terms.items()}
        return result

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction, GaussianRational, str)):
            return self.scale(GaussianRational.coerce(other))
        self._check(other)
        out: dict[Key, GaussianRational] = {}
        for (ze1, l1), c1 in self.terms.items():
            for (ze2, l2), c2 in other.terms.items():
                key = (tuple(a + b for a, b in zip(ze1, ze2)), l1 + l2)
                prod = c1 * c2
                acc = out.get(key)
                s = prod if acc is None else acc + prod
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        result = LaurentPoly(self.dim)
        result.terms = out
        return result

    __rmul__ = __mul__

    def scale(self, factor: GaussianRational) -> "LaurentPoly":
        if factor.is_zero():
            return LaurentPoly(self.dim)
        result = LaurentPoly(self.dim)
        result.terms = {k: c * factor for k, c in self.terms.items()}
        return result

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative power of a general Laurent polynomial")
        result = LaurentPoly.constant(self.dim, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, z: Sequence[complex] = (), lam: complex = 0.0) -> complex:
        """Floating-point value at a point of (C^x)^d x C."""
        z = tuple(complex(v) for v in z)
        if len(z) != self.dim:
            raise ValueError(f"expected {self.dim} z-coordinates, got {len(z)}")
        if any(v == 0 for v in z):
            raise ZeroDivisionError("z coordinates must be nonzero")
        lam = complex(lam)
        total = 0j
        for (zexp, lp), coeff in self.terms.items():
            val = coeff.to_complex()
            for base, e in zip(z, zexp):
                if e:
                    val *= base**e
            if lp:
                val *= lam**lp
            total += val
        return total

    # -- calculus / substitutions -------------------------------------------
    def euler_derivative(self, axis: int) -> "LaurentPoly":
        """z_axis * d/dz_axis: multiplies each term by its exponent."""
        if not 0 <= axis < self.dim:
            raise IndexError(f"axis {axis} out of range for dimension {self.dim}")
        out: dict[Key, GaussianRational] = {}
        for (zexp, lam), coeff in self.terms.items():
            n = zexp[axis]
            if n:
                out[(zexp, lam)] = coeff * n
        result = LaurentPoly(self.dim)
        result.terms = out
        return result

    def substitute_lambda(self, value) -> "LaurentPoly":
        """Exact substitution of the energy variable; result has degree 0."""
        value = GaussianRational.coerce(value)
        out: dict[Key, GaussianRational] = {}
        for (zexp, lam), coeff in self.terms.items():
            factor = coeff
            if lam:
                p = GR_ONE
                for _ in range(lam):
                    p = p * value
                factor = coeff * p
            key = (zexp, 0)
            acc = out.get(key)
            s = factor if acc is None else acc + factor
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        result = LaurentPoly(self.dim)
        result.terms = out
        return result

    def shift_lambda(self, mu) -> "LaurentPoly":
        """p(z, lambda - mu), exactly (binomial expansion per term)."""
        mu = GaussianRational.coerce(mu)
        out: dict[Key, GaussianRational] = {}
        for (zexp, lam), coeff in self.terms.items():
            for j in range(lam + 1):
                fac = coeff * comb(lam, j)
                for _ in range(lam - j):
                    fac = fac * (-mu)
                key = (zexp, j)
                acc = out.get(key)
                s = fac if acc is None else acc + fac
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        result = LaurentPoly(self.dim)
        result.terms = out
        return result

    def reflect_conjugate(self) -> "LaurentPoly":
        """The polynomial whose value at (z, lambda) is conj(p(conj(z)^-1, conj(lambda)))."""
        out: dict[Key, GaussianRational] = {}
        for (zexp, lam), coeff in self.terms.items():
            out[(tuple(-e for e in zexp), lam)] = coeff.conjugate()
        result = LaurentPoly(self.dim)
        result.terms = out
        return result

    def monomial_shift(self, zexp: Sequence[int]) -> "LaurentPoly":
        """Multiply by z^zexp (a unit of the Laurent ring)."""
        zexp = tuple(zexp)
        out: dict[Key, GaussianRational] = {}
        for (ze, lam), coeff in self.terms.items():
            out[(tuple(a + b for a, b in zip(ze, zexp)), lam)] = coeff
        result = LaurentPoly(self.dim)
        result.terms = out
        return result

    def min_z_exponents(self) -> tuple[int, ...]:
        if not self.terms:
            return (0,) * self.dim
        return tuple(
            min(zexp[axis] for (zexp, _) in self.terms) for axis in range(self.dim)
        )

    # -- regrouping -----------------------------------------------------------
    def lambda_coefficients_by_z(self) -> dict[tuple[int, ...], list[GaussianRational]]:
        """Regroup as sum_n p_n(lambda) z^n -> {n: coefficient list of p_n}."""
        out: dict[tuple[int, ...], list[GaussianRational]] = {}
        top = self.lambda_degree()
        for (zexp, lam), coeff in self.terms.items():
            lst = out.setdefault(zexp, [GR_ZERO] * (top + 1))
            lst[lam] = coeff
        return {z: uni_trim(p) for z, p in out.items()}

    def to_univariate(self) -> list[GaussianRational]:
        """Coefficient list in the energy variable (requires no z content)."""
        if any(any(e != 0 for e in zexp) for (zexp, _) in self.terms):
            raise ValueError("polynomial has z content")
        out = [GR_ZERO] * (self.lambda_degree() + 1)
        for (_, lam), coeff in self.terms.items():
            out[lam] = coeff
        return uni_trim(out)

    # -- serialization ----------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _term_sort_key(kv[0]))

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "exponents": list(zexp),
                "lambda_power": lam,
                "coeff_re": format_rational(coeff.re),
                "coeff_im": format_rational(coeff.im),
            }
            for (zexp, lam), coeff in self.sorted_terms()
        ]

    @classmethod
    def from_json_obj(cls, dim: int, obj: Iterable[dict]) -> "LaurentPoly":
        terms: dict[Key, GaussianRational] = {}
        for rec in obj:
            key = (tuple(int(e) for e in rec["exponents"]), int(rec.get("lambda_power", 0)))
            coeff = GaussianRational(
                Fraction(rec["coeff_re"]), Fraction(rec.get("coeff_im", "0"))
            )
            if key in terms:
                raise ValueError(f"duplicate term key {key}")
            terms[key] = coeff
        return cls(dim, terms)

    def var_names(self) -> list[str]:
        if self.dim == 1:
            return ["z"]
        if self.dim == 2:
            return ["x", "y"]
        return [f"z{i+1}" for i in range(self.dim)]

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.var_names()
        pieces = []
        for (zexp, lam), coeff in self.sorted_terms():
            factors = []
            for name, e in zip(names, zexp):
                if e == 1:
                    factors.append(name)
                elif e != 0:
                    factors.append(f"{name}^{e}")
            if lam == 1:
                factors.append("λ")
            elif lam > 1:
                factors.append(f"λ^{lam}")
            body = "·".join(factors)
            cs = str(coeff)
            if body:
                if coeff == GR_ONE:
                    term = body
                elif coeff == -GR_ONE:
                    term = f"-{body}"
                elif coeff.im != 0:
                    term = f"({cs})·{body}"
                else:
                    term = f"{cs}·{body}"
            else:
                term = cs
            pieces.append(term)
        out = pieces[0]
        for term in pieces[1:]:
            out += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
        return out

    def __repr__(self):
        return f"LaurentPoly(d={self.dim}, {self})"


# -------------------------------------------------------------------------
# Operations on pairs of polynomials
# -------------------------------------------------------------------------

def arith(p: LaurentPoly, q: LaurentPoly, op: str) -> LaurentPoly:
    """add / sub / mul in one entry point (exact, canonical result)."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def lambda_coefficient_gcd(p: LaurentPoly) -> LaurentPoly:
    """Monic gcd over Q(i) of the univariate energy polynomials p_n.

    Writing p = sum_n p_n(lambda) z^n, the returned gcd vanishes at
    exactly the energies where p(z, .) is identically zero in z: the
    flat-band energies, with their multiplicities.
    """
    if p.is_zero():
        raise ValueError("zero polynomial has no coefficient gcd")
    g: list[GaussianRational] = []
    for coeffs in p.lambda_coefficients_by_z().values():
        g = uni_gcd(g, coeffs)
        if len(g) == 1:
            break
    out = LaurentPoly(p.dim)
    out.terms = {(((0,) * p.dim), i): c for i, c in enumerate(g) if not c.is_zero()}
    return out


def composite_rewrite(p: LaurentPoly, g: LaurentPoly, slack: int = 2):
    """Exact coefficients c_m with sum_m c_m g^m = p, or None.

    p must be free of the energy variable and g nonconstant.  The degree
    bound is M = ceil(span(p)/span(g)) + slack, where span is the maximum
    per-axis exponent range; within that bound existence is decided by an
    exact linear solve over the Gaussian rationals.
    """
    if p.lambda_degree() != 0:
        raise ValueError("p must not involve the energy variable")
    if g.lambda_degree() != 0:
        raise ValueError("g must not involve the energy variable")
    if all(all(e == 0 for e in zexp) for (zexp, _) in g.terms):
        raise ValueError("g must be nonconstant")
    gspan = g.z_span()
    if gspan == 0:
        # single-term monomial g = c*z^e: powers hit only the ray {m*e},
        # so the required degree is read off p's support directly
        (gexp, _), = g.terms.keys()
        bound = 0
        for (zexp, _) in p.terms:
            ms = {ze // ge for ze, ge in zip(zexp, gexp) if ge != 0}
            bound = max(bound, max(ms, default=0))
        bound += slack
    else:
        bound = -(-p.z_span() // gspan) + slack
    powers = [LaurentPoly.constant(p.dim, 1)]
    for _ in range(bound):
        powers.append(powers[-1] * g)
    keys = set(p.terms)
    for q in powers:
        keys.update(q.terms)
    keys = sorted(keys, key=_term_sort_key)
    rows = [[q.terms.get(k, GR_ZERO) for q in powers] for k in keys]
    rhs = [p.terms.get(k, GR_ZERO) for k in keys]
    sol = gauss_solve(rows, rhs)
    if sol is None:
        return None
    while sol and sol[-1].is_zero():
        sol.pop()
    return sol if sol else [GR_ZERO]


# -------------------------------------------------------------------------
# Matrices of Laurent polynomials
# -------------------------------------------------------------------------

class LaurentMatrix:
    """Square matrix of LaurentPoly entries sharing one dimension."""

    __slots__ = ("dim", "size", "entries")

    def __init__(self, dim: int, entries: list[list[LaurentPoly]]):
        self.dim = dim
        self.size = len(entries)
        for row in entries:
            if len(row) != self.size:
                raise ValueError("matrix must be square")
            for e in row:
                if e.dim != dim:
                    raise ValueError("entry dimension mismatch")
        self.entries = entries

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.size == other.size
            and self.entries == other.entries
        )

    def minus_lambda_identity(self) -> "LaurentMatrix":
        lam = LaurentPoly.energy(self.dim)
        out = [
            [
                (self.entries[i][j] - lam) if i == j else self.entries[i][j]
                for j in range(self.size)
            ]
            for i in range(self.size)
        ]
        return LaurentMatrix(self.dim, out)

    def reflect_conjugate_transpose(self) -> "LaurentMatrix":
        out = [
            [self.entries[j][i].reflect_conjugate() for j in range(self.size)]
            for i in range(self.size)
        ]
        return LaurentMatrix(self.dim, out)

    def evaluate(self, z: Sequence[complex], lam: complex = 0.0):
        import numpy as np

        out = np.empty((self.size, self.size), dtype=complex)
        for i in range(self.size):
            for j in range(self.size):
                out[i, j] = self.entries[i][j].evaluate(z, lam)
        return out

    def determinant(self) -> LaurentPoly:
        """Exact determinant by cofactor expansion memoized on column subsets."""
        n = self.size
        if n == 0:
            return LaurentPoly.constant(self.dim, 1)
        memo: dict[int, LaurentPoly] = {}

        def rec(colmask: int) -> LaurentPoly:
            cached = memo.get(colmask)
            if cached is not None:
                return cached
            cols = [j for j in range(n) if colmask & (1 << j)]
            row = n - len(cols)
            if not cols:
                return LaurentPoly.constant(self.dim, 1)
            acc = LaurentPoly(self.dim)
            for pos, j in enumerate(cols):
                entry = self.entries[row][j]
                if entry.is_zero():
                    continue
                sub = rec(colmask & ~(1 << j))
                term = entry * sub
                acc = acc + (term if pos % 2 == 0 else -term)
            memo[colmask] = acc
            return acc

        return rec((1 << n) - 1)

    def determinant_permutation(self) -> LaurentPoly:
        """Independent oracle: brute-force permutation expansion."""
        from itertools import permutations

        n = self.size
        acc = LaurentPoly(self.dim)
        for perm in permutations(range(n)):
            sign = 1
            seen = [False] * n
            for i in range(n):
                if seen[i]:
                    continue
                j, clen = i, 0
                while not seen[j]:
                    seen[j] = True
                    j = perm[j]
                    clen += 1
                if clen % 2 == 0:
                    sign = -sign
            prod = LaurentPoly.constant(self.dim, sign)
            for i in range(n):
                prod = prod * self.entries[i][perm[i]]
            acc = acc + prod
        return acc
