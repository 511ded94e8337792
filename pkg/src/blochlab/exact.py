"""Exact scalar arithmetic over the Gaussian rationals.

Everything symbolic in this package is built on :class:`GaussianRational`
(a complex number with exact `fractions.Fraction` real and imaginary
parts).  Floating literals are deliberately rejected by the string
parser: divisibility and factor-identity checks downstream are
meaningless under rounding.

Also provides the small exact routines the polynomial layer needs:
univariate polynomial division / monic gcd over the Gaussian rationals,
rational-root extraction with exact verification, and Gauss-Jordan
elimination for exact linear systems.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

Rationalish = "int | str | Fraction | GaussianRational"

_RAT = r"[+-]?\d+(?:/\d+)?"
_RAT_RE = re.compile(rf"^\s*({_RAT})\s*$")
# real part, then optional signed imaginary part ending in "i"
_CPLX_RE = re.compile(rf"^\s*({_RAT})\s*([+-]\s*\d+(?:/\d+)?)\s*i\s*$")
_IMAG_RE = re.compile(rf"^\s*({_RAT})\s*i\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse a plain rational string "p" or "p/q" (no floats)."""
    m = _RAT_RE.match(text)
    if not m:
        raise ValueError(f"not a rational string: {text!r}")
    return Fraction(m.group(1))


class GaussianRational:
    """Exact element of Q(i): re + im*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im != 0:
                raise ValueError("cannot combine GaussianRational with extra imaginary part")
            self.re, self.im = re.re, re.im
            return
        if isinstance(re, float) or isinstance(im, float):
            raise TypeError("floating literals are not exact; use from_complex() explicitly")
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    # -- constructors -------------------------------------------------
    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse "p/q", "p/q+r/si", "p/q-r/si" (and bare "r/si")."""
        m = _RAT_RE.match(text)
        if m:
            return cls(Fraction(m.group(1)))
        m = _CPLX_RE.match(text)
        if m:
            return cls(Fraction(m.group(1)), Fraction(m.group(2).replace(" ", "")))
        m = _IMAG_RE.match(text)
        if m:
            return cls(0, Fraction(m.group(1)))
        raise ValueError(f"not a Gaussian-rational string: {text!r}")

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, (int, Fraction)):
            return cls(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to GaussianRational")

    @classmethod
    def from_complex(cls, value: complex) -> "GaussianRational":
        """Exact embedding of a float/complex (each float is a dyadic rational)."""
        return cls(Fraction(float(value.real)), Fraction(float(value.imag)))

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) + (-self)

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    # -- comparisons / hashing ----------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    # -- conversions ---------------------------------------------------
    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __complex__(self):
        return self.to_complex()

    def __str__(self):
        if self.im == 0:
            return format_rational(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{format_rational(self.re)}{sign}{format_rational(abs(self.im))}i"

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)


# ---------------------------------------------------------------------
# Univariate polynomials over the Gaussian rationals.
#
# Represented as plain lists of GaussianRational, index = degree,
# trailing zeros trimmed.  Only what the Laurent layer needs lives here.
# ---------------------------------------------------------------------

def uni_trim(coeffs: Sequence[GaussianRational]) -> list[GaussianRational]:
    out = list(coeffs)
    while out and out[-1].is_zero():
        out.pop()
    return out


def uni_degree(p: Sequence[GaussianRational]) -> int:
    return len(p) - 1


def uni_eval(p: Sequence[GaussianRational], x: GaussianRational) -> GaussianRational:
    acc = GR_ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def uni_divmod(num, den):
    """Exact euclidean division; den must be nonzero."""
    den = uni_trim(den)
    if not den:
        raise ZeroDivisionError("univariate division by zero polynomial")
    rem = uni_trim(num)
    quo = [GR_ZERO] * max(0, len(rem) - len(den) + 1)
    lead = den[-1]
    while len(rem) >= len(den):
        shift = len(rem) - len(den)
        factor = rem[-1] / lead
        quo[shift] = factor
        for i, c in enumerate(den):
            rem[shift + i] = rem[shift + i] - factor * c
        rem = uni_trim(rem)
    return uni_trim(quo), rem


def uni_monic(p: Sequence[GaussianRational]) -> list[GaussianRational]:
    p = uni_trim(p)
    if not p:
        return []
    lead = p[-1]
    return [c / lead for c in p]


def uni_gcd(a, b) -> list[GaussianRational]:
    """Monic gcd by the Euclidean algorithm (gcd(p, 0) = monic p)."""
    a, b = uni_trim(a), uni_trim(b)
    while b:
        _, r = uni_divmod(a, b)
        a, b = b, r
    return uni_monic(a)


def rational_roots(p: Sequence[GaussianRational]):
    """All exactly-verified rational roots of p with multiplicities.

    Numeric companion-matrix roots propose candidates; each candidate is
    snapped to a small-denominator rational and verified by exact
    substitution, then divided out exactly.  Returns
    (list of (Fraction, multiplicity), list of unverified complex roots).
    """
    import numpy as np

    p = uni_trim(p)
    if len(p) <= 1:
        return [], []
    arr = np.array([c.to_complex() for c in p], dtype=complex)
    numeric = np.roots(arr[::-1])
    found: dict[Fraction, int] = {}
    residual = list(p)
    leftovers = []
    for root in numeric:
        if abs(root.imag) > 1e-8:
            leftovers.append(complex(root))
            continue
        cand = Fraction(float(root.real)).limit_denominator(10**6)
        lin = [GaussianRational(-cand), GR_ONE]
        if uni_eval(residual, GaussianRational(cand)).is_zero():
            quo, rem = uni_divmod(residual, lin)
            if rem:
                leftovers.append(complex(root))
                continue
            residual = quo
            found[cand] = found.get(cand, 0) + 1
        else:
            leftovers.append(complex(root))
    return sorted(found.items()), leftovers


# ---------------------------------------------------------------------
# Exact dense linear algebra (small systems only).
# ---------------------------------------------------------------------

def gauss_solve(rows: Iterable[Sequence[GaussianRational]],
                rhs: Sequence[GaussianRational]):
    """Solve A x = b exactly; A may be rectangular (overdetermined).

    Returns the solution list, or None if inconsistent.  Free variables,
    if any, are set to zero.
    """
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    if not aug:
        return []
    ncols = len(aug[0]) - 1
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(aug)) if not aug[i][c].is_zero()), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = GR_ONE / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == len(aug):
            break
    for i in range(r, len(aug)):
        if not aug[i][ncols].is_zero():
            return None
    x = [GR_ZERO] * ncols
    for row, col in enumerate(pivots):
        x[col] = aug[row][ncols]
    return x


def exact_column_basis(columns: list[list[GaussianRational]]) -> list[list[GaussianRational]]:
    """Maximal linearly independent subset of the given columns."""
    basis: list[list[GaussianRational]] = []
    echelon: list[list[GaussianRational]] = []
    for col in columns:
        vec = list(col)
        for piv in echelon:
            lead = next(i for i in range(len(piv)) if not piv[i].is_zero())
            if not vec[lead].is_zero():
                f = vec[lead] / piv[lead]
                vec = [a - f * b for a, b in zip(vec, piv)]
        if any(not v.is_zero() for v in vec):
            echelon.append(vec)
            basis.append(list(col))
    return basis


def invert_exact(matrix: list[list[GaussianRational]]) -> list[list[GaussianRational]]:
    """Exact inverse of a small square matrix (raises on singular)."""
    n = len(matrix)
    cols = []
    for j in range(n):
        e = [GR_ONE if i == j else GR_ZERO for i in range(n)]
        sol = gauss_solve(matrix, e)
        if sol is None:
            raise ZeroDivisionError("singular matrix")
        cols.append(sol)
    # gauss_solve zero-fills free variables, so re-check A*inv == I exactly
    for j in range(n):
        for i in range(n):
            acc = GR_ZERO
            for k in range(n):
                acc = acc + matrix[i][k] * cols[j][k]
            if not (acc == (GR_ONE if i == j else GR_ZERO)):
                raise ZeroDivisionError("singular matrix")
    return [[cols[j][i] for j in range(n)] for i in range(n)]
