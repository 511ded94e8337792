from fractions import Fraction

import pytest

from blochlab.exact import (
    GaussianRational,
    gauss_solve,
    invert_exact,
    parse_rational,
    rational_roots,
    uni_divmod,
    uni_eval,
    uni_gcd,
)

G = GaussianRational


def test_parse_forms():
    assert G.parse("5") == G(5)
    assert G.parse("-1/2") == G(Fraction(-1, 2))
    assert G.parse("1/2+1/3i") == G(Fraction(1, 2), Fraction(1, 3))
    assert G.parse("0-2i") == G(0, -2)
    assert G.parse("3i") == G(0, 3)


def test_parse_rejects_floats():
    for bad in ("0.5", "1e-3", "1.0+2i", "nan"):
        with pytest.raises(ValueError):
            G.parse(bad)
    with pytest.raises(ValueError):
        parse_rational("2.5")


def test_float_constructor_rejected():
    with pytest.raises(TypeError):
        G(0.5)


def test_format_round_trip():
    for s in ("5", "-1/2", "1/2+1/3i", "0-2i", "7/3-1/9i"):
        v = G.parse(s)
        assert G.parse(str(v)) == v


def test_field_arithmetic():
    a = G.parse("1/2+1/3i")
    b = G.parse("-2+1i")
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a * a.conjugate() == G(Fraction(1, 4) + Fraction(1, 9))
    assert a.conjugate().conjugate() == a


def test_uni_divmod_and_gcd():
    # (x - 2)(x - 3) = x^2 - 5x + 6
    p = [G(6), G(-5), G(1)]
    q, r = uni_divmod(p, [G(-2), G(1)])
    assert r == []
    assert q == [G(-3), G(1)]
    g = uni_gcd(p, [G(-2), G(1)])
    assert g == [G(-2), G(1)]  # monic x - 2
    assert uni_gcd(p, [G(1)]) == [G(1)]


def test_rational_roots_with_multiplicity():
    # (x - 1/2)^2 (x - 3)
    half = G(Fraction(1, 2))
    p = [G(1)]
    for root in (half, half, G(3)):
        p = [a - root * b for a, b in zip([G(0)] + p, p + [G(0)])]
    # simpler: multiply out (x - r) factors
    def mul_linear(poly, r):
        shifted = [G(0)] + poly
        scaled = [-r * c for c in poly] + [G(0)]
        return [a + b for a, b in zip(shifted, scaled)]

    p = [G(1)]
    for r in (half, half, G(3)):
        p = mul_linear(p, r)
    roots, leftovers = rational_roots(p)
    assert roots == [(Fraction(1, 2), 2), (Fraction(3), 1)]
    assert leftovers == []


def test_rational_roots_irrational_leftover():
    # x^2 - 2: no rational roots
    p = [G(-2), G(0), G(1)]
    roots, leftovers = rational_roots(p)
    assert roots == []
    assert len(leftovers) == 2


def test_gauss_solve_consistent_and_not():
    a = [[G(1), G(2)], [G(3), G(4)]]
    x = gauss_solve(a, [G(5), G(6)])
    assert [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]] == [G(5), G(6)]
    # overdetermined inconsistent
    rows = [[G(1)], [G(1)]]
    assert gauss_solve(rows, [G(1), G(2)]) is None


def test_invert_exact():
    m = [[G(2), G(1)], [G(1), G(1)]]
    inv = invert_exact(m)
    assert inv == [[G(1), G(-1)], [G(-1), G(2)]]
    with pytest.raises(ZeroDivisionError):
        invert_exact([[G(1), G(1)], [G(1), G(1)]])


def test_uni_eval():
    p = [G(1), G(0), G(1)]  # 1 + x^2
    assert uni_eval(p, G(0, 1)) == G(0)  # i is a root
