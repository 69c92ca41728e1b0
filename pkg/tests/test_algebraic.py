from fractions import Fraction

import mpmath
from hypothesis import given
from hypothesis import strategies as st

from owentropy.algebraic import SQRT5, TAU, Sqrt5, as_exact, sign

mpmath.mp.dps = 60

q = st.fractions(min_value=-50, max_value=50, max_denominator=40)
quad = st.builds(Sqrt5, q, q)


def mp(x: Sqrt5):
    return mpmath.mpf(x.r.numerator) / x.r.denominator + mpmath.mpf(x.s.numerator) / x.s.denominator * mpmath.sqrt(5)


@given(quad, quad)
def test_ordering_agrees_with_high_precision(a, b):
    da, db = mp(a), mp(b)
    if abs(da - db) > mpmath.mpf(10) ** -40:
        assert (a < b) == (da < db)
    else:
        assert a == b


@given(quad, quad)
def test_field_operations(a, b):
    assert mpmath.almosteq(mp(a + b), mp(a) + mp(b), 1e-40)
    assert mpmath.almosteq(mp(a * b), mp(a) * mp(b), 1e-40)
    if b != 0:
        assert (a / b) * b == a


@given(quad)
def test_floor_and_ceil(a):
    assert a.floor() == int(mpmath.floor(mp(a)))
    assert a.ceil() == int(mpmath.ceil(mp(a)))
    assert sign(a) == (0 if a == 0 else (1 if mp(a) > 0 else -1))


def test_golden_ratio_identities():
    assert TAU * TAU == TAU + 1
    assert SQRT5 * SQRT5 == 5
    assert TAU - 1 == 1 / TAU


def test_rational_values_collapse():
    x = Sqrt5(Fraction(3, 2), 0)
    assert x == Fraction(3, 2)
    assert hash(x) == hash(Fraction(3, 2))
    assert isinstance(as_exact(x), Fraction)
    assert {x, Fraction(3, 2)} == {Fraction(3, 2)}
