import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from owentropy.algebraic import TAU, Sqrt5
from owentropy.errors import GroupMismatch, InvalidElement, PrecisionError, UnsupportedGeometry
from owentropy.groups import (
    FiniteSet,
    HeisenbergInt,
    IntLattice,
    LatticeBox,
    PadicBall,
    PadicTruncated,
    Product,
    ProductRegion,
    RationalBox,
    RealVector,
    Trivial,
    dilate,
    dilated_sequence,
    haar_measure,
    k_boundary,
    lattice_discretize,
    minkowski,
    minkowski_inverse,
    padic_valuation,
    preset_sequence,
    product_sequence,
    van_hove_diagnostic,
)

Z1, Z2, R1, R2 = IntLattice(1), IntLattice(2), RealVector(1), RealVector(2)
H = HeisenbergInt()
Q2 = PadicTruncated(2, 16)

small = st.integers(-6, 6)
heis = st.tuples(small, small, small)


def windowed_boundary(K: FiniteSet, A: FiniteSet, pad: int = 8) -> FiniteSet:
    """K A ∩ K (W \\ A) for a window W large enough to hold every relevant k^-1 g."""
    d = A.group.d
    coords = [c for a in A for c in a] + [c for k in K for c in k]
    lo, hi = min(coords) - pad, max(coords) + pad
    W = FiniteSet(A.group, itertools.product(range(lo, hi + 1), repeat=d))
    return minkowski(K, A).intersection(minkowski(K, W.difference(A)))


# -- group axioms ------------------------------------------------------------


@given(heis, heis, heis)
def test_heisenberg_associative(a, b, c):
    assert H.op(H.op(a, b), c) == H.op(a, H.op(b, c))


@given(heis)
def test_heisenberg_inverse_and_identity(a):
    e = H.identity()
    assert H.op(a, H.inv(a)) == e == H.op(H.inv(a), a)
    assert H.op(a, e) == a == H.op(e, a)


def test_heisenberg_is_not_abelian():
    a, b = (1, 0, 0), (0, 1, 0)
    assert H.op(a, b) == (1, 1, 1)
    assert H.op(b, a) == (1, 1, 0)
    assert not H.is_abelian


@given(st.integers(-64, 64), st.integers(0, 5), st.integers(-64, 64), st.integers(0, 5))
def test_padic_group_laws(a, i, b, j):
    x, y = Fraction(a, 2**i), Fraction(b, 2**j)
    assert Q2.op(x, y) == Q2.op(y, x)
    assert Q2.op(x, Q2.inv(x)) == Q2.identity()


def test_padic_valuation_values():
    assert padic_valuation(Fraction(12), 2) == 2
    assert padic_valuation(Fraction(3, 8), 2) == -3
    assert padic_valuation(Fraction(0), 5) == float("inf")


def test_element_validation():
    with pytest.raises(InvalidElement):
        Z2.element((1, 2, 3))
    with pytest.raises(InvalidElement):
        Q2.element(Fraction(1, 3))
    with pytest.raises(PrecisionError):
        PadicTruncated(2, 3).element(Fraction(1, 16))
    with pytest.raises(ValueError):
        PadicTruncated(4, 3)
    assert Trivial().element(()) == ()


def test_product_flattens_and_validates():
    G = Product(Z1, Product(R1, Q2))
    assert [f.kind for f in G.factors] == ["int", "real", "padic"]
    assert G.element(((1,), (Fraction(1, 2),), Fraction(3, 4))) == ((1,), (Fraction(1, 2),), Fraction(3, 4))
    assert not G.is_discrete


@pytest.mark.parametrize("G", [Z2, R1, H, Q2, Product(Z1, R2), Trivial()])
def test_group_config_roundtrip(G):
    from owentropy.groups import GroupDescriptor

    assert GroupDescriptor.from_config(G.to_config()) == G


# -- finite sets -------------------------------------------------------------


def test_finite_set_canonical_and_json_roundtrip():
    A = FiniteSet(R1, [(Fraction(3, 2),), (TAU,), (Fraction(3, 2),), (Fraction(-1),)])
    assert len(A) == 3
    assert A.elements[0] == (Fraction(-1),)
    assert FiniteSet.from_json(A.to_json()) == A
    assert A.to_json()["elements"][1] == ["3/2"]
    assert haar_measure(A) == 0
    B = FiniteSet(Z2, [(1, 2), (0, 0)])
    assert haar_measure(B) == 2
    assert FiniteSet.from_json(B.to_json()) == B


def test_group_mismatch():
    with pytest.raises(GroupMismatch):
        FiniteSet(Z1, [(0,)]).union(FiniteSet(Z2, [(0, 0)]))


@given(st.sets(st.tuples(small), max_size=6), st.sets(st.tuples(small), max_size=6), st.tuples(small))
def test_minkowski_is_translation_equivariant(a, b, g):
    A, B = FiniteSet(Z1, a), FiniteSet(Z1, b)
    assert minkowski(A, B.translate(g)) == minkowski(A, B).translate(g)
    assert len(minkowski(A, B)) <= len(A) * len(B)


@given(st.sets(heis, min_size=1, max_size=4), st.sets(heis, min_size=1, max_size=4))
def test_minkowski_inverse_reverses_products(a, b):
    A, B = FiniteSet(H, a), FiniteSet(H, b)
    assert minkowski_inverse(minkowski(A, B)) == minkowski(minkowski_inverse(B), minkowski_inverse(A))


# -- K-boundaries --------------------------------------------------------------


@settings(max_examples=60)
@given(
    st.sets(st.tuples(small, small), min_size=1, max_size=8),
    st.sets(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=1, max_size=4),
)
def test_discrete_boundary_matches_windowed_complement(a, k):
    A, K = FiniteSet(Z2, a), FiniteSet(Z2, k)
    assert k_boundary(K, A) == windowed_boundary(K, A)


@settings(max_examples=60)
@given(
    st.sets(st.tuples(small, small), min_size=1, max_size=8),
    st.sets(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=1, max_size=3),
    st.sets(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=1, max_size=3),
)
def test_boundary_monotone_in_K(a, k1, k2):
    A = FiniteSet(Z2, a)
    K1 = FiniteSet(Z2, k1)
    K2 = K1.union(FiniteSet(Z2, k2))
    assert k_boundary(K1, A).issubset(k_boundary(K2, A))


@settings(max_examples=60)
@given(
    st.sets(st.tuples(small), min_size=1, max_size=8),
    st.sets(st.tuples(st.integers(-2, 2)), min_size=1, max_size=3),
    st.tuples(small),
)
def test_boundary_right_translation(a, k, g):
    A, K = FiniteSet(Z1, a), FiniteSet(Z1, k)
    assert k_boundary(K, A.translate(g)) == k_boundary(K, A).translate(g)


@settings(max_examples=60)
@given(
    st.sets(st.tuples(small), min_size=1, max_size=6),
    st.sets(st.tuples(small), min_size=1, max_size=6),
    st.sets(st.tuples(st.integers(-2, 2)), min_size=1, max_size=3),
)
def test_boundary_of_union_inside_union_of_boundaries(a, b, k):
    A, B, K = FiniteSet(Z1, a), FiniteSet(Z1, b), FiniteSet(Z1, k)
    assert k_boundary(K, A.union(B)).issubset(k_boundary(K, A).union(k_boundary(K, B)))


@settings(max_examples=40)
@given(st.sets(heis, min_size=1, max_size=5), st.sets(st.tuples(st.integers(-1, 1), st.integers(-1, 1), st.integers(-1, 1)), min_size=1, max_size=3))
def test_heisenberg_boundary_membership_rule(a, k):
    A, K = FiniteSet(H, a), FiniteSet(H, k)
    bd = k_boundary(K, A)
    assert bd.issubset(minkowski(K, A))
    # e is in K K^-1, so g ∈ ∂ iff some k^-1 g leaves A
    for g in minkowski(K, A):
        off = any(H.op(H.inv(x), g) not in A for x in K)
        assert (g in bd) == off


def test_lattice_box_boundary_closed_form():
    for n in (1, 5, 17):
        A = LatticeBox(Z2, (-n, -n), (n, n))
        K = LatticeBox(Z2, (-1, -1), (1, 1))
        shell = k_boundary(K, A)
        assert haar_measure(shell) == (2 * n + 3) ** 2 - (2 * n - 1) ** 2
        assert shell.to_finite_set() == windowed_boundary(K.to_finite_set(), A.to_finite_set())


def test_real_box_boundary_closed_form():
    for n in (1, 3, 10):
        A = RationalBox(R2, (-n, -n), (n, n))
        K = RationalBox(R2, (-1, -1), (1, 1))
        assert haar_measure(k_boundary(K, A)) == (2 * n + 2) ** 2 - (2 * n - 2) ** 2
    # K larger than A: the inner box is empty and the boundary is all of KA
    A = RationalBox(R1, (0,), (1,))
    assert haar_measure(k_boundary(RationalBox(R1, (-1,), (1,)), A)) == 3


def test_real_boundary_with_irrational_corners():
    A = RationalBox(R1, (0,), (TAU,))
    K = RationalBox(R1, (Fraction(-1, 2),), (Fraction(1, 2),))
    assert haar_measure(k_boundary(K, A)) == 2


def test_padic_ball_boundary_is_empty():
    for r in range(0, 6):
        A = PadicBall(Q2, Fraction(0), r)
        assert haar_measure(A) == 2**r
        assert haar_measure(k_boundary(PadicBall(Q2, Fraction(0), 0), A)) == 0
    # a ball larger than A straddles it
    A = PadicBall(Q2, Fraction(0), 0)
    assert haar_measure(k_boundary(PadicBall(Q2, Fraction(0), 2), A)) == 4


def test_padic_translates_crossing_cosets():
    A = PadicBall(Q2, Fraction(0), 0)
    K = FiniteSet(Q2, [Fraction(0), Fraction(1, 2)])
    # Z_2 and 1/2 + Z_2 are both in KA and in KA^c
    assert haar_measure(k_boundary(K, A)) == 2


def test_product_boundary_measure():
    A = ProductRegion.of(LatticeBox(Z1, (-3,), (3,)), RationalBox(R1, (-2,), (2,)))
    K = ProductRegion.of(LatticeBox(Z1, (-1,), (1,)), RationalBox(R1, (-1,), (1,)))
    # |KA| = 9 * 6, interior = 5 * 2
    assert haar_measure(k_boundary(K, A)) == 9 * 6 - 5 * 2


def test_unsupported_geometry_is_loud():
    with pytest.raises(UnsupportedGeometry):
        k_boundary(FiniteSet(R1, [(0,), (1,)]), RationalBox(R1, (0,), (1,)))


# -- Van Hove diagnostics ----------------------------------------------------


@pytest.mark.parametrize("d", [1, 2])
def test_real_box_ratios_exact(d):
    G = RealVector(d)
    seq = preset_sequence("boxes", G)
    K = RationalBox(G, (-1,) * d, (1,) * d)
    diag = van_hove_diagnostic(seq, K, 30)
    for n, r in diag.rows:
        assert r == Fraction((2 * n + 2) ** d - max(2 * n - 2, 0) ** d, (2 * n) ** d)


def test_constant_sequence_fails():
    seq = preset_sequence("constant", R1)
    diag = van_hove_diagnostic(seq, RationalBox(R1, (-1,), (1,)), 20)
    assert not diag.passed
    assert all(r == 3 for r in diag.ratios)


def test_dilated_and_product_sequences():
    seq = preset_sequence("centered", Z1)
    K = LatticeBox(Z1, (-1,), (1,))
    new, trace = dilated_sequence(K, seq, 5)
    assert haar_measure(new(4)) == 11
    assert trace[0] == (1, Fraction(5, 3))
    prod = product_sequence(seq, preset_sequence("boxes", R1))
    assert haar_measure(prod(2)) == 5 * 4
    assert dilate(K, seq(2)) == LatticeBox(Z1, (-3,), (3,))


# -- lattice discretisation ----------------------------------------------------


def brute_discretize(lo, hi, d, s):
    """Inner/outer counts by scanning candidate cells with plain comparisons."""
    inner = outer = 0
    for z in itertools.product(range(-200, 201), repeat=d):
        cell = [(s * zi, s * (zi + 1)) for zi in z]
        if all(lo <= a and b <= hi for a, b in cell):
            inner += 1
        if all(b >= lo and a <= hi for a, b in cell):
            outer += 1
    return inner, outer


@pytest.mark.parametrize("n,s", [(1, 1), (3, 1), (2, Fraction(1, 2)), (5, 2)])
def test_discretize_against_brute_force(n, s):
    A = RationalBox(R1, (-n,), (n,))
    inner, outer = lattice_discretize(A, s)
    assert (len(inner), len(outer)) == brute_discretize(-n, n, 1, s)


def test_discretize_half_open_box():
    A = RationalBox(R1, (0,), (1,), upper_closed=False)
    inner, outer = lattice_discretize(A, closure=False)
    assert len(inner) == 1 and len(outer) == 1
    # closed cells also pick up [-1, 0], which touches A at 0
    assert len(lattice_discretize(A)[1]) == 2


def test_discretize_irrational_box():
    A = RationalBox(R1, (-TAU,), (TAU,))
    inner, outer = lattice_discretize(A)
    assert [p[0] for p in inner] == [-1, 0]
    assert [p[0] for p in outer] == [-2, -1, 0, 1]
    assert isinstance(TAU, Sqrt5)
