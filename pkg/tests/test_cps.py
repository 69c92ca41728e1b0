import io
import pathlib
import sys
from fractions import Fraction

import mpmath
import pytest

from owentropy.algebraic import SQRT5, TAU, Sqrt5
from owentropy.cps import (
    CutProjectScheme,
    FinitePoints,
    GeneratorMatrix,
    SublatticePoints,
    Window,
    certify_internal_density,
    cps_preset,
    enumerate_model_set,
    fundamental_domain,
    meyer_check,
    read_point_list,
    uniform_density,
    write_point_list,
)
from owentropy.errors import CoverageError, UnsupportedGeometry
from owentropy.groups import (
    FiniteSet,
    IntLattice,
    LatticeBox,
    PadicBall,
    RationalBox,
    RealVector,
    preset_sequence,
)

DATA = pathlib.Path(__file__).parent / "data"
R1 = RealVector(1)

sys.path.insert(0, str(DATA))
from make_fibonacci_golden import in_window, sweep  # noqa: E402


def golden_pairs():
    lines = (DATA / "fibonacci_window_points.txt").read_text().splitlines()
    return [tuple(int(t) for t in ln.split()) for ln in lines if ln and not ln.startswith("#")]


def as_pair(x) -> tuple:
    """m + n tau  ->  (m, n)."""
    x = Sqrt5(x) if not isinstance(x, Sqrt5) else x
    n = 2 * x.s
    m = x.r - x.s
    assert m.denominator == 1 and n.denominator == 1
    return int(m), int(n)


# -- Fibonacci model set -----------------------------------------------------


def test_golden_file_matches_fresh_sweep():
    assert golden_pairs() == sweep()


def test_fibonacci_enumeration_matches_golden_file():
    ms = cps_preset("fibonacci")
    pts = enumerate_model_set(ms, RationalBox(R1, (-50,), (50,)))
    assert [as_pair(p[0]) for p in pts] == golden_pairs()


def test_fibonacci_window_endpoints():
    ms = cps_preset("fibonacci")
    pts = {as_pair(p[0]) for p in ms.points_in(RationalBox(R1, (-3,), (3,)))}
    assert (0, -1) in pts  # internal coordinate tau - 1, closed end
    assert (-1, 0) not in pts  # internal coordinate -1, open end


def test_fibonacci_scheme_is_valid():
    ms = cps_preset("fibonacci")
    assert ms.scheme.check() == []
    assert ms.scheme.covolume == SQRT5
    assert ms.expected_density() == TAU / SQRT5


def test_dependent_generators_are_reported():
    lat = GeneratorMatrix(((1, 1), (2, 2)), 1, 1)
    scheme = CutProjectScheme(R1, R1, lat)
    assert scheme.check()


def test_non_injective_projection_is_reported():
    lat = GeneratorMatrix(((1, 0), (1, 1)), 1, 1)
    assert "injective" in " ".join(CutProjectScheme(R1, R1, lat).check())


def test_fibonacci_density_band_contains_field_value():
    ms = cps_preset("fibonacci")
    trace = uniform_density(ms, preset_sequence("boxes", R1), 60)
    assert trace.band_contains(ms.expected_density())
    oracle = mpmath.mpf(len(sweep())) / 100
    assert abs(oracle - float(TAU / SQRT5)) < 0.02


def test_coverage_error_suggests_bound():
    ms = cps_preset("fibonacci").with_bound(2)
    with pytest.raises(CoverageError) as err:
        enumerate_model_set(ms, RationalBox(R1, (-50,), (50,)))
    need = err.value.suggested_bound
    assert need > 2
    assert len(enumerate_model_set(ms.with_bound(need), RationalBox(R1, (-50,), (50,)))) == 73


def test_internal_density_certificate():
    ms = cps_preset("fibonacci")
    patch = RationalBox(R1, (-30,), (30,))
    assert certify_internal_density(ms, patch, Fraction(1, 2))
    assert not certify_internal_density(ms, patch, Fraction(1, 1000))


# -- p-adic model set --------------------------------------------------------


def test_padic_preset_point_count():
    ms = cps_preset("padic:2:1:3")
    pts = enumerate_model_set(ms, PadicBall(ms.group, Fraction(0), 3))
    assert len(pts) == 17
    assert set(pts) == {Fraction(a, 8) for a in range(-8, 9)}


def test_padic_density_rate():
    ms = cps_preset("padic:2:1:3").with_bound(None)
    trace = uniform_density(ms, preset_sequence("balls", ms.group), 10)
    for i, count, mu, ratio in trace.rows:
        # a/2^i in [-1, 1]: 2^(i+1) + 1 points in a ball of measure 2^i
        assert count == 2 ** (i + 1) + 1
        assert ratio - 2 == Fraction(1, 2**i)


def test_padic_coverage():
    ms = cps_preset("padic:2:1:3")
    with pytest.raises(CoverageError) as err:
        enumerate_model_set(ms, PadicBall(ms.group, Fraction(0), 4))
    assert err.value.suggested_bound == 4


# -- lattices and fundamental domains ---------------------------------------


def test_trivial_scheme_gives_integers():
    pts = enumerate_model_set(cps_preset("trivial-z"), RationalBox(R1, (0,), (5,)))
    assert [p[0] for p in pts] == list(range(6))


@pytest.mark.parametrize("mods", [(2,), (2, 3), (4, 1)])
def test_sublattice_density(mods):
    C = fundamental_domain("nzd:" + ",".join(map(str, mods)))
    assert C.density == Fraction(1, int(C.covolume))
    src = SublatticePoints(C.group, C.moduli)
    d = len(mods)
    box = LatticeBox(IntLattice(d), (0,) * d, (59,) * d)
    assert Fraction(len(src.points_in(box)), int(box.measure())) == C.density
    samples = [tuple((7 * i + 3 * j) % 23 - 11 for j in range(d)) for i in range(40)]
    assert C.verify_tiling(samples)


def test_real_fundamental_domain_tiles():
    C = fundamental_domain("zd:2", Fraction(1, 2))
    assert C.covolume == Fraction(1, 4)
    samples = [(Fraction(i, 7), Fraction(-i, 3)) for i in range(-20, 20)]
    assert C.verify_tiling(samples)


def test_heisenberg_domains():
    C = fundamental_domain("heisenberg")
    assert C.covolume == 1
    assert fundamental_domain("heisenberg-real").covolume == 1
    with pytest.raises(UnsupportedGeometry):
        fundamental_domain("hyperbolic")


# -- Meyer check -------------------------------------------------------------


def test_fibonacci_meyer_pass_and_certificate_holds():
    ms = cps_preset("fibonacci")
    support = RationalBox(R1, (-60,), (60,))
    query = RationalBox(R1, (-50,), (50,))
    rep = meyer_check(ms.points_in(support), support, query, 3, 2)
    assert rep.status == "pass"
    # independent check of the reported F: every difference d in the query
    # satisfies d - f in the model set for some f in F
    pairs = golden_pairs()
    Fp = [as_pair(f) for f in rep.F]
    diffs = {(a - c, b - e) for a, b in pairs for c, e in pairs}
    tau = (1 + mpmath.sqrt(5)) / 2
    for m, n in diffs:
        if -50 <= m + n * tau <= 50:
            assert any(in_window(m - fm, n - fn) for fm, fn in Fp)
    # covering radius: half the largest gap, the long tile tau
    xs = sorted(m + n * tau for m, n in pairs)
    assert mpmath.almosteq(max(b - a for a, b in zip(xs, xs[1:])) / 2, tau / 2, 1e-30)
    assert rep.covering_radius == TAU / 2


def test_squares_fail_meyer():
    pts = FiniteSet(R1, [(Fraction(k * k),) for k in range(0, 12)])
    support = RationalBox(R1, (-10,), (130,))
    rep = meyer_check(pts, support, RationalBox(R1, (0,), (100,)), 3, 5)
    assert rep.status == "fail"


def test_meyer_inconclusive_without_margin():
    pts = FiniteSet(R1, [(Fraction(k),) for k in range(-5, 6)])
    box = RationalBox(R1, (-5,), (5,))
    assert meyer_check(pts, box, box, 1, 1).status == "inconclusive"


# -- point-list files --------------------------------------------------------


def test_point_list_roundtrip():
    ms = cps_preset("fibonacci")
    pts = ms.points_in(RationalBox(R1, (-10,), (10,)))
    buf = io.StringIO()
    write_point_list(ms, pts, buf)
    text = buf.getvalue()
    assert "# window: (-1;(-1,1,2)]" in text
    assert read_point_list(io.StringIO(text), R1) == pts


def test_finite_point_source():
    pts = FiniteSet(R1, [(Fraction(k, 2),) for k in range(-40, 41)])
    trace = uniform_density(FinitePoints(pts), preset_sequence("boxes", R1), 10)
    assert trace.tail == Fraction(41, 20)


def test_window_needs_positive_measure():
    with pytest.raises(ValueError):
        Window(RationalBox(R1, (0,), (0,)))
