"""Cut-and-project schemes, model-set enumeration, densities and Meyer checks.

Two lattice encodings are supported:

* :class:`GeneratorMatrix` -- a basis of a lattice in R^a x R^b with exact
  entries in Q or Q(sqrt 5).  Enumeration sweeps integer coefficient vectors
  inside a box derived from the exact inverse basis.
* :class:`PadicDiagonal` -- the diagonal embedding ``{(x, x) : x in Z[1/p]}``
  in Q_p x R.  Enumeration is by valuation depth.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .algebraic import Sqrt5, TAU, as_exact, sign
from .errors import CoverageError, UnsupportedGeometry
from .groups import (
    FiniteSet,
    GroupDescriptor,
    HeisenbergInt,
    IntLattice,
    LatticeBox,
    PadicBall,
    PadicTruncated,
    RationalBox,
    RealVector,
    Trivial,
    VanHoveSequence,
    haar_measure,
    padic_valuation,
)
from .setcover import min_cover

__all__ = [
    "GeneratorMatrix",
    "PadicDiagonal",
    "CutProjectScheme",
    "Window",
    "ModelSet",
    "SublatticePoints",
    "FinitePoints",
    "FundamentalDomain",
    "DensityTrace",
    "MeyerReport",
    "enumerate_model_set",
    "certify_internal_density",
    "required_bound",
    "uniform_density",
    "meyer_check",
    "fundamental_domain",
    "cps_preset",
    "write_point_list",
    "read_point_list",
]


# ---------------------------------------------------------------------------
# exact linear algebra over Q(sqrt 5)
# ---------------------------------------------------------------------------


def _invert(rows: list[list]) -> list[list]:
    n = len(rows)
    m = [[as_exact(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ValueError("generator matrix is singular")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col] if isinstance(m[col][col], Sqrt5) else Fraction(1) / m[col][col]
        m[col] = [as_exact(x * inv) for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [as_exact(a - f * b) for a, b in zip(m[r], m[col])]
    return [row[n:] for row in m]


def _det(rows: list[list]):
    n = len(rows)
    m = [[as_exact(x) for x in r] for r in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = as_exact(det * m[col][col])
        for r in range(col + 1, n):
            f = as_exact(m[r][col] / m[col][col])
            m[r] = [as_exact(a - f * b) for a, b in zip(m[r], m[col])]
    return det


def _rational_rank(rows: list[list[Fraction]]) -> int:
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def _split(x) -> tuple[Fraction, Fraction]:
    x = as_exact(x)
    if isinstance(x, Sqrt5):
        return x.r, x.s
    return Fraction(x), Fraction(0)


def _floor(x) -> int:
    return x.floor() if isinstance(x, Sqrt5) else math.floor(x)


def _ceil(x) -> int:
    return x.ceil() if isinstance(x, Sqrt5) else math.ceil(x)


# ---------------------------------------------------------------------------
# schemes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorMatrix:
    """Rows are lattice generators in R^a x R^b (physical coordinates first)."""

    rows: tuple
    a: int
    b: int

    def __post_init__(self):
        rows = tuple(tuple(as_exact(x) for x in r) for r in self.rows)
        if len(rows) != self.a + self.b or any(len(r) != self.a + self.b for r in rows):
            raise ValueError("generator matrix must be square of size a + b")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.a + self.b

    def covolume(self):
        return abs(_det([list(r) for r in self.rows]))

    def inverse(self):
        return _invert([list(r) for r in self.rows])

    def point(self, coeffs) -> tuple:
        return tuple(as_exact(sum((c * r[j] for c, r in zip(coeffs, self.rows)), Fraction(0))) for j in range(self.n))

    def physical_injective(self) -> bool:
        """pi_G is injective on the lattice iff the physical block has Q-rank n."""
        split_rows = []
        for r in self.rows:
            row = []
            for x in r[: self.a]:
                row.extend(_split(x))
            split_rows.append(row)
        if self.a == 0:
            return self.n == 0
        return _rational_rank(split_rows) == self.n


@dataclass(frozen=True)
class PadicDiagonal:
    """``{(x, x) : x in Z[1/p]}`` inside Q_p x R."""

    p: int

    def covolume(self):
        return Fraction(1)


@dataclass(frozen=True)
class CutProjectScheme:
    physical: GroupDescriptor
    internal: GroupDescriptor
    lattice: object
    name: str = "custom"
    status: str = "verified"

    @property
    def covolume(self):
        return self.lattice.covolume()

    def check(self) -> list[str]:
        """Structural problems with the scheme (empty when none are found)."""
        problems = []
        if isinstance(self.lattice, GeneratorMatrix):
            if self.lattice.covolume() == 0:
                problems.append("generators are linearly dependent")
            elif not self.lattice.physical_injective():
                problems.append("projection to the physical group is not injective on the lattice")
        return problems


@dataclass(frozen=True)
class Window:
    region: object
    regular: bool = True

    def __post_init__(self):
        if haar_measure(self.region) <= 0:
            raise ValueError("window must have positive measure")

    def contains(self, h) -> bool:
        return self.region.contains(h)


@dataclass(frozen=True)
class ModelSet:
    """``pi_G(Lambda ∩ (G x W))`` with an enumeration bound.

    ``bound`` is the coefficient box half-width for generator lattices or the
    valuation depth for p-adic diagonals.  ``None`` means "derive it".
    """

    scheme: CutProjectScheme
    window: Window
    bound: int | None = None

    def points_in(self, query) -> FiniteSet:
        return enumerate_model_set(self, query)

    @property
    def group(self) -> GroupDescriptor:
        return self.scheme.physical

    def expected_density(self):
        """``mu(W) / covolume``; the regular-model-set density, used as an oracle."""
        return as_exact(haar_measure(self.window.region) / self.scheme.covolume)

    def with_bound(self, bound):
        return ModelSet(self.scheme, self.window, bound)


def _query_box(query, group: GroupDescriptor):
    """Bounding box ``(lo, hi)`` of a query region in R^a coordinates."""
    if isinstance(query, RationalBox):
        return list(query.lower), list(query.upper)
    if isinstance(query, LatticeBox):
        return [Fraction(x) for x in query.lower], [Fraction(x) for x in query.upper]
    if isinstance(query, FiniteSet):
        if query.is_empty():
            return None
        cols = list(zip(*query.elements))
        return [min(c) for c in cols], [max(c) for c in cols]
    raise UnsupportedGeometry(f"query {type(query).__name__} in {group}")


def _window_box(window: Window, b: int):
    r = window.region
    if b == 0:
        return [], []
    if isinstance(r, RationalBox):
        return list(r.lower), list(r.upper)
    raise UnsupportedGeometry("generator-matrix windows must be boxes")


def required_bound(ms: ModelSet, query) -> int:
    """Smallest coefficient half-width that provably covers ``query x W``."""
    lat = ms.scheme.lattice
    if isinstance(lat, PadicDiagonal):
        if not isinstance(query, PadicBall):
            raise UnsupportedGeometry("p-adic model sets take PadicBall queries")
        depth = padic_valuation(query.center, lat.p)
        need = max(query.radius, 0, -depth if depth != math.inf else 0)
        return int(need)
    box = _query_box(query, ms.scheme.physical)
    if box is None:
        return 0
    qlo, qhi = box
    wlo, whi = _window_box(ms.window, lat.b)
    lo, hi = qlo + wlo, qhi + whi
    inv = lat.inverse()
    need = 0
    for j in range(lat.n):
        # max over the box of |sum_i x_i inv[i][j]|
        total = Fraction(0)
        for i in range(lat.n):
            c = inv[i][j]
            total = total + max(abs(lo[i] * c), abs(hi[i] * c))
        need = max(need, _ceil(as_exact(total)))
    return need


def enumerate_model_set(ms: ModelSet, query) -> FiniteSet:
    """Exact ``ω ∩ query`` as a sorted FiniteSet in the physical group.

    Raises :class:`CoverageError` with a suggested bound when ``ms.bound`` is
    too small to guarantee completeness.
    """
    need = required_bound(ms, query)
    bound = need if ms.bound is None else ms.bound
    if bound < need:
        raise CoverageError(
            f"enumeration bound {bound} does not cover the query; need at least {need}",
            suggested_bound=need,
        )
    lat = ms.scheme.lattice
    if isinstance(lat, PadicDiagonal):
        return _enumerate_padic(ms, query, bound)
    return _enumerate_generators(ms, query, bound)


def _enumerate_padic(ms: ModelSet, query: PadicBall, depth: int) -> FiniteSet:
    p = ms.scheme.lattice.p
    w = ms.window.region
    lo, hi = w.lower[0], w.upper[0]
    scale = p**depth
    pts = []
    for a in range(_ceil(lo * scale), _floor(hi * scale) + 1):
        x = Fraction(a, scale)
        if ms.window.contains((x,)) and query.contains(x):
            pts.append(x)
    return FiniteSet(ms.scheme.physical, pts)


def _enumerate_generators(ms: ModelSet, query, bound: int) -> FiniteSet:
    lat = ms.scheme.lattice
    box = _query_box(query, ms.scheme.physical)
    if box is None:
        return FiniteSet(ms.scheme.physical, ())
    qlo, qhi = box
    wlo, whi = _window_box(ms.window, lat.b)
    lo, hi = qlo + wlo, qhi + whi
    n, a = lat.n, lat.a
    last = lat.rows[-1]
    out = []
    for prefix in itertools.product(range(-bound, bound + 1), repeat=n - 1):
        base = lat.point(prefix + (0,))
        cmin, cmax = -bound, bound
        for j in range(n):
            g = last[j]
            if g == 0:
                if base[j] < lo[j] or base[j] > hi[j]:
                    cmin, cmax = 1, 0
                continue
            t1 = as_exact((lo[j] - base[j]) / g)
            t2 = as_exact((hi[j] - base[j]) / g)
            if sign(as_exact(g)) < 0:
                t1, t2 = t2, t1
            cmin = max(cmin, _ceil(t1))
            cmax = min(cmax, _floor(t2))
        for c in range(cmin, cmax + 1):
            pt = tuple(as_exact(x + c * y) for x, y in zip(base, last))
            phys, internal = pt[:a], pt[a:]
            if not ms.window.contains(internal):
                continue
            if ms.scheme.physical.kind == "int":
                phys = tuple(int(x) for x in phys)
            if query.contains(phys):
                out.append(phys)
    return FiniteSet(ms.scheme.physical, out)


def certify_internal_density(ms: ModelSet, patch, eps) -> bool:
    """Check that internal projections of lattice points over ``patch`` are eps-dense in W.

    Only one-dimensional (or trivial) internal groups are certified; other
    cases report False.
    """
    lat = ms.scheme.lattice
    eps = Fraction(eps)
    if isinstance(lat, PadicDiagonal):
        # points a/p^k in [-R, R] have gaps p^-k
        return Fraction(1, lat.p ** max(ms.bound or 0, 0)) <= eps
    if lat.b == 0:
        return True
    if lat.b != 1:
        return False
    need = required_bound(ms, patch)
    bound = max(need, ms.bound or 0)
    box = _query_box(patch, ms.scheme.physical)
    qlo, qhi = box
    internals = []
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=lat.n):
        pt = lat.point(coeffs)
        phys = pt[: lat.a]
        if all(l <= x <= h for x, l, h in zip(phys, qlo, qhi)) and ms.window.contains(pt[lat.a :]):
            internals.append(pt[lat.a])
    if not internals:
        return False
    internals.sort()
    w = ms.window.region
    gaps = [internals[0] - w.lower[0], w.upper[0] - internals[-1]]
    gaps += [b - a for a, b in zip(internals, internals[1:])]
    return all(g <= eps for g in gaps)


# ---------------------------------------------------------------------------
# other point sources
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SublatticePoints:
    """The lattice ``diag(moduli) Z^d`` inside Z^d or R^d."""

    group: GroupDescriptor
    moduli: tuple

    def points_in(self, query) -> FiniteSet:
        box = _query_box(query, self.group)
        if box is None:
            return FiniteSet(self.group, ())
        axes = []
        for lo, hi, m in zip(*box, self.moduli):
            m = Fraction(m)
            axes.append([k * m for k in range(_ceil(lo / m), _floor(hi / m) + 1)])
        pts = []
        for p in itertools.product(*axes):
            if self.group.kind == "int":
                p = tuple(int(x) for x in p)
            if query.contains(p):
                pts.append(p)
        return FiniteSet(self.group, pts)


@dataclass(frozen=True)
class FinitePoints:
    """A finite point patch used as a point source."""

    points: FiniteSet

    @property
    def group(self):
        return self.points.group

    def points_in(self, query) -> FiniteSet:
        return FiniteSet(self.group, (p for p in self.points if query.contains(p)))


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------


@dataclass
class DensityTrace:
    rows: list  # (i, count, measure, ratio)
    tail: object
    band: tuple
    k: int

    @property
    def ratios(self):
        return [r[3] for r in self.rows]

    def band_contains(self, value) -> bool:
        return self.band[0] <= value <= self.band[1]


def uniform_density(source, seq: VanHoveSequence, i_max: int, k: int = 5) -> DensityTrace:
    """Trace of ``|ω ∩ A_i| / μ(A_i)``; tail is the last value, band spans the last ``k``."""
    if isinstance(source, FiniteSet):
        source = FinitePoints(source)
    regions = [seq(i) for i in range(1, i_max + 1)]
    if isinstance(source, ModelSet) and all(isinstance(A, RationalBox) for A in regions):
        # one enumeration over the hull, then filter per index
        d = source.group.d
        hull = RationalBox(
            source.group,
            tuple(min(A.lower[j] for A in regions) for j in range(d)),
            tuple(max(A.upper[j] for A in regions) for j in range(d)),
        )
        source = FinitePoints(source.points_in(hull))
    rows = []
    for i, A in enumerate(regions, start=1):
        count = len(source.points_in(A))
        mu = haar_measure(A)
        rows.append((i, count, mu, as_exact(Fraction(count) / mu if not isinstance(mu, Sqrt5) else count / mu)))
    window = [r[3] for r in rows[-k:]]
    return DensityTrace(rows, rows[-1][3], (min(window), max(window)), k)


# ---------------------------------------------------------------------------
# Meyer property
# ---------------------------------------------------------------------------


@dataclass
class MeyerReport:
    status: str  # "pass", "fail" or "inconclusive"
    relatively_dense: bool | None
    covering_radius: object = None
    meyer_difference: bool | None = None
    F: tuple = ()
    violation: object = None
    reason: str = ""


def meyer_check(points: FiniteSet, support: RationalBox, query: RationalBox, F_bound, K_bound) -> MeyerReport:
    """Bounded checks of ``Kω ⊇ query`` and ``(ωω⁻¹ ∩ query) ⊆ Fω`` on a 1-d patch.

    ``points`` must be the full point set inside ``support``; the support has
    to contain ``query`` enlarged by ``K_bound + F_bound`` on both sides,
    otherwise the report is inconclusive.  K is searched among centred
    intervals ``[-r, r]`` with ``r <= K_bound`` and F by exact minimum set
    cover among candidates with ``|f| <= F_bound``.
    """
    if points.group.d != 1 or points.group.kind not in ("real", "int"):
        raise UnsupportedGeometry("meyer_check handles subsets of R or Z")
    F_bound, K_bound = as_exact(F_bound), as_exact(K_bound)
    margin = F_bound + K_bound
    if support.lower[0] > query.lower[0] - margin or support.upper[0] < query.upper[0] + margin:
        return MeyerReport("inconclusive", None, reason="support does not contain query plus margin")
    xs = [as_exact(p[0]) for p in points]
    if not xs:
        return MeyerReport("fail", False, reason="no points")
    xs.sort()
    qlo, qhi = query.lower[0], query.upper[0]

    def dist(x):
        j = bisect.bisect_left(xs, x)
        near = xs[max(j - 1, 0) : j + 1]
        return min(abs(as_exact(x - p)) for p in near)

    # the covering radius over query peaks at an endpoint or a gap midpoint
    probes = [qlo, qhi] + [as_exact((a + b) / 2) for a, b in zip(xs, xs[1:])]
    radius = max(dist(x) for x in probes if qlo <= x <= qhi)
    rel_dense = radius <= K_bound
    if not rel_dense:
        return MeyerReport("fail", False, radius, None, violation=radius,
                           reason=f"covering radius {radius} exceeds K_bound {K_bound}")
    # difference condition
    diffs = sorted({d for x in xs for y in xs if qlo <= (d := as_exact(x - y)) <= qhi})
    member = set(xs)
    cands = sorted(
        {f for d in diffs for x in xs if abs(f := as_exact(d - x)) <= F_bound},
        key=lambda f: (abs(f), f),
    )
    index = {d: i for i, d in enumerate(diffs)}
    sets = []
    for f in cands:
        mask = 0
        for d in diffs:
            if as_exact(d - f) in member:
                mask |= 1 << index[d]
        sets.append(mask)
    universe = (1 << len(diffs)) - 1
    cover = min_cover(universe, sets)
    if cover is None:
        covered = 0
        for s in sets:
            covered |= s
        missing = next(d for d in diffs if not covered >> index[d] & 1)
        return MeyerReport("fail", True, radius, False, violation=missing,
                           reason=f"difference {missing} is not within F_bound of the point set")
    F = tuple(cands[i] for i in cover)
    return MeyerReport("pass", True, radius, True, F)


# ---------------------------------------------------------------------------
# fundamental domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FundamentalDomain:
    """Closed-form fundamental domain ``C`` of a preset lattice."""

    label: str
    group: GroupDescriptor
    region: object
    covolume: Fraction
    moduli: tuple = ()

    @property
    def density(self) -> Fraction:
        return 1 / Fraction(self.covolume)

    def decompose(self, g):
        """``(c, z)`` with ``g = c z``, ``c`` in C and ``z`` in the lattice."""
        if self.group.kind == "heisenberg":
            if self.region is None:
                raise UnsupportedGeometry("only the covolume of H3(Z) in H3(R) is available")
            return self.group.identity(), tuple(g)
        z = tuple(m * _floor(Fraction(x) / m) for x, m in zip(g, self.moduli))
        if self.group.kind == "int":
            z = tuple(int(v) for v in z)
        c = tuple(x - y for x, y in zip(g, z))
        return c, z

    def in_lattice(self, z) -> bool:
        if self.group.kind == "heisenberg":
            return all(isinstance(v, int) for v in z)
        return all(Fraction(x) / m == math.floor(Fraction(x) / m) for x, m in zip(z, self.moduli))

    def verify_tiling(self, samples: Iterable) -> bool:
        """Every sample decomposes, and the decomposition is unique among neighbouring cosets."""
        op = self.group.op
        for g in samples:
            c, z = self.decompose(g)
            if not self.region.contains(c) or not self.in_lattice(z) or op(c, z) != tuple(g):
                return False
            if self.group.kind == "heisenberg":
                continue
            for shift in itertools.product((-1, 0, 1), repeat=len(self.moduli)):
                if not any(shift):
                    continue
                z2 = tuple(a + s * m for a, s, m in zip(z, shift, self.moduli))
                c2 = tuple(x - y for x, y in zip(g, z2))
                if self.region.contains(c2):
                    return False
        return True


def fundamental_domain(preset: str, spacing=1) -> FundamentalDomain:
    """Fundamental domain of a preset lattice.

    ``zd:<d>``  spacing*Z^d in R^d with ``C = [0, spacing)^d``;
    ``nzd:<n1,..,nd>``  the sublattice in Z^d with ``C`` the residue box;
    ``heisenberg``  H3(Z) in itself with ``C = {e}``;
    ``heisenberg-real``  H3(Z) in H3(R), covolume only.
    """
    kind, _, arg = preset.partition(":")
    if kind == "zd":
        d = int(arg or 1)
        s = Fraction(spacing)
        group = RealVector(d)
        C = RationalBox(group, (Fraction(0),) * d, (s,) * d, upper_closed=False)
        return FundamentalDomain(preset, group, C, s**d, (s,) * d)
    if kind == "nzd":
        mods = tuple(int(x) for x in arg.split(","))
        if any(m < 1 for m in mods):
            raise ValueError("moduli must be positive")
        group = IntLattice(len(mods))
        C = LatticeBox(group, (0,) * len(mods), tuple(m - 1 for m in mods))
        return FundamentalDomain(preset, group, C, Fraction(math.prod(mods)), mods)
    if kind == "heisenberg":
        group = HeisenbergInt()
        return FundamentalDomain(preset, group, FiniteSet(group, [(0, 0, 0)]), Fraction(1))
    if kind == "heisenberg-real":
        return FundamentalDomain(preset, HeisenbergInt(), None, Fraction(1))
    raise UnsupportedGeometry(f"no closed-form fundamental domain for {preset!r}")


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def _fibonacci() -> ModelSet:
    G, H = RealVector(1), RealVector(1)
    lat = GeneratorMatrix(((1, 1), (TAU, 1 - TAU)), 1, 1)
    window = Window(RationalBox(H, (Fraction(-1),), (TAU - 1,), upper_closed=True, lower_closed=False))
    return ModelSet(CutProjectScheme(G, H, lat, "fibonacci"), window)


def cps_preset(name: str) -> ModelSet:
    """Shipped model sets: ``trivial-z``, ``fibonacci``, ``padic:<p>:<R>:<depth>``,
    ``zd:<d>`` and ``nzd:<n1,..,nd>``."""
    kind, _, arg = name.partition(":")
    if kind == "trivial-z":
        lat = GeneratorMatrix(((1,),), 1, 0)
        W = Window(FiniteSet(Trivial(), [()]))
        return ModelSet(CutProjectScheme(RealVector(1), Trivial(), lat, name), W)
    if kind == "fibonacci":
        return _fibonacci()
    if kind == "padic":
        p, R, depth = arg.split(":")
        p, depth = int(p), int(depth)
        R = Fraction(R)
        G = PadicTruncated(p, max(depth, 1) + 32)
        H = RealVector(1)
        W = Window(RationalBox(H, (-R,), (R,)))
        return ModelSet(CutProjectScheme(G, H, PadicDiagonal(p), name), W, depth)
    if kind == "zd":
        d = int(arg or 1)
        lat = GeneratorMatrix(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)), d, 0)
        W = Window(FiniteSet(Trivial(), [()]))
        return ModelSet(CutProjectScheme(RealVector(d), Trivial(), lat, name), W)
    if kind == "nzd":
        mods = [int(x) for x in arg.split(",")]
        d = len(mods)
        lat = GeneratorMatrix(tuple(tuple(m * int(i == j) for j in range(d)) for i, m in enumerate(mods)), d, 0)
        W = Window(FiniteSet(Trivial(), [()]))
        return ModelSet(CutProjectScheme(IntLattice(d), Trivial(), lat, name), W)
    raise ValueError(f"unknown CPS preset {name!r}")


# ---------------------------------------------------------------------------
# point-list files
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    x = as_exact(x)
    if isinstance(x, Sqrt5):
        den = math.lcm(x.r.denominator, x.s.denominator)
        return f"({int(x.r * den)},{int(x.s * den)},{den})"
    return str(x)


def _parse(tok: str):
    if tok.startswith("("):
        a, b, c = (int(t) for t in tok.strip("()").split(","))
        return as_exact(Sqrt5(Fraction(a, c), Fraction(b, c)))
    return Fraction(tok)


def write_point_list(ms: ModelSet, points: FiniteSet, stream) -> None:
    """One point per line; ``(a,b,c)`` stands for ``(a + b sqrt5)/c``."""
    w = ms.window.region
    stream.write(f"# scheme: {ms.scheme.name}\n")
    stream.write(f"# physical: {ms.scheme.physical}\n")
    stream.write(f"# internal: {ms.scheme.internal}\n")
    if isinstance(w, RationalBox):
        lo = "[" if w.lower_closed else "("
        hi = "]" if w.upper_closed else ")"
        stream.write(f"# window: {lo}{','.join(map(_fmt, w.lower))};{','.join(map(_fmt, w.upper))}{hi}\n")
    stream.write(f"# count: {len(points)}\n")
    for p in points:
        coords = p if isinstance(p, tuple) else (p,)
        stream.write(" ".join(_fmt(x) for x in coords) + "\n")


def read_point_list(stream, group: GroupDescriptor) -> FiniteSet:
    pts = []
    for line in stream:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        vals = [_parse(t) for t in line.split()]
        if group.kind == "padic":
            pts.append(vals[0])
        elif group.kind == "int":
            pts.append(tuple(int(v) for v in vals))
        else:
            pts.append(tuple(vals))
    return FiniteSet(group, pts)
