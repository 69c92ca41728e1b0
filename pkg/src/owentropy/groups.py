"""Exact group arithmetic, compact regions, Haar measures and K-boundaries.

Supported groups are Z^d, R^d (rational or Q(sqrt 5) coordinates), the
integer Heisenberg group H_3(Z), truncated p-adic numbers Q_p and finite
products of those.  Every region carries its group and reports its Haar
measure as an exact Fraction; nothing in this module rounds.

Element encodings
-----------------
=============  ==========================================================
``int``        tuple of ``d`` ints
``real``       tuple of ``d`` exact numbers (Fraction or ``Sqrt5``)
``heisenberg`` ``(a, b, c)`` ints, product ``(a+a', b+b', c+c'+a*b')``
``padic``      Fraction whose denominator is a power of ``p``
``product``    tuple of factor elements
``trivial``    ``()``
=============  ==========================================================
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .algebraic import Sqrt5, as_exact
from .errors import (
    GroupMismatch,
    InvalidElement,
    PrecisionError,
    UnsupportedGeometry,
)

__all__ = [
    "GroupDescriptor",
    "IntLattice",
    "RealVector",
    "HeisenbergInt",
    "PadicTruncated",
    "Product",
    "Trivial",
    "padic_valuation",
    "FiniteSet",
    "LatticeBox",
    "RationalBox",
    "PadicBall",
    "PadicBallUnion",
    "ProductRegion",
    "BoxShell",
    "LatticeShell",
    "ProductBoundary",
    "haar_measure",
    "minkowski",
    "minkowski_inverse",
    "dilate",
    "k_boundary",
    "VanHoveSequence",
    "VanHoveDiagnostic",
    "van_hove_diagnostic",
    "dilated_sequence",
    "product_sequence",
    "lattice_discretize",
    "preset_sequence",
    "SEQUENCE_PRESETS",
]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


def padic_valuation(x, p: int) -> float | int:
    """v_p of a rational; ``math.inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return math.inf
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


@dataclass(frozen=True)
class GroupDescriptor:
    """Which group a value lives in.

    Build instances with the helper constructors (``IntLattice(2)``,
    ``PadicTruncated(2, 12)``, ``Product(...)``) rather than directly.
    """

    kind: str
    d: int = 1
    p: int | None = None
    precision: int | None = None
    factors: tuple = ()

    def __post_init__(self):
        if self.kind not in ("int", "real", "heisenberg", "padic", "product", "trivial"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind in ("int", "real") and self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind == "padic":
            if self.p is None or not _is_prime(self.p):
                raise ValueError(f"p={self.p} is not prime")
            if self.precision is None or self.precision < 1:
                raise ValueError("p-adic precision must be >= 1")
        if self.kind == "product":
            if len(self.factors) < 2:
                raise ValueError("a product needs at least two factors")
            if any(f.kind == "product" for f in self.factors):
                raise ValueError("product factors must be flattened")

    # -- structure -------------------------------------------------------
    @property
    def is_discrete(self) -> bool:
        if self.kind == "product":
            return all(f.is_discrete for f in self.factors)
        return self.kind in ("int", "heisenberg", "trivial")

    @property
    def is_abelian(self) -> bool:
        if self.kind == "product":
            return all(f.is_abelian for f in self.factors)
        return self.kind != "heisenberg"

    def identity(self):
        k = self.kind
        if k == "int":
            return (0,) * self.d
        if k == "real":
            return (Fraction(0),) * self.d
        if k == "heisenberg":
            return (0, 0, 0)
        if k == "padic":
            return Fraction(0)
        if k == "trivial":
            return ()
        return tuple(f.identity() for f in self.factors)

    def element(self, value):
        """Validate ``value`` and return it in canonical form."""
        k = self.kind
        if k == "int":
            value = tuple(value) if not isinstance(value, int) else (value,)
            if len(value) != self.d or not all(isinstance(v, int) for v in value):
                raise InvalidElement(f"{value!r} is not an element of Z^{self.d}")
            return tuple(int(v) for v in value)
        if k == "real":
            if not isinstance(value, (tuple, list)):
                value = (value,)
            if len(value) != self.d:
                raise InvalidElement(f"{value!r} is not an element of R^{self.d}")
            try:
                return tuple(as_exact(v) for v in value)
            except (TypeError, ValueError) as exc:
                raise InvalidElement(f"{value!r}: coordinates must be exact") from exc
        if k == "heisenberg":
            value = tuple(value)
            if len(value) != 3 or not all(isinstance(v, int) for v in value):
                raise InvalidElement(f"{value!r} is not an element of H3(Z)")
            return value
        if k == "padic":
            try:
                x = Fraction(value)
            except (TypeError, ValueError) as exc:
                raise InvalidElement(f"{value!r} is not a p-adic rational") from exc
            den = x.denominator
            k_exp = 0
            while den % self.p == 0:
                den //= self.p
                k_exp += 1
            if den != 1:
                raise InvalidElement(
                    f"{value!r} has denominator prime to p={self.p}; only Z[1/p] is represented"
                )
            if k_exp > self.precision:
                raise PrecisionError(
                    f"{value!r} needs valuation depth {k_exp} > precision {self.precision}"
                )
            return x
        if k == "trivial":
            if tuple(value) != ():
                raise InvalidElement("the trivial group only contains ()")
            return ()
        value = tuple(value)
        if len(value) != len(self.factors):
            raise InvalidElement(f"{value!r} does not match {len(self.factors)} factors")
        return tuple(f.element(v) for f, v in zip(self.factors, value))

    def op(self, g, h):
        k = self.kind
        if k in ("int", "real"):
            return tuple(a + b for a, b in zip(g, h))
        if k == "heisenberg":
            a, b, c = g
            a2, b2, c2 = h
            return (a + a2, b + b2, c + c2 + a * b2)
        if k == "padic":
            x = g + h
            self.element(x)
            return x
        if k == "trivial":
            return ()
        return tuple(f.op(x, y) for f, x, y in zip(self.factors, g, h))

    def inv(self, g):
        k = self.kind
        if k in ("int", "real"):
            return tuple(-a for a in g)
        if k == "heisenberg":
            a, b, c = g
            return (-a, -b, -c + a * b)
        if k == "padic":
            return -g
        if k == "trivial":
            return ()
        return tuple(f.inv(x) for f, x in zip(self.factors, g))

    # -- serialisation ---------------------------------------------------
    def to_config(self) -> dict:
        if self.kind == "product":
            return {"kind": "product", "factors": [f.to_config() for f in self.factors]}
        if self.kind == "padic":
            return {"kind": "padic", "p": self.p, "precision": self.precision}
        if self.kind in ("int", "real"):
            return {"kind": self.kind, "d": self.d}
        return {"kind": self.kind}

    @classmethod
    def from_config(cls, cfg: dict) -> "GroupDescriptor":
        kind = cfg["kind"]
        if kind == "product":
            return Product(*(cls.from_config(c) for c in cfg["factors"]))
        if kind == "padic":
            return PadicTruncated(cfg["p"], cfg["precision"])
        if kind == "int":
            return IntLattice(cfg.get("d", 1))
        if kind == "real":
            return RealVector(cfg.get("d", 1))
        if kind == "heisenberg":
            return HeisenbergInt()
        if kind == "trivial":
            return Trivial()
        raise ValueError(f"unknown group kind {kind!r}")

    def __str__(self):
        k = self.kind
        if k == "int":
            return f"Z^{self.d}"
        if k == "real":
            return f"R^{self.d}"
        if k == "heisenberg":
            return "H3(Z)"
        if k == "padic":
            return f"Q_{self.p}[prec {self.precision}]"
        if k == "trivial":
            return "{e}"
        return " x ".join(str(f) for f in self.factors)


def IntLattice(d: int = 1) -> GroupDescriptor:
    return GroupDescriptor("int", d)


def RealVector(d: int = 1) -> GroupDescriptor:
    return GroupDescriptor("real", d)


def HeisenbergInt() -> GroupDescriptor:
    return GroupDescriptor("heisenberg", 3)


def PadicTruncated(p: int, precision: int) -> GroupDescriptor:
    return GroupDescriptor("padic", 1, p, precision)


def Trivial() -> GroupDescriptor:
    return GroupDescriptor("trivial", 0)


def Product(*factors: GroupDescriptor) -> GroupDescriptor:
    flat = []
    for f in factors:
        flat.extend(f.factors if f.kind == "product" else (f,))
    return GroupDescriptor("product", len(flat), factors=tuple(flat))


def _check_same(a: GroupDescriptor, b: GroupDescriptor):
    if a != b:
        raise GroupMismatch(f"group mismatch: {a} vs {b}")


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteSet:
    """Sorted, duplicate-free finite subset of a group.

    Haar measure is the counting measure in discrete groups and zero in the
    non-discrete ones.
    """

    group: GroupDescriptor
    elements: tuple = ()
    _members: frozenset = field(default=frozenset(), compare=False, repr=False, hash=False)

    def __post_init__(self):
        elems = tuple(sorted({self.group.element(e) for e in self.elements}))
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "_members", frozenset(elems))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g):
        return g in self._members

    def contains(self, g) -> bool:
        return g in self._members

    def measure(self) -> Fraction:
        return Fraction(len(self.elements)) if self.group.is_discrete else Fraction(0)

    def is_empty(self) -> bool:
        return not self.elements

    def issubset(self, other: "FiniteSet") -> bool:
        _check_same(self.group, other.group)
        return self._members <= other._members

    def union(self, other: "FiniteSet") -> "FiniteSet":
        _check_same(self.group, other.group)
        return FiniteSet(self.group, self._members | other._members)

    def intersection(self, other: "FiniteSet") -> "FiniteSet":
        _check_same(self.group, other.group)
        return FiniteSet(self.group, self._members & other._members)

    def difference(self, other: "FiniteSet") -> "FiniteSet":
        _check_same(self.group, other.group)
        return FiniteSet(self.group, self._members - other._members)

    def translate(self, g) -> "FiniteSet":
        """Right translate ``A g``."""
        g = self.group.element(g)
        return FiniteSet(self.group, (self.group.op(a, g) for a in self.elements))

    def left_translate(self, g) -> "FiniteSet":
        g = self.group.element(g)
        return FiniteSet(self.group, (self.group.op(g, a) for a in self.elements))

    def to_finite_set(self) -> "FiniteSet":
        return self

    def to_json(self) -> dict:
        return {"group": self.group.to_config(), "elements": [_encode(e) for e in self.elements]}

    @classmethod
    def from_json(cls, doc: dict) -> "FiniteSet":
        group = GroupDescriptor.from_config(doc["group"])
        return cls(group, tuple(_decode(group, e) for e in doc["elements"]))


def _encode(e):
    if isinstance(e, tuple):
        return [_encode(x) for x in e]
    if isinstance(e, bool):
        raise TypeError("booleans are not group elements")
    if isinstance(e, int):
        return str(e)
    if isinstance(e, Fraction):
        return str(e)
    if isinstance(e, Sqrt5):
        return f"{e.r}+{e.s}*sqrt5"
    raise TypeError(f"cannot encode {e!r}")


def _parse_number(s: str):
    if "sqrt5" in s:
        head, tail = s.rsplit("+", 1) if "+" in s[1:] else ("0", s)
        return as_exact(Sqrt5(Fraction(head), Fraction(tail.replace("*sqrt5", ""))))
    return Fraction(s)


def _decode(group: GroupDescriptor, e):
    k = group.kind
    if k in ("int", "heisenberg"):
        return tuple(int(x) for x in e)
    if k == "real":
        return tuple(_parse_number(x) for x in e)
    if k == "padic":
        return Fraction(e)
    if k == "trivial":
        return ()
    return tuple(_decode(f, x) for f, x in zip(group.factors, e))


@dataclass(frozen=True)
class LatticeBox:
    """Integer points ``{lower <= z <= upper}`` of Z^d, counted in closed form."""

    group: GroupDescriptor
    lower: tuple
    upper: tuple

    def __post_init__(self):
        if self.group.kind != "int":
            raise GroupMismatch("LatticeBox lives in Z^d")
        if len(self.lower) != self.group.d or len(self.upper) != self.group.d:
            raise InvalidElement("box corners must have dimension d")

    def is_empty(self) -> bool:
        return any(u < l for l, u in zip(self.lower, self.upper))

    def measure(self) -> Fraction:
        if self.is_empty():
            return Fraction(0)
        return Fraction(math.prod(u - l + 1 for l, u in zip(self.lower, self.upper)))

    def contains(self, g) -> bool:
        return all(l <= x <= u for x, l, u in zip(g, self.lower, self.upper))

    def translate(self, g) -> "LatticeBox":
        return LatticeBox(
            self.group,
            tuple(l + x for l, x in zip(self.lower, g)),
            tuple(u + x for u, x in zip(self.upper, g)),
        )

    def to_finite_set(self) -> FiniteSet:
        ranges = [range(l, u + 1) for l, u in zip(self.lower, self.upper)]
        return FiniteSet(self.group, itertools.product(*ranges))


@dataclass(frozen=True)
class RationalBox:
    """Box in R^d.  Faces are closed unless the matching flag is False.

    Corners may be rationals or elements of Q(sqrt 5).
    """

    group: GroupDescriptor
    lower: tuple
    upper: tuple
    upper_closed: bool = True
    lower_closed: bool = True

    def __post_init__(self):
        if self.group.kind != "real":
            raise GroupMismatch("RationalBox lives in R^d")
        lo = tuple(as_exact(x) for x in self.lower)
        hi = tuple(as_exact(x) for x in self.upper)
        if len(lo) != self.group.d or len(hi) != self.group.d:
            raise InvalidElement("box corners must have dimension d")
        if any(u < l for l, u in zip(lo, hi)):
            raise InvalidElement(f"empty interval in box {lo} .. {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def is_empty(self) -> bool:
        return False

    def measure(self):
        return as_exact(math.prod((u - l for l, u in zip(self.lower, self.upper)), start=Fraction(1)))

    def contains(self, g) -> bool:
        for x, l, u in zip(g, self.lower, self.upper):
            if x < l or x > u:
                return False
            if (x == u and not self.upper_closed) or (x == l and not self.lower_closed):
                return False
        return True

    def translate(self, g) -> "RationalBox":
        return RationalBox(
            self.group,
            tuple(l + x for l, x in zip(self.lower, g)),
            tuple(u + x for u, x in zip(self.upper, g)),
            self.upper_closed,
            self.lower_closed,
        )

    def closure(self) -> "RationalBox":
        return RationalBox(self.group, self.lower, self.upper, True, True)


@dataclass(frozen=True)
class PadicBall:
    """The clopen ball ``center + p^{-radius} Z_p`` of Haar measure ``p^radius``."""

    group: GroupDescriptor
    center: Fraction
    radius: int

    def __post_init__(self):
        if self.group.kind != "padic":
            raise GroupMismatch("PadicBall lives in Q_p")
        if abs(self.radius) > self.group.precision:
            raise PrecisionError(
                f"ball radius exponent {self.radius} exceeds precision {self.group.precision}"
            )
        c = self.group.element(self.center)
        # canonical centre: the representative with 0 <= digits below p^{-radius}
        object.__setattr__(self, "center", _padic_reduce(c, self.group.p, self.radius))

    def is_empty(self) -> bool:
        return False

    def measure(self) -> Fraction:
        return Fraction(self.group.p) ** self.radius

    def contains(self, g) -> bool:
        return padic_valuation(Fraction(g) - self.center, self.group.p) >= -self.radius

    def translate(self, g) -> "PadicBall":
        return PadicBall(self.group, self.center + Fraction(g), self.radius)

    def includes(self, other: "PadicBall") -> bool:
        return other.radius <= self.radius and self.contains(other.center)


def _padic_reduce(x: Fraction, p: int, n: int) -> Fraction:
    """Canonical representative of ``x + p^{-n} Z_p`` in Z[1/p] ∩ [0, p^{-n})."""
    # x = a / p^k ; keep only the digits of valuation < -n
    scale = Fraction(p) ** (-n)  # p^{-n}
    q = x / scale
    # q lies in Z[1/p]; its fractional part (in Z[1/p]/Z) determines the coset
    frac = q - (q.numerator // q.denominator)
    return frac * scale


@dataclass(frozen=True)
class PadicBallUnion:
    """Finite union of p-adic balls, normalised to pairwise disjoint maximal balls."""

    group: GroupDescriptor
    balls: tuple = ()

    def __post_init__(self):
        kept: list[PadicBall] = []
        for b in sorted(self.balls, key=lambda b: -b.radius):
            if b.group != self.group:
                raise GroupMismatch("ball from a different group")
            if not any(k.includes(b) for k in kept):
                kept.append(b)
        kept.sort(key=lambda b: (b.radius, b.center))
        object.__setattr__(self, "balls", tuple(kept))

    def is_empty(self) -> bool:
        return not self.balls

    def measure(self) -> Fraction:
        return sum((b.measure() for b in self.balls), Fraction(0))

    def contains(self, g) -> bool:
        return any(b.contains(g) for b in self.balls)


@dataclass(frozen=True)
class ProductRegion:
    group: GroupDescriptor
    factors: tuple

    def __post_init__(self):
        if self.group.kind != "product" or len(self.factors) != len(self.group.factors):
            raise GroupMismatch("ProductRegion factors must match the product group")
        for f, g in zip(self.factors, self.group.factors):
            _check_same(f.group, g)

    @classmethod
    def of(cls, *regions) -> "ProductRegion":
        flat = []
        for r in regions:
            flat.extend(r.factors if isinstance(r, ProductRegion) else (r,))
        return cls(Product(*(r.group for r in flat)), tuple(flat))

    def is_empty(self) -> bool:
        return any(f.is_empty() for f in self.factors)

    def measure(self) -> Fraction:
        return math.prod((f.measure() for f in self.factors), start=Fraction(1))

    def contains(self, g) -> bool:
        return all(f.contains(x) for f, x in zip(self.factors, g))

    def translate(self, g) -> "ProductRegion":
        return ProductRegion(self.group, tuple(f.translate(x) for f, x in zip(self.factors, g)))


@dataclass(frozen=True)
class BoxShell:
    """Closed box ``outer`` minus the open box with corners ``inner_lower``/``inner_upper``."""

    group: GroupDescriptor
    outer: RationalBox
    inner_lower: tuple
    inner_upper: tuple

    def _inner_volume(self):
        if any(u <= l for l, u in zip(self.inner_lower, self.inner_upper)):
            return Fraction(0)
        return as_exact(
            math.prod((u - l for l, u in zip(self.inner_lower, self.inner_upper)), start=Fraction(1))
        )

    def is_empty(self) -> bool:
        return False

    def measure(self):
        return as_exact(self.outer.measure() - self._inner_volume())

    def contains(self, g) -> bool:
        if not self.outer.contains(g):
            return False
        return not all(l < x < u for x, l, u in zip(g, self.inner_lower, self.inner_upper))


@dataclass(frozen=True)
class LatticeShell:
    """Lattice box ``outer`` minus lattice box ``inner``."""

    group: GroupDescriptor
    outer: LatticeBox
    inner: LatticeBox

    def is_empty(self) -> bool:
        return self.measure() == 0

    def measure(self) -> Fraction:
        return self.outer.measure() - self._inner_in_outer().measure()

    def _inner_in_outer(self) -> LatticeBox:
        lo = tuple(max(a, b) for a, b in zip(self.inner.lower, self.outer.lower))
        hi = tuple(min(a, b) for a, b in zip(self.inner.upper, self.outer.upper))
        return LatticeBox(self.group, lo, hi)

    def contains(self, g) -> bool:
        return self.outer.contains(g) and not self.inner.contains(g)

    def to_finite_set(self) -> FiniteSet:
        return FiniteSet(self.group, (g for g in self.outer.to_finite_set() if not self.inner.contains(g)))


@dataclass(frozen=True)
class ProductBoundary:
    """Union over i of ``K_1A_1 x .. x ∂_i .. x K_nA_n`` (exact K-boundary of a product)."""

    group: GroupDescriptor
    dilations: tuple
    boundaries: tuple

    def is_empty(self) -> bool:
        return self.measure() == 0

    def measure(self) -> Fraction:
        full = math.prod((d.measure() for d in self.dilations), start=Fraction(1))
        interior = math.prod(
            (d.measure() - b.measure() for d, b in zip(self.dilations, self.boundaries)),
            start=Fraction(1),
        )
        return full - interior

    def contains(self, g) -> bool:
        if not all(d.contains(x) for d, x in zip(self.dilations, g)):
            return False
        return any(b.contains(x) for b, x in zip(self.boundaries, g))


def haar_measure(region) -> Fraction:
    """Exact Haar measure; normalisations are counting measure, Lebesgue, and mu(Z_p) = 1."""
    return region.measure()


# ---------------------------------------------------------------------------
# Minkowski operations
# ---------------------------------------------------------------------------


def minkowski(A: FiniteSet, B: FiniteSet) -> FiniteSet:
    """``AB = {ab : a in A, b in B}``."""
    _check_same(A.group, B.group)
    op = A.group.op
    return FiniteSet(A.group, (op(a, b) for a in A.elements for b in B.elements))


def minkowski_inverse(A: FiniteSet) -> FiniteSet:
    return FiniteSet(A.group, (A.group.inv(a) for a in A.elements))


def _as_finite(region):
    if isinstance(region, (FiniteSet, LatticeBox, LatticeShell)):
        return region.to_finite_set()
    raise UnsupportedGeometry(f"{type(region).__name__} is not a finite set")


def _singleton_box(K: FiniteSet) -> RationalBox:
    if len(K) != 1:
        raise UnsupportedGeometry("only singleton finite sets act on boxes in R^d")
    (k,) = K.elements
    return RationalBox(K.group, k, k)


def dilate(K, A):
    """Region ``K A`` for supported pairs (the Minkowski product of regions)."""
    _check_same(K.group, A.group)
    if isinstance(K, LatticeBox) and isinstance(A, LatticeBox):
        return LatticeBox(
            A.group,
            tuple(a + b for a, b in zip(K.lower, A.lower)),
            tuple(a + b for a, b in zip(K.upper, A.upper)),
        )
    if K.group.is_discrete and not isinstance(K, ProductRegion):
        return minkowski(_as_finite(K), _as_finite(A))
    if isinstance(A, RationalBox):
        if isinstance(K, FiniteSet):
            K = _singleton_box(K)
        if isinstance(K, RationalBox):
            return RationalBox(
                A.group,
                tuple(a + b for a, b in zip(K.lower, A.lower)),
                tuple(a + b for a, b in zip(K.upper, A.upper)),
                K.upper_closed and A.upper_closed,
                K.lower_closed and A.lower_closed,
            )
    if isinstance(A, PadicBall):
        if isinstance(K, PadicBall):
            return PadicBall(A.group, K.center + A.center, max(K.radius, A.radius))
        if isinstance(K, FiniteSet):
            return PadicBallUnion(A.group, tuple(A.translate(k) for k in K.elements))
        if isinstance(K, PadicBallUnion):
            return PadicBallUnion(A.group, tuple(dilate(b, A) for b in K.balls))
    if isinstance(K, ProductRegion) and isinstance(A, ProductRegion):
        return ProductRegion(A.group, tuple(dilate(k, a) for k, a in zip(K.factors, A.factors)))
    raise UnsupportedGeometry(
        f"Minkowski product of {type(K).__name__} and {type(A).__name__} is not supported"
    )


# ---------------------------------------------------------------------------
# K-boundaries
# ---------------------------------------------------------------------------


def k_boundary(K, A):
    """The K-boundary ``K cl(A) ∩ K cl(A^c)`` as an exactly measurable region.

    Supported pairs: finite sets (and lattice boxes) in discrete groups,
    boxes in R^d, p-adic balls acted on by balls or finite translates, and
    products of those taken factor by factor.  Anything else raises
    :class:`UnsupportedGeometry`.
    """
    _check_same(K.group, A.group)
    if isinstance(K, ProductRegion) and isinstance(A, ProductRegion):
        dil = tuple(dilate(k, a) for k, a in zip(K.factors, A.factors))
        bnd = tuple(k_boundary(k, a) for k, a in zip(K.factors, A.factors))
        return ProductBoundary(A.group, dil, bnd)
    if isinstance(K, ProductRegion) or isinstance(A, ProductRegion):
        raise UnsupportedGeometry("product regions need a product K with matching factors")

    group = A.group
    if group.is_discrete:
        if isinstance(K, LatticeBox) and isinstance(A, LatticeBox):
            outer = dilate(K, A)
            # g lies off the boundary iff g - K ⊆ A
            inner = LatticeBox(
                group,
                tuple(a + k for a, k in zip(A.lower, K.upper)),
                tuple(a + k for a, k in zip(A.upper, K.lower)),
            )
            return LatticeShell(group, outer, inner)
        Kf, Af = _as_finite(K), _as_finite(A)
        Kinv = minkowski_inverse(Kf)
        op = group.op
        out = []
        for g in minkowski(Kf, Af):
            if any(op(k, g) not in Af for k in Kinv.elements):
                out.append(g)
        return FiniteSet(group, out)

    if group.kind == "real" and isinstance(A, RationalBox):
        if isinstance(K, FiniteSet):
            K = _singleton_box(K)
        if not isinstance(K, RationalBox):
            raise UnsupportedGeometry(f"{type(K).__name__} acting on a box in R^d")
        outer = dilate(K.closure(), A.closure())
        inner_lo = tuple(a + k for a, k in zip(A.lower, K.upper))
        inner_hi = tuple(a + k for a, k in zip(A.upper, K.lower))
        return BoxShell(group, outer, inner_lo, inner_hi)

    if group.kind == "padic" and isinstance(A, PadicBall):
        return _padic_boundary(K, A)

    raise UnsupportedGeometry(
        f"K-boundary of {type(A).__name__} under {type(K).__name__} in {group} is not supported"
    )


def _padic_boundary(K, A: PadicBall) -> PadicBallUnion:
    group = A.group
    if isinstance(K, PadicBall):
        pieces = [K]
    elif isinstance(K, PadicBallUnion):
        pieces = list(K.balls)
    elif isinstance(K, FiniteSet):
        pieces = list(K.elements)
    else:
        raise UnsupportedGeometry(f"{type(K).__name__} acting on a p-adic ball")
    big, small_cosets = [], set()
    for piece in pieces:
        if isinstance(piece, PadicBall) and piece.radius > A.radius:
            # g - piece is a ball strictly larger than A: it meets A and A^c
            # exactly when it contains A.
            big.append(PadicBall(group, piece.center + A.center, piece.radius))
        else:
            k = piece.center if isinstance(piece, PadicBall) else piece
            small_cosets.add(PadicBall(group, k + A.center, A.radius))
    if big:
        return PadicBallUnion(group, tuple(big) + tuple(small_cosets))
    if len(small_cosets) >= 2:
        return PadicBallUnion(group, tuple(small_cosets))
    return PadicBallUnion(group, ())


# ---------------------------------------------------------------------------
# Van Hove sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VanHoveSequence:
    """An N-indexed family of regions ``i -> A_i`` (indices start at 1)."""

    group: GroupDescriptor
    generator: Callable[[int], object]
    label: str = "custom"

    def __call__(self, i: int):
        region = self.generator(i)
        _check_same(region.group, self.group)
        return region

    def take(self, i_max: int, start: int = 1) -> list:
        return [self(i) for i in range(start, i_max + 1)]


@dataclass
class VanHoveDiagnostic:
    rows: list  # (i, mu(∂_K A_i) / mu(A_i)) exact
    tolerance: Fraction
    tail: int
    passed: bool

    @property
    def ratios(self):
        return [r for _, r in self.rows]


def _ratio(num, den):
    if den == 0:
        raise ValueError("region of zero measure in a Van Hove sequence")
    return as_exact(num / den) if isinstance(num, Sqrt5) or isinstance(den, Sqrt5) else Fraction(num) / Fraction(den)


def van_hove_diagnostic(
    seq: VanHoveSequence,
    K,
    i_max: int,
    tolerance=Fraction(1, 100),
    tail: int = 5,
) -> VanHoveDiagnostic:
    """Boundary ratios ``mu(∂_K A_i)/mu(A_i)`` for ``i = 1..i_max``.

    Passes when the last ``tail`` ratios are non-increasing and the final one
    is below ``tolerance``.
    """
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    rows = []
    for i in range(1, i_max + 1):
        A = seq(i)
        rows.append((i, _ratio(haar_measure(k_boundary(K, A)), haar_measure(A))))
    tol = Fraction(tolerance)
    window = [r for _, r in rows[-tail:]]
    monotone = len(window) == tail and all(a >= b for a, b in zip(window, window[1:]))
    return VanHoveDiagnostic(rows, tol, tail, bool(monotone and window[-1] < tol))


def dilated_sequence(K, seq: VanHoveSequence, i_max: int | None = None):
    """``i -> K A_i`` together with the trace ``mu(K A_i)/mu(A_i)`` up to ``i_max``."""
    _check_same(K.group, seq.group)
    new = VanHoveSequence(seq.group, lambda i: dilate(K, seq(i)), f"dilated({seq.label})")
    trace = []
    if i_max:
        for i in range(1, i_max + 1):
            A = seq(i)
            trace.append((i, _ratio(haar_measure(dilate(K, A)), haar_measure(A))))
    return new, trace


def product_sequence(seq_g: VanHoveSequence, seq_h: VanHoveSequence) -> VanHoveSequence:
    """Diagonal product ``i -> A_i x B_i``."""
    group = Product(seq_g.group, seq_h.group)
    return VanHoveSequence(
        group,
        lambda i: ProductRegion.of(seq_g(i), seq_h(i)),
        f"{seq_g.label}x{seq_h.label}",
    )


# ---------------------------------------------------------------------------
# Lattice discretisation
# ---------------------------------------------------------------------------


def _interval_inside(a, b, b_closed, lo, hi, hi_closed, lo_closed=True) -> bool:
    # [a, b> ⊆ <lo, hi>
    if a < lo or (a == lo and not lo_closed):
        return False
    if b < hi:
        return True
    if b == hi:
        return hi_closed or not b_closed
    return False


def _intervals_meet(a, b, b_closed, lo, hi, hi_closed, lo_closed=True) -> bool:
    # [a, b> ∩ <lo, hi> ≠ ∅
    if b < lo or (b == lo and not (b_closed and lo_closed)):
        return False
    if hi < a or (hi == a and not hi_closed):
        return False
    return True


def lattice_discretize(A: RationalBox, spacing=1, closure: bool = True):
    """Inner and outer lattice approximations of a box.

    The lattice is ``spacing * Z^d`` with fundamental domain
    ``C = spacing * [0, 1)^d``.  Returns ``(inner, outer)`` as finite sets of
    lattice points in R^d with

    * ``inner = {z : C z ⊆ A}``
    * ``outer = {z : C' z ∩ A ≠ ∅}`` where ``C'`` is the closure of ``C``
      when ``closure`` is true (the default, matching ``f(cl(C) F)``) and
      ``C`` itself otherwise.

    Both choices give ``C inner ⊆ A ⊆ C outer``.  ``inner`` may be empty.
    """
    s = Fraction(spacing)
    if s <= 0:
        raise ValueError("spacing must be positive")
    d = A.group.d
    inner_axes, outer_axes = [], []
    for lo, hi in zip(A.lower, A.upper):
        zlo = math.floor(Fraction(lo) / s) - 2 if not isinstance(lo, Sqrt5) else (lo / s).floor() - 2
        zhi = math.ceil(Fraction(hi) / s) + 2 if not isinstance(hi, Sqrt5) else (hi / s).ceil() + 2
        ins, outs = [], []
        for z in range(zlo, zhi + 1):
            a, b = s * z, s * (z + 1)
            if _interval_inside(a, b, False, lo, hi, A.upper_closed, A.lower_closed):
                ins.append(z)
            if _intervals_meet(a, b, closure, lo, hi, A.upper_closed, A.lower_closed):
                outs.append(z)
        inner_axes.append(ins)
        outer_axes.append(outs)
    group = RealVector(d)

    def points(axes):
        return FiniteSet(group, (tuple(s * z for z in zs) for zs in itertools.product(*axes)))

    return points(inner_axes), points(outer_axes)


# ---------------------------------------------------------------------------
# Shipped sequences
# ---------------------------------------------------------------------------


def _int_box(d, lo, hi):
    return LatticeBox(IntLattice(d), (lo,) * d, (hi,) * d)


def _real_box(d, lo, hi):
    return RationalBox(RealVector(d), (Fraction(lo),) * d, (Fraction(hi),) * d)


def preset_sequence(name: str, group: GroupDescriptor) -> VanHoveSequence:
    """Shipped Van Hove (and non-Van Hove) sequences.

    ========== ===================  ===============================
    name       group                region at index i
    ========== ===================  ===============================
    intervals  Z^d                  {0..i-1}^d
    centered   Z^d                  {-i..i}^d
    shifted    Z^d                  {i..3i}^d
    even       Z^d                  {0..2i-1}^d
    boxes      Z^d / R^d            {-i..i}^d / [-i, i]^d
    offset     R^d                  [-i, i]^d + (1, .., 1)
    constant   R^d / Z^d            [0, 1]^d / {0, 1}^d
    balls      Q_p                  p^{-i} Z_p
    ========== ===================  ===============================
    """
    d = group.d
    k = group.kind
    if k == "int":
        table = {
            "intervals": lambda i: _int_box(d, 0, i - 1),
            "centered": lambda i: _int_box(d, -i, i),
            "boxes": lambda i: _int_box(d, -i, i),
            "shifted": lambda i: _int_box(d, i, 3 * i),
            "even": lambda i: _int_box(d, 0, 2 * i - 1),
            "constant": lambda i: _int_box(d, 0, 1),
        }
    elif k == "real":
        table = {
            "boxes": lambda i: _real_box(d, -i, i),
            "offset": lambda i: _real_box(d, -i + 1, i + 1),
            "intervals": lambda i: _real_box(d, 0, i),
            "constant": lambda i: _real_box(d, 0, 1),
        }
    elif k == "padic":
        table = {"balls": lambda i: PadicBall(group, Fraction(0), i)}
    else:
        raise UnsupportedGeometry(f"no shipped sequences for {group}")
    if name not in table:
        raise ValueError(f"unknown sequence {name!r} for {group}; choose from {sorted(table)}")
    return VanHoveSequence(group, table[name], name)


SEQUENCE_PRESETS = {
    "int": ("intervals", "centered", "boxes", "shifted", "even", "constant"),
    "real": ("boxes", "offset", "intervals", "constant"),
    "padic": ("balls",),
}
