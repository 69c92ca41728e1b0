"""Subshifts of finite type, sliding block codes and covering numbers.

Configurations live on Z^d (d = 1 or 2).  For cylinder scales the Bowen
covering number of a finite set A at radius r is the number of admissible
patterns on ``A ⊕ B_r``, and the relative version counts source patterns in
the largest fiber.  Both are computed exactly:

* d = 1 by a left-to-right scan whose states are sets of automaton states
  (a projected subset construction), so hidden margin cells cost nothing;
* d = 2 by backtracking with an enumeration budget.

Generic finite metric spaces get exact ``sep``/``spa``/``cov`` by branch and
bound up to 24 points and certified greedy bounds above that.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidElement
from .groups import FiniteSet, IntLattice, LatticeBox
from .setcover import greedy_cover, min_cover

__all__ = [
    "Pattern",
    "Subshift",
    "SlidingBlockCode",
    "Scale",
    "FiniteMetricSpace",
    "MetricCount",
    "ball",
    "count_patterns",
    "cov",
    "fiber_cov",
    "sep",
    "spa",
    "metric_cov",
    "brute_count",
    "transfer_matrix",
    "transfer_entropy",
    "transfer_count",
    "higher_power",
    "compose",
    "symbol_map",
    "cylinder_space",
    "check_surjective",
    "subshift_preset",
    "code_preset",
    "SUBSHIFT_PRESETS",
    "CODE_PRESETS",
]

DEFAULT_CELL_BUDGET = 40
DEFAULT_CLASS_BUDGET = 200_000


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pattern:
    """Symbols on a finite support of Z^d; offsets are int tuples."""

    support: tuple
    symbols: tuple

    def __post_init__(self):
        support = tuple(tuple(o) if not isinstance(o, int) else (o,) for o in self.support)
        if len(support) != len(self.symbols):
            raise InvalidElement("pattern needs one symbol per support cell")
        if len(set(support)) != len(support):
            raise InvalidElement("pattern support has repeated cells")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "symbols", tuple(self.symbols))

    @classmethod
    def word(cls, symbols) -> "Pattern":
        """Contiguous 1-d pattern starting at 0."""
        return cls(tuple((i,) for i in range(len(symbols))), tuple(symbols))

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.symbols))

    def normalized(self) -> "Pattern":
        """Translate so that the coordinate-wise minimum is the origin."""
        mins = [min(c[j] for c in self.support) for j in range(len(self.support[0]))]
        return Pattern(tuple(tuple(x - m for x, m in zip(c, mins)) for c in self.support), self.symbols)


@dataclass(frozen=True)
class Subshift:
    """A shift of finite type: configurations avoiding every forbidden pattern."""

    alphabet: tuple
    d: int = 1
    forbidden: tuple = ()
    margin: int = 0
    name: str = "custom"

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        if not alphabet:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(alphabet)) != len(alphabet):
            raise ValueError("alphabet symbols must be distinct")
        if self.d not in (1, 2):
            raise ValueError("only d = 1 and d = 2 are supported")
        if self.margin < 0:
            raise ValueError("margin must be >= 0")
        forb = tuple(p.normalized() for p in self.forbidden)
        for p in forb:
            if any(len(c) != self.d for c in p.support):
                raise InvalidElement("forbidden pattern dimension does not match d")
            if any(s not in alphabet for s in p.symbols):
                raise InvalidElement(f"forbidden pattern uses symbols outside the alphabet: {p.symbols}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "forbidden", forb)

    @property
    def k(self) -> int:
        return len(self.alphabet)

    @property
    def is_full(self) -> bool:
        return not self.forbidden

    def window(self) -> int:
        """Largest forbidden-pattern extent along any axis (1 for a full shift)."""
        w = 1
        for p in self.forbidden:
            for j in range(self.d):
                w = max(w, max(c[j] for c in p.support) + 1)
        return w

    def with_margin(self, m: int) -> "Subshift":
        return Subshift(self.alphabet, self.d, self.forbidden, m, self.name)

    def index(self) -> dict:
        return {a: i for i, a in enumerate(self.alphabet)}

    def is_admissible(self, assignment: Mapping) -> bool:
        """No forbidden pattern occurs entirely inside ``assignment``."""
        for p in self.forbidden:
            base = p.support[0]
            for cell in assignment:
                t = tuple(c - b for c, b in zip(cell, base))
                if all(
                    assignment.get(tuple(ti + oi for ti, oi in zip(t, o))) == s
                    for o, s in zip(p.support, p.symbols)
                ):
                    return False
        return True

    def to_spec(self) -> dict:
        return {
            "alphabet": list(self.alphabet),
            "dimension": self.d,
            "margin": self.margin,
            "forbidden": [[[list(o), s] for o, s in zip(p.support, p.symbols)] for p in self.forbidden],
        }

    @classmethod
    def from_spec(cls, spec: dict, name: str = "custom") -> "Subshift":
        unknown = set(spec) - {"alphabet", "dimension", "margin", "forbidden", "name"}
        if unknown:
            raise ValueError(f"unknown subshift spec keys: {sorted(unknown)}")
        d = int(spec.get("dimension", 1))
        alphabet = tuple(_hashable(a) for a in spec["alphabet"])
        forb = []
        for pat in spec.get("forbidden", []):
            offs = [tuple(o) if isinstance(o, list) else (o,) for o, _ in pat]
            forb.append(Pattern(tuple(offs), tuple(_hashable(s) for _, s in pat)))
        return cls(alphabet, d, tuple(forb), int(spec.get("margin", 0)), spec.get("name", name))


def _hashable(x):
    return tuple(_hashable(v) for v in x) if isinstance(x, list) else x


@dataclass(frozen=True)
class SlidingBlockCode:
    """Factor map given by a local rule on the neighborhood ``N``.

    ``table`` maps tuples of source symbols (in neighborhood order) to target
    symbols.  The rule is applied at every site in the same way.
    """

    source: Subshift
    target: Subshift
    neighborhood: tuple
    table: Mapping
    name: str = "custom"

    def __post_init__(self):
        nbhd = tuple(tuple(o) if not isinstance(o, int) else (o,) for o in self.neighborhood)
        if not nbhd:
            raise ValueError("neighborhood must be nonempty")
        if self.source.d != self.target.d or any(len(o) != self.source.d for o in nbhd):
            raise ValueError("code dimension mismatch")
        object.__setattr__(self, "neighborhood", nbhd)
        table = dict(self.table)
        tgt = set(self.target.alphabet)
        for key in itertools.product(self.source.alphabet, repeat=len(nbhd)):
            if key not in table:
                if self._locally_admissible(key):
                    raise ValueError(f"rule is not defined on admissible block {key}")
                continue
            if table[key] not in tgt:
                raise ValueError(f"rule output {table[key]!r} outside target alphabet")
        object.__setattr__(self, "table", table)

    def _locally_admissible(self, key) -> bool:
        return self.source.is_admissible(dict(zip(self.neighborhood, key)))

    def __call__(self, window: Sequence):
        return self.table[tuple(window)]

    def to_spec(self) -> dict:
        return {
            "neighborhood": [list(o) for o in self.neighborhood],
            "rule": [[list(k), v] for k, v in sorted(self.table.items(), key=repr)],
        }

    @classmethod
    def from_spec(cls, spec: dict, source: Subshift, target: Subshift, name: str = "custom") -> "SlidingBlockCode":
        unknown = set(spec) - {"neighborhood", "rule", "name", "source", "target"}
        if unknown:
            raise ValueError(f"unknown code spec keys: {sorted(unknown)}")
        nbhd = tuple(tuple(o) if isinstance(o, list) else (o,) for o in spec["neighborhood"])
        table = {tuple(_hashable(s) for s in k): _hashable(v) for k, v in spec["rule"]}
        return cls(source, target, nbhd, table, spec.get("name", name))


@dataclass(frozen=True, order=True)
class Scale:
    """Cylinder entourage: two points are close iff they agree on the centred box of radius r."""

    r: int

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("scale radius must be >= 0")


def ball(d: int, r: int) -> FiniteSet:
    """The centred box ``B_r = {-r..r}^d``."""
    return FiniteSet(IntLattice(d), itertools.product(range(-r, r + 1), repeat=d))


def _cells(F) -> list[tuple]:
    if isinstance(F, LatticeBox):
        F = F.to_finite_set()
    if isinstance(F, FiniteSet):
        return list(F.elements)
    return sorted({tuple(c) if not isinstance(c, int) else (c,) for c in F})


def _thicken(cells: Iterable[tuple], r: int) -> list[tuple]:
    if r == 0:
        return sorted(set(cells))
    cells = list(cells)
    d = len(cells[0]) if cells else 1
    offs = list(itertools.product(range(-r, r + 1), repeat=d))
    return sorted({tuple(c + o for c, o in zip(cell, off)) for cell in cells for off in offs})


# ---------------------------------------------------------------------------
# one-dimensional scan
# ---------------------------------------------------------------------------


class _Scanner:
    """Left-to-right automaton over a 1-d window.

    A state is the tuple of the last ``L`` symbol indices (shorter at the
    left edge).  Forbidden patterns are checked when their rightmost cell is
    written, emissions of a block code when the right end of ``j + N`` is
    written.
    """

    def __init__(self, shift: Subshift, code: SlidingBlockCode | None = None):
        self.k = shift.k
        idx = shift.index()
        # forbidden patterns as (relative offsets <= 0, symbol indices)
        self.forb = []
        span = 1
        for p in shift.forbidden:
            offs = [c[0] for c in p.support]
            top = max(offs)
            self.forb.append((tuple(o - top for o in offs), tuple(idx[s] for s in p.symbols)))
            span = max(span, top + 1)
        self.code = code
        if code is not None:
            offs = [o[0] for o in code.neighborhood]
            self.nmin, self.nmax = min(offs), max(offs)
            self.nrel = tuple(o - self.nmax for o in offs)
            self.nspan = self.nmax - self.nmin + 1
            tidx = code.target.index()
            alpha = shift.alphabet
            self.rule = {
                tuple(idx[s] for s in key): tidx[v] for key, v in code.table.items()
            }
            self.alpha = alpha
            span = max(span, self.nspan)
        self.L = span - 1
        self._cache: dict = {}

    def step(self, state: tuple, a: int):
        """``(new_state, emitted)``; new_state is None when a forbidden pattern appears."""
        key = (state, a)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        hist = state + (a,)
        n = len(hist)
        ok = True
        for offs, syms in self.forb:
            if min(offs) < 1 - n:
                continue
            if all(hist[n - 1 + o] == s for o, s in zip(offs, syms)):
                ok = False
                break
        emitted = None
        if ok and self.code is not None and n >= self.nspan:
            block = tuple(hist[n - 1 + o] for o in self.nrel)
            emitted = self.rule.get(block)
            if emitted is None:
                ok = False  # block not admissible for the code's source
        new = (hist[-self.L :] if self.L else ()) if ok else None
        res = (new, emitted)
        self._cache[key] = res
        return res


def _pareto(classes: list[dict]) -> list[dict]:
    uniq = {}
    for c in classes:
        uniq.setdefault(frozenset(c.items()), c)
    items = list(uniq.values())
    if len(items) <= 1:
        return items
    items.sort(key=lambda c: -sum(c.values()))
    kept: list[dict] = []
    for c in items:
        if any(all(k.get(s, 0) >= v for s, v in c.items()) for k in kept):
            continue
        kept.append(c)
    return kept


def _scan(shift: Subshift, lo: int, hi: int, visible: set, code=None, class_budget=DEFAULT_CLASS_BUDGET) -> int:
    sc = _Scanner(shift, code)
    k = sc.k
    classes = [{frozenset([()]): 1}]
    for t in range(lo, hi + 1):
        vis = t in visible
        new_classes = []
        for cls in classes:
            buckets: dict = defaultdict(lambda: defaultdict(int))
            for S, c in cls.items():
                if vis:
                    for a in range(k):
                        split = defaultdict(set)
                        for q in S:
                            nq, b = sc.step(q, a)
                            if nq is not None:
                                split[b].add(nq)
                        for b, states in split.items():
                            buckets[b][frozenset(states)] += c
                else:
                    split = defaultdict(set)
                    for q in S:
                        for a in range(k):
                            nq, b = sc.step(q, a)
                            if nq is not None:
                                split[b].add(nq)
                    for b, states in split.items():
                        buckets[b][frozenset(states)] += c
            new_classes.extend(dict(v) for v in buckets.values())
        classes = _pareto(new_classes) if code is not None else new_classes
        if len(classes) > class_budget:
            raise BudgetExceeded(
                f"fiber scan needs more than {class_budget} target classes", required=len(classes)
            )
        if not classes:
            return 0
    return max(sum(c.values()) for c in classes)


# ---------------------------------------------------------------------------
# two-dimensional backtracking
# ---------------------------------------------------------------------------


def _count_2d(shift: Subshift, visible: list[tuple], hidden: list[tuple]) -> int:
    order = visible + hidden
    pos = {c: i for i, c in enumerate(order)}
    k = shift.k
    idx = shift.index()
    # occurrences fully inside the window, keyed by their last cell in `order`
    checks = defaultdict(list)
    for p in shift.forbidden:
        syms = tuple(idx[s] for s in p.symbols)
        for anchor in order:
            base = p.support[0]
            t = (anchor[0] - base[0], anchor[1] - base[1])
            cells = [(t[0] + o[0], t[1] + o[1]) for o in p.support]
            if all(c in pos for c in cells):
                last = max(pos[c] for c in cells)
                checks[last].append((tuple(pos[c] for c in cells), syms))
    for key in checks:
        checks[key] = list(set(checks[key]))
    assign = [0] * len(order)
    nv = len(visible)

    def ok(i):
        return not any(all(assign[j] == s for j, s in zip(cells, syms)) for cells, syms in checks.get(i, ()))

    def extend(i) -> bool:
        if i == len(order):
            return True
        for a in range(k):
            assign[i] = a
            if ok(i) and extend(i + 1):
                return True
        return False

    def count(i) -> int:
        if i == nv:
            return 1 if extend(nv) else 0
        total = 0
        for a in range(k):
            assign[i] = a
            if ok(i):
                total += count(i + 1)
        return total

    return count(0)


# ---------------------------------------------------------------------------
# counting operations
# ---------------------------------------------------------------------------


def count_patterns(s: Subshift, F, margin: int | None = None, budget: int = DEFAULT_CELL_BUDGET) -> int:
    """Number of patterns on ``F`` that extend to a locally admissible pattern
    on the margin window (``F ⊕ B_m``, or its hull for d = 1)."""
    cells = _cells(F)
    if not cells:
        return 1
    m = s.margin if margin is None else margin
    if s.is_full:
        return s.k ** len(cells)
    if s.d == 1:
        xs = [c[0] for c in cells]
        return _scan(s, min(xs) - m, max(xs) + m, set(xs))
    window = _thicken(cells, m)
    if len(window) > budget:
        raise BudgetExceeded(
            f"2-d count on {len(window)} cells exceeds the budget of {budget}", required=len(window)
        )
    vis = set(cells)
    return _count_2d(s, sorted(vis), [c for c in window if c not in vis])


def cov(s: Subshift, A, scale: Scale | int, margin: int | None = None, budget: int = DEFAULT_CELL_BUDGET) -> int:
    """Covering number of the Bowen entourage for ``A`` at a cylinder scale:
    ``count_patterns(A ⊕ B_r)``."""
    r = scale.r if isinstance(scale, Scale) else int(scale)
    return count_patterns(s, _thicken(_cells(A), r), margin, budget)


def fiber_cov(
    code: SlidingBlockCode,
    A,
    scale: Scale | int,
    margin: int | None = None,
    class_budget: int = DEFAULT_CLASS_BUDGET,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> int:
    """Largest number of source patterns on ``A ⊕ B_r`` over a single target fiber.

    The target is pinned on every site whose neighborhood fits inside the
    window ``(A ⊕ B_r) - N + N`` thickened by the margin.
    """
    r = scale.r if isinstance(scale, Scale) else int(scale)
    W = _thicken(_cells(A), r)
    if not W:
        return 1
    src = code.source
    m = src.margin if margin is None else margin
    if src.d == 1:
        offs = [o[0] for o in code.neighborhood]
        xs = [c[0] for c in W]
        lo = min(xs) - (max(offs) - min(offs)) - m
        hi = max(xs) + (max(offs) - min(offs)) + m
        return _scan(src, lo, hi, set(xs), code, class_budget)
    return _fiber_2d(code, W, m, cell_budget)


def _fiber_2d(code, W, m, budget):
    N = code.neighborhood
    spread = {(a[0] - b[0], a[1] - b[1]) for a in N for b in N}
    V = sorted({(c[0] + o[0], c[1] + o[1]) for c in W for o in spread})
    V = _thicken(V, m)
    if len(V) > budget:
        raise BudgetExceeded(f"2-d fiber count on {len(V)} cells exceeds the budget of {budget}", required=len(V))
    Vs = set(V)
    sites = [j for j in V if all((j[0] + o[0], j[1] + o[1]) in Vs for o in N)]
    src = code.source
    fibers: dict = defaultdict(set)
    wpos = [V.index(c) for c in W]
    for values in itertools.product(src.alphabet, repeat=len(V)):
        conf = dict(zip(V, values))
        if not src.is_admissible(conf):
            continue
        y = tuple(code.table[tuple(conf[(j[0] + o[0], j[1] + o[1])] for o in N)] for j in sites)
        fibers[y].add(tuple(values[i] for i in wpos))
    return max((len(v) for v in fibers.values()), default=0)


def brute_count(s: Subshift, n: int) -> int:
    """Locally admissible words of length n, by exhaustive enumeration (d = 1)."""
    if s.d != 1:
        raise ValueError("brute_count is one-dimensional")
    total = 0
    for w in itertools.product(s.alphabet, repeat=n):
        if s.is_admissible({(i,): a for i, a in enumerate(w)}):
            total += 1
    return total


def _words(s: Subshift, L: int) -> list[tuple]:
    return [w for w in itertools.product(s.alphabet, repeat=L) if s.is_admissible({(i,): a for i, a in enumerate(w)})]


def transfer_matrix(s: Subshift):
    """``(states, M)``: states are admissible words of length ``w - 1`` (at least 1),
    ``M[u, v] = 1`` when u and v overlap in an admissible word of length w."""
    if s.d != 1:
        raise ValueError("transfer matrices are one-dimensional")
    L = max(s.window() - 1, 1)
    states = _words(s, L)
    pos = {w: i for i, w in enumerate(states)}
    M = np.zeros((len(states), len(states)), dtype=object)
    for w in states:
        for a in s.alphabet:
            full = w + (a,)
            if s.is_admissible({(i,): b for i, b in enumerate(full)}):
                M[pos[w], pos[full[1:]]] = 1
    return states, M


def transfer_count(s: Subshift, n: int) -> int:
    """Admissible words of length n via exact integer matrix powers."""
    states, M = transfer_matrix(s)
    L = max(s.window() - 1, 1)
    if n <= L or not states:
        return len(_words(s, n))
    v = np.ones(len(states), dtype=object)
    for _ in range(n - L):
        v = M.dot(v)
    return int(sum(v))


def transfer_entropy(s: Subshift) -> float:
    """``log`` of the spectral radius of the transfer matrix."""
    states, M = transfer_matrix(s)
    if not states:
        return -math.inf
    rho = max(abs(np.linalg.eigvals(M.astype(float))))
    return math.log(rho) if rho > 0 else -math.inf


def higher_power(s: Subshift, n: int) -> Subshift:
    """The n-th power shift: symbols are admissible n-blocks, dynamics is the shift by n.

    Defined for d = 1 and for full shifts in any supported dimension (where
    blocks are ``{0..n-1}^d`` cubes).
    """
    if n < 1:
        raise ValueError("block length must be >= 1")
    if s.is_full:
        blocks = tuple(itertools.product(s.alphabet, repeat=n**s.d))
        return Subshift(blocks, s.d, (), s.margin, f"{s.name}^{n}")
    if s.d != 1:
        raise ValueError("higher powers of constrained 2-d shifts are not supported")
    blocks = _words(s, n)
    w = s.window()
    span = max(1, -(-(w - 1) // n) + 1)
    forb = []
    if span >= 2:
        seen = set()
        for seq in itertools.product(blocks, repeat=span):
            flat = tuple(itertools.chain.from_iterable(seq))
            if not s.is_admissible({(i,): a for i, a in enumerate(flat)}):
                # only record minimal offenders to keep the list short
                if any(seq[:j] in seen or seq[j:] in seen for j in range(1, span)):
                    continue
                seen.add(seq)
                forb.append(Pattern.word(seq))
    return Subshift(tuple(blocks), 1, tuple(forb), -(-s.margin // n), f"{s.name}^{n}")


# ---------------------------------------------------------------------------
# codes
# ---------------------------------------------------------------------------


def symbol_map(source: Subshift, target: Subshift, mapping: Mapping, name: str = "custom") -> SlidingBlockCode:
    """One-site code ``x_i -> mapping[x_i]``."""
    return SlidingBlockCode(
        source, target, ((0,) * source.d,), {(a,): mapping[a] for a in source.alphabet}, name
    )


def compose(p: SlidingBlockCode, q: SlidingBlockCode) -> SlidingBlockCode:
    """The code ``q ∘ p``."""
    if p.target.alphabet != q.source.alphabet or p.target.d != q.source.d:
        raise ValueError("codes are not composable: target of p differs from source of q")
    N = sorted({tuple(a + b for a, b in zip(u, v)) for u in q.neighborhood for v in p.neighborhood})
    pos = {c: i for i, c in enumerate(N)}
    table = {}
    for key in itertools.product(p.source.alphabet, repeat=len(N)):
        conf = dict(zip(N, key))
        if not p.source.is_admissible(conf):
            continue
        mid = []
        good = True
        for u in q.neighborhood:
            block = tuple(key[pos[tuple(a + b for a, b in zip(u, v))]] for v in p.neighborhood)
            if block not in p.table:
                good = False
                break
            mid.append(p.table[block])
        if good and tuple(mid) in q.table:
            table[key] = q.table[tuple(mid)]
    return SlidingBlockCode(p.source, q.target, tuple(N), table, f"{q.name}∘{p.name}")


def check_surjective(code: SlidingBlockCode, n: int) -> bool:
    """Every admissible target word of length n has a preimage (d = 1)."""
    if code.source.d != 1:
        raise ValueError("surjectivity check is one-dimensional")
    offs = [o[0] for o in code.neighborhood]
    span = max(offs) - min(offs)
    images = set()
    for w in _words(code.source, n + span):
        images.add(tuple(code.table[tuple(w[i + o - min(offs)] for o in offs)] for i in range(n)))
    return all(t in images for t in _words(code.target, n))


# ---------------------------------------------------------------------------
# finite metric spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Points with an exact rational distance matrix, validated on construction."""

    points: tuple
    dist: tuple

    def __post_init__(self):
        n = len(self.points)
        D = tuple(tuple(Fraction(x) for x in row) for row in self.dist)
        if len(D) != n or any(len(row) != n for row in D):
            raise ValueError("distance matrix must be n x n")
        for i in range(n):
            if D[i][i] != 0:
                raise ValueError("distance matrix needs a zero diagonal")
            for j in range(n):
                if D[i][j] != D[j][i]:
                    raise ValueError("distance matrix must be symmetric")
                if i != j and D[i][j] <= 0:
                    raise ValueError("distinct points must have positive distance")
                for l in range(n):
                    if D[i][l] > D[i][j] + D[j][l]:
                        raise ValueError("triangle inequality fails")
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "dist", D)

    def __len__(self):
        return len(self.points)

    def close_masks(self, eps) -> list[int]:
        """Bitmask of ``{j : d(i, j) < eps}`` for every i (includes i itself)."""
        eps = Fraction(eps)
        return [sum(1 << j for j, x in enumerate(row) if x < eps) for row in self.dist]


@dataclass(frozen=True)
class MetricCount:
    """``value`` is exact when ``bound == "exact"``, else a certified lower or upper bound."""

    value: int
    bound: str = "exact"

    @property
    def exact(self) -> bool:
        return self.bound == "exact"

    def __int__(self):
        return self.value


EXACT_LIMIT = 24


def _equivalence_classes(masks: list[int]) -> int | None:
    """Number of classes when closeness is an equivalence relation, else None."""
    for i, m in enumerate(masks):
        x = m
        while x:
            low = x & -x
            j = low.bit_length() - 1
            if masks[j] != m:
                return None
            x ^= low
    return len(set(masks))


def _max_independent(masks: list[int]) -> int:
    n = len(masks)
    best = 0

    def go(cand: int, size: int):
        nonlocal best
        if not cand:
            best = max(best, size)
            return
        if size + cand.bit_count() <= best:
            return
        low = cand & -cand
        i = low.bit_length() - 1
        go(cand & ~masks[i], size + 1)  # take i
        go(cand & ~low, size)  # skip i

    go((1 << n) - 1, 0)
    return best


def _maximal_cliques(masks: list[int]) -> list[int]:
    nbr = [m & ~(1 << i) for i, m in enumerate(masks)]
    out = []

    def bk(R: int, P: int, X: int):
        if not P and not X:
            out.append(R)
            return
        pivot_src = P | X
        u = (pivot_src & -pivot_src).bit_length() - 1
        cand = P & ~nbr[u]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            bk(R | low, P & nbr[v], X & nbr[v])
            P &= ~low
            X |= low
            cand ^= low

    bk(0, (1 << len(masks)) - 1, 0)
    return out


def sep(M: FiniteMetricSpace, eps) -> MetricCount:
    """Largest subset whose points are pairwise at least ``eps`` apart."""
    masks = M.close_masks(eps)
    eq = _equivalence_classes(masks)
    if eq is not None:
        return MetricCount(eq)
    if len(M) <= EXACT_LIMIT:
        return MetricCount(_max_independent(masks))
    chosen = 0
    for i in range(len(M)):
        if not masks[i] & chosen:
            chosen |= 1 << i
    return MetricCount(chosen.bit_count(), "lower")


def spa(M: FiniteMetricSpace, eps) -> MetricCount:
    """Smallest subset S with every point closer than ``eps`` to some element of S."""
    masks = M.close_masks(eps)
    eq = _equivalence_classes(masks)
    if eq is not None:
        return MetricCount(eq)
    universe = (1 << len(M)) - 1
    if len(M) <= EXACT_LIMIT:
        return MetricCount(len(min_cover(universe, masks)))
    return MetricCount(len(greedy_cover(universe, masks)), "upper")


def metric_cov(M: FiniteMetricSpace, eps) -> MetricCount:
    """Fewest subsets of diameter below ``eps`` that cover the space."""
    masks = M.close_masks(eps)
    eq = _equivalence_classes(masks)
    if eq is not None:
        return MetricCount(eq)
    universe = (1 << len(M)) - 1
    if len(M) <= EXACT_LIMIT:
        return MetricCount(len(min_cover(universe, _maximal_cliques(masks))))
    # greedy clique cover in lexicographic order
    remaining, count = universe, 0
    while remaining:
        i = (remaining & -remaining).bit_length() - 1
        clique = 1 << i
        cand = masks[i] & remaining & ~clique
        while cand:
            low = cand & -cand
            j = low.bit_length() - 1
            if clique & ~masks[j] == 0:
                clique |= low
            cand ^= low
        remaining &= ~clique
        count += 1
    return MetricCount(count, "upper")


def cylinder_space(s: Subshift, A, R: int) -> FiniteMetricSpace:
    """Admissible patterns on ``A ⊕ B_R`` with the Bowen cylinder ultrametric.

    ``d(x, y) = 2^-(ρ+1)`` where ρ is the largest radius ``<= R`` with x and y
    agreeing on ``A ⊕ B_ρ`` (ρ = -1 if they differ on A).  At ``eps = 2^-r``
    the closeness classes are exactly the cylinders on ``A ⊕ B_r``.
    """
    cells = _cells(A)
    layers = [_thicken(cells, rho) for rho in range(R + 1)]
    window = layers[-1]
    if s.d == 1:
        xs = [c[0] for c in window]
        pts = []
        for w in itertools.product(s.alphabet, repeat=len(window)):
            conf = dict(zip(window, w))
            if s.is_admissible(conf):
                pts.append(w)
    else:
        pts = [w for w in itertools.product(s.alphabet, repeat=len(window)) if s.is_admissible(dict(zip(window, w)))]
    pos = {c: i for i, c in enumerate(window)}
    layer_idx = [[pos[c] for c in L] for L in layers]
    n = len(pts)
    D = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rho = -1
            for lvl, ids in enumerate(layer_idx):
                if all(pts[i][t] == pts[j][t] for t in ids):
                    rho = lvl
                else:
                    break
            D[i][j] = D[j][i] = Fraction(1, 2 ** (rho + 1))
    return FiniteMetricSpace(tuple(pts), tuple(tuple(r) for r in D))


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def _full(k: int, d: int = 1) -> Subshift:
    return Subshift(tuple(range(k)), d, (), 0, f"full-{k}" if d == 1 else f"full-{k}-2d")


def _golden() -> Subshift:
    return Subshift((0, 1), 1, (Pattern.word((1, 1)),), 0, "golden-mean")


def _hard_square() -> Subshift:
    forb = (
        Pattern(((0, 0), (1, 0)), (1, 1)),
        Pattern(((0, 0), (0, 1)), (1, 1)),
    )
    return Subshift((0, 1), 2, forb, 1, "hard-square")


def _golden_times_full2() -> Subshift:
    alphabet = tuple((a, b) for a in (0, 1) for b in (0, 1))
    forb = tuple(
        Pattern.word(((1, b1), (1, b2))) for b1 in (0, 1) for b2 in (0, 1)
    )
    return Subshift(alphabet, 1, forb, 0, "golden-x-full-2")


def subshift_preset(name: str) -> Subshift:
    """``full-<k>``, ``full2d-<k>``, ``golden-mean``, ``hard-square``,
    ``one-point``, ``golden-x-full-2``."""
    if name.startswith("full2d-"):
        return _full(int(name.split("-")[1]), 2)
    if name.startswith("full-"):
        return _full(int(name.split("-")[1]))
    table = {
        "golden-mean": _golden,
        "hard-square": _hard_square,
        "one-point": lambda: Subshift((0,), 1, (), 0, "one-point"),
        "golden-x-full-2": _golden_times_full2,
    }
    if name not in table:
        raise ValueError(f"unknown subshift preset {name!r}")
    return table[name]()


SUBSHIFT_PRESETS = ("full-2", "full-3", "full-4", "full2d-2", "golden-mean", "hard-square", "one-point", "golden-x-full-2")


def _point(d: int = 1) -> Subshift:
    return Subshift((0,), d, (), 0, "one-point")


def code_preset(name: str) -> SlidingBlockCode:
    """Shipped factor maps.

    ``four-to-two``  {0,1 -> 0; 2,3 -> 1};  ``two-to-point``;  ``four-to-point``;
    ``identity-<shift>``;  ``golden-x-full-2-to-golden``;  ``golden-to-point``;
    ``golden-x-full-2-to-point``.
    """
    full4, full2 = _full(4), _full(2)
    if name == "four-to-two":
        return symbol_map(full4, full2, {0: 0, 1: 0, 2: 1, 3: 1}, name)
    if name == "two-to-point":
        return symbol_map(full2, _point(), {0: 0, 1: 0}, name)
    if name == "four-to-point":
        return symbol_map(full4, _point(), {a: 0 for a in range(4)}, name)
    if name.startswith("identity-"):
        s = subshift_preset(name[len("identity-") :])
        return symbol_map(s, s, {a: a for a in s.alphabet}, name)
    if name == "golden-x-full-2-to-golden":
        src = _golden_times_full2()
        return symbol_map(src, _golden(), {a: a[0] for a in src.alphabet}, name)
    if name == "golden-to-point":
        return symbol_map(_golden(), _point(), {0: 0, 1: 0}, name)
    if name == "golden-x-full-2-to-point":
        src = _golden_times_full2()
        return symbol_map(src, _point(), {a: 0 for a in src.alphabet}, name)
    raise ValueError(f"unknown code preset {name!r}")


CODE_PRESETS = (
    "four-to-two",
    "two-to-point",
    "four-to-point",
    "identity-full-2",
    "identity-golden-mean",
    "golden-x-full-2-to-golden",
    "golden-to-point",
    "golden-x-full-2-to-point",
)
