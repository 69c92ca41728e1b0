"""Exact minimum set cover on bitmask universes (greedy seed, then branch and bound)."""

from __future__ import annotations

from .errors import BudgetExceeded


def greedy_cover(universe: int, sets: list[int]) -> list[int] | None:
    """Indices of a greedy cover, ties broken by lowest index; None if uncoverable."""
    remaining = universe
    chosen = []
    while remaining:
        best, gain = -1, 0
        for i, s in enumerate(sets):
            g = (s & remaining).bit_count()
            if g > gain:
                best, gain = i, g
        if best < 0:
            return None
        chosen.append(best)
        remaining &= ~sets[best]
    return chosen


def min_cover(universe: int, sets: list[int], node_budget: int = 2_000_000) -> list[int] | None:
    """A minimum-cardinality sub-family covering ``universe``.

    Returns None if no cover exists.  Raises BudgetExceeded when the search
    tree grows past ``node_budget``.
    """
    sets = [s & universe for s in sets]
    seed = greedy_cover(universe, sets)
    if seed is None:
        return None
    best = [list(seed)]
    largest = max((s.bit_count() for s in sets), default=0)
    # for each element, the sets containing it
    by_elem: dict[int, list[int]] = {}
    u = universe
    while u:
        low = u & -u
        e = low.bit_length() - 1
        by_elem[e] = [i for i, s in enumerate(sets) if s >> e & 1]
        u ^= low
    nodes = 0

    def search(remaining: int, chosen: list[int]):
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded("set cover search exceeded its node budget", required=nodes)
        if not remaining:
            if len(chosen) < len(best[0]):
                best[0] = list(chosen)
            return
        if len(chosen) + -(-remaining.bit_count() // largest) >= len(best[0]):
            return
        # branch on the element with the fewest covering sets
        pick, options = None, None
        r = remaining
        while r:
            low = r & -r
            e = low.bit_length() - 1
            opts = by_elem[e]
            if options is None or len(opts) < len(options):
                pick, options = e, opts
            r ^= low
        for i in sorted(options, key=lambda i: -(sets[i] & remaining).bit_count()):
            chosen.append(i)
            search(remaining & ~sets[i], chosen)
            chosen.pop()

    search(universe, [])
    return sorted(best[0])
