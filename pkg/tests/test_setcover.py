import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from owentropy.errors import BudgetExceeded
from owentropy.setcover import greedy_cover, min_cover


def brute_min_cover(universe, sets):
    for size in range(0, len(sets) + 1):
        for combo in itertools.combinations(range(len(sets)), size):
            acc = 0
            for i in combo:
                acc |= sets[i]
            if acc & universe == universe:
                return size
    return None


@settings(max_examples=150)
@given(st.integers(1, 9).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=9))))
def test_min_cover_matches_exhaustive_search(case):
    n, sets = case
    universe = (1 << n) - 1
    got = min_cover(universe, sets)
    want = brute_min_cover(universe, sets)
    if want is None:
        assert got is None
    else:
        assert len(got) == want
        acc = 0
        for i in got:
            acc |= sets[i]
        assert acc & universe == universe
        assert len(greedy_cover(universe, sets)) >= want


def test_budget_is_enforced():
    # many overlapping pairs force branching
    n = 16
    sets = [(1 << i) | (1 << ((i + 1) % n)) | (1 << ((i + 5) % n)) for i in range(n)]
    with pytest.raises(BudgetExceeded):
        min_cover((1 << n) - 1, sets, node_budget=3)
