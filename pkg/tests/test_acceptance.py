"""Acceptance criteria, one verdict line each (see the summary at the end of a run)."""

import io
import itertools
import json
import math
import random
import time
from fractions import Fraction

import mpmath
import pytest

from owentropy import cli
from owentropy.algebraic import SQRT5, TAU
from owentropy.cps import cps_preset, enumerate_model_set, meyer_check, uniform_density
from owentropy.dynamics import (
    FiniteMetricSpace,
    code_preset,
    count_patterns,
    cov,
    cylinder_space,
    higher_power,
    metric_cov,
    sep,
    spa,
    subshift_preset,
    transfer_entropy,
)
from owentropy.entropy import (
    bernoulli_entropy,
    bowen_chain_check,
    cardinality,
    dilation_volume,
    discretization_check,
    lattice_restricted_entropy,
    linear,
    log_fiber_cov,
    log_pattern_count,
    ow_crosscheck,
    power_rule_check,
    product_extension_check,
    random_merge_chain,
    topological_entropy,
)
from owentropy.groups import (
    IntLattice,
    LatticeBox,
    PadicBall,
    RationalBox,
    RealVector,
    preset_sequence,
    van_hove_diagnostic,
)

Z1, R1 = IntLattice(1), RealVector(1)
LOG_TAU = float(mpmath.log((1 + mpmath.sqrt(5)) / 2))


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# 1 ---------------------------------------------------------------------------


@pytest.mark.parametrize("k,r", list(itertools.product((2, 3, 4), (0, 1, 2))))
def test_criterion_01_full_shift_exact_at_every_index(k, r, verdict):
    t0 = time.perf_counter()
    rep = topological_entropy(subshift_preset(f"full-{k}"), preset_sequence("intervals", Z1), (r,), 20)
    elapsed = time.perf_counter() - t0
    worst = max(abs(x - math.log(k)) for x in rep.per_scale[r].ratios)
    ok = worst <= 1e-12 and elapsed < 1
    verdict(f"criterion 1 (full-{k}, r={r})", ok, f"max |ratio - log {k}| = {worst:.3g}, {elapsed:.3f}s")
    assert ok


# 2 ---------------------------------------------------------------------------


def test_criterion_02_golden_mean_tail(verdict):
    t0 = time.perf_counter()
    rep = topological_entropy(subshift_preset("golden-mean"), preset_sequence("intervals", Z1), (0, 1, 2), 30)
    elapsed = time.perf_counter() - t0
    eig = transfer_entropy(subshift_preset("golden-mean"))
    ok = abs(rep.sup_value - LOG_TAU) < 1e-3 and abs(eig - LOG_TAU) < 1e-12 and elapsed < 5
    verdict("criterion 2 (golden mean)", ok, f"tail {rep.sup_value:.6f} vs log tau {LOG_TAU:.6f}, {elapsed:.2f}s")
    assert ok


# 3 ---------------------------------------------------------------------------

CROSS_FUNCTIONS = [
    ("log-count golden r=0", log_pattern_count(subshift_preset("golden-mean"), 0), Z1),
    ("log-count golden r=1", log_pattern_count(subshift_preset("golden-mean"), 1), Z1),
    ("log-count full-3", log_pattern_count(subshift_preset("full-3"), 0), Z1),
    ("log-fiber four-to-two", log_fiber_cov(code_preset("four-to-two"), 0), Z1),
    ("log-fiber golden-to-point", log_fiber_cov(code_preset("golden-to-point"), 0), Z1),
    ("cardinality", cardinality(), Z1),
    ("linear 3/2", linear(Fraction(3, 2), R1), R1),
    ("dilation box:1", dilation_volume(RationalBox(R1, (-1,), (1,))), R1),
]
SEQUENCE_PAIRS = {"int": [("intervals", "shifted"), ("intervals", "centered"), ("centered", "even")], "real": [("boxes", "offset"), ("boxes", "intervals")]}


def test_criterion_03_net_independence(verdict):
    t0 = time.perf_counter()
    results = []
    for label, f, G in CROSS_FUNCTIONS:
        for a, b in SEQUENCE_PAIRS[G.kind]:
            chk = ow_crosscheck(f, preset_sequence(a, G), preset_sequence(b, G), 30, 1e-2)
            results.append((f"{label} on {a}/{b}", chk.passed, chk.delta))
    elapsed = time.perf_counter() - t0
    bad = [r for r in results if not r[1]]
    ok = not bad and len(results) >= 8 and elapsed < 10
    verdict("criterion 3 (net independence)", ok, f"{len(results)} combinations, {len(bad)} failed, {elapsed:.2f}s")
    assert ok, bad


# 4 ---------------------------------------------------------------------------


@pytest.mark.parametrize("d", [1, 2])
def test_criterion_04_discretization(d, verdict):
    G = RealVector(d)
    fs = [linear(1, G), dilation_volume(RationalBox(G, (-1,) * d, (1,) * d))]
    rows = discretization_check(fs, d, 50)
    ok = len(rows) == 50
    for row in rows:
        closed = Fraction(2 * row.n + 2, 2 * row.n) ** d
        ok = ok and Fraction(row.outer, row.inner) == closed and row.ratio == closed
        ok = ok and all(v[3] for v in row.sandwich.values())
    verdict(f"criterion 4 (d={d})", ok, "ratio ((2n+2)/2n)^d and sandwich for n = 1..50")
    assert ok


# 5 ---------------------------------------------------------------------------


@pytest.mark.parametrize("name,n0", list(itertools.product(("full-2", "golden-mean"), (2, 3, 4))))
def test_criterion_05_restricted_entropy(name, n0, verdict):
    s = subshift_preset(name)
    top = topological_entropy(s, None, (0, 1, 2), 30).sup_value
    res = lattice_restricted_entropy(s, n0, None, (0, 1, 2), 30)
    delta = abs(res.sup_value - top)
    if name == "full-2":
        # exact at the level of counts: 2^|F| patterns on every restricted support
        counts = all(count_patterns(s, [(n0 * j,) for j in range(m)]) == 2**m for m in range(1, 13))
        ok = counts and delta <= 1e-12
    else:
        ok = delta < 1e-3
    verdict(f"criterion 5 ({name}, n0={n0})", ok, f"|restricted - E| = {delta:.3g}")
    assert ok


# 6 ---------------------------------------------------------------------------


@pytest.mark.parametrize("name,n", list(itertools.product(("full-2", "full-3", "golden-mean"), (1, 2, 3, 4))))
def test_criterion_06_power_rule(name, n, verdict):
    s = subshift_preset(name)
    rep = power_rule_check(s, n, 30, (0, 1, 2))
    if name.startswith("full"):
        k = len(s.alphabet)
        counts = all(count_patterns(higher_power(s, n), range(m)) == k ** (n * m) for m in range(1, 6))
        ok = rep.passed and counts and rep.delta <= 1e-12
    else:
        ok = rep.passed and rep.delta < 1e-3
    verdict(f"criterion 6 ({name}, n={n})", ok, f"|n E - E(f^n)| = {rep.delta:.3g}")
    assert ok


# 7 ---------------------------------------------------------------------------


def test_criterion_07_bowen_chain(verdict):
    p, q = code_preset("four-to-two"), code_preset("two-to-point")
    shipped = bowen_chain_check(p, q, None, (0, 1, 2), 12)
    exact = all(abs(a - b) < 1e-12 for a, b in zip(shipped.values, (math.log(2), math.log(2), math.log(4))))
    randoms = []
    for seed in range(20):
        a, b = random_merge_chain(seed, 6)
        randoms.append(bowen_chain_check(a, b, None, (0, 1), 12).passed)
    code, _, _ = run_cli("bowen-chain", "--preset", "four-to-two-to-point", "--corrupt-composite")
    ok = shipped.passed and exact and all(randoms) and len(randoms) >= 20 and code == 1
    verdict("criterion 7 (chain inequalities)", ok, f"shipped exact, {sum(randoms)}/20 random chains, corrupted exit {code}")
    assert ok


# 8 ---------------------------------------------------------------------------


def random_space(rng):
    """Shortest-path metric of a random connected weighted graph on <= 10 points."""
    n = rng.randint(1, 10)
    inf = 10**9
    D = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for i in range(1, n):
        j = rng.randrange(i)
        D[i][j] = D[j][i] = rng.randint(1, 6)
    for _ in range(rng.randint(0, n)):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            w = rng.randint(1, 6)
            D[i][j] = D[j][i] = min(D[i][j], w)
    for m in range(n):
        for i in range(n):
            for j in range(n):
                D[i][j] = min(D[i][j], D[i][m] + D[m][j])
    return FiniteMetricSpace(tuple(range(n)), tuple(tuple(Fraction(x) for x in row) for row in D))


def test_criterion_08_covering_chain(verdict):
    rng = random.Random(2024)
    checked = 0
    ok = True
    for _ in range(60):
        M = random_space(rng)
        for e in (1, 2, 3, 5, 8):
            eps = Fraction(e)
            a, b, c, d = metric_cov(M, eps), spa(M, eps / 2), sep(M, eps / 2), metric_cov(M, eps / 2)
            ok = ok and all(x.exact for x in (a, b, c, d)) and a.value <= b.value <= c.value <= d.value
        checked += 1
    cylinders = 0
    for name in ("full-2", "golden-mean", "full-3"):
        s = subshift_preset(name)
        for n in (1, 2) if name == "full-3" else (1, 2, 3):
            A = [(i,) for i in range(n)]
            M = cylinder_space(s, A, 1) if name == "full-3" else cylinder_space(s, A, 2)
            for r in range(2 if name == "full-3" else 3):
                eps = Fraction(1, 2**r)
                vals = {sep(M, eps).value, spa(M, eps).value, metric_cov(M, eps).value, cov(s, A, r)}
                ok = ok and len(vals) == 1
                cylinders += 1
    verdict("criterion 8 (cov/spa/sep chain)", ok and checked >= 50, f"{checked} random spaces, {cylinders} cylinder cases")
    assert ok and checked >= 50


# 9 ---------------------------------------------------------------------------


def box_ratio_closed_form(kind, d, n):
    if kind == "real":
        return Fraction((2 * n + 2) ** d - max(2 * n - 2, 0) ** d, (2 * n) ** d)
    return Fraction((2 * n + 3) ** d - max(2 * n - 1, 0) ** d, (2 * n + 1) ** d)


@pytest.mark.parametrize("kind,d", [("real", 1), ("real", 2), ("int", 1), ("int", 2)])
def test_criterion_09_box_sequences(kind, d, verdict):
    G = RealVector(d) if kind == "real" else IntLattice(d)
    K = RationalBox(G, (-1,) * d, (1,) * d) if kind == "real" else LatticeBox(G, (-1,) * d, (1,) * d)
    diag = van_hove_diagnostic(preset_sequence("boxes", G), K, 500, Fraction(1, 100))
    exact = all(r == box_ratio_closed_form(kind, d, n) for n, r in diag.rows)
    ok = exact and diag.passed
    verdict(f"criterion 9 ({kind} boxes, d={d})", ok, f"closed-form shell ratios, final {float(diag.rows[-1][1]):.4g}")
    assert ok


def test_criterion_09_constant_and_padic(verdict):
    code, out, _ = run_cli("vanhove", "--group", "r1", "--seq", "constant", "--K", "box:1")
    ratios = [r[1] for r in json.loads(out)["result"]["ratios"]]
    Q2 = cps_preset("padic:2:1:3").group
    diag = van_hove_diagnostic(preset_sequence("balls", Q2), PadicBall(Q2, Fraction(0), 0), 30)
    ok = code == 1 and set(ratios) == {"3"} and all(r == 0 for r in diag.ratios)
    verdict("criterion 9 (constant fails, p-adic balls)", ok, f"constant exit {code}, p-adic ratios all 0: {all(r == 0 for r in diag.ratios)}")
    assert ok


# 10 --------------------------------------------------------------------------


def test_criterion_10_padic(verdict):
    ms = cps_preset("padic:2:1:3")
    pts = enumerate_model_set(ms, PadicBall(ms.group, Fraction(0), 3))
    i_max = 12
    code, out, _ = run_cli("density", "--preset", "padic:2:1:3", "--imax", str(i_max))
    doc = json.loads(out)["result"]
    C = doc["measuredConstant"]
    last = json.loads(out)["result"]
    trace = uniform_density(ms.with_bound(None), preset_sequence("balls", ms.group), i_max)
    err = abs(trace.rows[-1][3] - 2)
    # independent count: a/2^i in [-1, 1] has 2^(i+1)+1 members in a ball of measure 2^i
    oracle = Fraction(2 ** (i_max + 1) + 1, 2**i_max)
    ok = len(pts) == 17 and code == 0 and trace.rows[-1][3] == oracle and err <= Fraction(C) * Fraction(1, 2**i_max) and last["expected"] == "2"
    verdict("criterion 10 (p-adic CPS)", ok, f"{len(pts)} points, |ratio - 2R| = 2^-{i_max} x {C}")
    assert ok


def test_criterion_10_fibonacci(verdict):
    ms = cps_preset("fibonacci")
    support = RationalBox(R1, (-60,), (60,))
    query = RationalBox(R1, (-50,), (50,))
    rep = meyer_check(ms.points_in(support), support, query, 3, 2)
    trace = uniform_density(ms, preset_sequence("boxes", R1), 50)
    expected = ms.expected_density()
    # window (-1, tau - 1] has length tau; the lattice covolume is sqrt 5
    oracle = (1 + mpmath.sqrt(5)) / 2 / mpmath.sqrt(5)
    ok = rep.status == "pass" and trace.band_contains(expected) and expected == TAU / SQRT5 and abs(float(expected) - oracle) < 1e-15
    verdict("criterion 10 (Fibonacci)", ok, f"meyer {rep.status}, band contains {float(expected):.6f}")
    assert ok


# 11 --------------------------------------------------------------------------


def small_sets():
    base = range(4)
    return [c for k in (1, 2, 3) for c in itertools.combinations(base, k)]


def test_criterion_11_product_extension(verdict):
    t0 = time.perf_counter()
    f = cardinality()
    bad = []
    cases = 0
    for A in small_sets():
        for B in small_sets():
            rep = product_extension_check(f, A, B)
            cases += 1
            if rep.infimum != len(A) * len(B):
                bad.append((A, B, rep.infimum))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 30
    verdict("criterion 11 (product extension)", ok, f"{cases} instances, {len(bad)} off, {elapsed:.2f}s")
    assert ok, bad[:5]


# 12 --------------------------------------------------------------------------


def test_criterion_12_bernoulli(verdict):
    uniform = bernoulli_entropy((Fraction(1, 2), Fraction(1, 2)))
    full2 = topological_entropy(subshift_preset("full-2"), None, (0,), 10).sup_value
    ok = uniform.passed and abs(uniform.entropy - math.log(2)) < 1e-12 and abs(full2 - math.log(2)) < 1e-12
    strict = []
    for p in (Fraction(1, 4), Fraction(1, 3), Fraction(1, 10), Fraction(2, 5), Fraction(7, 8)):
        rep = bernoulli_entropy((p, 1 - p))
        oracle = -(mpmath.mpf(p.numerator) / p.denominator) * mpmath.log(mpmath.mpf(p.numerator) / p.denominator)
        q = 1 - p
        oracle -= (mpmath.mpf(q.numerator) / q.denominator) * mpmath.log(mpmath.mpf(q.numerator) / q.denominator)
        strict.append(rep.passed and rep.entropy < math.log(2) and abs(rep.entropy - float(oracle)) < 1e-12)
    ok = ok and all(strict)
    verdict("criterion 12 (Bernoulli)", ok, f"uniform = log 2, {sum(strict)}/5 non-uniform strictly below")
    assert ok
