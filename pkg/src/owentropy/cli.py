"""Command-line interface.

Every subcommand prints one document (JSON by default) to stdout or
``--output``.  Exit codes: 0 success, 1 a checked inequality failed, 2 bad
input, 3 a computation budget was exceeded.  Errors go to stderr as a JSON
object with a machine-readable ``error`` code.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import cps, dynamics, entropy, groups
from .algebraic import Sqrt5, as_exact
from .errors import BudgetExceeded, CoverageError, OWEntropyError
from .formats import SCHEMA_VERSION, dump_csv, dump_json, svg_plot

COMMANDS = (
    "cps-enumerate",
    "density",
    "meyer-check",
    "vanhove",
    "ow-limit",
    "ow-crosscheck",
    "entropy",
    "relative-entropy",
    "restrict",
    "power-rule",
    "bowen-chain",
    "product-extension",
    "bernoulli",
)

# library operation -> the one subcommand that exposes it
OPERATION_COMMANDS = {
    "groups.minkowski": "vanhove",
    "groups.haar_measure": "vanhove",
    "groups.k_boundary": "vanhove",
    "groups.van_hove_diagnostic": "vanhove",
    "groups.dilated_sequence": "vanhove",
    "groups.product_sequence": "vanhove",
    "groups.lattice_discretize": "ow-limit",
    "cps.enumerate_model_set": "cps-enumerate",
    "cps.certify_internal_density": "cps-enumerate",
    "cps.uniform_density": "density",
    "cps.fundamental_domain": "density",
    "cps.meyer_check": "meyer-check",
    "dynamics.count_patterns": "entropy",
    "dynamics.cov": "entropy",
    "dynamics.sep": "entropy",
    "dynamics.spa": "entropy",
    "dynamics.metric_cov": "entropy",
    "dynamics.fiber_cov": "relative-entropy",
    "entropy.ow_limit": "ow-limit",
    "entropy.lattice_transfer": "ow-limit",
    "entropy.ow_crosscheck": "ow-crosscheck",
    "entropy.topological_entropy": "entropy",
    "entropy.relative_entropy": "relative-entropy",
    "entropy.lattice_restricted_entropy": "restrict",
    "entropy.power_rule_check": "power-rule",
    "entropy.bowen_chain_check": "bowen-chain",
    "entropy.product_extension_check": "product-extension",
    "entropy.bernoulli_entropy": "bernoulli",
}

CHAIN_PRESETS = {
    "four-to-two-to-point": ("four-to-two", "two-to-point"),
    "golden-x-full-2-to-golden-to-point": ("golden-x-full-2-to-golden", "golden-to-point"),
}


class InputError(Exception):
    """Bad command-line or config input (exit code 2)."""

    def __init__(self, message: str, code: str = "input-error"):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message, "usage")


# ---------------------------------------------------------------------------
# argument parsing helpers
# ---------------------------------------------------------------------------


def _number(tok):
    tok = str(tok).strip()
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {tok!r}") from None


def _numbers(text) -> list[Fraction]:
    if isinstance(text, (list, tuple)):
        return [_number(t) for t in text]
    return [_number(t) for t in str(text).split(",") if t.strip()]


def _ints(text) -> list[int]:
    out = []
    for x in _numbers(text):
        if x.denominator != 1:
            raise InputError(f"expected an integer, got {x}")
        out.append(int(x))
    return out


def _interval(text):
    """``lo,hi`` or ``lo1,hi1;lo2,hi2`` -> (lower, upper) tuples."""
    lows, highs = [], []
    for part in str(text).split(";"):
        vals = _numbers(part)
        if len(vals) != 2 or vals[0] > vals[1]:
            raise InputError(f"expected 'lo,hi' with lo <= hi, got {part!r}")
        lows.append(vals[0])
        highs.append(vals[1])
    return tuple(lows), tuple(highs)


def parse_group(name: str) -> groups.GroupDescriptor:
    """``r<d>``, ``z<d>`` or ``q<p>`` (p-adic numbers, 64 digits of precision)."""
    name = str(name).strip().lower()
    try:
        if name.startswith("r"):
            return groups.RealVector(int(name[1:] or 1))
        if name.startswith("z"):
            return groups.IntLattice(int(name[1:] or 1))
        if name.startswith("q"):
            return groups.PadicTruncated(int(name[1:].lstrip("p:")), 64)
    except ValueError as exc:
        raise InputError(f"bad group {name!r}: {exc}") from None
    raise InputError(f"unknown group {name!r}; use r<d>, z<d> or q<p>")


def parse_region(spec: str, group: groups.GroupDescriptor):
    """``box:<r>``, ``box:<lo>:<hi>``, ``ball:<n>`` or ``set:<x>;<y>;..`` in ``group``."""
    kind, _, arg = str(spec).partition(":")
    d = group.d
    if kind == "box":
        parts = arg.split(":")
        if len(parts) == 1:
            r = _number(parts[0])
            lo, hi = -r, r
        elif len(parts) == 2:
            lo, hi = _number(parts[0]), _number(parts[1])
        else:
            raise InputError(f"bad box {spec!r}")
        if group.kind == "int":
            if lo.denominator != 1 or hi.denominator != 1:
                raise InputError("integer boxes need integer bounds")
            return groups.LatticeBox(group, (int(lo),) * d, (int(hi),) * d)
        if group.kind == "real":
            return groups.RationalBox(group, (lo,) * d, (hi,) * d)
        raise InputError(f"box regions are not available in {group}")
    if kind == "ball":
        if group.kind != "padic":
            raise InputError("ball regions live in p-adic groups")
        return groups.PadicBall(group, Fraction(0), int(_number(arg)))
    if kind == "set":
        elems = []
        for tok in arg.split(";"):
            vals = _numbers(tok)
            if group.kind == "int":
                vals = _ints(tok)
            elems.append(tuple(vals) if group.kind != "padic" else vals[0])
        return groups.FiniteSet(group, elems)
    raise InputError(f"unknown region {spec!r}; use box:, ball: or set:")


def _subshift(args) -> dynamics.Subshift:
    if getattr(args, "subshift_file", None):
        with open(args.subshift_file, encoding="utf-8") as fh:
            return dynamics.Subshift.from_spec(json.load(fh))
    if not args.preset:
        raise InputError("a subshift is required: --preset or --subshift-file")
    return dynamics.subshift_preset(args.preset)


def _load_side(spec):
    return dynamics.subshift_preset(spec) if isinstance(spec, str) else dynamics.Subshift.from_spec(spec)


def _code(preset, path=None) -> dynamics.SlidingBlockCode:
    if path:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
        if "source" not in spec or "target" not in spec:
            raise InputError("code files need 'source' and 'target'")
        return dynamics.SlidingBlockCode.from_spec(spec, _load_side(spec["source"]), _load_side(spec["target"]))
    if not preset:
        raise InputError("a code is required: --code or --code-file")
    return dynamics.code_preset(preset)


def _scales(text):
    vals = _ints(text)
    if not vals or any(r < 0 for r in vals):
        raise InputError("scales must be a nonempty list of integers >= 0")
    return tuple(sorted(set(vals)))


def _function(spec: str, group_name: str | None):
    """Built-in set functions by name.

    ``log-count:<subshift>[:r]``, ``log-fiber:<code>[:r]``, ``cardinality``,
    ``linear:<c>`` and ``dilation:<region>`` (the last two on ``--group``).
    """
    kind, _, arg = str(spec).partition(":")
    if kind == "log-count":
        name, _, r = arg.partition(":")
        return entropy.log_pattern_count(dynamics.subshift_preset(name), int(r or 0))
    if kind == "log-fiber":
        name, _, r = arg.partition(":")
        return entropy.log_fiber_cov(dynamics.code_preset(name), int(r or 0))
    if kind == "cardinality":
        return entropy.cardinality()
    group = parse_group(group_name or "z1")
    if kind == "linear":
        return entropy.linear(_number(arg or 1), group)
    if kind == "dilation":
        return entropy.dilation_volume(parse_region(arg or "box:1", group))
    raise InputError(f"unknown set function {spec!r}")


def _check_imax(i_max, lo=1, hi=100_000):
    if not lo <= i_max <= hi:
        raise InputError(f"--imax must lie in [{lo}, {hi}]")
    return i_max


def _fmt(x):
    x = as_exact(x) if isinstance(x, (Fraction, Sqrt5)) else x
    return str(x)


# ---------------------------------------------------------------------------
# subcommands; each returns (document, csv rows, svg series, exit code)
# ---------------------------------------------------------------------------


class Result:
    def __init__(self, doc, header=None, rows=None, series=None, code=0, text=None):
        self.doc = doc
        self.header = header
        self.rows = rows
        self.series = series
        self.code = code
        self.text = text


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def cmd_cps_enumerate(args) -> Result:
    ms = cps.cps_preset(args.preset)
    if args.bound is not None:
        ms = ms.with_bound(args.bound)
    if not args.query:
        raise InputError("--query is required")
    if ms.group.kind == "padic":
        kind, _, arg = args.query.partition(":")
        if kind != "ball":
            raise InputError("p-adic queries are ball:<radius>[:<center>]")
        radius, _, center = arg.partition(":")
        query = groups.PadicBall(ms.group, _number(center or 0), int(_number(radius)))
    else:
        lo, hi = _interval(args.query)
        if len(lo) != ms.group.d:
            raise InputError(f"query has {len(lo)} axes, the scheme has {ms.group.d}")
        if ms.group.kind == "int":
            query = groups.LatticeBox(ms.group, tuple(math.ceil(x) for x in lo), tuple(math.floor(x) for x in hi))
        else:
            query = groups.RationalBox(ms.group, lo, hi)
    pts = cps.enumerate_model_set(ms, query)
    doc = {
        "scheme": ms.scheme.name,
        "count": len(pts),
        "points": [[_fmt(x) for x in (p if isinstance(p, tuple) else (p,))] for p in pts],
        "expectedDensity": _fmt(ms.expected_density()),
    }
    code = 0
    if args.certify is not None:
        ok = cps.certify_internal_density(ms, query, _number(args.certify))
        doc["internalDensity"] = {"eps": _fmt(_number(args.certify)), "verdict": _verdict(ok)}
        code = 0 if ok else 1
    rows = [[_fmt(x) for x in (p if isinstance(p, tuple) else (p,))] for p in pts]
    d = len(rows[0]) if rows else 1
    text = None
    if args.format == "points":
        import io

        buf = io.StringIO()
        cps.write_point_list(ms, pts, buf)
        text = buf.getvalue()
    return Result(doc, [f"x{j}" for j in range(d)], rows, None, code, text)


def _scale_of(group, i):
    if group.kind == "padic":
        return Fraction(group.p) ** i
    return Fraction(i)


def cmd_density(args) -> Result:
    i_max = _check_imax(args.imax)
    if args.lattice:
        C = cps.fundamental_domain(args.lattice, _number(args.spacing))
        source = cps.SublatticePoints(C.group, C.moduli)
        expected = C.density
        label = C.label
        group = C.group
    else:
        if not args.preset:
            raise InputError("--preset or --lattice is required")
        # the density trace needs every depth up to i_max, so the bound is derived per query
        source = cps.cps_preset(args.preset).with_bound(None)
        expected = source.expected_density()
        label = source.scheme.name
        group = source.group
    seq = groups.preset_sequence(args.seq or ("balls" if group.kind == "padic" else "boxes"), group)
    trace = cps.uniform_density(source, seq, i_max, args.k)
    last = trace.rows[-args.k :]
    constant = max(abs(float(r[3]) - float(expected)) * float(_scale_of(group, r[0])) for r in last)
    doc = {
        "pointSet": label,
        "sequence": seq.label,
        "trace": [[i, str(c), _fmt(mu), _fmt(r), float(r)] for i, c, mu, r in trace.rows],
        "tail": float(trace.tail),
        "band": [float(trace.band[0]), float(trace.band[1])],
        "expected": _fmt(expected),
        "expectedFloat": float(expected),
        "bandContainsExpected": trace.band_contains(expected),
        "error": abs(float(trace.tail) - float(expected)),
        "measuredConstant": constant,
        "errorScale": "p^-i" if group.kind == "padic" else "1/i",
    }
    rows = [[i, c, _fmt(mu), _fmt(r), float(r)] for i, c, mu, r in trace.rows]
    series = {"density": [(i, float(r)) for i, _, _, r in trace.rows], "expected": [(1, float(expected)), (i_max, float(expected))]}
    return Result(doc, ["index", "count", "measure", "ratio", "ratioFloat"], rows, series)


def cmd_meyer_check(args) -> Result:
    if not args.query:
        raise InputError("--query is required")
    qlo, qhi = _interval(args.query)
    if len(qlo) != 1:
        raise InputError("meyer-check works on one-dimensional patches")
    Fb, Kb = _number(args.f_bound), _number(args.k_bound)
    if args.support:
        slo, shi = _interval(args.support)
    else:
        m = Fb + Kb + 1
        slo, shi = (qlo[0] - m,), (qhi[0] + m,)
    if args.points_file:
        with open(args.points_file, encoding="utf-8") as fh:
            pts = cps.read_point_list(fh, groups.RealVector(1))
        name = args.points_file
    else:
        ms = cps.cps_preset(args.preset or "fibonacci")
        if ms.group.d != 1:
            raise InputError("meyer-check works on one-dimensional model sets")
        if ms.group.kind == "int":
            box = groups.LatticeBox(ms.group, (math.ceil(slo[0]),), (math.floor(shi[0]),))
        else:
            box = groups.RationalBox(ms.group, slo, shi)
        pts = ms.points_in(box)
        name = ms.scheme.name
    group = pts.group
    if group.kind == "int":
        pts = groups.FiniteSet(groups.RealVector(1), [(Fraction(p[0]),) for p in pts])
        group = pts.group
    support = groups.RationalBox(group, slo, shi)
    query = groups.RationalBox(group, qlo, qhi)
    rep = cps.meyer_check(pts, support, query, Fb, Kb)
    doc = {
        "pointSet": name,
        "status": rep.status,
        "relativelyDense": rep.relatively_dense,
        "coveringRadius": None if rep.covering_radius is None else _fmt(rep.covering_radius),
        "meyerDifference": rep.meyer_difference,
        "F": [_fmt(f) for f in rep.F],
        "violation": None if rep.violation is None else _fmt(rep.violation),
        "reason": rep.reason,
    }
    if rep.status == "inconclusive":
        raise InputError(rep.reason or "support too small for the requested bounds", "inconclusive")
    return Result(doc, ["status", "coveringRadius", "F"], [[rep.status, doc["coveringRadius"], " ".join(doc["F"])]], None, 0 if rep.status == "pass" else 1)


def cmd_vanhove(args) -> Result:
    group = parse_group(args.group)
    seq = groups.preset_sequence(args.seq, group)
    K = parse_region(args.K, group)
    if args.product:
        parts = args.product.split("/")
        if len(parts) != 3:
            raise InputError("--product is GROUP/SEQ/REGION, e.g. z1/centered/box:1")
        g2 = parse_group(parts[0])
        seq = groups.product_sequence(seq, groups.preset_sequence(parts[1], g2))
        K = groups.ProductRegion.of(K, parse_region(parts[2], g2))
    i_max = _check_imax(args.imax)
    tol = _number(args.tolerance)
    diag = groups.van_hove_diagnostic(seq, K, i_max, tol, args.tail)
    doc = {
        "group": str(seq.group),
        "sequence": seq.label,
        "K": args.K if not args.product else f"{args.K} x {args.product.split('/')[2]}",
        "tolerance": _fmt(tol),
        "tail": args.tail,
        "ratios": [[i, _fmt(r), float(r)] for i, r in diag.rows],
        "finalRatio": float(diag.rows[-1][1]),
        "verdict": _verdict(diag.passed),
    }
    series = {"boundary ratio": [(i, float(r)) for i, r in diag.rows]}
    rows = [[i, _fmt(r), float(r)] for i, r in diag.rows]
    header = ["index", "ratio", "ratioFloat"]
    if args.dilated:
        _, trace = groups.dilated_sequence(K, seq, i_max)
        doc["dilationRatios"] = [[i, _fmt(r), float(r)] for i, r in trace]
        series["dilation ratio"] = [(i, float(r)) for i, r in trace]
        rows = [row + [_fmt(r), float(r)] for row, (_, r) in zip(rows, trace)]
        header += ["dilation", "dilationFloat"]
    return Result(doc, header, rows, series, 0 if diag.passed else 1)


def _estimate_rows(est, scale=None):
    out = []
    for i, fv, mu, r in est.rows:
        row = [i, float(fv), _fmt(mu), float(r)]
        out.append(([scale] if scale is not None else []) + row)
    return out


def cmd_ow_limit(args) -> Result:
    f = _function(args.f, args.group)
    seq = groups.preset_sequence(args.seq, f.group)
    i_max = _check_imax(args.imax)
    sf = _scale(args)
    est = entropy.ow_limit(f, seq, i_max, args.k)
    doc = {"function": f.tag, "estimate": est.to_dict(sf)}
    series = {f.tag: [(i, float(r) * sf) for i, r in est.trace]}
    code = 0
    if args.transfer is not None:
        if f.group.kind != "real":
            raise InputError("--transfer needs a function on r<d>")
        spacing = _number(args.transfer)
        C = cps.fundamental_domain(f"zd:{f.group.d}", spacing)
        lattice_seq = groups.VanHoveSequence(
            C.group, lambda i: groups.lattice_discretize(seq(i), spacing)[0], f"inner({seq.label})"
        )
        chk = entropy.lattice_transfer_check(f, C, seq, lattice_seq, i_max, args.tolerance, args.k)
        sandwich = []
        for i in range(1, i_max + 1):
            A = seq(i)
            inner, outer = groups.lattice_discretize(A, spacing)
            lo, mid, hi = entropy.lattice_transfer(f, C, inner), f(A), entropy.lattice_transfer(f, C, outer)
            sandwich.append([i, len(inner), len(outer), _fmt(lo), _fmt(mid), _fmt(hi), lo <= mid <= hi])
        sandwich_ok = all(r[-1] for r in sandwich)
        doc["transfer"] = {
            "covolume": _fmt(chk.covolume),
            "latticeEstimate": chk.lattice.to_dict(sf),
            "scaledTail": chk.scaled_tail * sf,
            "directTail": chk.direct.tail * sf,
            "delta": chk.delta * sf,
            "tolerance": args.tolerance,
            "sandwich": sandwich,
            "verdict": _verdict(chk.passed and sandwich_ok),
        }
        series[f"{f.tag} on lattice / covol"] = [(i, float(r) * sf / float(chk.covolume)) for i, r in chk.lattice.trace]
        code = 0 if chk.passed and sandwich_ok else 1
    return Result(doc, ["index", "value", "measure", "ratio"], _estimate_rows(est), series, code)


def cmd_ow_crosscheck(args) -> Result:
    f = _function(args.f, args.group)
    seq_a = groups.preset_sequence(args.seq, f.group)
    seq_b = groups.preset_sequence(args.seq_b, f.group)
    i_max = _check_imax(args.imax)
    sf = _scale(args)
    chk = entropy.ow_crosscheck(f, seq_a, seq_b, i_max, args.tolerance, args.k)
    doc = {"function": f.tag, **chk.to_dict(sf)}
    rows = [[seq_a.label] + r for r in _estimate_rows(chk.a)] + [[seq_b.label] + r for r in _estimate_rows(chk.b)]
    series = {
        seq_a.label: [(i, float(r) * sf) for i, r in chk.a.trace],
        seq_b.label + " ": [(i, float(r) * sf) for i, r in chk.b.trace],
    }
    return Result(doc, ["sequence", "index", "value", "measure", "ratio"], rows, series, 0 if chk.passed else 1)


def _scale(args) -> float:
    return 1 / math.log(2) if args.log2 else 1.0


def _describe(region) -> str:
    if isinstance(region, groups.LatticeBox):
        return "box" + "x".join(f"[{a},{b}]" for a, b in zip(region.lower, region.upper))
    return f"set({len(region)})"


def _report_series(rep, sf):
    return {f"r={r}": [(i, float(x) * sf) for i, x in e.trace] for r, e in sorted(rep.per_scale.items())}


def _metric_doc(M, eps):
    half = eps / 2
    c, s2, p2, c2 = dynamics.metric_cov(M, eps), dynamics.spa(M, half), dynamics.sep(M, half), dynamics.metric_cov(M, half)
    chain = [c.value, s2.value, p2.value, c2.value]
    exact = all(x.exact for x in (c, s2, p2, c2))
    ok = chain[0] <= chain[1] <= chain[2] <= chain[3]
    return {
        "points": len(M),
        "eps": _fmt(eps),
        "cov(eps)": c.value,
        "spa(eps/2)": s2.value,
        "sep(eps/2)": p2.value,
        "cov(eps/2)": c2.value,
        "exact": exact,
        "verdict": _verdict(ok),
    }, ok


def cmd_entropy(args) -> Result:
    sf = _scale(args)
    if args.metric_file:
        with open(args.metric_file, encoding="utf-8") as fh:
            spec = json.load(fh)
        unknown = set(spec) - {"points", "dist"}
        if unknown:
            raise InputError(f"unknown metric-space keys: {sorted(unknown)}")
        M = dynamics.FiniteMetricSpace(tuple(map(str, spec.get("points", range(len(spec["dist"]))))), tuple(tuple(_numbers(r)) for r in spec["dist"]))
        doc, ok = _metric_doc(M, _number(args.eps))
        return Result(doc, list(doc), [list(doc.values())], None, 0 if ok else 1)
    s = _subshift(args)
    if args.cylinder is not None:
        n = args.cylinder
        R = max(_scales(args.scales))
        A = groups.FiniteSet(groups.IntLattice(s.d), [(i,) + (0,) * (s.d - 1) for i in range(n)])
        M = dynamics.cylinder_space(s, A, R)
        rows, ok = [], True
        for r in _scales(args.scales):
            eps = Fraction(1, 2**r)
            vals = (dynamics.sep(M, eps).value, dynamics.spa(M, eps).value, dynamics.metric_cov(M, eps).value, dynamics.cov(s, A, r))
            rows.append([r, *vals, len(set(vals)) == 1])
            ok = ok and len(set(vals)) == 1
        doc = {
            "subshift": s.name,
            "window": n,
            "rows": [dict(zip(["scale", "sep", "spa", "cov", "patternCount", "equal"], r)) for r in rows],
            "verdict": _verdict(ok),
        }
        return Result(doc, ["scale", "sep", "spa", "cov", "patternCount", "equal"], rows, None, 0 if ok else 1)
    seq = groups.preset_sequence(args.seq, groups.IntLattice(s.d))
    i_max = _check_imax(args.imax)
    scales = _scales(args.scales)
    rep = entropy.topological_entropy(s, seq, scales, i_max, args.k)
    doc = {"subshift": s.name, "margin": s.margin, **rep.to_dict(sf)}
    if s.d == 1:
        doc["transferMatrixEntropy"] = dynamics.transfer_entropy(s) * sf
    rows = []
    if args.format == "csv":
        for r in scales:
            for i in range(1, i_max + 1):
                F = seq(i)
                count = dynamics.count_patterns(s, dynamics._thicken(dynamics._cells(F), r), s.margin)
                mu = groups.haar_measure(F)
                rows.append([r, i, _describe(F) + (f"+B{r}" if r else ""), s.margin, count, _fmt(mu), math.log(count) / float(mu) * sf])
    return Result(doc, ["scale", "index", "support", "margin", "count", "measure", "ratio"], rows, _report_series(rep, sf))


def cmd_relative_entropy(args) -> Result:
    code = _code(args.code, args.code_file)
    seq = groups.preset_sequence(args.seq, groups.IntLattice(code.source.d))
    sf = _scale(args)
    rep = entropy.relative_entropy(code, seq, _scales(args.scales), _check_imax(args.imax), args.k)
    doc = {"code": code.name, **rep.to_dict(sf)}
    rows = [r for sc, e in sorted(rep.per_scale.items()) for r in _estimate_rows(e, sc)]
    return Result(doc, ["scale", "index", "value", "measure", "ratio"], rows, _report_series(rep, sf))


def cmd_restrict(args) -> Result:
    s = _subshift(args)
    lattice = args.lattice
    if lattice != "fibonacci":
        vals = _ints(lattice)
        lattice = vals[0] if len(vals) == 1 else tuple(vals)
    seq = groups.preset_sequence(args.seq, groups.IntLattice(s.d))
    i_max = _check_imax(args.imax)
    scales = _scales(args.scales)
    sf = _scale(args)
    rest = entropy.lattice_restricted_entropy(s, lattice, seq, scales, i_max, args.k)
    top = entropy.topological_entropy(s, seq, scales, i_max, args.k)
    delta = abs(rest.sup_value - top.sup_value)
    ok = delta <= args.tolerance + rest.band + top.band
    doc = {
        "subshift": s.name,
        "restricted": rest.to_dict(sf),
        "unrestricted": top.to_dict(sf),
        "delta": delta * sf,
        "tolerance": args.tolerance,
        "verdict": _verdict(ok),
    }
    rows = [r for sc, e in sorted(rest.per_scale.items()) for r in _estimate_rows(e, sc)]
    return Result(doc, ["scale", "index", "value", "measure", "ratio"], rows, _report_series(rest, sf), 0 if ok else 1)


def cmd_power_rule(args) -> Result:
    s = _subshift(args)
    ns = _ints(args.n)
    if any(n < 1 or n > 8 for n in ns):
        raise InputError("--n values must lie in [1, 8]")
    reps = [entropy.power_rule_check(s, n, _check_imax(args.imax), _scales(args.scales), args.tolerance) for n in ns]
    ok = all(r.passed for r in reps)
    doc = {"subshift": s.name, "checks": [r.to_dict() for r in reps], "verdict": _verdict(ok)}
    rows = [[r.n, r.n * r.entropy, r.power_entropy, r.recoded_entropy, r.delta, _verdict(r.passed)] for r in reps]
    return Result(doc, ["n", "nTimesEntropy", "powerEntropy", "recodedEntropy", "delta", "verdict"], rows, None, 0 if ok else 1)


def _squared(code, F, r, **kw):
    return dynamics.fiber_cov(code, F, r, **kw) ** 2


def cmd_bowen_chain(args) -> Result:
    chains = []
    if args.preset:
        if args.preset not in CHAIN_PRESETS:
            raise InputError(f"unknown chain preset {args.preset!r}; choose from {sorted(CHAIN_PRESETS)}")
        p, q = CHAIN_PRESETS[args.preset]
        chains.append((args.preset, dynamics.code_preset(p), dynamics.code_preset(q)))
    elif args.p or args.q:
        if not (args.p and args.q):
            raise InputError("--p and --q go together")
        chains.append((f"{args.p}|{args.q}", dynamics.code_preset(args.p), dynamics.code_preset(args.q)))
    for j in range(args.random):
        p, q = entropy.random_merge_chain(args.seed + j, args.max_alphabet)
        chains.append((f"random seed {args.seed + j}: {p.name}|{q.name}", p, q))
    if not chains:
        raise InputError("give --preset, --p/--q or --random")
    i_max = _check_imax(args.imax, 2, 200)
    sf = _scale(args)
    composite = _squared if args.corrupt_composite else None
    out, rows, ok = [], [], True
    for name, p, q in chains:
        rep = entropy.bowen_chain_check(p, q, None, _scales(args.scales), i_max, composite_counter=composite)
        d = {"chain": name, **rep.to_dict(sf)}
        out.append(d)
        rows.append([name, d["first"], d["second"], d["composite"], d["verdict"]])
        ok = ok and rep.passed
    doc = {"chains": out, "corruptComposite": bool(args.corrupt_composite), "verdict": _verdict(ok)}
    return Result(doc, ["chain", "first", "second", "composite", "verdict"], rows, None, 0 if ok else 1)


def cmd_product_extension(args) -> Result:
    f = _function(args.f, "z1")
    if f.group != groups.IntLattice(1):
        raise InputError("product-extension needs a set function on z1")
    A, B = _ints(args.A), _ints(args.B)
    rep = entropy.product_extension_check(f, A, B, args.max_rectangles, args.margin)
    doc = {"function": f.tag, "A": A, "B": B, **rep.to_dict()}
    rows = [[" ".join(map(str, C)), " ".join(map(str, D))] for C, D in rep.cover]
    return Result(doc, ["C", "D"], rows, None, 0 if rep.passed else 1)


def cmd_bernoulli(args) -> Result:
    ps = _numbers(args.p)
    rep = entropy.bernoulli_entropy(ps, _check_imax(args.imax))
    doc = rep.to_dict(_scale(args))
    return Result(doc, list(doc), [[str(v) for v in doc.values()]], None, 0 if rep.passed else 1)


HANDLERS = {
    "cps-enumerate": cmd_cps_enumerate,
    "density": cmd_density,
    "meyer-check": cmd_meyer_check,
    "vanhove": cmd_vanhove,
    "ow-limit": cmd_ow_limit,
    "ow-crosscheck": cmd_ow_crosscheck,
    "entropy": cmd_entropy,
    "relative-entropy": cmd_relative_entropy,
    "restrict": cmd_restrict,
    "power-rule": cmd_power_rule,
    "bowen-chain": cmd_bowen_chain,
    "product-extension": cmd_product_extension,
    "bernoulli": cmd_bernoulli,
}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = _Parser(prog="owentropy", description="Ornstein-Weiss entropy toolkit")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    subs = {}

    def add(name, help_text, formats=("json", "csv", "svg")):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="JSON file of option values; flags override it")
        p.add_argument("--format", choices=formats, default="json")
        p.add_argument("--output", "-o", help="write here instead of stdout")
        p.add_argument("--log2", action="store_true", help="report entropies in bits")
        p.add_argument("--seed", type=int, default=0)
        subs[name] = p
        return p

    def seq_opts(p, seq="intervals", imax=30):
        p.add_argument("--seq", default=seq)
        p.add_argument("--imax", type=int, default=imax)
        p.add_argument("--k", type=int, default=5, help="tail window length")

    p = add("cps-enumerate", "enumerate a model set inside a query region", ("json", "csv", "points"))
    p.add_argument("--preset", default="fibonacci")
    p.add_argument("--query", help="lo,hi[;lo,hi] or ball:<radius>[:<center>]")
    p.add_argument("--bound", type=int)
    p.add_argument("--certify", help="also certify that internal projections are eps-dense")

    p = add("density", "uniform density trace of a model set or lattice")
    p.add_argument("--preset")
    p.add_argument("--lattice", help="zd:<d> or nzd:<n1,..>")
    p.add_argument("--spacing", default="1")
    seq_opts(p, None, 30)

    p = add("meyer-check", "relative density and Meyer difference check on a 1-d patch", ("json", "csv"))
    p.add_argument("--preset")
    p.add_argument("--points-file")
    p.add_argument("--query")
    p.add_argument("--support")
    p.add_argument("--f-bound", default="3")
    p.add_argument("--k-bound", default="2")

    p = add("vanhove", "K-boundary ratios of a sequence")
    p.add_argument("--group", default="z1")
    p.add_argument("--seq", default="boxes")
    p.add_argument("--K", default="box:1")
    p.add_argument("--imax", type=int, default=500)
    p.add_argument("--tolerance", default="1/100")
    p.add_argument("--tail", type=int, default=5)
    p.add_argument("--dilated", action="store_true", help="also report mu(KA)/mu(A)")
    p.add_argument("--product", help="second factor GROUP/SEQ/REGION")

    p = add("ow-limit", "trace and tail of f(A_i)/mu(A_i)")
    p.add_argument("--f", default="log-count:golden-mean")
    p.add_argument("--group")
    p.add_argument("--transfer", help="lattice spacing; compare against the lattice-transferred function")
    p.add_argument("--tolerance", type=float, default=1e-9)
    seq_opts(p)

    p = add("ow-crosscheck", "compare tails on two sequences")
    p.add_argument("--f", default="log-count:golden-mean")
    p.add_argument("--group")
    p.add_argument("--seq-b", default="centered")
    p.add_argument("--tolerance", type=float, default=1e-2)
    seq_opts(p)

    p = add("entropy", "topological entropy of a subshift")
    p.add_argument("--preset")
    p.add_argument("--subshift-file")
    p.add_argument("--scales", default="0,1,2")
    p.add_argument("--cylinder", type=int, help="compare sep/spa/cov on cylinders over a window of this length")
    p.add_argument("--metric-file", help="JSON finite metric space; checks the covering chain at --eps")
    p.add_argument("--eps", default="1")
    seq_opts(p)

    p = add("relative-entropy", "relative topological entropy of a factor code")
    p.add_argument("--code")
    p.add_argument("--code-file")
    p.add_argument("--scales", default="0,1,2")
    seq_opts(p, imax=20)

    p = add("restrict", "entropy of the action restricted to a sublattice or model set")
    p.add_argument("--preset")
    p.add_argument("--subshift-file")
    p.add_argument("--lattice", default="2")
    p.add_argument("--scales", default="0,1,2")
    p.add_argument("--tolerance", type=float, default=1e-3)
    seq_opts(p)

    p = add("power-rule", "n E(f) against the entropy of f^n", ("json", "csv"))
    p.add_argument("--preset")
    p.add_argument("--subshift-file")
    p.add_argument("--n", default="1,2,3,4")
    p.add_argument("--scales", default="0,1,2")
    p.add_argument("--imax", type=int, default=30)
    p.add_argument("--tolerance", type=float, default=1e-3)

    p = add("bowen-chain", "relative entropy inequalities along a chain of codes", ("json", "csv"))
    p.add_argument("--preset")
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--random", type=int, default=0, help="number of seeded random merge chains")
    p.add_argument("--max-alphabet", type=int, default=6)
    p.add_argument("--scales", default="0,1,2")
    p.add_argument("--imax", type=int, default=12)
    p.add_argument("--corrupt-composite", action="store_true", help="square the composite fiber counts")

    p = add("product-extension", "cheapest rectangle cover of A x B", ("json", "csv"))
    p.add_argument("--f", default="cardinality")
    p.add_argument("--A", default="0,1,2")
    p.add_argument("--B", default="0,1,2")
    p.add_argument("--max-rectangles", type=int)
    p.add_argument("--margin", type=int, default=1)

    p = add("bernoulli", "entropy of a Bernoulli measure against the full shift", ("json", "csv"))
    p.add_argument("--p", default="1/2,1/2")
    p.add_argument("--imax", type=int, default=10)

    return parser, subs


_GLOBAL_KEYS = {"config", "command", "help"}


def _apply_config(path: str, sub: argparse.ArgumentParser) -> None:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}", "config") from None
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object", "config")
    dests = {a.dest: a for a in sub._actions if a.dest not in _GLOBAL_KEYS}
    values = {}
    for key, val in cfg.items():
        dest = key.replace("-", "_")
        if dest not in dests:
            raise InputError(f"unknown config key {key!r}", "config")
        action = dests[dest]
        if isinstance(action, argparse._StoreTrueAction):
            if not isinstance(val, bool):
                raise InputError(f"config key {key!r} must be true or false", "config")
        elif isinstance(val, list):
            val = ",".join(str(v) for v in val)
        elif val is not None and not isinstance(val, bool):
            val = str(val)
        if action.choices is not None and val not in action.choices:
            raise InputError(f"config key {key!r}: {val!r} not in {list(action.choices)}", "config")
        values[dest] = val
    sub.set_defaults(**values)


def _render(res: Result, args) -> str:
    if res.text is not None:
        return res.text
    if args.format == "csv":
        return dump_csv(res.header or [], res.rows or [])
    if args.format == "svg":
        return svg_plot(res.series or {}, f"{args.command}")
    return dump_json({"schemaVersion": SCHEMA_VERSION, "command": args.command, "result": res.doc})


def _fail(stderr, code: str, message: str, exit_code: int, **extra) -> int:
    stderr.write(json.dumps({"error": code, "message": message, **extra}, sort_keys=True) + "\n")
    return exit_code


def _glue_negative(argv: list[str]) -> list[str]:
    """``--query -5,5`` -> ``--query=-5,5`` so argparse does not read a flag."""
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and len(tok) > 1 and tok[0] == "-" and (tok[1].isdigit() or tok[1] == "."):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run one subcommand; returns the exit code."""
    argv = _glue_negative(list(sys.argv[1:] if argv is None else argv))
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser, subs = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise InputError("a subcommand is required: " + ", ".join(COMMANDS), "usage")
        if args.config:
            _apply_config(args.config, subs[args.command])
            args = parser.parse_args(argv)
        for name in ("imax", "k", "tail"):
            v = getattr(args, name, None)
            if v is not None and v < 1:
                raise InputError(f"--{name} must be positive")
        res = HANDLERS[args.command](args)
        text = _render(res, args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except InputError as exc:
        return _fail(stderr, exc.code, str(exc), 2)
    except CoverageError as exc:
        return _fail(stderr, exc.code, str(exc), 3, suggestedBound=exc.suggested_bound)
    except BudgetExceeded as exc:
        return _fail(stderr, exc.code, str(exc), 3, required=exc.required, index=getattr(exc, "index", None))
    except OWEntropyError as exc:
        return _fail(stderr, exc.code, str(exc), 2)
    except (ValueError, KeyError, ZeroDivisionError, OSError) as exc:
        return _fail(stderr, "input-error", str(exc), 2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return res.code


def main() -> None:
    sys.exit(run())
