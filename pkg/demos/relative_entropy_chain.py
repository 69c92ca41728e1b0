"""Relative entropy along a chain of factor codes.

The inequalities max(E(p), E(q)) <= E(q o p) <= E(p) + E(q) are checked on
the shipped chain, on random symbol merges, and on a chain whose composite
fiber counts were deliberately squared.
"""

from owentropy import bowen_chain_check, code_preset, fiber_cov, random_merge_chain

p, q = code_preset("four-to-two"), code_preset("two-to-point")
rep = bowen_chain_check(p, q, None, (0, 1), 12)
print("four-to-two then two-to-point:", ", ".join(f"{v:.4f}" for v in rep.values), "->", "pass" if rep.passed else "fail")

for seed in range(5):
    a, b = random_merge_chain(seed)
    r = bowen_chain_check(a, b, None, (0,), 10)
    print(f"seed {seed}: {a.source.name} -> {a.target.name} -> {b.target.name}:", ", ".join(f"{v:.4f}" for v in r.values), "pass" if r.passed else "fail")

bad = bowen_chain_check(p, q, None, (0,), 10, composite_counter=lambda c, F, r: fiber_cov(c, F, r) ** 2)
print("squared composite counts:", "pass" if bad.passed else "fail (as it should)")
