"""The Fibonacci chain as a model set: points, density and the Meyer property."""

from owentropy import cps_preset, enumerate_model_set, meyer_check, uniform_density
from owentropy.groups import RationalBox, RealVector, preset_sequence

R1 = RealVector(1)
ms = cps_preset("fibonacci")

pts = sorted(enumerate_model_set(ms, RationalBox(R1, (-10,), (10,))))
print("points in [-10, 10]:")
print("  " + ", ".join(f"{float(p[0]):.3f}" for p in pts))
gaps = sorted({float(b[0] - a[0]) for a, b in zip(pts, pts[1:])})
print("gap lengths:", ", ".join(f"{g:.4f}" for g in gaps))

trace = uniform_density(ms, preset_sequence("boxes", R1), 50)
print(f"\ndensity trace tail {float(trace.tail):.6f}, expected {float(ms.expected_density()):.6f}")
print("band contains the expected value:", trace.band_contains(ms.expected_density()))

support = RationalBox(R1, (-60,), (60,))
rep = meyer_check(ms.points_in(support), support, RationalBox(R1, (-50,), (50,)), 3, 2)
print(f"\nmeyer check: {rep.status}; F = {[str(f) for f in rep.F]}; covering radius {float(rep.covering_radius):.4f}")
