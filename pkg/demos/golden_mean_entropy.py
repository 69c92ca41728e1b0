"""Watch log N(F_n)/|F_n| settle for the golden mean shift.

Three scales are traced; the scale-0 trace is compared with the log of the
largest eigenvalue of the transfer matrix.
"""

import math

from owentropy import preset_sequence, subshift_preset, topological_entropy
from owentropy.dynamics import transfer_entropy
from owentropy.groups import IntLattice

s = subshift_preset("golden-mean")
rep = topological_entropy(s, preset_sequence("intervals", IntLattice(1)), (0, 1, 2), 30)

print(" n   r=0       r=1       r=2")
for i in (1, 2, 5, 10, 20, 30):
    row = [rep.per_scale[r].ratios[i - 1] for r in (0, 1, 2)]
    print(f"{i:2d}  " + "  ".join(f"{v:.6f}" for v in row))

print(f"\ntail estimate  {rep.sup_value:.6f}")
print(f"eigenvalue     {transfer_entropy(s):.6f}")
print(f"log tau        {math.log((1 + math.sqrt(5)) / 2):.6f}")
