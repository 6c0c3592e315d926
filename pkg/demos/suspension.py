"""Suspension of a classical Schottky group by scalars: finite G gives the
cone over the Moebius limit set, infinite G adds the line z3 = 0."""

import numpy as np

from kleinp2 import cluster_oracle, hausdorff_one_sided, line_coverage
from kleinp2.gallery import classical_schottky, make_suspension
from kleinp2.projective import ProjLine, plane_grid

X = plane_grid(1000, np.random.default_rng(0))
for G in ([-1], [2]):
    s = make_suspension(classical_schottky(), G)
    lam = cluster_oracle(s.spec, 6, X, 4).Lambda()
    # every cone line meets z3 = 0, so only a small gap marks the extra line
    gap = line_coverage(lam.points, ProjLine([0, 0, 1]))["max_gap"]
    print(f"G={G}: infinite={s.G_infinite}  cloud={len(lam)}  "
          f"distance to prediction {hausdorff_one_sided(lam.points, s.predicted.distance):.4f}  "
          f"largest gap along z3=0: {gap:.3f}")
