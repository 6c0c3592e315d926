"""Classify one element per row of the cyclic table and compare the sampled
limit set with the described one."""

import cmath
import math

import numpy as np

from kleinp2 import GroupSpec, classify, cluster_oracle, hausdorff_one_sided, kulkarni_limit_set
from kleinp2.projective import plane_grid


def turn(t):
    return cmath.exp(2j * math.pi * t)


ROWS = {
    "unipotent 3-block": [[1, 1, 0], [0, 1, 1], [0, 0, 1]],
    "torsion": np.diag([1, turn(1 / 3), turn(2 / 3)]),
    "equal moduli, rational": np.diag([1, turn(1 / 5), 4]),
    "equal moduli, irrational": np.diag([1, turn(math.sqrt(2)), 2]),
    "strongly loxodromic": np.diag([0.5, 1, 2]),
    "2-block, torsion": [[1, 1, 0], [0, 1, 0], [0, 0, turn(1 / 3)]],
    "2-block, non-unit": [[1, 1, 0], [0, 1, 0], [0, 0, 3]],
}

X = plane_grid(1000, np.random.default_rng(0))
for name, m in ROWS.items():
    c = classify(m)
    desc = kulkarni_limit_set(c).Lambda
    lam = cluster_oracle(GroupSpec.of({"g": m}), 200, X, 100).Lambda()
    h = hausdorff_one_sided(lam.points, desc.distance) if not desc.is_empty else 0.0
    print(f"{name:26s} {c.kind.value:30s} Lambda={desc.names()}  cloud={len(lam):6d}  hausdorff={h:.4f}")
