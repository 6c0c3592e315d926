"""Inoue-type group from x^3 - x - 1: the induced Moebius group is real, so
its limit set sits on the extended real line."""

import numpy as np

from kleinp2 import control_projection, elementary_certificate, greenberg_limit_approx
from kleinp2.gallery import make_inoue_sm

g = make_inoue_sm([[0, 0, 1], [1, 0, 1], [0, 1, 0]])
print("family", g.family, "alpha %.12f" % g.data["alpha"])

cp = control_projection(g.spec)
for name, m in zip(cp.names, cp.maps):
    print(f"  {name}: {np.round(m.lift / m.lift[np.unravel_index(np.abs(m.lift).argmax(), (2, 2))], 6).tolist()}")

print("certificate", elementary_certificate(cp.maps, 6).type)
cloud, fit = greenberg_limit_approx(cp.maps, 8)
z = cloud.points
fin = np.abs(z[:, 1]) > 1e-12 * np.abs(z[:, 0])
print(f"{len(cloud)} fixed points, max |Im| {np.abs((z[fin, 0] / z[fin, 1]).imag).max():.1e}")
print("circle fit residual %.1e" % fit.residual)
