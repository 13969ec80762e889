"""
Degenerating to a closed orbit
==============================

C* acting on C^2 with weights (1, -1). The point (1, 0) is semistable but
its orbit is not closed: flowing along s = -1 sends it to the origin, which
is the unique closed orbit in its closure.
"""
import numpy as np

from symplstab import flow, momentum, stability
from symplstab.representation import Symplectization, torus_representation

sympl = Symplectization(torus_representation([[1], [-1]]), [0.0])

for v in ([1, 1], [1, 0], [0, 0]):
    verdict = stability.analytic_verdict(sympl, v)
    print(f"v = {v}: {verdict.level} (stabilizer dim {verdict.stabilizer_dim})")

v = np.array([1.0, 0.0])
cert = stability.degeneration_certificate(sympl, v)
cert.verify(sympl, v)
print("direction s_m =", cert.s_m, " limit y =", cert.y, " shift s0 =", cert.s0)

# the descent sees the same thing: |mu| decays but the exponent runs away
res = flow.kn_descent(sympl, v)
print(f"flow: {res.classification}, exponent {res.exponent}, |mu| {res.mu_norm:.2e}")

# on a generic point the descent converges and the limit is balanced
res = flow.kn_descent(sympl, [2, 1])
print("balanced point", np.abs(res.point), "moment", momentum.moment_vector(sympl, res.point))

# a two-dimensional torus: (1, 1, 0) degenerates, (1, 1, 1) is stable
c = Symplectization(torus_representation([[1, 0], [0, 1], [-1, -1]]), [0.0, 0.0])
for v in ([1, 1, 1], [1, 1, 0]):
    verdict = stability.analytic_verdict(c, v)
    print(f"C, v = {v}: {verdict.level}, LP margin {verdict.margin}")
