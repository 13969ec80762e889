"""
One weight, three shifts
========================

The smallest interesting action: C* on C with weight 1. The central shift
tau alone decides the verdict for the point v = 1, so this family is the
quickest way to see the three engines at work.
"""
import numpy as np

from symplstab import flow, momentum, stability
from symplstab.representation import Symplectization, torus_representation

rep = torus_representation([[1]])
v = np.array([1.0])

for tau in (-1.0, 0.0, 1.0):
    sympl = Symplectization(rep, [tau])
    verdict = stability.analytic_verdict(sympl, v)
    descent = flow.kn_descent(sympl, v)
    probe = flow.boundedness_probe(sympl, v)
    print(f"tau = {tau:+.0f}: {verdict.level:28s} certificate={verdict.certificate.kind}")
    print(f"    flow: {descent.classification}, |mu| -> {descent.mu_norm:.3g} "
          f"after {descent.iterations} steps")
    print(f"    Psi bounded below: {probe.bounded}")

# lambda along s = -1 is the tau-term once the coordinate is forced to decay,
# and Psi along s = +1 grows like e^{2t}/4
sympl = Symplectization(rep, [1.0])
for s in (-1.0, 1.0):
    print(f"s = {s:+.0f}: lambda = {momentum.maximal_weight(sympl, [s], v)}")
ts = np.linspace(0, 3, 7)
print("Psi(v, e^{t}) =", np.round([momentum.kempf_ness(sympl, [1.0], t, v) for t in ts], 4))
