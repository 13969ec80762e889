"""
Binary quadratics under GL(2)
=============================

GL(2) acts on quadratic forms in x, y. With a central shift the square x^2
is destabilized by a one-parameter subgroup, while xy and x^2 + y^2 stay
semistable. For GL only destabilizers are proofs; the other verdicts are
confirmed by the descent.
"""
import numpy as np

from symplstab import flow, harness, stability
from symplstab.representation import Symplectization, symmetric_power_representation

rep = symmetric_power_representation(2, 2)  # orthonormal basis x^2, sqrt2 xy, y^2
points = {"x2": [1, 0, 0], "xy": [0, 1 / np.sqrt(2), 0], "x2+y2": [1, 0, 1]}

for tau in (-1.0, 0.0, 1.0):
    sympl = Symplectization(rep, tau)
    print(f"tau = {tau:+.0f}")
    for name, v in points.items():
        verdict = stability.analytic_verdict_gl(sympl, v)
        descent = flow.kn_descent(sympl, v)
        print(f"    {name:6s} {verdict.level:28s} {verdict.confidence:9s} flow={descent.classification}")

# the harness runs all three engines and cross-checks them
inst = {i.id: i for i in harness.gallery()}["E_taum1"]
report = harness.compare(inst)
print("agreement matrix", report.agreement_matrix())
print("disagreements", report.disagreements, "check failures", report.check_failures)
