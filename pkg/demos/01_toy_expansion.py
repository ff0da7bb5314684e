"""Walk through the quadratic model on a problem small enough to do by hand.

A single Ry rotation acting on |0> with observable O = X + 2Z has the
closed-form cost E(t) = -sin(2t) + 2cos(2t), so every number the expansion
produces can be checked against calculus.
"""

import numpy as np

from cliffgrad import AnsatzCircuit, RotationGate, energy, expand, parse_observable

obs = parse_observable("qubits 1\n1.0 X0\n2.0 Z0\n")
circ = AnsatzCircuit(1, [RotationGate("Y", 0, 0)])

res = expand(circ, obs, "0", threshold=0.0)
print(f"value at the Clifford point   e0      = {res.e0}")
print(f"exact gradient                g       = {res.gradient}")
print(f"exact Hessian                 A       = {res.hessian_kept}")
print(f"stationary point              theta*  = {res.theta_star}")
print(f"quadratic model at theta*     <O>*    = {res.perturbative_optimum}")

# Calculus on E(t) = -sin(2t) + 2cos(2t) gives E(0)=2, E'(0)=-2, E''(0)=-8,
# so theta* = -(-2)/(-8) = -1/4 and the model value is 2 + 1/8 = 2.25.
t = res.theta_star[0]
closed_form = -np.sin(2 * t) + 2 * np.cos(2 * t)
dense = energy(circ, res.theta_star, "0", obs)
print(f"\ndense simulation at theta*            = {dense}")
print(f"closed form -sin(2t)+2cos(2t)         = {closed_form}")
print(f"model error (the neglected cubic)     = {abs(dense - res.perturbative_optimum):.6f}")
print(f"cubic remainder bound 24/6*|t|^3      = {24 / 6 * abs(t) ** 3:.6f}")
