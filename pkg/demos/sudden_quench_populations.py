"""What a sudden field quench does to the level populations.

In the tau -> 0 limit the state has no time to move, so the new populations
are the old ones re-expressed in the quenched eigenbasis. Only the two
entangled levels mix; the product states |00> and |11> keep their weight.
"""

import numpy as np

from heisenberg_otto import SpinPairParams, gibbs_state, project_populations
from heisenberg_otto.otto_cycle import sudden_populations
from heisenberg_otto.spin_system import spectral_decomposition
from heisenberg_otto.thermal import boltzmann_populations

j, b1, b3 = 0.1, 3.0, 4.0
cold = SpinPairParams(j, b1, b1)
hot = SpinPairParams(j, b1, b3)

sd_cold = spectral_decomposition(cold)
sd_hot = spectral_decomposition(hot)
p = boltzmann_populations(sd_cold.eigenvalues, 1.0)

projected = project_populations(gibbs_state(cold, 1.0), hot)
closed_form = sudden_populations(p, sd_hot.a_coeff, sd_hot.b_coeff)

np.set_printoptions(precision=6, suppress=True)
print("levels ordered as (psi1, 00, psi3, 11)")
print("before quench      :", p)
print("after, by projector:", projected)
print("after, closed form :", closed_form)
print("max difference     :", np.abs(projected - closed_form).max())

# The two entangled levels meet halfway, pulled apart again by 2ab = 1/s.
mean = 0.5 * (p[0] + p[2])
ab = sd_hot.a_coeff * sd_hot.b_coeff
print(f"\n(p1 + p3)/2 = {mean:.6f}, ab = {ab:.6f}")
print(f"p1' = mean + ab (p1 - p3) = {mean + ab * (p[0] - p[2]):.6f}")
