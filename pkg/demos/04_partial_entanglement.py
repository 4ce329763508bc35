"""Partially entangled states: Alice samples her outcome, then teleports Bob's conditional state.

The table compares the simulated joint distribution with the exact one.
"""

import math

from bellsim import ScenarioConfig, UnitVector3, compare_joint_distribution
from bellsim.quantum import bob_post_measurement_direction, partially_entangled

state = partially_entangled(math.pi / 8)  # cos(pi/8)|00> + sin(pi/8)|11>
a = UnitVector3(1.0, 0.0, 0.0)
b = UnitVector3(0.0, 0.0, 1.0)

for alpha in (1, -1):
    print(f"Bob's direction after alpha = {alpha:+d}:", bob_post_measurement_direction(state, a, alpha))

rep = compare_joint_distribution(ScenarioConfig("partial_entanglement", n=200_000, seed=9), state, a, b)
print("\nalpha beta  simulated  exact     z")
for c in rep.cells:
    print(f"{c.alpha:+d}    {c.beta:+d}    {c.empirical:.4f}    {c.oracle:.4f}  {c.z:+.2f}")
