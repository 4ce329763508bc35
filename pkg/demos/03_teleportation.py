"""Two bits and two shared vectors reproduce measuring a qubit prepared along a."""

import math

from bellsim import ScenarioConfig, UnitVector3, estimate_teleportation

a = UnitVector3(0.0, 0.0, 1.0)
cfg = ScenarioConfig("classical_teleportation", n=200_000, seed=5)
print(" a.b     <beta>")
for d in (1.0, 0.5, 0.0, -0.5, -1.0):
    b = UnitVector3.from_angle(math.acos(d))
    r = estimate_teleportation(cfg, a, b)
    print(f"{d:+.2f}  {r.mean:+.4f} +- {r.stderr:.4f}")
