"""CHSH values: the one-bit protocol reaches 2 sqrt 2, the local model stops at 2."""

import math

from bellsim import ScenarioConfig, chsh_value, estimate_chsh
from bellsim.quantum import CHSH_OPTIMAL, singlet_correlator

s = CHSH_OPTIMAL
print("settings (degrees in the x-z plane):",
      {k: round(math.degrees(math.atan2(v.x, v.z)), 1) for k, v in s.items()})
print("quantum prediction:", chsh_value(singlet_correlator, s["a"], s["a2"], s["b"], s["b2"]))

for protocol in ("toner_bacon", "bell_local"):
    S, err, parts = estimate_chsh(ScenarioConfig(protocol, n=200_000, seed=3))
    print(f"{protocol:12s} S = {S:.4f} +- {err:.4f}")
    for name, r in parts.items():
        print(f"    E[{name}] = {r.mean:+.4f}")
