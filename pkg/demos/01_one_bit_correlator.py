"""One shared pair of random unit vectors plus one bit reproduces <alpha beta> = -a.b.

Run:  python demos/01_one_bit_correlator.py
"""

import math

from bellsim import ScenarioConfig, UnitVector3, sweep_correlator, toner_bacon_round
from bellsim.geom import RngStream
from bellsim.protocols import draw_shared_randomness

# A single round, spelled out. Alice measures along z, Bob 60 degrees away.
a = UnitVector3(0.0, 0.0, 1.0)
b = UnitVector3.from_angle(math.radians(60))
shared = draw_shared_randomness(RngStream(seed=1, stream_index=0))
rec = toner_bacon_round(a, b, shared)
print("lambda1 =", shared.lambda1)
print("lambda2 =", shared.lambda2)
print(f"alpha = {rec.alpha:+d}, bit sent = {rec.transcript[0]:+d}, beta = {rec.beta:+d}")

# Many rounds: the product alpha*beta averages to -cos(theta).
cfg = ScenarioConfig("toner_bacon", n=200_000, seed=1)
angles = [math.radians(d) for d in (0, 30, 60, 90, 120, 150, 180)]
print("\n theta   estimate    -cos(theta)")
for theta, est, oracle in sweep_correlator(cfg, angles):
    print(f"{math.degrees(theta):6.0f}  {est.mean:+.4f}+-{est.stderr:.4f}  {oracle:+.4f}")

# Bell's zero-communication model only reaches the straight line -1 + 2 theta / pi.
local = ScenarioConfig("bell_local", n=200_000, seed=1)
print("\n theta   local model  line")
for theta, est, oracle in sweep_correlator(local, angles):
    print(f"{math.degrees(theta):6.0f}  {est.mean:+.4f}      {oracle:+.4f}")
