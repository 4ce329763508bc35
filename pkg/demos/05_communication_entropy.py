"""How compressible is Alice's bit to someone who knows the shared vectors?

Given the angle eta between the shared vectors, Alice sends -1 with
probability eta/pi, so the bit carries H(eta/pi) bits on average.
"""

import math

import numpy as np

from bellsim import ScenarioConfig, channel_statistics, entropy_integral, mutual_information_transcript

print(f"quadrature: {entropy_integral():.6f} bits per round")

cfg = ScenarioConfig("toner_bacon", n=200_000, seed=11)
cs = channel_statistics(cfg, cfg.n)
print(f"simulated:  {cs.mean_conditional_entropy:.6f} bits per round")
print(f"P(c = -1) = {cs.p_minus:.4f}   (an outsider sees a fair coin)")
print(f"I(c; alpha) = {mutual_information_transcript(cfg, cfg.n):.2e} bits")

centers = 0.5 * (cs.bin_edges[1:] + cs.bin_edges[:-1])
print("\n eta/pi   P(c=-1 | eta)")
for k in np.linspace(2, 47, 10).astype(int):
    print(f"{centers[k] / math.pi:7.3f}   {cs.bin_freq_minus[k]:.3f}")
