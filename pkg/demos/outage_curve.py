"""
Secrecy outage against target rate
==================================

Outage is the probability that the instantaneous secrecy capacity falls
at or below the rate R (nats).  At R = 0 it is the chance that the
eavesdropper's SNR beats the main link.
"""

import math

import numpy as np

from corrwiretap import ChannelParams, outage_probability

p_indep = ChannelParams(10.0, 2.0, 0.0)
p_corr = ChannelParams(10.0, 2.0, 0.8)

# independent links: P(alpha <= beta) = lambda2 / (lambda1 + lambda2)
print("R=0, rho=0:", outage_probability(p_indep, 0.0).value, "expected", 2.0 / 12.0)

rates = np.linspace(0.0, 4.0, 9)
print(f"{'R':>5} {'rho=0':>12} {'rho=0.8':>12}")
for R in rates:
    a = outage_probability(p_indep, R).value
    b = outage_probability(p_corr, R).value
    print(f"{R:5.2f} {a:12.8f} {b:12.8f}")

# With lambda1 > lambda2 correlation helps at small R (the links move
# together, so the stronger one usually stays ahead) but the curves cross
# for larger R.

# the rate supported 90% of the time at 10 dB / 3 dB, by bisection
lo, hi = 0.0, 10.0
for _ in range(60):
    mid = 0.5 * (lo + hi)
    lo, hi = (mid, hi) if outage_probability(p_corr, mid).value < 0.1 else (lo, mid)
print(f"10% outage rate at rho=0.8: {lo:.6f} nats = {lo / math.log(2):.6f} bits")
