"""
Secrecy capacity against SNR under correlated fading
====================================================

Both links see the same mean SNR, swept from 0 to 30 dB.  For each
correlation the series value is printed in bits per channel use.
"""

import numpy as np

from corrwiretap import ChannelParams, average_secrecy_capacity

snr_db = np.arange(0, 31, 5)
rhos = [0.0, 0.3, 0.6, 0.9]

print("snr_db " + " ".join(f"rho={r:<6}" for r in rhos))
for s in snr_db:
    row = [average_secrecy_capacity(ChannelParams.from_snr_db(s, r)).bits for r in rhos]
    print(f"{s:6d} " + " ".join(f"{c:10.6f}" for c in row))

# Stronger correlation hands the eavesdropper a copy of the main channel,
# so every row decreases left to right.

# How many series terms does that cost?  Terms decay like rho**k.
for r in rhos + [0.99]:
    res = average_secrecy_capacity(ChannelParams.from_snr_db(20, r))
    print(f"rho={r:<5} terms_used={res.terms_used:5d} last_term_ratio={res.last_term_ratio:.1e}")
