"""
Series, quadrature and simulation side by side
==============================================

The series values are checked against direct 2-D integration of the joint
density and against a seeded Monte-Carlo run.  The same table is what
``corrwiretap compare`` writes as CSV.
"""

from corrwiretap import (
    ChannelParams,
    average_secrecy_capacity,
    capacity_by_quadrature,
    estimate_capacity,
    estimate_outage,
    outage_by_quadrature,
    outage_probability,
)

SEED = 2024
N = 200_000

print(f"{'lambda':>7} {'rho':>4} {'series':>12} {'|series-quad|':>14} {'z_mc':>6}")
for i, (lam, rho) in enumerate([(1.0, 0.0), (10.0, 0.5), (100.0, 0.9)]):
    p = ChannelParams(lam, lam, rho)
    closed = average_secrecy_capacity(p).value
    quad = capacity_by_quadrature(p).value
    mc = estimate_capacity(p, N, seed=SEED + i)
    print(f"{lam:7.1f} {rho:4.1f} {closed:12.9f} {abs(closed - quad):14.2e} {(mc.mean - closed) / mc.std_error:6.2f}")

# outage at R = 1 nat
p = ChannelParams(10.0, 5.0, 0.6)
closed = outage_probability(p, 1.0).value
quad = outage_by_quadrature(p, 1.0).value
mc = estimate_outage(p, 1.0, N, seed=SEED)
print(f"outage: series {closed:.12f}  quadrature {quad:.12f}  mc {mc.mean:.5f} +/- {mc.std_error:.5f}")
