# Stationary degree law
#
# A vertex of degree k gains an edge at rate lambda(k) and loses one at rate k * mu.
# This script tabulates the stationary law for both growth rules and shows where
# the logarithmic rule stops being monotone.

import numpy as np

from degrenet import adjacent_crossing_mu, expected_degree, stationarity_holds, stationary_pmf

# With linear growth the law only exists for mu > 1.

for mu in (0.5, 1.0, 1.0001, 2.0):
    print(f"linear mu={mu:<7} stationary: {stationarity_holds('linear', mu)}")

# The head of the linear law for a few values of mu, with its mean.

print("\n   mu    P(1)     P(2)     P(3)     mean")
for mu in (1.5, 2.0, 3.0, 5.0):
    pmf = stationary_pmf("linear", mu)
    print(f"{mu:5.1f}  " + "  ".join(f"{pmf[k]:.5f}" for k in (1, 2, 3)) + f"  {expected_degree('linear', mu):.4f}")

# Logarithmic growth exists for every mu > 0. Small mu pushes mass away from k = 1.

print("\nlog law, most likely degree:")
for mu in (0.005, 0.05, 0.15, 0.3, 0.4, 1.0):
    # very small mu puts mass at high degrees, so the table needs a wider range
    pmf = stationary_pmf("log", mu, k_max=20_000)
    print(f"  mu={mu:<6} argmax k = {int(pmf.degrees[np.argmax(pmf.probs)])}")

# P(k) and P(k-1) swap order at mu = ln(k) / k.

for k in (2, 3, 5):
    print(f"crossing k={k}: mu* = {adjacent_crossing_mu('log', k).mu_star:.7f}")
