# Simulated chain against the stationary law
#
# One vertex is followed for a long time. The fraction of time spent at each
# degree should approach the stationary law.

from degrenet import align, js_midpoint, occupancy_pmf, pearson, simulate_chain, stationary_pmf

for policy, mu in (("linear", 3.0), ("linear", 5.0), ("log", 2.0), ("log", 0.075)):
    traj = simulate_chain(policy, mu, t_end=1e5, seed=0)
    emp = occupancy_pmf(traj)
    pair = align(emp, stationary_pmf(policy, mu))
    print(f"{policy:6s} mu={mu:<6} jumps={traj.jump_times.size - 1:>8}  "
          f"rho={pearson(pair):.5f}  js_mid={js_midpoint(pair):.2e}")

# Short runs are noisier. Here is how the distance shrinks with the horizon.

print("\nlinear mu=2, js_mid by horizon")
for t_end in (1e2, 1e3, 1e4, 1e5):
    emp = occupancy_pmf(simulate_chain("linear", 2.0, t_end, seed=1))
    print(f"  t_end={t_end:>8.0f}  {js_midpoint(align(emp, stationary_pmf('linear', 2.0))):.2e}")
