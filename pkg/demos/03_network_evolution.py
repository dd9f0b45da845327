# Whole-network evolution
#
# New vertices arrive and attach m edges to existing vertices chosen by growth
# rate. Every edge disappears at rate mu. With the log rule a small mu keeps the
# graph dense.

import numpy as np

from degrenet import SimConfig, evolve

for mu in (0.005, 0.05):
    means = []
    for replica in range(10):
        res = evolve(SimConfig(m0=10, m=3, policy="log", mu=mu, t_end=6.5, seed=0, replica=replica,
                               record_degree_series=False))
        g = res.final_graph
        means.append(2 * g.edge_count / g.vertex_count)
    print(f"log mu={mu:<6} final mean degree over 10 replicas: median {np.median(means):.2f}")

# The linear rule with a large mu loses edges faster than arrivals replace them.

res = evolve(SimConfig(m0=50, m=3, policy="linear", mu=3.0, t_end=50.0, init_mode="ring", seed=0,
                       instrument=True, record_degree_series=False))
print(f"\nlinear mu=3: extinct={res.extinct}, events={res.event_counts}")
life = np.asarray(res.edge_lifetimes)
print(f"edge lifetimes: n={life.size}, mean={life.mean():.4f} (1/mu = {1 / 3:.4f})")
