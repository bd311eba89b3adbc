"""Plain batch peeling against the global and local prunings."""
import time

from densepeel import PeelConfig, peel, resolve_metric
from densepeel.generators import gnm_random

# %% a sparse random graph with a long tail of low-degree vertices
g = gnm_random(50_000, 150_000, seed=7, weighted=True)
print(g.vertex_count, "vertices", g.edge_count, "edges")

# %% rounds and density per variant
for name in ("dg", "dw", "fd"):
    m = resolve_metric(name)
    for eps in (0.1, 0.5):
        row = []
        for mode in ("none", "gpo", "lpo"):
            t0 = time.perf_counter()
            r = peel(g, m, PeelConfig(epsilon=eps, optimization=mode))
            row.append(f"{mode}: R={r.rounds:>3} g={r.best_density:.4f} "
                       f"({1000 * (time.perf_counter() - t0):.0f} ms)")
        print(f"{name} eps={eps}  " + " | ".join(row))

# %% how many vertices each round removes
r = peel(g, resolve_metric("dg"), PeelConfig(epsilon=0.1, optimization="none"))
print("plain:", r.peel_groups)
r = peel(g, resolve_metric("dg"), PeelConfig(epsilon=0.1, optimization="lpo"))
print("lpo:  ", r.peel_groups, "trim passes", [t.trim_passes for t in r.trace])
