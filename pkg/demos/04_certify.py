"""Check the approximation bound against exhaustive search on small graphs."""
import numpy as np

from densepeel import PeelConfig, peel, resolve_metric
from densepeel.generators import random_graph
from densepeel.oracle import check_guarantee, exact_densest, reference_peel

rng = np.random.default_rng(1)

# %% one graph, all variants
g = random_graph(10, 0.5, rng)
m = resolve_metric("dw")
opt = exact_densest(g, m)
print("optimum", round(opt.optimum_density, 4), "on", opt.optimum_subset,
      f"({opt.subsets_examined} subsets)")
for eps in (0.0, 0.5):
    for mode in ("none", "gpo", "lpo"):
        r = peel(g, m, PeelConfig(epsilon=eps, optimization=mode))
        print(f"eps={eps} {mode:>4}:", check_guarantee(r, opt, m.k_multiplier, eps))

# %% the engine agrees with a from-scratch simulator
r = peel(g, resolve_metric("dg"), PeelConfig(epsilon=0.1, optimization="lpo"))
ref = reference_peel(g, resolve_metric("dg"), 0.1, "lpo")
print("trace identical:", r.trace == ref.trace)

# %% worst observed ratio over a batch of random graphs
worst = 1.0
for _ in range(100):
    g = random_graph(int(rng.integers(4, 12)), 0.4, rng)
    for name in ("dg", "tds"):
        m = resolve_metric(name)
        r = peel(g, m, PeelConfig(epsilon=0.5))
        rep = check_guarantee(r, exact_densest(g, m), m.k_multiplier, 0.5)
        assert rep.passed
        worst = min(worst, rep.ratio)
print(f"worst engine/optimum ratio: {worst:.3f} (bound allows {1 / 3 / 1.5:.3f})")
