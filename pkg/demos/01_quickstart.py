"""Load an edge list, peel it, look at what came out."""
import io

import numpy as np

from densepeel import PeelConfig, load_edge_list, peel, resolve_metric

# %% a tiny graph: a 4-clique with one dangling vertex
text = """\
# src dst
1 2
1 3
1 4
2 3
2 4
3 4
4 5
"""
g = load_edge_list(io.StringIO(text))
print(g.vertex_count, "vertices,", g.edge_count, "edges")
print("degrees:", dict(zip(g.external_ids.tolist(), g.static_degrees.tolist())))

# %% peel with plain edge density
dg = resolve_metric("dg")
result = peel(g, dg, PeelConfig(epsilon=0.0))
print("best subset:", result.best_subset, "density", result.best_density)

# %% the trace shows what each round did
for rec in result.trace:
    print(f"round {rec.round}: {rec.alive_count} alive, density {rec.density:.3f}, "
          f"threshold {rec.threshold:.3f}, peeled {rec.peeled}")

# %% a bigger random graph with a planted dense block
rng = np.random.default_rng(0)
n = 2000
src = rng.integers(0, n, 8000)
dst = rng.integers(0, n, 8000)
block = np.arange(40)
bs, bd = np.triu_indices(len(block), 1)
keep = rng.random(len(bs)) < 0.8
lines = [f"{a} {b}" for a, b in zip(src, dst) if a != b]
lines += [f"{block[a]} {block[b]}" for a, b in zip(bs[keep], bd[keep])]
big = load_edge_list(lines, merge_duplicates=True)

r = peel(big, dg, PeelConfig(epsilon=0.1, optimization="lpo"))
found = set(r.best_subset)
print(f"{r.rounds} rounds, density {r.best_density:.2f}, {len(found)} vertices")
print("planted block recovered:", len(found & set(block.tolist())), "of", len(block))
