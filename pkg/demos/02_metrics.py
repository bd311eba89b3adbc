"""Same graph, five ways of scoring it."""
import io

from densepeel import PeelConfig, load_edge_list, peel, resolve_metric, set_vertex_weights
from densepeel.metrics import custom_metric, initial_peeling_weights

# %% a weighted user->merchant graph; merchant 100 is shared by everyone
text = """\
1 100 5.0
2 100 4.0
3 100 6.0
1 2 1.0
2 3 1.0
1 3 1.0
4 101 0.5
5 101 0.5
"""
g = load_edge_list(io.StringIO(text), weighted=True)
g = set_vertex_weights(g, {1: 0.3, 2: 0.3, 3: 0.3})

# %% initial peeling weights under each metric
for name, kw in [("dg", {}), ("dw", {}), ("fd", {}), ("tds", {}), ("kclique", {"k": 4})]:
    m = resolve_metric(name, **kw)
    w, f = initial_peeling_weights(g, m)
    print(f"{m.name:>9}: f={float(f):.3f}  w={[round(float(x), 3) for x in w]}")

# %% fd discounts edges into popular objects: 1/ln(degree + c)
fd = resolve_metric("fd")
print([round(float(c), 4) for c in fd.edge_array(g)])

# %% detection under each metric
for name, kw in [("dg", {}), ("dw", {}), ("fd", {}), ("tds", {})]:
    m = resolve_metric(name, **kw)
    r = peel(g, m, PeelConfig(epsilon=0.0, optimization="lpo"))
    print(f"{name:>4}: {r.best_subset} density {r.best_density:.3f}")

# %% a custom metric only needs two nonnegative functions
heavy = custom_metric(lambda u, g: 0.0, lambda e, g: e.weight ** 2)
r = peel(g, heavy, PeelConfig(epsilon=0.0))
print("squared weights:", r.best_subset, round(r.best_density, 3))
