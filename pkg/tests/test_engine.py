import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import K4_PENDANT, parse
from corpus import EPSILONS, corpus, integer_metric, metric
from densepeel._parallel import Workers
from densepeel.engine import (
    DriftError,
    MetricPreconditionError,
    PeelConfig,
    PeelState,
    peel,
    peel_gpo,
    peel_lpo,
    peel_parallel,
    peel_sequential,
    refine_global_threshold,
    round_threshold,
)
from densepeel.generators import clique_with_pendant, complete_graph, gnm_random, random_graph
from densepeel.graph import Graph, induced_total_weight
from densepeel.metrics import custom_metric, resolve_metric
from densepeel.oracle import reference_peel

DG = resolve_metric("dg")
DW = resolve_metric("dw")

SIX = "1 2 1\n2 3 2\n3 4 1\n3 5 2.5\n4 5 2.5\n3 6 2.5\n4 6 2.5\n"


def state_for(g, metric, **cfg):
    return PeelState(g, metric, PeelConfig(**cfg), Workers(1))


# ---------------------------------------------------------------- sequential

def test_sequential_path_order():
    g = parse("1 2\n2 3\n")
    alive = []
    cfg = PeelConfig(epsilon=0.0, f_recheck_interval=1,
                     audit_hook=lambda s: alive.append(s.alive.indices().tolist()))
    r = peel_sequential(g, DG, cfg)
    assert alive == [[1, 2], [2], []]
    assert [t.threshold for t in r.trace] == [1.0, 1.0, 0.0]
    assert r.best_density == pytest.approx(2 / 3)
    assert r.best_subset == [1, 2, 3] and r.rounds == 3
    ref = reference_peel(g, DG, mode="sequential")
    assert [t.alive_count for t in r.trace] == [3, 2, 1]
    assert r.trace == ref.trace


def test_sequential_k4_pendant(k4p):
    r = peel_sequential(k4p, DG)
    assert r.best_subset == [1, 2, 3, 4] and r.best_density == 1.5
    assert r.trace[0].threshold == 1.0


def test_single_vertex_and_empty():
    g = Graph.from_edges([], [], n=1, external_ids=[42])
    r = peel_sequential(g, DG)
    assert (r.best_density, r.rounds, r.best_subset) == (0.0, 1, [42])
    r = peel_parallel(g, DG)
    assert (r.best_density, r.rounds) == (0.0, 1)
    e = Graph.from_edges([], [], n=0)
    for fn in (peel_sequential, peel_parallel, peel_gpo, peel_lpo):
        r = fn(e, DG)
        assert (r.best_subset, r.best_density, r.rounds) == ([], 0.0, 0)


# ---------------------------------------------------------------- parallel

@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("eps", [0.0, 0.1, 1.0])
@pytest.mark.parametrize("mode", ["none", "gpo", "lpo"])
def test_complete_graph_single_round(n, eps, mode):
    r = peel(complete_graph(n), DG, PeelConfig(epsilon=eps, optimization=mode))
    assert r.rounds == 1 and r.trace[0].peeled == n
    assert r.best_density == (n - 1) / 2 and len(r.best_subset) == n


def test_six_vertex_example():
    g = parse(SIX, weighted=True)
    r = peel_parallel(g, DW, PeelConfig(epsilon=0.0))
    first = r.trace[0]
    assert first.density == pytest.approx(14 / 6) and round(first.density, 2) == 2.33
    assert first.peeled == 2
    assert r.trace[1].density == 2.75
    assert r.best_subset == [3, 4, 5, 6] and r.best_density == 2.75
    st_ = state_for(g, DW)
    assert st_.weights[:2].tolist() == [1.0, 3.0]


def test_k4_pendant_matches_reference(k4p):
    for eps in EPSILONS:
        for mode in ("none", "gpo", "lpo"):
            r = peel(k4p, DG, PeelConfig(epsilon=eps, optimization=mode))
            ref = reference_peel(k4p, DG, eps, mode)
            assert r.trace == ref.trace and r.best_density == ref.best_density
            if eps == 0.0:
                assert r.best_density == 1.5


def test_gpo_threshold_example():
    tau_max = refine_global_threshold(0.0, 4.28, 2, 0.0)
    assert tau_max == pytest.approx(2.14)
    # later round: local threshold 2*0.9 = 1.8 would defer a weight-2 vertex
    tau = round_threshold(0.9, 2, 0.0, tau_max)
    assert tau == pytest.approx(2.14) and 2 <= tau and not 2 <= round_threshold(0.9, 2, 0.0)
    # tau_max only ever grows
    assert refine_global_threshold(tau_max, 1.0, 2, 0.0) == tau_max


def test_gpo_tail_binds_in_engine():
    # two disjoint parts: a K8 and a long path; the path tail is peeled with tau_max
    src, dst = [], []
    for i in range(8):
        for j in range(i + 1, 8):
            src.append(i)
            dst.append(j)
    for i in range(8, 40):
        src.append(i)
        dst.append(i + 1)
    g = Graph.from_edges(src, dst, n=41)
    none = peel_parallel(g, DG, PeelConfig(epsilon=0.0))
    gpo = peel_gpo(g, DG, PeelConfig(epsilon=0.0))
    assert gpo.best_density == none.best_density == 3.5
    assert gpo.rounds <= none.rounds


def test_lpo_trim_example(k4p):
    s = state_for(k4p, DG, optimization="lpo")
    assert s.g_current == 1.4
    assert s.trim_pass()
    assert s.alive.count == 4 and s.g_current == 1.5
    assert not s.trim_pass()
    assert s.alive.count == 4


def test_trim_global_variant_available(k4p):
    r = peel(k4p, DG, PeelConfig(epsilon=0.0, optimization="lpo", trim_global=True))
    ref = reference_peel(k4p, DG, 0.0, "lpo", trim_global=True)
    assert r.trace == ref.trace


def test_apply_removal_examples(weighted_path):
    s = state_for(weighted_path, DW)
    s.apply_removal(np.array([0]))
    assert s.weights[1] == 3 and s.f_current == 3
    s = state_for(weighted_path, DW)
    s.apply_removal(np.array([0, 1]))
    assert s.f_current == 0 == s.audit()
    s = state_for(weighted_path, DW)
    s.apply_removal(np.array([], dtype=np.int64))
    assert s.f_current == 4 and s.alive.count == 3
    s.apply_removal(np.array([0]))
    with pytest.raises(RuntimeError):
        s.apply_removal(np.array([0]))


def test_precondition_errors():
    g = parse("1 2\n")
    with pytest.raises(MetricPreconditionError, match="edge 1-2"):
        peel(g, custom_metric(lambda u, g: 0.0, lambda e, g: -1.0))
    with pytest.raises(MetricPreconditionError):
        peel_sequential(g, custom_metric(lambda u, g: math.inf, lambda e, g: 1.0))


def test_config_validation():
    with pytest.raises(ValueError):
        PeelConfig(epsilon=-0.1)
    with pytest.raises(ValueError):
        PeelConfig(threads=0)
    with pytest.raises(ValueError):
        PeelConfig(optimization="fast")
    assert PeelConfig(optimization="LPO").mode == "lpo"


def test_drift_detected():
    g = complete_graph(5)
    s = state_for(g, DG)
    s.f_current += 1.0
    with pytest.raises(DriftError):
        s.audit()


# ---------------------------------------------------------------- invariants

def _check_invariants(g, m, r, eps, mode):
    assert r.rounds == len(r.trace)
    n = g.vertex_count
    # nesting: round-start alive counts strictly decrease, batches are non-empty
    counts = [t.alive_count for t in r.trace]
    assert counts[0] == n and all(a > b for a, b in zip(counts, counts[1:]))
    assert all(t.peeled >= 1 for t in r.trace)
    assert r.rounds <= max(1, math.ceil(math.log(n) / math.log1p(eps))) if eps > 0 and n > 1 \
        else True
    # tau_max is monotone, so gpo/lpo thresholds never drop below an earlier tau_max
    if mode != "none":
        tmax = 0.0
        for t in r.trace:
            tmax = max(tmax, t.density / (m.k_multiplier * (1 + eps)))
            assert t.threshold >= tmax
    for t in r.trace:
        ds = [t.peeled_density] + list(t.trim_densities) if t.trim_densities else []
        assert all(b > a for a, b in zip(ds, ds[1:]))
    exact = induced_total_weight(g, _alive_of(g, r.best_indices), m) / len(r.best_indices)
    assert r.best_density == pytest.approx(exact, rel=1e-12)


def _alive_of(g, idx):
    from densepeel.graph import AliveSet
    return AliveSet.of(g.vertex_count, idx)


@pytest.mark.parametrize("name", ["dg", "dw", "fd", "tds", "k4"])
def test_engine_matches_reference_on_corpus(name):
    m = metric(name)
    for label, g in corpus()[::4]:
        for eps in EPSILONS:
            for mode in ("none", "gpo", "lpo"):
                r = peel(g, m, PeelConfig(epsilon=eps, optimization=mode, f_recheck_interval=1))
                ref = reference_peel(g, m, eps, mode)
                _check_invariants(g, m, r, eps, mode)
                assert r.best_subset == ref.best_subset, label
                if integer_metric(name):
                    assert r.trace == ref.trace, label
                    assert r.best_density == ref.best_density
                else:
                    assert [t.peeled for t in r.trace] == [t.peeled for t in ref.trace], label
                    assert r.best_density == pytest.approx(ref.best_density, rel=1e-12)
        rs = peel_sequential(g, m)
        ref = reference_peel(g, m, mode="sequential")
        assert [t.alive_count for t in rs.trace] == [t.alive_count for t in ref.trace]
        assert rs.best_density == pytest.approx(ref.best_density, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 14), st.floats(0.1, 0.9), st.integers(0, 2**31),
       st.sampled_from(["dg", "dw", "fd", "tds", "k4"]), st.sampled_from([0.0, 0.05, 0.5, 2.0]),
       st.sampled_from(["none", "gpo", "lpo"]))
def test_invariants_property(n, p, seed, name, eps, mode):
    g = random_graph(n, p, np.random.default_rng(seed))
    m = metric(name)
    r = peel(g, m, PeelConfig(epsilon=eps, optimization=mode, f_recheck_interval=1))
    _check_invariants(g, m, r, eps, mode)


@pytest.mark.parametrize("name", ["dg", "tds"])
@pytest.mark.parametrize("mode", ["none", "lpo"])
def test_thread_count_independence_large(name, mode):
    # more vertices than one reduction block, so several blocks are in play
    g = gnm_random(9000, 40000 if name == "dg" else 20000, seed=5, weighted=True)
    m = resolve_metric("dw") if name == "dg" else metric(name)
    runs = [peel(g, m, PeelConfig(epsilon=0.1, optimization=mode, threads=t)) for t in (1, 2, 8)]
    for r in runs[1:]:
        assert r.trace == runs[0].trace
        assert r.best_density == runs[0].best_density
        assert r.best_subset == runs[0].best_subset


def test_conservation_at_audit_points():
    seen = []

    def hook(s):
        alive = s.alive.mask
        w = s.weights[alive]
        if s.metric.clique_based:
            assert int(w.sum()) == s.metric.clique_size * s.f_current
        else:
            a = s.metric.vertex_array(s.graph)[alive].sum()
            c = s.f_current - a
            assert w.sum() == pytest.approx(a + 2 * c, rel=1e-9, abs=1e-9)
        seen.append(s.round_index)

    g = random_graph(12, 0.5, np.random.default_rng(0))
    for name in ("dg", "dw", "tds", "k4"):
        peel(g, metric(name), PeelConfig(epsilon=0.0, optimization="lpo", f_recheck_interval=1,
                                         audit_hook=hook))
    assert seen


def test_result_fields(k4p):
    r = peel_lpo(k4p, DG, PeelConfig(epsilon=0.0))
    assert r.best_indices.tolist() == [0, 1, 2, 3]
    assert r.peel_groups == [t.peeled for t in r.trace]
    assert r.config.mode == "lpo" and r.wall_time >= 0
    assert 1 <= r.best_round <= r.rounds
    assert K4_PENDANT.count("\n") == k4p.edge_count
