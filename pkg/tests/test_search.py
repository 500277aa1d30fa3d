import numpy as np
import pytest

from quasifolkman.certify import EdgeColoring, batch_mono_counts, goodman_count
from quasifolkman.graphs import build_graph_for_q
from quasifolkman.search import (
    AnnealSchedule,
    anneal,
    edge_triangle_index,
    flip_delta,
    random_coloring_stats,
)
from quasifolkman.triangles import build_family


@pytest.fixture(scope="module")
def setup3():
    g = build_graph_for_q(3)
    fam = build_family(g)
    return g, fam, edge_triangle_index(fam)


def test_partner_table_shape(setup3):
    g, fam, (a1, a2) = setup3
    assert a1.shape == (g.m, 9)
    assert a2.shape == (g.m, 9)


def test_all_red_delta_is_minus_triangle_count(setup3):
    g, fam, (a1, a2) = setup3
    bits = np.zeros(g.m, dtype=bool)
    for e in (0, 17, 500):
        # flipping any edge of an all-red coloring kills exactly the
        # non-degenerate triangles through it
        assert flip_delta(bits, e, a1, a2) == -9


def test_flip_twice_nets_zero(setup3):
    g, fam, (a1, a2) = setup3
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, size=g.m).astype(bool)
    for e in rng.integers(0, g.m, size=20):
        d1 = flip_delta(bits, int(e), a1, a2)
        bits[e] ^= True
        d2 = flip_delta(bits, int(e), a1, a2)
        bits[e] ^= True
        assert d1 + d2 == 0


def test_deltas_match_recounts(setup3):
    g, fam, (a1, a2) = setup3
    rng = np.random.default_rng(7)
    bits = rng.integers(0, 2, size=g.m).astype(bool)
    base = goodman_count(fam, EdgeColoring(g, bits)).monochromatic
    for e in rng.integers(0, g.m, size=300):
        d = flip_delta(bits, int(e), a1, a2)
        bits[e] ^= True
        after = goodman_count(fam, EdgeColoring(g, bits)).monochromatic
        assert after - base == d
        base = after


def test_anneal_zero_steps_returns_initial(setup3):
    g, fam, _ = setup3
    res = anneal(g, fam, AnnealSchedule(steps=0), seed=3, restarts=2)
    # objective equals the exact count of the returned coloring
    assert res.best.objective == goodman_count(fam, res.best.coloring).monochromatic
    assert res.accepted == 0


def test_anneal_reproducible(setup3):
    g, fam, _ = setup3
    r1 = anneal(g, fam, AnnealSchedule(steps=2000), seed=11, restarts=3)
    r2 = anneal(g, fam, AnnealSchedule(steps=2000), seed=11, restarts=3)
    assert r1.best.objective == r2.best.objective
    assert np.array_equal(r1.best.coloring.bits, r2.best.coloring.bits)
    assert np.array_equal(r1.objectives, r2.objectives)


def test_anneal_improves_over_random(setup3):
    g, fam, _ = setup3
    res = anneal(g, fam, AnnealSchedule(steps=4000), seed=1, restarts=4)
    stats = random_coloring_stats(fam, trials=50, seed=1)
    assert res.best.objective < stats.mean_fraction * fam.total
    # internal revalidation path
    res2 = anneal(g, fam, AnnealSchedule(steps=500), seed=2, restarts=2, revalidate_every=100)
    assert res2.best.objective >= 0


def test_anneal_q4_respects_certified_bound():
    g = build_graph_for_q(4)
    fam = build_family(g)
    res = anneal(g, fam, AnnealSchedule(steps=3000), seed=5, restarts=2)
    assert res.best.objective >= 4160


def test_random_coloring_stats_q3(setup3):
    g, fam, _ = setup3
    stats = random_coloring_stats(fam, trials=400, seed=9)
    assert abs(stats.mean_fraction - 0.25) <= 3 * stats.stderr
    with pytest.raises(ValueError):
        random_coloring_stats(fam, trials=1, seed=0)
