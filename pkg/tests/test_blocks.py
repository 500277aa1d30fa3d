import math
from fractions import Fraction

import numpy as np
import pytest

from quasifolkman.blocks import (
    AlonParams,
    ConstructionError,
    alon_parameters,
    assignment_value,
    blowup,
    blowup_concentration_log_bound,
    concentration_experiment,
    critical_delta,
    find_k4,
    instance_seed,
    least_prime_power_at_least,
    load_replacement,
    mcdiarmid_bound,
    min_mono_blowup,
    quantitative_bound,
    random_block,
    replacement_from_edges,
    replacement_registry,
    smallest_valid_alon_k,
    deletion_margin,
    verify_star_instance,
)
from quasifolkman.certify import canonical_edges
from quasifolkman.graphs import build_graph_for_q
from quasifolkman.triangles import build_family


@pytest.fixture(scope="module")
def g3():
    return build_graph_for_q(3)


@pytest.fixture(scope="module")
def fam3(g3):
    return build_family(g3)


# -- replacement graphs ------------------------------------------------------

def test_registry_alphas():
    reg = replacement_registry()
    assert reg["edge"].alpha == 1
    assert reg["path4"].alpha == 1  # bipartite
    assert reg["c5"].alpha == Fraction(4, 5)
    assert reg["petersen"].alpha == Fraction(4, 5)
    assert all(not F.valid_for_margin for F in reg.values())


def test_replacement_rejects_triangle():
    with pytest.raises(ConstructionError):
        replacement_from_edges("k3", 3, [(0, 1), (1, 2), (0, 2)])


def test_load_replacement_file(tmp_path):
    path = tmp_path / "F.txt"
    path.write_text("0 1\n1 2\n2 3\n3 0\n")  # C4
    F = load_replacement(str(path))
    assert F.n == 4 and F.m == 4
    assert F.alpha == 1
    with pytest.raises(ConstructionError):
        load_replacement("no-such-graph")


# -- blowups ------------------------------------------------------------------

def test_blowup_counts():
    reg = replacement_registry()
    nt, adj = blowup(reg["c5"], 2)
    assert nt == 10
    assert canonical_edges(adj)[0].shape[0] == 20  # m t^2
    nt1, adj1 = blowup(reg["c5"], 1)
    assert np.array_equal(adj1, reg["c5"].adj)


@pytest.mark.parametrize("name,t,expect", [("c5", 1, 1), ("c5", 2, 4), ("edge", 1, 0), ("edge", 2, 0), ("path4", 1, 0), ("path4", 2, 0)])
def test_min_mono_blowup_exhaustive_matches_formula(name, t, expect):
    F = replacement_registry()[name]
    formula = min_mono_blowup(F, t, mode="formula")
    exhaustive = min_mono_blowup(F, t, mode="exhaustive")
    assert formula == exhaustive == expect


def test_min_mono_blowup_size_limit():
    F = replacement_registry()["petersen"]
    with pytest.raises(ValueError):
        min_mono_blowup(F, 3, mode="exhaustive")


def test_blowup_mono_count_swap_symmetric():
    # monochromatic edge counts are invariant under global color swap
    F = replacement_registry()["c5"]
    nt, adj = blowup(F, 2)
    u, v = canonical_edges(adj)
    rng = np.random.default_rng(1)
    for _ in range(20):
        chi = rng.integers(0, 2, size=nt).astype(bool)
        mono = int((chi[u] == chi[v]).sum())
        swapped = ~chi
        assert int((swapped[u] == swapped[v]).sum()) == mono
        assert mono >= min_mono_blowup(F, 2, mode="formula")


# -- assignments and instances -------------------------------------------------

def test_assignment_deterministic():
    a = assignment_value(42, 7, 13, 5)
    assert a == assignment_value(42, 7, 13, 5)
    assert 0 <= a < 5
    assert assignment_value(43, 7, 13, 5) != a or assignment_value(43, 7, 14, 5) != a


def test_assignment_roughly_uniform():
    counts = np.zeros(5, dtype=int)
    for v in range(5000):
        counts[assignment_value(0, 1, v, 5)] += 1
    assert counts.min() > 800 and counts.max() < 1200


def test_random_block_reproducible(g3):
    F = replacement_registry()["edge"]
    a = random_block(g3, F, seed=5)
    b = random_block(g3, F, seed=5)
    assert np.array_equal(a.edge_mask, b.edge_mask)
    c = random_block(g3, F, seed=6)
    assert not np.array_equal(a.edge_mask, c.edge_mask)


def test_star_instance_checks(g3, fam3):
    F = replacement_registry()["edge"]
    star = random_block(g3, F, seed=1)
    rep = verify_star_instance(star, fam3)
    assert rep["k4_free"], rep["k4_witness"]
    assert rep["cliques_triangle_free"]
    # surviving triangles are exactly the family triangles with live edges
    assert rep["surviving_family_triangles"] == rep["surviving_triangles_direct"]


def test_star_survival_rate_near_expectation(g3):
    F = replacement_registry()["edge"]
    rates = [random_block(g3, F, instance_seed(0, t)).survival_rate() for t in range(60)]
    rates = np.array(rates)
    expect = 2 * F.m / F.n**2  # 1/2
    stderr = rates.std(ddof=1) / math.sqrt(len(rates))
    assert abs(rates.mean() - expect) <= 3 * stderr + 1e-12


def test_star_c5_survival(g3):
    F = replacement_registry()["c5"]
    rates = np.array(
        [random_block(g3, F, instance_seed(3, t)).survival_rate() for t in range(60)]
    )
    expect = 2 * 5 / 25  # 0.4
    stderr = rates.std(ddof=1) / math.sqrt(len(rates))
    assert abs(rates.mean() - expect) <= 3 * stderr + 1e-12


def test_expected_surviving_triangles(g3, fam3):
    F = replacement_registry()["edge"]
    counts = []
    for t in range(60):
        star = random_block(g3, F, instance_seed(9, t))
        te = fam3.triangle_edge_matrix()
        counts.append(int(star.edge_mask[te].all(axis=1).sum()))
    counts = np.array(counts, dtype=float)
    expect = (2 * F.m / F.n**2) ** 3 * fam3.total  # (1/2)^3 * 3024
    stderr = counts.std(ddof=1) / math.sqrt(len(counts))
    assert abs(counts.mean() - expect) <= 3 * stderr


def test_find_k4_positive_control():
    rows = [0] * 5
    for u in range(4):
        for v in range(4):
            if u != v:
                rows[u] |= 1 << v
    assert find_k4(rows, 5) == (0, 1, 2, 3)
    rows[0] &= ~(1 << 1)
    rows[1] &= ~(1 << 0)
    assert find_k4(rows, 5) is None


# -- concentration -----------------------------------------------------------

def test_concentration_experiment(g3):
    F = replacement_registry()["edge"]
    rep = concentration_experiment(g3, F, trials=40, samples_per_trial=25, delta=1.0, seed=2)
    assert rep["expectation"] == pytest.approx(2 * 1 * 4 / 8)  # (q+1)/4 = 1.0
    assert abs(rep["mean"] - rep["expectation"]) <= 3 * rep["stderr"]
    assert rep["vacuous"] is False
    rep5 = concentration_experiment(g3, replacement_registry()["c5"], trials=10, samples_per_trial=10, seed=3)
    assert rep5["vacuous"] is True  # 2*5*4/125 < 1


def test_concentration_requires_trials(g3):
    with pytest.raises(ValueError):
        concentration_experiment(g3, replacement_registry()["edge"], trials=0)


# -- bounded differences -----------------------------------------------------

def test_mcdiarmid_vacuous_at_zero_delta():
    bound, log_bound = mcdiarmid_bound(5.0, [1.0] * 4, 0.0)
    assert bound == pytest.approx(2.0)
    assert log_bound == pytest.approx(math.log(2.0))


def test_mcdiarmid_matches_closed_form():
    rng = np.random.default_rng(0)
    for _ in range(10):
        q = int(rng.integers(2, 50))
        n = int(rng.integers(2, 40))
        m = int(rng.integers(1, n * (n - 1) // 2 + 1))
        delta = float(rng.uniform(0.01, 1.0))
        expectation = 2 * m * (q + 1) / n**3
        _, log_bound = mcdiarmid_bound(expectation, [1.0] * (3 * (q + 1)), delta)
        assert log_bound == pytest.approx(blowup_concentration_log_bound(q, n, m, delta), rel=1e-12)


def test_mcdiarmid_monotone():
    b1, _ = mcdiarmid_bound(5.0, [1.0] * 4, 0.2)
    b2, _ = mcdiarmid_bound(5.0, [1.0] * 4, 0.4)
    b3, _ = mcdiarmid_bound(10.0, [1.0] * 4, 0.2)
    assert b2 < b1 and b3 < b1
    # doubling E scales the exponent by 4
    _, l1 = mcdiarmid_bound(5.0, [1.0] * 4, 0.2)
    _, l2 = mcdiarmid_bound(10.0, [1.0] * 4, 0.2)
    assert (l2 - math.log(2)) == pytest.approx(4 * (l1 - math.log(2)))


# -- margin ------------------------------------------------------------------

def test_critical_delta_alpha_half():
    expect = (math.sqrt(3) - math.sqrt(2)) / (math.sqrt(3) + math.sqrt(2))
    assert critical_delta(0.5) == pytest.approx(expect)
    assert critical_delta(0.5) == pytest.approx(0.101, abs=5e-4)


def test_margin_positive_at_zero_delta():
    cert = deletion_margin(q=4, n=100, m=300, alpha=Fraction(1, 2), delta=0)
    assert cert.outcome == "pass"
    assert cert.margin > 0


def test_margin_boundary_alpha_two_thirds_rejected():
    with pytest.raises(ConstructionError):
        deletion_margin(q=4, n=10, m=20, alpha=Fraction(2, 3), delta=0)


def test_margin_zero_just_below_boundary():
    # margin at delta = 0 is proportional to (1 - alpha) - 1/3
    cert = deletion_margin(q=4, n=10, m=20, alpha=Fraction(2, 3) - Fraction(1, 10**9), delta=0)
    assert cert.outcome == "pass"
    assert 0 < cert.margin < 1


def test_margin_sign_flips_past_critical_delta():
    alpha = Fraction(1, 2)
    dstar = critical_delta(alpha)
    assert deletion_margin(4, 100, 300, alpha, Fraction(9, 100)).outcome == "pass"
    assert deletion_margin(4, 100, 300, alpha, Fraction(11, 100)).outcome == "fail"
    assert 0.09 < dstar < 0.11


# -- pseudorandom parameters and the quantitative bound ------------------------

def test_alon_k7():
    p = alon_parameters(7)
    assert p.n == 2**21
    assert p.m == 2**26 * 63
    assert p.valid
    assert p.ratio == pytest.approx(0.647, abs=2e-3)


def test_alon_invalid_ks():
    for k in (1, 2, 4, 5):
        assert not alon_parameters(k).valid
    with pytest.raises(ValueError):
        alon_parameters(3)
    with pytest.raises(ValueError):
        alon_parameters(6)


def test_smallest_valid_k_is_7():
    assert smallest_valid_alon_k() == 7


def test_prime_power_search():
    assert least_prime_power_at_least(100) == 101
    assert least_prime_power_at_least(121) == 121  # 11^2
    assert least_prime_power_at_least(126) == 127
    assert least_prime_power_at_least(2) == 2


def test_quantitative_bound_order_of_magnitude():
    p = alon_parameters(7)
    out = quantitative_bound(p.n, p.m, delta=1.0)
    assert 66 <= out["log2_q"] <= 74  # within 2^4 of 2^70
    assert 264 <= out["log2_f_bound"] <= 296  # within 2^16 of 2^280
    exact = quantitative_bound(p.n, p.m, delta=1.0, exact_union=True)
    assert exact["q"] <= out["q"]


def test_quantitative_bound_monotone_in_m():
    p = alon_parameters(7)
    out1 = quantitative_bound(p.n, p.m, delta=1.0)
    out2 = quantitative_bound(p.n, 2 * p.m, delta=1.0)
    assert out2["q"] < out1["q"]


def test_quantitative_bound_delta_raises_q():
    p = alon_parameters(7)
    big = quantitative_bound(p.n, p.m, delta=0.5)
    assert big["q"] > quantitative_bound(p.n, p.m, delta=1.0)["q"]
    with pytest.raises(ValueError):
        quantitative_bound(p.n, p.m, delta=0.0)
