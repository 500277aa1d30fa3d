"""Random block construction: blowups, assignments, and the margin math.

Each point clique is replaced by a random blowup of a fixed triangle-free
replacement graph F: every (vertex, clique) incidence independently draws a
uniform label in [n], and an edge survives iff its endpoints' labels in the
edge's clique form an edge of F.  Blowups of a triangle-free graph are
triangle-free, so every K4 dies; each original edge survives with
probability 2m/n^2.

The Ramsey margin survives the deletion when maxcut(F) < (2/3)|E(F)|: a
two-colored blowup keeps at least (1-alpha) m t^2 monochromatic edges
(multilinearity pushes the minimum to corner colorings), and the
concentration of the surviving spanning-clique blocks around 2m(q+1)/n^3
(bounded differences over 3(q+1) unit-effect variables) turns that into a
positive monochromatic-triangle bound for large q.  No known small F beats
alpha = 2/3, so at desk scale the margin arithmetic is validated through
the formula path while the construction itself is validated by Monte Carlo.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .certificates import Certificate
from .certify import canonical_edges, maxcut_exact
from .graphs import IntersectionGraph
from .triangles import TriangleFamily


class ConstructionError(ValueError):
    pass


# ----------------------------------------------------------------------
# Replacement graphs
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ReplacementGraph:
    """Triangle-free replacement graph with its exact max-cut ratio."""

    name: str
    n: int
    edges: tuple[tuple[int, int], ...]
    maxcut: int
    alpha: Fraction

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def adj(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            a[u, v] = a[v, u] = True
        return a

    @property
    def valid_for_margin(self) -> bool:
        return self.alpha < Fraction(2, 3)


def _has_triangle(adj: np.ndarray) -> bool:
    a = adj.astype(np.int64)
    return bool(np.trace(a @ a @ a) > 0)


def replacement_from_edges(name: str, n: int, edges) -> ReplacementGraph:
    """Verify triangle-freeness and compute alpha exactly; never trust input."""
    edges = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
    if len(set(edges)) != len(edges):
        raise ConstructionError("duplicate edges in replacement graph")
    if any(u == v or u < 0 or v >= n for u, v in edges):
        raise ConstructionError("edge endpoints out of range")
    adj = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        adj[u, v] = adj[v, u] = True
    if _has_triangle(adj):
        raise ConstructionError(f"replacement graph {name!r} contains a triangle")
    if not edges:
        raise ConstructionError("replacement graph needs at least one edge")
    cut, _ = maxcut_exact(adj)
    return ReplacementGraph(
        name=name, n=n, edges=edges, maxcut=cut, alpha=Fraction(cut, len(edges))
    )


def _petersen_edges():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return outer + spokes + inner


def replacement_registry() -> dict[str, ReplacementGraph]:
    return {
        "edge": replacement_from_edges("edge", 2, [(0, 1)]),
        "path4": replacement_from_edges("path4", 4, [(0, 1), (1, 2), (2, 3)]),
        "c5": replacement_from_edges("c5", 5, [(i, (i + 1) % 5) for i in range(5)]),
        "petersen": replacement_from_edges("petersen", 10, _petersen_edges()),
    }


def load_replacement(name_or_path: str) -> ReplacementGraph:
    """Registry name, or a path to an edge-list file (one 'u v' per line)."""
    reg = replacement_registry()
    if name_or_path in reg:
        return reg[name_or_path]
    try:
        with open(name_or_path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConstructionError(f"unknown replacement graph {name_or_path!r}") from exc
    edges = []
    for line in text.strip().split("\n"):
        if not line.strip() or line.startswith("#"):
            continue
        u, v = (int(t) for t in line.split())
        edges.append((u, v))
    n = 1 + max(max(e) for e in edges)
    return replacement_from_edges(name_or_path, n, edges)


# ----------------------------------------------------------------------
# Blowups
# ----------------------------------------------------------------------

def blowup(F: ReplacementGraph, t: int) -> tuple[int, np.ndarray]:
    """t-blowup: nt vertices, mt^2 edges; vertex (i, a) -> i*t + a."""
    if t < 1:
        raise ValueError("t must be >= 1")
    nt = F.n * t
    adj = np.zeros((nt, nt), dtype=bool)
    for i, j in F.edges:
        adj[i * t : (i + 1) * t, j * t : (j + 1) * t] = True
        adj[j * t : (j + 1) * t, i * t : (i + 1) * t] = True
    return nt, adj


EXHAUSTIVE_BLOWUP_LIMIT = 25


def min_mono_blowup(F: ReplacementGraph, t: int, mode: str = "formula"):
    """Least monochromatic edge count over vertex 2-colorings of the blowup.

    formula: (1 - alpha) m t^2 = (m - maxcut(F)) t^2, exact.
    exhaustive: brute force over all 2^{nt} colorings (nt <= 25), plus the
    corner check that a per-class-monochromatic coloring attains the
    minimum.
    """
    if mode == "formula":
        return (F.m - F.maxcut) * t * t
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    nt, adj = blowup(F, t)
    if nt > EXHAUSTIVE_BLOWUP_LIMIT:
        raise ValueError(f"exhaustive mode needs nt <= {EXHAUSTIVE_BLOWUP_LIMIT}, got {nt}")
    eu, ev = canonical_edges(adj)
    cut, _ = maxcut_exact(adj)
    exhaustive_min = len(eu) - cut
    # corner colorings reduce to colorings of F itself
    corner_min = (F.m - F.maxcut) * t * t
    if exhaustive_min != corner_min:
        raise ConstructionError(
            f"blowup minimum {exhaustive_min} differs from corner minimum {corner_min}"
        )
    return exhaustive_min


# ----------------------------------------------------------------------
# Random assignments and star instances
# ----------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def _hash64(*parts: int) -> int:
    data = b"".join(struct.pack("<Q", p & _MASK64) for p in parts)
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def assignment_value(seed: int, clique_id: int, vertex_id: int, n: int) -> int:
    """Label in [0, n) for the (vertex, clique) incidence; order-independent
    and reproducible given the seed."""
    return _hash64(seed, clique_id, vertex_id) % n


def instance_seed(seed: int, trial: int) -> int:
    return _hash64(seed, 0xB10C, trial)


@dataclass
class StarGraph:
    """One instance of the construction: the surviving edge subset."""

    base: IntersectionGraph
    F: ReplacementGraph
    seed: int
    labels: np.ndarray  # (n, q+1), aligned with base.vertex_cliques
    edge_mask: np.ndarray  # (m,) bool over canonical edges

    @property
    def num_edges(self) -> int:
        return int(self.edge_mask.sum())

    def survival_rate(self) -> float:
        return float(self.edge_mask.mean())

    def adjacency(self) -> np.ndarray:
        g = self.base
        adj = np.zeros((g.n, g.n), dtype=bool)
        u = g.eu[self.edge_mask]
        v = g.ev[self.edge_mask]
        adj[u, v] = adj[v, u] = True
        return adj

    def adj_bits(self) -> list[int]:
        g = self.base
        rows = [0] * g.n
        for u, v in zip(g.eu[self.edge_mask], g.ev[self.edge_mask]):
            rows[int(u)] |= 1 << int(v)
            rows[int(v)] |= 1 << int(u)
        return rows

    def label_of(self, vertex: int, clique_id: int) -> int:
        slot = int(np.searchsorted(self.base.vertex_cliques[vertex], clique_id))
        assert self.base.vertex_cliques[vertex, slot] == clique_id
        return int(self.labels[vertex, slot])


def random_block(g: IntersectionGraph, F: ReplacementGraph, seed: int) -> StarGraph:
    """Draw one instance; per-edge survival probability is 2m/n^2."""
    if _has_triangle(F.adj):
        raise ConstructionError("replacement graph must be triangle-free")
    n_atoms, slots = g.vertex_cliques.shape
    labels = np.empty((n_atoms, slots), dtype=np.int32)
    for v in range(n_atoms):
        for j in range(slots):
            labels[v, j] = assignment_value(seed, int(g.vertex_cliques[v, j]), v, F.n)
    ep = g.edge_point
    slot_u = (g.vertex_cliques[g.eu] == ep[:, None]).argmax(axis=1)
    slot_v = (g.vertex_cliques[g.ev] == ep[:, None]).argmax(axis=1)
    lu = labels[g.eu, slot_u]
    lv = labels[g.ev, slot_v]
    edge_mask = F.adj[lu, lv]
    return StarGraph(base=g, F=F, seed=seed, labels=labels, edge_mask=edge_mask)


def find_k4(rows: list[int], n: int) -> tuple[int, int, int, int] | None:
    """First K4 (lexicographic) in a bitmask adjacency, or None."""
    for u in range(n):
        ru = rows[u]
        hi_u = ru >> (u + 1) << (u + 1)
        mu = hi_u
        while mu:
            vb = mu & -mu
            mu ^= vb
            v = vb.bit_length() - 1
            cm = ru & rows[v]
            cm = cm >> (v + 1) << (v + 1)
            mw = cm
            while mw:
                wb = mw & -mw
                mw ^= wb
                w = wb.bit_length() - 1
                mx = cm & rows[w]
                mx = mx >> (w + 1) << (w + 1)
                if mx:
                    x = (mx & -mx).bit_length() - 1
                    return (u, v, w, x)
    return None


def verify_star_instance(star: StarGraph, fam: TriangleFamily | None = None) -> dict:
    """Per-instance checks: K4-freeness, no triangle inside any point clique,
    and (with the family) that surviving triangles are exactly the
    non-degenerate triangles whose three edges survived."""
    g = star.base
    rows = star.adj_bits()
    k4 = find_k4(rows, g.n)
    out = {
        "k4_witness": k4,
        "k4_free": k4 is None,
        "num_edges": star.num_edges,
        "survival_rate": star.survival_rate(),
    }
    clique_triangle = None
    for cid, members in enumerate(g.cliques):
        ms = list(map(int, members))
        for ai in range(len(ms)):
            a = ms[ai]
            for bi in range(ai + 1, len(ms)):
                b = ms[bi]
                if not (rows[a] >> b) & 1:
                    continue
                for ci in range(bi + 1, len(ms)):
                    c = ms[ci]
                    if (rows[a] >> c) & 1 and (rows[b] >> c) & 1:
                        clique_triangle = (cid, a, b, c)
                        break
                if clique_triangle:
                    break
            if clique_triangle:
                break
        if clique_triangle:
            break
    out["clique_triangle"] = clique_triangle
    out["cliques_triangle_free"] = clique_triangle is None
    if fam is not None and fam.triangles is not None:
        te = fam.triangle_edge_matrix()
        surviving = star.edge_mask[te].all(axis=1)
        out["surviving_family_triangles"] = int(surviving.sum())
        # direct scan: triangles of the star graph
        adj = star.adjacency()
        a = adj.astype(np.int64)
        out["surviving_triangles_direct"] = int(np.trace(a @ a @ a) // 6)
    return out


# ----------------------------------------------------------------------
# Concentration experiment
# ----------------------------------------------------------------------

def concentration_experiment(
    g: IntersectionGraph,
    F: ReplacementGraph,
    trials: int,
    samples_per_trial: int = 50,
    delta: float = 0.5,
    seed: int = 0,
) -> dict:
    """Measure |V_i(C) ∩ N*(v)| over sampled (v, spanning clique, label)
    triples across independent instances and compare with 2m(q+1)/n^3."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    q = g.q
    rng = np.random.default_rng(seed)
    expectation = 2 * F.m * (q + 1) / F.n**3
    values = []
    for t in range(trials):
        star = random_block(g, F, instance_seed(seed, t))
        vs = rng.integers(0, g.n, size=samples_per_trial)
        cliq = rng.integers(0, q**3 - q, size=samples_per_trial)
        lab = rng.integers(0, F.n, size=samples_per_trial)
        for v, ci, i in zip(vs, cliq, lab):
            v = int(v)
            sc = g.spanning_cliques_of(v)
            members = sc[int(ci)]
            # the members' shared off-secant point hosts this spanning clique
            e0 = g.edge_index(min(int(members[0]), int(members[1])), max(int(members[0]), int(members[1])))
            cid0 = int(g.edge_point[e0])
            count = 0
            for w in map(int, members):
                lo, hi = (v, w) if v < w else (w, v)
                if not star.edge_mask[g.edge_index(lo, hi)]:
                    continue
                if star.label_of(w, cid0) == int(i):
                    count += 1
            values.append(count)
    values = np.array(values, dtype=np.float64)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else float("nan")
    lo_w = (1 - delta) * expectation
    hi_w = (1 + delta) * expectation
    within = float(((values >= lo_w) & (values <= hi_w)).mean())
    return {
        "q": q,
        "F": F.name,
        "trials": trials,
        "samples": int(len(values)),
        "expectation": expectation,
        "mean": mean,
        "stderr": stderr,
        "delta": delta,
        "within_window_fraction": within,
        "vacuous": expectation < 1.0,
    }


# ----------------------------------------------------------------------
# Bounded-differences bound and the margin
# ----------------------------------------------------------------------

def mcdiarmid_bound(expectation: float, c: np.ndarray | list[float], delta: float) -> tuple[float, float]:
    """(bound, log_bound) for P[|f - E| >= delta E] <= 2 exp(-2 d^2 E^2 / sum c_i^2)."""
    if expectation <= 0:
        raise ValueError("expectation must be positive")
    c = np.asarray(c, dtype=np.float64)
    if (c <= 0).any():
        raise ValueError("difference bounds must be positive")
    log_bound = math.log(2.0) - 2.0 * delta * delta * expectation * expectation / float((c * c).sum())
    return math.exp(log_bound), log_bound


def blowup_concentration_log_bound(q: int, n: int, m: int, delta: float) -> float:
    """log of 2 exp(-8 d^2 m^2 (q+1) / (3 n^6)): the bounded-differences
    bound at expectation 2m(q+1)/n^3 with 3(q+1) unit-effect variables."""
    return math.log(2.0) - 8.0 * delta * delta * m * m * (q + 1) / (3.0 * n**6)


def critical_delta(alpha) -> float:
    """Largest delta with (1-d)^2 (1-alpha) > (1+d)^2 / 3, for alpha < 2/3."""
    a = float(alpha)
    if a >= 2.0 / 3.0:
        raise ConstructionError("alpha must be < 2/3")
    r = math.sqrt(3.0 * (1.0 - a))
    return (r - 1.0) / (r + 1.0)


def deletion_margin(q: int, n: int, m: int, alpha, delta) -> Certificate:
    """Exact evaluation of the deletion-construction monochromatic margin:

    (1/2) n_V [ (1-a) m (q^3-q) ((1-d) 2m(q+1)/n^3)^2
                - (1/3) m (q^3-q) ((1+d) 2m(q+1)/n^3)^2 ].
    """
    alpha = Fraction(alpha)
    if alpha >= Fraction(2, 3):
        raise ConstructionError(f"alpha = {alpha} >= 2/3: construction invalid for this method")
    delta = Fraction(delta)
    n_v = q**4 - q**3 + q**2
    blocks = m * (q**3 - q)
    base = Fraction(2 * m * (q + 1), n**3)
    lower = (1 - alpha) * blocks * ((1 - delta) * base) ** 2
    upper = Fraction(1, 3) * blocks * ((1 + delta) * base) ** 2
    margin = Fraction(1, 2) * n_v * (lower - upper)
    dstar = critical_delta(alpha)
    if margin > 0:
        outcome = "pass"
    elif margin == 0:
        outcome = "inconclusive"
    else:
        outcome = "fail"
    return Certificate(
        claim="deletion construction keeps a positive monochromatic-triangle margin",
        params={"q": q, "F_vertices": n, "F_edges": m, "alpha": alpha, "delta": delta},
        quantities={
            "margin": margin,
            "margin_float": float(margin),
            "critical_delta": dstar,
            "expected_block_size": float(base),
        },
        margin=margin,
        outcome=outcome,
    )


# ----------------------------------------------------------------------
# Pseudorandom triangle-free parameters and the quantitative bound
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AlonParams:
    k: int
    n: int
    m: int
    maxcut_upper: float
    ratio: float

    @property
    def valid(self) -> bool:
        return self.ratio < 2 / 3


def alon_parameters(k: int) -> AlonParams:
    """Parameters of the optimally pseudorandom triangle-free graphs on
    2^{3k} vertices (defined for k not divisible by 3)."""
    if k < 1 or k % 3 == 0:
        raise ValueError("k must be a positive integer with k % 3 != 0")
    n = 2 ** (3 * k)
    half = 2 ** (k - 1)
    m = 2 ** (4 * k - 2) * (half - 1)
    maxcut_upper = 0.25 * n * (half * (half - 1) + 9 * 2**k + 3 * 2 ** (k / 2) + 0.25)
    ratio = maxcut_upper / m if m else float("inf")
    return AlonParams(k=k, n=n, m=m, maxcut_upper=maxcut_upper, ratio=ratio)


def smallest_valid_alon_k(limit: int = 30) -> int:
    for k in range(1, limit + 1):
        if k % 3 == 0:
            continue
        if alon_parameters(k).valid:
            return k
    raise RuntimeError(f"no valid k up to {limit}")


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_PROVEN = 3_317_044_064_679_887_385_961_981  # deterministic below this
_MR_EXTRA = (41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


def _is_prime_big(n: int) -> bool:
    """Miller-Rabin: deterministic below 3.3e24, near-certain above."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    bases = _MR_BASES if n < _MR_PROVEN else _MR_BASES + _MR_EXTRA
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _iroot(x: int, e: int) -> int:
    """Floor of the e-th root."""
    if x < 0:
        raise ValueError
    if x == 0:
        return 0
    r = int(round(x ** (1.0 / e)))
    while r**e > x:
        r -= 1
    while (r + 1) ** e <= x:
        r += 1
    return r


def _next_prime(n: int) -> int:
    if n <= 2:
        return 2
    c = n if n % 2 else n + 1
    while not _is_prime_big(c):
        c += 2
    return c


def least_prime_power_at_least(x: int) -> int:
    """Smallest prime power >= x."""
    best = _next_prime(x)
    e = 2
    while (1 << e) <= best:
        p = _next_prime(max(2, _iroot(x - 1, e) + 1))
        best = min(best, p**e)
        e += 1
    return best


def quantitative_bound(n: int, m: int, delta: float = 1.0, exact_union: bool = False) -> dict:
    """Smallest prime power q making the failure probability bound
    2 exp(-(8 d^2 m^2 / 3n^6) q + union_log) drop below 1, and the
    resulting q^4 - q^3 + q^2 bound on the order of the deletion graph.

    union_log is 7 ln(nq) for the nq^7 union-bound count; exact_union
    replaces it with ln((q^4-q^3+q^2)(q^3-q) n).  delta enters as d^2;
    reproducing the headline desk arithmetic treats the concentration
    window as order one (delta = 1).
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    coeff = 8.0 * delta * delta / 3.0 * float(Fraction(m * m, n**6))

    def satisfied(qv: int) -> bool:
        if qv < 2:
            return False
        if exact_union:
            union_log = math.log((qv**4 - qv**3 + qv**2) * (qv**3 - qv) * n)
        else:
            union_log = 7.0 * (math.log(n) + math.log(qv))
        return coeff * qv > math.log(2.0) + union_log

    lo, hi = 1, 1
    while not satisfied(hi):
        hi *= 2
        if hi > 1 << 400:
            raise RuntimeError("no satisfying q below 2^400")
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if satisfied(mid):
            hi = mid
        else:
            lo = mid
    q = least_prime_power_at_least(hi)
    assert satisfied(q)
    f_bound = q**4 - q**3 + q**2
    return {
        "q": q,
        "log2_q": math.log2(q),
        "f_bound": f_bound,
        "log2_f_bound": math.log2(f_bound),
        "delta": delta,
        "exact_union": exact_union,
    }
