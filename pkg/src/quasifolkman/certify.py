"""Exact monochromatic-triangle certificates via Goodman-style counting.

For a two-coloring of the edges and a vertex v, color each neighbor w by the
color of edge (v, w).  Counting same-colored pairs inside the spanning
cliques of v's neighborhood gives the number of family triangles at v whose
two v-incident edges agree; summing over v counts every monochromatic family
triangle three times and every non-monochromatic one once, hence

    monochromatic = (sum_v same(v) - |family|) / 2.

Each spanning clique has q+1 vertices, so it contributes at least
min_{a+b=q+1} C(a,2) + C(b,2) same-colored pairs no matter the coloring.
That convexity minimum, taken over all n(q^3-q) spanning cliques, yields an
exact integer lower bound L(q) on the monochromatic count of *every*
coloring; L(q) > 0 certifies the Ramsey property for the family.  The
integer minimum is used for pass/fail (the real-valued relaxation
(q+1)^2/4 - (q+1)/2 is reported alongside; the two coincide for odd q).

All certificate arithmetic is exact (ints and Fractions).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .certificates import Certificate
from .graphs import IntersectionGraph, edge_list_text
from .triangles import TriangleFamily, family_size_formula


class ColoringFormatError(ValueError):
    pass


def graph_checksum(g: IntersectionGraph) -> str:
    return hashlib.sha256(edge_list_text(g).encode()).hexdigest()[:16]


class EdgeColoring:
    """Total two-coloring of the edges, one bit per canonical edge.

    Bit 0 is red, bit 1 is blue.
    """

    def __init__(self, graph: IntersectionGraph, bits: np.ndarray | None = None):
        self.graph = graph
        if bits is None:
            bits = np.zeros(graph.m, dtype=bool)
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (graph.m,):
            raise ColoringFormatError(f"need {graph.m} bits, got shape {bits.shape}")
        self.bits = bits

    @classmethod
    def all_red(cls, graph: IntersectionGraph) -> "EdgeColoring":
        return cls(graph)

    @classmethod
    def random(cls, graph: IntersectionGraph, seed: int) -> "EdgeColoring":
        rng = np.random.default_rng(seed)
        return cls(graph, rng.integers(0, 2, size=graph.m, dtype=np.uint8).astype(bool))

    def color_of(self, u: int, v: int) -> str:
        if u > v:
            u, v = v, u
        return "B" if self.bits[self.graph.edge_index(u, v)] else "R"

    def flipped(self) -> "EdgeColoring":
        return EdgeColoring(self.graph, ~self.bits)

    # -- file format ------------------------------------------------------

    def to_text(self) -> str:
        g = self.graph
        packed = np.packbits(self.bits.astype(np.uint8), bitorder="little")
        hexstr = packed.tobytes().hex()
        body = "\n".join(hexstr[i : i + 120] for i in range(0, len(hexstr), 120))
        return f"coloring q={g.q} edges={g.m} graph={graph_checksum(g)}\n{body}\n"

    @classmethod
    def from_text(cls, graph: IntersectionGraph, text: str) -> "EdgeColoring":
        lines = [l for l in text.strip().split("\n") if l.strip()]
        if not lines or not lines[0].startswith("coloring "):
            raise ColoringFormatError("missing coloring header")
        try:
            fields = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
            q, m, chk = int(fields["q"]), int(fields["edges"]), fields["graph"]
        except (KeyError, ValueError) as exc:
            raise ColoringFormatError(f"malformed header: {lines[0]!r}") from exc
        if q != graph.q or m != graph.m:
            raise ColoringFormatError(f"coloring is for q={q}, m={m}; graph has q={graph.q}, m={graph.m}")
        if chk != graph_checksum(graph):
            raise ColoringFormatError("graph checksum mismatch")
        try:
            raw = bytes.fromhex("".join(lines[1:]))
        except ValueError as exc:
            raise ColoringFormatError("body is not hex") from exc
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        if len(bits) < m:
            raise ColoringFormatError("coloring body too short")
        if bits[m:].any():
            raise ColoringFormatError("nonzero padding bits")
        return cls(graph, bits[:m].astype(bool))


@dataclass
class GoodmanTally:
    """Per-vertex same-color pair counts and the derived exact totals."""

    red_pairs: np.ndarray  # (n,) triangles at v with both v-edges red
    blue_pairs: np.ndarray
    family_size: int
    monochromatic: int

    @property
    def same_sum(self) -> int:
        return int(self.red_pairs.sum() + self.blue_pairs.sum())


def _pair_counts(r: np.ndarray, total: int) -> tuple[np.ndarray, np.ndarray]:
    """C(blue,2) and C(red,2) given blue counts r out of `total` slots."""
    b = r
    a = total - r
    return a * (a - 1) // 2, b * (b - 1) // 2


def batch_same_pairs(fam: TriangleFamily, colors: np.ndarray) -> np.ndarray:
    """sum_v same(v) for a batch of colorings, shape (B, m) -> (B,)."""
    q = fam.q
    ce = fam.clique_edge_matrix()
    x = colors[:, ce]  # (B, rows, q+1)
    blue = x.sum(axis=2, dtype=np.int64)
    redp, bluep = _pair_counts(blue, q + 1)
    return (redp + bluep).sum(axis=1)


def batch_mono_counts(fam: TriangleFamily, colors: np.ndarray) -> np.ndarray:
    s = batch_same_pairs(fam, colors)
    diff = s - fam.total
    if (diff % 2).any() or (diff < 0).any():
        raise RuntimeError("Goodman parity violated (internal bug)")
    return diff // 2


def goodman_count(fam: TriangleFamily, coloring: EdgeColoring) -> GoodmanTally:
    """Exact monochromatic count of the family under the coloring."""
    g, q = fam.graph, fam.q
    rows_per_vertex = g.q**3 - g.q
    ce = fam.clique_edge_matrix()
    x = coloring.bits[ce]
    blue = x.sum(axis=1, dtype=np.int64)
    redp, bluep = _pair_counts(blue, q + 1)
    red_v = redp.reshape(g.n, rows_per_vertex).sum(axis=1)
    blue_v = bluep.reshape(g.n, rows_per_vertex).sum(axis=1)
    s = int(red_v.sum() + blue_v.sum())
    diff = s - fam.total
    if diff % 2 or diff < 0:
        raise RuntimeError("Goodman parity violated (internal bug)")
    return GoodmanTally(
        red_pairs=red_v, blue_pairs=blue_v, family_size=fam.total, monochromatic=diff // 2
    )


def goodman_count_direct(fam: TriangleFamily, coloring: EdgeColoring) -> int:
    """Independent per-triangle count over the explicit family list."""
    te = fam.triangle_edge_matrix()
    c = coloring.bits[te]
    mono = (c[:, 0] == c[:, 1]) & (c[:, 0] == c[:, 2])
    return int(mono.sum())


def same_sum_from_triangles(te: np.ndarray, colors: np.ndarray) -> int:
    """sum_v same(v) computed triangle-by-triangle: per triangle, the number
    of vertices whose two incident edges agree (3 if monochromatic, else 1)."""
    c = colors[te]
    s = (c[:, 0] == c[:, 1]).astype(np.int64)
    s += (c[:, 0] == c[:, 2])
    s += (c[:, 1] == c[:, 2])
    return int(s.sum())


# ----------------------------------------------------------------------
# All-triangle variant on arbitrary graphs
# ----------------------------------------------------------------------

def canonical_edges(adj: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    eu, ev = np.nonzero(np.triu(adj, 1))
    return eu, ev


def goodman_count_all_triangles(adj: np.ndarray, colors: np.ndarray) -> int:
    """Monochromatic triangles of an arbitrary graph, by per-vertex counting:
    (1/2) sum_v (same(v) - e(N(v)) / 3), evaluated exactly as
    (3 * sum_v same(v) - sum_v e(N(v))) / 6."""
    n = adj.shape[0]
    eu, ev = canonical_edges(adj)
    key = eu.astype(np.int64) * n + ev.astype(np.int64)
    colors = np.asarray(colors, dtype=bool)
    if colors.shape != key.shape:
        raise ValueError("colors must align with the canonical edge list")

    def eidx(u, v):
        return np.searchsorted(key, u.astype(np.int64) * n + v.astype(np.int64))

    same_total = 0
    nbhd_edges_total = 0
    for v in range(n):
        nbrs = np.flatnonzero(adj[v])
        if len(nbrs) < 2:
            continue
        lo = np.minimum(v, nbrs)
        hi = np.maximum(v, nbrs)
        chi = colors[eidx(lo, hi)]
        sub = np.triu(adj[np.ix_(nbrs, nbrs)], 1)
        wi, xi = np.nonzero(sub)
        nbhd_edges_total += len(wi)
        same_total += int((chi[wi] == chi[xi]).sum())
    num = 3 * same_total - nbhd_edges_total
    if num % 6:
        raise RuntimeError("Goodman all-triangle parity violated (internal bug)")
    return num // 6


def count_mono_triangles_direct(adj: np.ndarray, colors: np.ndarray) -> int:
    """Oracle: trace of the cubed single-color adjacency matrices."""
    n = adj.shape[0]
    eu, ev = canonical_edges(adj)
    blue = np.zeros((n, n), dtype=np.int64)
    sel = np.asarray(colors, dtype=bool)
    blue[eu[sel], ev[sel]] = 1
    blue |= blue.T
    red = np.zeros((n, n), dtype=np.int64)
    red[eu[~sel], ev[~sel]] = 1
    red |= red.T
    tr = int(np.trace(red @ red @ red)) + int(np.trace(blue @ blue @ blue))
    assert tr % 6 == 0
    return tr // 6


# ----------------------------------------------------------------------
# Exact max-cut
# ----------------------------------------------------------------------

EXHAUSTIVE_MAXCUT_LIMIT = 30
BNB_MAXCUT_LIMIT = 60


def maxcut_exact(adj: np.ndarray) -> tuple[int, np.ndarray]:
    """Maximum cut and a witness side assignment.

    Exhaustive enumeration up to 30 vertices (vectorized, vertex n-1 pinned);
    branch and bound with an admissible bound up to 60.
    """
    n = adj.shape[0]
    eu, ev = canonical_edges(adj)
    if len(eu) == 0:
        return 0, np.zeros(n, dtype=bool)
    if n <= EXHAUSTIVE_MAXCUT_LIMIT:
        best_cut = -1
        best_mask = 0
        total = 1 << (n - 1)
        chunk = 1 << 22
        for start in range(0, total, chunk):
            masks = np.arange(start, min(start + chunk, total), dtype=np.uint64)
            cuts = np.zeros(len(masks), dtype=np.int32)
            for u, v in zip(eu, ev):
                cuts += ((masks >> np.uint64(u)) ^ (masks >> np.uint64(v))).astype(np.int32) & 1
            i = int(np.argmax(cuts))
            if int(cuts[i]) > best_cut:
                best_cut = int(cuts[i])
                best_mask = start + i
        side = np.array([(best_mask >> i) & 1 for i in range(n)], dtype=bool)
        return best_cut, side
    if n > BNB_MAXCUT_LIMIT:
        raise ValueError(f"maxcut_exact supports at most {BNB_MAXCUT_LIMIT} vertices, got {n}")
    return _maxcut_branch_and_bound(adj)


def _maxcut_branch_and_bound(adj: np.ndarray) -> tuple[int, np.ndarray]:
    n = adj.shape[0]
    order = np.argsort(-adj.sum(axis=1))  # high degree first
    nbrs = [np.flatnonzero(adj[v]) for v in range(n)]
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    best = {"cut": -1, "side": None}
    side = np.zeros(n, dtype=np.int8) - 1

    # edges fully among vertices placed at position >= i
    suffix_edges = np.zeros(n + 1, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        v = order[i]
        later = sum(1 for w in nbrs[v] if pos[w] > i)
        suffix_edges[i] = suffix_edges[i + 1] + later

    def rec(i: int, cut: int):
        if i == n:
            if cut > best["cut"]:
                best["cut"] = cut
                best["side"] = (side == 1).copy()
            return
        # admissible bound: every unplaced-unplaced edge cut, plus each
        # unplaced vertex taking its better side against placed neighbors
        bound = cut + suffix_edges[i]
        for j in range(i, n):
            w = order[j]
            c0 = c1 = 0
            for x in nbrs[w]:
                if side[x] == 0:
                    c1 += 1
                elif side[x] == 1:
                    c0 += 1
            bound += max(c0, c1)
        if bound <= best["cut"]:
            return
        v = order[i]
        for s in (0, 1) if i > 0 else (0,):
            gained = 0
            for x in nbrs[v]:
                if side[x] != -1 and side[x] != s:
                    gained += 1
            side[v] = s
            rec(i + 1, cut + gained)
            side[v] = -1

    rec(0, 0)
    return best["cut"], best["side"]


def min_mono_edges(adj: np.ndarray) -> int:
    """m - maxcut: the least monochromatic edge count over vertex 2-colorings."""
    eu, _ = canonical_edges(adj)
    cut, _ = maxcut_exact(adj)
    return len(eu) - cut


# ----------------------------------------------------------------------
# Convexity minimum and the main certificate
# ----------------------------------------------------------------------

def clique_min_mono(q: int) -> dict:
    """Least same-colored pair count of a 2-colored (q+1)-clique.

    Integer minimum over splits a + b = q+1 of C(a,2) + C(b,2), with the
    real-valued relaxation (q+1)^2/4 - (q+1)/2 for comparison.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    t = q + 1
    best, split = None, None
    for a in range(t + 1):
        val = comb(a, 2) + comb(t - a, 2)
        if best is None or val < best:
            best, split = val, (a, t - a)
    real = Fraction(t * t, 4) - Fraction(t, 2)
    return {"integer": best, "real": real, "split": split}


def mono_lower_bound(q: int) -> Fraction:
    """L(q) = (n (q^3-q) cmm(q) - |family|) / 2, exact."""
    n = q**4 - q**3 + q**2
    cmm = clique_min_mono(q)["integer"]
    return Fraction(n * (q**3 - q) * cmm - family_size_formula(q), 2)


def quasi_folkman_certificate(q: int) -> Certificate:
    """Certify that every two-coloring leaves at least L(q) monochromatic
    family triangles; pass iff L(q) > 0, inconclusive at the equality case."""
    n = q**4 - q**3 + q**2
    tq = family_size_formula(q)
    cm = clique_min_mono(q)
    lower = mono_lower_bound(q)
    fraction = Fraction(lower, tq)
    # convexity inequality behind the bound, per (q+1)-clique
    lhs = cm["real"]
    rhs = Fraction((q + 1) * q, 6)
    if lower > 0:
        outcome = "pass"
    elif lower == 0:
        outcome = "inconclusive"
    else:
        outcome = "fail"
    quantities = {
        "n": n,
        "family_size": tq,
        "min_pairs_per_clique_integer": cm["integer"],
        "min_pairs_per_clique_real": cm["real"],
        "lower_bound": lower,
        "fraction_of_family": fraction,
        "fraction_float": float(fraction),
        "per_clique_lhs_real": lhs,
        "per_clique_rhs": rhs,
        "per_clique_strict": lhs > rhs,
    }
    return Certificate(
        claim="every 2-coloring has at least L(q) monochromatic family triangles",
        params={"q": q},
        quantities=quantities,
        margin=lower,
        outcome=outcome,
    )


def adversarial_color_check(fam: TriangleFamily, coloring: EdgeColoring) -> Certificate:
    """Exact monochromatic count of a user-supplied coloring against L(q)."""
    tally = goodman_count(fam, coloring)
    bound = mono_lower_bound(fam.q)
    ok = tally.monochromatic >= bound
    return Certificate(
        claim="supplied coloring meets the certified monochromatic lower bound",
        params={"q": fam.q},
        quantities={
            "monochromatic": tally.monochromatic,
            "lower_bound": bound,
            "family_size": fam.total,
        },
        margin=tally.monochromatic - bound,
        outcome="pass" if ok else "fail",
    )
