"""Network features and the dissimilarities used to compare two networks.

Degree and PageRank distributions are compared with the 1-D earth mover's
distance; distance histograms and triad censuses with a symmetric mean
absolute log-ratio of (add-one smoothed) counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from numba import njit
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .growth import GrowthGraph

DIRECTED_METRICS = ("k_in", "k_out", "PR_d", "PR_r", "d_d", "d_u", "tau")
UNDIRECTED_METRICS = ("k", "PR", "d_u", "tau")

TRIAD_NAMES = ("003", "012", "102", "021D", "021U", "021C", "111D", "111U",
               "030T", "030C", "201", "120D", "120U", "120C", "210", "300")
CONNECTED_TRIADS = TRIAD_NAMES[3:]
UNDIRECTED_TRIADS = ("path", "triangle")

# 6-bit triad code -> census class (1-based, as in TRIAD_NAMES). Bits, low to
# high: v->u, u->v, v->w, w->v, u->w, w->u.
_TRICODES = np.array(
    [1, 2, 2, 3, 2, 4, 6, 8, 2, 6, 5, 7, 3, 8, 7, 11, 2, 6, 4, 8, 5, 9,
     9, 13, 6, 10, 9, 14, 7, 14, 12, 15, 2, 5, 6, 7, 6, 9, 10, 14, 4, 9,
     9, 12, 8, 13, 14, 15, 3, 7, 8, 11, 7, 12, 14, 15, 8, 14, 13, 15,
     11, 15, 15, 16],
    dtype=np.int64,
)

UNREACHABLE = "inf"


def metric_names(directed: bool) -> tuple[str, ...]:
    return DIRECTED_METRICS if directed else UNDIRECTED_METRICS


def _arc_arrays(g: GrowthGraph) -> tuple[np.ndarray, np.ndarray]:
    arcs = g.arcs()
    src, dst = arcs[:, 0], arcs[:, 1]
    if not g.directed:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
    return src, dst


# ---------------------------------------------------------------------------
# PageRank


def pagerank(
    g: GrowthGraph,
    reverse: bool = False,
    damping: float = 0.85,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> np.ndarray:
    """Power-iteration PageRank; dangling mass is spread uniformly.

    With ``reverse=True`` every arc is inverted first. Undirected edges count
    in both directions.
    """
    n = g.n
    src, dst = _arc_arrays(g)
    if reverse:
        src, dst = dst, src
    out = np.bincount(src, minlength=n).astype(float)
    dangling = out == 0
    inv_out = np.divide(1.0, out, out=np.zeros(n), where=~dangling)
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        flow = np.bincount(dst, weights=x[src] * inv_out[src], minlength=n)
        y = damping * flow + (damping * x[dangling].sum() + 1.0 - damping) / n
        y /= y.sum()
        delta = np.abs(y - x).sum()
        x = y
        if delta < tol:
            break
    return x


# ---------------------------------------------------------------------------
# distances


@dataclass(frozen=True)
class Histogram:
    """Counts of ordered vertex pairs per shortest-path length.

    ``finite`` maps a distance (>= 1) to its count; ``unreachable`` is the
    overflow bin.
    """

    finite: dict = field(default_factory=dict)
    unreachable: int = 0

    @property
    def total(self) -> int:
        return sum(self.finite.values()) + self.unreachable

    def as_counts(self) -> dict:
        counts = {int(k): int(v) for k, v in sorted(self.finite.items()) if v}
        if self.unreachable:
            counts[UNREACHABLE] = int(self.unreachable)
        return counts

    def to_lines(self) -> str:
        return "".join(f"{k} {v}\n" for k, v in self.as_counts().items())


def distance_histogram(
    g: GrowthGraph,
    mode: str = "directed",
    source_cap: int | None = None,
    rng: np.random.Generator | None = None,
) -> Histogram:
    """BFS distance histogram from ``min(n, source_cap)`` sources.

    ``source_cap=None`` or ``>= n`` gives the exact all-pairs histogram;
    otherwise sources are drawn uniformly without replacement from ``rng``.
    """
    if mode not in ("directed", "undirected"):
        raise ValueError(f"unknown distance mode {mode!r}")
    if mode == "directed" and not g.directed:
        raise ValueError("directed distances need a directed graph")
    n = g.n
    if source_cap is None or source_cap >= n:
        sources = np.arange(n)
    else:
        rng = rng if rng is not None else np.random.default_rng()
        sources = np.sort(rng.choice(n, size=source_cap, replace=False))
    arcs = g.arcs()
    mat = csr_matrix((np.ones(len(arcs)), (arcs[:, 0], arcs[:, 1])), shape=(n, n))
    dist = shortest_path(mat, directed=(mode == "directed" and g.directed), unweighted=True, indices=sources)
    dist[np.arange(sources.size), sources] = 0.0
    finite = dist[np.isfinite(dist)]
    values, counts = np.unique(finite[finite > 0].astype(np.int64), return_counts=True)
    unreachable = int((~np.isfinite(dist)).sum())
    return Histogram(dict(zip(values.tolist(), counts.tolist())), unreachable)


# ---------------------------------------------------------------------------
# triads


@njit(cache=True)
def _census_kernel(adj, nbrs, counts, tricodes):
    n = adj.shape[0]
    census = np.zeros(16, dtype=np.int64)
    mark = np.zeros(n, dtype=np.int64)
    stamp = 0
    for v in range(n):
        for a in range(counts[v]):
            u = nbrs[v, a]
            if u <= v:
                continue
            stamp += 1
            size = 0
            for b in range(counts[v]):
                w = nbrs[v, b]
                if w != u and mark[w] != stamp:
                    mark[w] = stamp
                    size += 1
            for b in range(counts[u]):
                w = nbrs[u, b]
                if w != v and mark[w] != stamp:
                    mark[w] = stamp
                    size += 1
            # dyad (v, u) plus a third vertex unconnected to both
            if adj[v, u] and adj[u, v]:
                census[2] += n - size - 2
            else:
                census[1] += n - size - 2
            for w in range(n):
                if mark[w] != stamp:
                    continue
                if u < w or (v < w and w < u and not (adj[v, w] or adj[w, v])):
                    code = (adj[v, u] * 1 + adj[u, v] * 2 + adj[v, w] * 4
                            + adj[w, v] * 8 + adj[u, w] * 16 + adj[w, u] * 32)
                    census[tricodes[code] - 1] += 1
    return census


def triad_census(g: GrowthGraph) -> np.ndarray:
    """Counts of all 16 directed triad classes (ordered as ``TRIAD_NAMES``).

    Undirected graphs are treated as having every edge reciprocated.
    """
    n = g.n
    if n < 3:
        return np.zeros(16, dtype=np.int64)
    nbrs, counts = g.neighbour_table("undirected")
    census = _census_kernel(g.adj.astype(np.uint8), nbrs, counts, _TRICODES)
    census[0] = math.comb(n, 3) - census[1:].sum()
    return census


def triad_counts(g: GrowthGraph) -> np.ndarray:
    """Counts of the connected triad classes: 13 for directed graphs, (path, triangle) otherwise."""
    if g.n < 3:
        return np.zeros(13 if g.directed else 2, dtype=np.int64)
    if g.directed:
        return triad_census(g)[3:]
    arcs = g.arcs()
    a = csr_matrix((np.ones(len(arcs)), (arcs[:, 0], arcs[:, 1])), shape=(g.n, g.n))
    a = a + a.T
    triangles = int(round((a @ a).multiply(a).sum() / 6))
    deg = g.indeg
    wedges = int((deg * (deg - 1) // 2).sum())
    return np.array([wedges - 3 * triangles, triangles], dtype=np.int64)


def triad_profile(g: GrowthGraph) -> np.ndarray:
    """Normalised frequencies of the connected triad classes (all zero if none)."""
    counts = triad_counts(g).astype(float)
    total = counts.sum()
    return counts / total if total > 0 else counts


# ---------------------------------------------------------------------------
# dissimilarities


def emd(sample_a, sample_b) -> float:
    """Earth mover's distance between two 1-D empirical distributions (integral of |F_a - F_b|)."""
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("emd needs two non-empty samples")
    grid = np.concatenate([a, b])
    grid.sort()
    widths = np.diff(grid)
    cdf_a = np.searchsorted(a, grid[:-1], side="right") / a.size
    cdf_b = np.searchsorted(b, grid[:-1], side="right") / b.size
    return float(np.sum(np.abs(cdf_a - cdf_b) * widths))


def _as_counts(h) -> Mapping:
    if isinstance(h, Histogram):
        return h.as_counts()
    if isinstance(h, Mapping):
        return h
    return dict(enumerate(np.asarray(h, dtype=float).tolist()))


def ratio_dissimilarity(h_a, h_b) -> float:
    """Mean absolute log-ratio of add-one smoothed counts over the occupied bins.

    Accepts :class:`Histogram` objects, ``{bin: count}`` mappings, or count
    vectors (bins are positions).
    """
    ca, cb = _as_counts(h_a), _as_counts(h_b)
    bins = sorted((k for k in set(ca) | set(cb) if ca.get(k, 0) > 0 or cb.get(k, 0) > 0), key=str)
    if not bins:
        return 0.0
    x = np.array([ca.get(k, 0) for k in bins], dtype=float)
    y = np.array([cb.get(k, 0) for k in bins], dtype=float)
    return float(np.mean(np.abs(np.log1p(x) - np.log1p(y))))


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class ProfileParams:
    damping: float = 0.85
    tol: float = 1e-9
    max_iter: int = 200
    exact_limit: int = 2000
    sampled_sources: int = 500

    def source_cap(self, n: int) -> int | None:
        return None if n <= self.exact_limit else self.sampled_sources


@dataclass(frozen=True)
class MetricProfile:
    """Distributions describing one network."""

    directed: bool
    n: int
    m: int
    distributions: dict  # name -> sorted per-vertex sample (degrees, PageRank)
    histograms: dict  # "d_d" / "d_u" -> Histogram
    triads: np.ndarray  # counts of the connected triad classes

    @property
    def metrics(self) -> tuple[str, ...]:
        return metric_names(self.directed)

    @property
    def triad_frequencies(self) -> np.ndarray:
        total = self.triads.sum()
        return self.triads / total if total > 0 else self.triads.astype(float)


def metric_profile(g: GrowthGraph, params: ProfileParams | None = None, rng: np.random.Generator | None = None) -> MetricProfile:
    params = params or ProfileParams()
    pr = dict(damping=params.damping, tol=params.tol, max_iter=params.max_iter)
    cap = params.source_cap(g.n)
    if g.directed:
        distributions = {
            "k_in": np.sort(g.indeg.astype(float)),
            "k_out": np.sort(g.outdeg.astype(float)),
            "PR_d": np.sort(pagerank(g, reverse=False, **pr)),
            "PR_r": np.sort(pagerank(g, reverse=True, **pr)),
        }
        histograms = {
            "d_d": distance_histogram(g, "directed", cap, rng),
            "d_u": distance_histogram(g, "undirected", cap, rng),
        }
    else:
        distributions = {
            "k": np.sort(g.indeg.astype(float)),
            "PR": np.sort(pagerank(g, **pr)),
        }
        histograms = {"d_u": distance_histogram(g, "undirected", cap, rng)}
    return MetricProfile(g.directed, g.n, g.m, distributions, histograms, triad_counts(g))


def dissimilarity_vector(p_a: MetricProfile, p_b: MetricProfile) -> dict[str, float]:
    """Per-metric dissimilarity between two profiles, keyed and ordered by metric name."""
    if p_a.directed != p_b.directed:
        raise ValueError("cannot compare a directed profile with an undirected one")
    out = {}
    for name in p_a.metrics:
        if name in p_a.distributions:
            out[name] = emd(p_a.distributions[name], p_b.distributions[name])
        elif name == "tau":
            out[name] = ratio_dissimilarity(p_a.triads, p_b.triads)
        else:
            out[name] = ratio_dissimilarity(p_a.histograms[name], p_b.histograms[name])
    return out
