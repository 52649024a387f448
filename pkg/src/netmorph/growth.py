"""Arc-by-arc network growth driven by a generator program.

At every step a uniform sample of absent arcs is scored by the generator and
one of them is drawn with probability proportional to its (clamped) weight.
Vertices are 0-based indices internally; the identifiers exposed to programs
are ``index + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from numba import njit

from .genlang import ArcContext, GeneratorProgram, GenlangError, evaluate_batch


class SaturatedError(RuntimeError):
    """The graph has no absent legal arc left (or cannot hold the requested arcs)."""


@dataclass(frozen=True)
class GrowthParams:
    sample_ratio: float = 0.01
    min_sample: int = 50
    walk_count: int = 3
    walk_max_len: int = 10
    distance_cap: float = 11.0

    def __post_init__(self):
        if not 0.0 < self.sample_ratio <= 1.0:
            raise ValueError("sample_ratio must lie in (0, 1]")
        if self.min_sample < 1:
            raise ValueError("min_sample must be >= 1")
        if self.walk_count < 1:
            raise ValueError("walk_count must be >= 1")
        if self.walk_max_len < 1:
            raise ValueError("walk_max_len must be >= 1")
        if not self.distance_cap > self.walk_max_len:
            raise ValueError("distance_cap must exceed walk_max_len")

    def sample_size(self, n: int) -> int:
        # guard against float noise pushing e.g. 0.01 * 10000 above 100
        return max(math.ceil(self.sample_ratio * n * n - 1e-9), self.min_sample)


WALK_MODES = ("undirected", "directed", "reverse")


class GrowthGraph:
    """Simple graph (no self-loops, no duplicate arcs) under construction.

    Keeps a dense adjacency matrix for O(1) membership tests, degree caches,
    and padded neighbour tables used by the random walks.
    """

    def __init__(self, n: int, directed: bool = True):
        if n < 1:
            raise ValueError("a graph needs at least one vertex")
        self.n = int(n)
        self.directed = bool(directed)
        self.adj = np.zeros((n, n), dtype=bool)
        self.indeg = np.zeros(n, dtype=np.int64)
        self.outdeg = np.zeros(n, dtype=np.int64)
        self._src: list[int] = []
        self._dst: list[int] = []
        cap = 8
        kinds = ("out", "in", "und") if directed else ("und",)
        self._nbrs = {k: np.full((n, cap), -1, dtype=np.int64) for k in kinds}
        self._nbr_count = {k: np.zeros(n, dtype=np.int64) for k in kinds}

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]], directed: bool = True) -> "GrowthGraph":
        g = cls(n, directed)
        for a, b in arcs:
            g.add_arc(int(a), int(b))
        return g

    @property
    def m(self) -> int:
        return len(self._src)

    @property
    def degree(self) -> np.ndarray:
        """Per-vertex degree for undirected graphs, total degree for directed ones."""
        return self.indeg if not self.directed else self.indeg + self.outdeg

    @property
    def capacity(self) -> int:
        return legal_arc_count(self.n, self.directed)

    def arcs(self) -> np.ndarray:
        """Arcs in insertion order, shape ``(m, 2)``, 0-based."""
        return np.column_stack([np.asarray(self._src, dtype=np.int64), np.asarray(self._dst, dtype=np.int64)])

    def has_arc(self, a: int, b: int) -> bool:
        return bool(self.adj[a, b])

    def _push(self, kind: str, v: int, u: int) -> None:
        table = self._nbrs[kind]
        count = self._nbr_count[kind]
        if count[v] == table.shape[1]:
            wider = np.full((self.n, 2 * table.shape[1]), -1, dtype=np.int64)
            wider[:, : table.shape[1]] = table
            self._nbrs[kind] = table = wider
        table[v, count[v]] = u
        count[v] += 1

    def add_arc(self, a: int, b: int) -> None:
        if a == b:
            raise ValueError(f"self-loop on vertex {a}")
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise IndexError(f"arc ({a}, {b}) outside a graph of {self.n} vertices")
        if self.adj[a, b]:
            raise ValueError(f"duplicate arc ({a}, {b})")
        self._src.append(a)
        self._dst.append(b)
        if self.directed:
            reciprocal = self.adj[b, a]
            self.adj[a, b] = True
            self.outdeg[a] += 1
            self.indeg[b] += 1
            self._push("out", a, b)
            self._push("in", b, a)
            if not reciprocal:
                self._push("und", a, b)
                self._push("und", b, a)
        else:
            self.adj[a, b] = self.adj[b, a] = True
            self.indeg[a] += 1
            self.indeg[b] += 1
            self.outdeg[a] += 1
            self.outdeg[b] += 1
            self._push("und", a, b)
            self._push("und", b, a)

    def neighbour_table(self, mode: str) -> tuple[np.ndarray, np.ndarray]:
        """Padded neighbour table and per-vertex counts for a walk mode."""
        if mode == "undirected":
            kind = "und"
        elif not self.directed:
            raise ValueError(f"walk mode {mode!r} needs a directed graph")
        elif mode == "directed":
            kind = "out"
        elif mode == "reverse":
            kind = "in"
        else:
            raise ValueError(f"unknown walk mode {mode!r}")
        return self._nbrs[kind], self._nbr_count[kind]

    def copy(self) -> "GrowthGraph":
        return GrowthGraph.from_arcs(self.n, self.arcs(), self.directed)

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"GrowthGraph(n={self.n}, m={self.m}, {kind})"


def legal_arc_count(n: int, directed: bool) -> int:
    return n * (n - 1) if directed else n * (n - 1) // 2


# ---------------------------------------------------------------------------
# candidate sampling


def _free_pairs(g: GrowthGraph) -> tuple[np.ndarray, np.ndarray]:
    if g.directed:
        mask = ~g.adj
        np.fill_diagonal(mask, False)
    else:
        mask = np.triu(~g.adj, 1)
    return np.nonzero(mask)


def sample_candidates(g: GrowthGraph, params: GrowthParams, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw distinct absent arcs uniformly without replacement.

    Returns ``(src, dst)`` index arrays. For undirected graphs each unordered
    pair appears at most once, in the orientation it was drawn.
    """
    n = g.n
    free = g.capacity - g.m
    if free <= 0:
        raise SaturatedError(f"no absent arc left in {g!r}")
    k = min(params.sample_size(n), free)

    if free < 0.25 * n * n:
        a, b = _free_pairs(g)
        pick = rng.choice(a.size, size=k, replace=False)
        src, dst = a[pick], b[pick]
        if not g.directed:
            flip = rng.random(k) < 0.5
            src, dst = np.where(flip, dst, src), np.where(flip, src, dst)
        return src.astype(np.int64), dst.astype(np.int64)

    keys = np.empty(0, dtype=np.int64)
    src = np.empty(0, dtype=np.int64)
    dst = np.empty(0, dtype=np.int64)
    while src.size < k:
        draw = int(1.5 * (k - src.size)) + 16
        code = rng.integers(0, n * n, size=draw)
        a, b = np.divmod(code, n)
        ok = (a != b) & ~g.adj[a, b]
        a, b = a[ok], b[ok]
        key = a * n + b if g.directed else np.minimum(a, b) * n + np.maximum(a, b)
        all_keys = np.concatenate([keys, key])
        _, first = np.unique(all_keys, return_index=True)
        first.sort()
        fresh = first[first >= keys.size] - keys.size
        keys = np.concatenate([keys, key[fresh]])
        src = np.concatenate([src, a[fresh]])
        dst = np.concatenate([dst, b[fresh]])
    return src[:k], dst[:k]


# ---------------------------------------------------------------------------
# walk-estimated distances


@njit(cache=True)
def _walk_kernel(nbrs, counts, sources, targets, uniforms, cap):
    k, walks, steps = uniforms.shape
    out = np.empty(k)
    for c in range(k):
        best = cap
        t = targets[c]
        for w in range(walks):
            pos = sources[c]
            for s in range(steps):
                if s + 1 >= best:
                    break
                deg = counts[pos]
                if deg == 0:
                    break
                pos = nbrs[pos, int(uniforms[c, w, s] * deg)]
                if pos == t:
                    best = s + 1
                    break
        out[c] = best
    return out


def walk_distances(
    g: GrowthGraph,
    src: np.ndarray,
    dst: np.ndarray,
    mode: str,
    params: GrowthParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Vectorised :func:`walk_distance` over candidate arrays."""
    nbrs, counts = g.neighbour_table(mode)
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    uniforms = rng.random((src.size, params.walk_count, params.walk_max_len))
    return _walk_kernel(nbrs, counts, src, dst, uniforms, float(params.distance_cap))


def walk_distance(g: GrowthGraph, i: int, j: int, mode: str, params: GrowthParams, rng: np.random.Generator) -> float:
    """Random-walk estimate of the distance from ``i`` to ``j``.

    ``walk_count`` walks of at most ``walk_max_len`` steps start at ``i``;
    the result is the earliest step at which any of them reaches ``j``, or
    ``distance_cap`` if none does. Walks stop early at dead ends.
    """
    if i == j:
        raise ValueError("walk_distance needs two distinct vertices")
    return float(walk_distances(g, np.array([i]), np.array([j]), mode, params, rng)[0])


# ---------------------------------------------------------------------------
# contexts and selection


class ContextBatch:
    """Lazily computed variable bindings for a batch of candidate arcs.

    Walk distances are only computed the first time a program reads them and
    are then shared by every program evaluated on the batch.
    """

    def __init__(self, g: GrowthGraph, src: np.ndarray, dst: np.ndarray, params: GrowthParams, rng: np.random.Generator):
        self.g = g
        self.src = np.asarray(src, dtype=np.int64)
        self.dst = np.asarray(dst, dtype=np.int64)
        self.params = params
        self.rng = rng
        self._cache: dict[str, np.ndarray] = {}

    def __len__(self) -> int:
        return self.src.size

    def __call__(self, name: str) -> np.ndarray:
        if name not in self._cache:
            self._cache[name] = self._compute(name)
        return self._cache[name]

    def _compute(self, name: str) -> np.ndarray:
        g, src, dst = self.g, self.src, self.dst
        if not g.directed and name in ("outdeg_i", "outdeg_j", "d_d", "d_r"):
            raise GenlangError(f"variable {name} is undefined for undirected networks")
        if name == "i":
            return (src + 1).astype(float)
        if name == "j":
            return (dst + 1).astype(float)
        if name == "indeg_i":
            return g.indeg[src].astype(float)
        if name == "indeg_j":
            return g.indeg[dst].astype(float)
        if name == "outdeg_i":
            return g.outdeg[src].astype(float)
        if name == "outdeg_j":
            return g.outdeg[dst].astype(float)
        modes = {"d_u": "undirected", "d_d": "directed", "d_r": "reverse"}
        if name in modes:
            return walk_distances(g, src, dst, modes[name], self.params, self.rng)
        raise GenlangError(f"unknown variable {name!r}")

    def weights(self, prog: GeneratorProgram) -> np.ndarray:
        return evaluate_batch(prog, self, len(self))


def arc_context(g: GrowthGraph, i: int, j: int, params: GrowthParams, rng: np.random.Generator) -> ArcContext:
    """Full context for arc ``i -> j`` (0-based vertices, 1-based identifiers)."""
    if i == j:
        raise ValueError("an arc context needs two distinct vertices")
    batch = ContextBatch(g, np.array([i]), np.array([j]), params, rng)
    if not g.directed:
        return ArcContext(i + 1, j + 1, int(g.indeg[i]), int(g.indeg[j]), d_u=float(batch("d_u")[0]))
    return ArcContext(
        i + 1,
        j + 1,
        int(g.indeg[i]),
        int(g.indeg[j]),
        outdeg_i=int(g.outdeg[i]),
        outdeg_j=int(g.outdeg[j]),
        d_u=float(batch("d_u")[0]),
        d_d=float(batch("d_d")[0]),
        d_r=float(batch("d_r")[0]),
    )


def arc_probabilities(weights) -> np.ndarray:
    """Selection probabilities: negatives clamp to 0, an all-zero sample is uniform."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise ValueError("empty weight list")
    w = np.where(w > 0, w, 0.0)
    top = w.max()
    if top <= 0:
        return np.full(w.size, 1.0 / w.size)
    w = w / top
    return w / w.sum()


def select_arc(weights, rng: np.random.Generator) -> int:
    p = arc_probabilities(weights)
    cum = np.cumsum(p)
    idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return min(idx, p.size - 1)


StepObserver = Callable[[int, ContextBatch, np.ndarray], None]


def grow_network(
    prog: GeneratorProgram,
    n: int,
    m: int,
    params: GrowthParams | None = None,
    rng: np.random.Generator | None = None,
    observer: StepObserver | None = None,
) -> GrowthGraph:
    """Grow an ``m``-arc network on ``n`` initially isolated vertices.

    ``observer(step, batch, weights)`` is called after the candidates of each
    step have been scored and before one of them is inserted.
    """
    params = params or GrowthParams()
    rng = rng if rng is not None else np.random.default_rng()
    g = GrowthGraph(n, prog.directed)
    if m < 0:
        raise ValueError("arc count must be non-negative")
    if m > g.capacity:
        raise SaturatedError(f"{m} arcs do not fit in a simple graph of {n} vertices")
    for step in range(m):
        src, dst = sample_candidates(g, params, rng)
        batch = ContextBatch(g, src, dst, params, rng)
        weights = batch.weights(prog)
        if observer is not None:
            observer(step, batch, weights)
        k = select_arc(weights, rng)
        g.add_arc(int(src[k]), int(dst[k]))
    return g


def random_graph(n: int, m: int, directed: bool, rng: np.random.Generator) -> GrowthGraph:
    """Erdos-Renyi G(n, m): ``m`` distinct legal arcs drawn uniformly."""
    total = legal_arc_count(n, directed)
    if m > total:
        raise SaturatedError(f"{m} arcs do not fit in a simple graph of {n} vertices")
    codes = np.sort(rng.choice(total, size=m, replace=False)) if m else np.empty(0, dtype=np.int64)
    if directed:
        a, r = np.divmod(codes, n - 1)
        b = r + (r >= a)
    else:
        iu, ju = np.triu_indices(n, 1)
        a, b = iu[codes], ju[codes]
    order = rng.permutation(m)
    return GrowthGraph.from_arcs(n, zip(a[order].tolist(), b[order].tolist()), directed)
