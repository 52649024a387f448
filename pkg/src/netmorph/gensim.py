"""Behavioural dissimilarity between two generator programs.

One program drives a growth trajectory; at every step both programs score
the same candidate sample and the mean absolute gap between their selection
probabilities is recorded. Averaging the two trajectory directions gives a
symmetric dissimilarity in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .genlang import GeneratorProgram
from .growth import GrowthParams, arc_probabilities, grow_network, random_graph, sample_candidates, ContextBatch
from .rng import stream


@dataclass(frozen=True)
class GenDissimilarity:
    d_ww2: float
    d_w2w: float
    seeds: tuple = ()

    @property
    def d(self) -> float:
        return (self.d_ww2 + self.d_w2w) / 2.0

    def to_dict(self) -> dict:
        return {"d_ww2": self.d_ww2, "d_w2w": self.d_w2w, "d": self.d, "seeds": list(self.seeds)}


def directed_dissim(
    w: GeneratorProgram,
    w2: GeneratorProgram,
    n: int,
    m: int,
    params: GrowthParams | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Mean probability gap along a trajectory grown by ``w`` (per candidate, then per step)."""
    if w.directed != w2.directed:
        raise ValueError("generators disagree on directedness")
    gaps = []

    def observe(step, batch, weights):
        p = arc_probabilities(weights)
        q = arc_probabilities(batch.weights(w2))
        gaps.append(float(np.mean(np.abs(p - q))))

    grow_network(w, n, m, params, rng, observer=observe)
    return float(np.mean(gaps)) if gaps else 0.0


def generator_dissimilarity(
    w: GeneratorProgram,
    w2: GeneratorProgram,
    n: int,
    m: int,
    params: GrowthParams | None = None,
    seeds: tuple[int, int] = (0, 1),
) -> GenDissimilarity:
    """Symmetrised dissimilarity; ``seeds[0]`` drives the ``w`` trajectory, ``seeds[1]`` the ``w2`` one."""
    s1, s2 = seeds
    d1 = directed_dissim(w, w2, n, m, params, stream(s1, "gensim"))
    d2 = directed_dissim(w2, w, n, m, params, stream(s2, "gensim"))
    return GenDissimilarity(d1, d2, (s1, s2))


def uniformity_deviation(
    prog: GeneratorProgram,
    n: int,
    m: int,
    trials: int = 1000,
    params: GrowthParams | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Largest gap between ``prog``'s selection probabilities and uniform.

    Each trial scores a fresh candidate sample on a random graph with between
    0 and ``m`` arcs.
    """
    params = params or GrowthParams()
    rng = rng if rng is not None else np.random.default_rng()
    worst = 0.0
    for _ in range(trials):
        g = random_graph(n, int(rng.integers(0, m + 1)), prog.directed, rng)
        src, dst = sample_candidates(g, params, rng)
        p = arc_probabilities(ContextBatch(g, src, dst, params, rng).weights(prog))
        worst = max(worst, float(np.max(np.abs(p - 1.0 / p.size))))
    return worst
