"""Fitness of a candidate network relative to an Erdos-Renyi baseline.

Each raw dissimilarity to the target is divided by the mean dissimilarity
between the target and an ensemble of same-size random graphs, so a ratio of
1 means "no better than random". The fitness is the largest ratio (lower is
better).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .genlang import GeneratorProgram
from .growth import GrowthGraph, GrowthParams, grow_network, random_graph
from .netmetrics import MetricProfile, ProfileParams, dissimilarity_vector, metric_names, metric_profile
from .rng import stream

CACHE_ENV = "NETMORPH_CACHE_DIR"


class BaselineError(RuntimeError):
    pass


@dataclass(frozen=True)
class BaselineNorms:
    target_id: str
    ensemble_size: int
    per_metric_mean: dict

    def __post_init__(self):
        for name, value in self.per_metric_mean.items():
            if not value > 0:
                raise BaselineError(f"baseline mean for {name} is {value}; refusing to divide by it")


@dataclass(frozen=True)
class FitnessReport:
    ratios: dict
    fitness: float

    @classmethod
    def from_ratios(cls, ratios: dict) -> "FitnessReport":
        return cls(dict(ratios), max(ratios.values()))

    def to_dict(self) -> dict:
        return {"fitness": self.fitness, "ratios": dict(self.ratios)}


def graph_hash(g: GrowthGraph) -> str:
    """Content hash of a graph's vertex count, directedness and arc set."""
    arcs = g.arcs()
    if not g.directed:
        arcs = np.sort(arcs, axis=1)
    arcs = arcs[np.lexsort((arcs[:, 1], arcs[:, 0]))]
    h = hashlib.sha256(f"{g.n} {int(g.directed)}\n".encode())
    h.update(np.ascontiguousarray(arcs, dtype="<i8").tobytes())
    return h.hexdigest()


def _member_dissimilarity(target_profile, n, m, directed, params, rng):
    er = random_graph(n, m, directed, rng)
    return dissimilarity_vector(target_profile, metric_profile(er, params, rng))


def baseline_dissimilarities(
    target: GrowthGraph,
    ensemble_size: int = 30,
    params: ProfileParams | None = None,
    rng: np.random.Generator | None = None,
    target_profile: MetricProfile | None = None,
    jobs: int = 1,
) -> list[dict]:
    """Dissimilarity vectors between ``target`` and each member of an ER ensemble."""
    params = params or ProfileParams()
    rng = rng if rng is not None else np.random.default_rng()
    if target.m == 0:
        raise BaselineError("target network has no arcs")
    target_profile = target_profile or metric_profile(target, params, rng)
    member_rngs = rng.spawn(ensemble_size)
    args = (target_profile, target.n, target.m, target.directed, params)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda r: _member_dissimilarity(*args, r), member_rngs))
    return [_member_dissimilarity(*args, r) for r in member_rngs]


def baseline_norms(
    target: GrowthGraph,
    ensemble_size: int = 30,
    params: ProfileParams | None = None,
    rng: np.random.Generator | None = None,
    target_profile: MetricProfile | None = None,
    jobs: int = 1,
) -> BaselineNorms:
    if ensemble_size < 1:
        raise ValueError("ensemble_size must be >= 1")
    rows = baseline_dissimilarities(target, ensemble_size, params, rng, target_profile, jobs)
    means = {name: float(np.mean([r[name] for r in rows])) for name in metric_names(target.directed)}
    return BaselineNorms(graph_hash(target), ensemble_size, means)


def fitness_from_dissimilarities(dissimilarities: dict, norms: BaselineNorms) -> FitnessReport:
    if set(dissimilarities) != set(norms.per_metric_mean):
        raise ValueError(
            f"metric sets differ: {sorted(dissimilarities)} vs {sorted(norms.per_metric_mean)}"
        )
    ratios = {name: dissimilarities[name] / norms.per_metric_mean[name] for name in norms.per_metric_mean}
    return FitnessReport.from_ratios(ratios)


def fitness(candidate: MetricProfile, target: MetricProfile, norms: BaselineNorms) -> FitnessReport:
    return fitness_from_dissimilarities(dissimilarity_vector(target, candidate), norms)


# ---------------------------------------------------------------------------
# baseline cache


def _params_hash(params: ProfileParams, ensemble_size: int) -> str:
    blob = json.dumps({"profile": dataclasses.asdict(params), "ensemble_size": ensemble_size}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "netmorph"))


def cached_baseline_norms(
    target: GrowthGraph,
    ensemble_size: int,
    params: ProfileParams,
    seed: int,
    cache_dir: str | os.PathLike | None = None,
    target_profile: MetricProfile | None = None,
    jobs: int = 1,
) -> BaselineNorms:
    """Baseline norms, read from or written to a JSON cache keyed by target, parameters and seed."""
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    target_id = graph_hash(target)
    params_id = _params_hash(params, ensemble_size)
    path = cache_dir / f"baseline-{target_id[:16]}-{params_id[:16]}-{seed}.json"
    if path.exists():
        data = json.loads(path.read_text())
        if data.get("target_hash") == target_id and data.get("params_hash") == params_id:
            return BaselineNorms(target_id, data["ensemble_size"], data["means"])
    norms = baseline_norms(target, ensemble_size, params, stream(seed, "baseline"), target_profile, jobs)
    cache_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "target_hash": target_id,
        "params_hash": params_id,
        "ensemble_size": ensemble_size,
        "means": norms.per_metric_mean,
        "seed": seed,
    }
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload, indent=2))
    tmp.replace(path)
    return norms


# ---------------------------------------------------------------------------


class Scorer:
    """Grows a network from a program and scores it against a fixed target."""

    def __init__(
        self,
        target: GrowthGraph,
        norms: BaselineNorms,
        growth: GrowthParams | None = None,
        profile: ProfileParams | None = None,
        target_profile: MetricProfile | None = None,
    ):
        self.target = target
        self.norms = norms
        self.growth = growth or GrowthParams()
        self.profile = profile or ProfileParams()
        self.target_profile = target_profile or metric_profile(target, self.profile)

    def grow(self, prog: GeneratorProgram, rng: np.random.Generator) -> GrowthGraph:
        return grow_network(prog, self.target.n, self.target.m, self.growth, rng)

    def score(self, prog: GeneratorProgram, rng: np.random.Generator) -> tuple[FitnessReport, GrowthGraph]:
        if prog.directed != self.target.directed:
            raise ValueError("program and target disagree on directedness")
        synthetic = self.grow(prog, rng)
        report = fitness(metric_profile(synthetic, self.profile, rng), self.target_profile, self.norms)
        return report, synthetic
