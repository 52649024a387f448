"""Mutation-only evolutionary search with an anti-bloat second champion.

Two champions are kept: ``best`` (lowest fitness seen) and ``shortest`` (the
shortest program whose fitness is within ``tolerance`` of the best). Each
generation mutates one of them, grows a network from the child, scores it
once, and possibly promotes it. The search stops after ``stable_limit``
consecutive generations without a champion change; ``shortest`` is the
result.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .edgelist import format_edge_list, read_edge_list
from .fitness import BaselineNorms, FitnessReport, Scorer, baseline_norms, cached_baseline_norms
from .genlang import GeneratorProgram, TreeGenParams, mutate, print_program, random_program, save_program
from .growth import GrowthGraph, GrowthParams
from .netmetrics import ProfileParams, metric_profile
from .rng import stream

log = logging.getLogger(__name__)

HISTORY_HEADER = ("generation", "event", "fitness", "length")


@dataclass(frozen=True)
class SearchParams:
    tolerance: float = 0.10
    stable_limit: int = 1000
    max_generations: int | None = None
    ensemble_size: int = 30
    tree: TreeGenParams = field(default_factory=TreeGenParams)
    growth: GrowthParams = field(default_factory=GrowthParams)
    profile: ProfileParams = field(default_factory=ProfileParams)

    def __post_init__(self):
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")
        if self.stable_limit < 1:
            raise ValueError("stable_limit must be >= 1")
        if self.ensemble_size < 1:
            raise ValueError("ensemble_size must be >= 1")

    def for_mode(self, directed: bool) -> "SearchParams":
        if self.tree.directed == directed:
            return self
        return dataclasses.replace(self, tree=dataclasses.replace(self.tree, directed=directed))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class Champion:
    program: GeneratorProgram
    report: FitnessReport
    network: GrowthGraph | None = field(default=None, compare=False, repr=False)
    generation: int = 0

    @property
    def fitness(self) -> float:
        return self.report.fitness

    @property
    def length(self) -> int:
        return len(self.program)


@dataclass(frozen=True)
class HistoryRow:
    generation: int
    event: str
    fitness: float
    length: int


@dataclass
class SearchState:
    best: Champion
    shortest: Champion
    tolerance: float
    generation: int = 0
    stable_count: int = 0
    history: list = field(default_factory=list)

    def check(self) -> None:
        """Raise ``AssertionError`` if a champion invariant is broken."""
        bar = (1.0 + self.tolerance) * self.best.fitness
        if not self.shortest.fitness <= bar:
            raise AssertionError(f"shortest fitness {self.shortest.fitness} above bar {bar}")
        if not self.shortest.length <= self.best.length:
            raise AssertionError("shortest champion is longer than the best one")


def apply_child(state: SearchState, child: Champion) -> str:
    """Apply the champion replacement rules for one scored child.

    Returns the history event: ``best``, ``shortest``, ``both`` or ``none``.
    ``stable_count`` is reset when any champion changes.
    """
    tol = state.tolerance
    new_best = child.fitness < state.best.fitness
    changed_shortest = False
    if new_best:
        state.best = child
        if state.shortest.fitness > (1.0 + tol) * state.best.fitness:
            state.shortest = child
            changed_shortest = True
    if child is not state.shortest and child.fitness <= (1.0 + tol) * state.best.fitness:
        shorter = child.length < state.shortest.length
        tie = child.length == state.shortest.length and child.fitness < state.shortest.fitness
        if shorter or tie:
            state.shortest = child
            changed_shortest = True

    if new_best or changed_shortest:
        state.stable_count = 0
    else:
        state.stable_count += 1
    if new_best and changed_shortest:
        return "both"
    if new_best:
        return "best"
    if changed_shortest:
        return "shortest"
    return "none"


class EvolutionarySearch:
    """Search driver owning the scorer and the random streams of one run."""

    def __init__(self, scorer: Scorer, params: SearchParams, seed: int, keep_networks: bool = True):
        self.scorer = scorer
        self.params = params.for_mode(scorer.target.directed)
        self.seed = seed
        self.keep_networks = keep_networks
        self.mutation_rng = stream(seed, "mutation")
        self.growth_rng = stream(seed, "growth")
        self.state: SearchState | None = None
        self.seen: list[Champion] = []
        # (program, fitness) of every child scored, in generation order
        self.evaluated: list[tuple[GeneratorProgram, float]] = []

    def _evaluate(self, prog: GeneratorProgram, generation: int) -> Champion:
        report, network = self.scorer.score(prog, self.growth_rng)
        return Champion(prog, report, network if self.keep_networks else None, generation)

    def init_state(self) -> SearchState:
        prog = random_program(self.params.tree, self.mutation_rng)
        first = self._evaluate(prog, 0)
        self.state = SearchState(first, first, self.params.tolerance)
        self.state.history.append(HistoryRow(0, "init", first.fitness, first.length))
        self.seen = [first]
        return self.state

    def step_generation(self) -> str:
        state = self.state if self.state is not None else self.init_state()
        state.generation += 1
        parent = state.best if self.mutation_rng.random() < 0.5 else state.shortest
        child_prog = mutate(parent.program, self.params.tree, self.mutation_rng)
        child = self._evaluate(child_prog, state.generation)
        self.evaluated.append((child_prog, child.fitness))
        event = apply_child(state, child)
        if event != "none":
            self.seen.append(child)
        state.history.append(HistoryRow(state.generation, event, child.fitness, child.length))
        return event

    def done(self) -> bool:
        state = self.state
        if state is None:
            return False
        if state.stable_count >= self.params.stable_limit:
            return True
        cap = self.params.max_generations
        return cap is not None and state.generation >= cap

    def run(self, callback: Callable[[SearchState, str], None] | None = None) -> SearchState:
        if self.state is None:
            self.init_state()
        while not self.done():
            event = self.step_generation()
            if callback is not None:
                callback(self.state, event)
            if event != "none":
                log.info(
                    "gen %d %s fitness=%.4f best=%s shortest=%s",
                    self.state.generation,
                    event,
                    self.state.history[-1].fitness,
                    print_program(self.state.best.program),
                    print_program(self.state.shortest.program),
                )
        return self.state


@dataclass
class SearchResult:
    shortest: Champion
    best: Champion
    state: SearchState
    norms: BaselineNorms
    params: SearchParams
    seed: int
    champions: list
    evaluated: list = field(default_factory=list)

    @property
    def report(self) -> FitnessReport:
        return self.shortest.report

    def history_csv(self) -> str:
        return history_csv(self.state.history)


def history_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HISTORY_HEADER)
    for r in rows:
        writer.writerow((r.generation, r.event, repr(float(r.fitness)), r.length))
    return buf.getvalue()


def search(
    target: GrowthGraph,
    params: SearchParams | None = None,
    seed: int = 0,
    norms: BaselineNorms | None = None,
    cache_dir: str | os.PathLike | None = None,
    jobs: int = 1,
    callback=None,
) -> SearchResult:
    """Run the search on an in-memory target graph.

    ``norms`` is computed from an ER ensemble seeded by ``seed`` unless given;
    with ``cache_dir`` set the ensemble result is cached on disk.
    """
    params = (params or SearchParams()).for_mode(target.directed)
    target_profile = metric_profile(target, params.profile, stream(seed, "target"))
    if norms is None:
        if cache_dir is not None:
            norms = cached_baseline_norms(target, params.ensemble_size, params.profile, seed, cache_dir, target_profile, jobs)
        else:
            norms = baseline_norms(target, params.ensemble_size, params.profile, stream(seed, "baseline"), target_profile, jobs)
    scorer = Scorer(target, norms, params.growth, params.profile, target_profile)
    driver = EvolutionarySearch(scorer, params, seed)
    state = driver.run(callback)
    return SearchResult(state.shortest, state.best, state, norms, params, seed, driver.seen, driver.evaluated)


def run_search(
    target_edge_list: str | os.PathLike,
    params: SearchParams | None = None,
    seed: int = 0,
    directed: bool = True,
    shuffle_ids: bool = False,
    out_dir: str | os.PathLike | None = None,
    cache_dir: str | os.PathLike | None = None,
    jobs: int = 1,
) -> SearchResult:
    """Read a target edge list, run the search and optionally write a run directory."""
    try:
        target, _ = read_edge_list(target_edge_list, directed, shuffle_ids, stream(seed, "identifiers"))
    except OSError as exc:
        raise OSError(f"cannot read target {target_edge_list}: {exc}") from exc
    result = search(target, params, seed, cache_dir=cache_dir, jobs=jobs)
    if out_dir is not None:
        write_run_dir(result, out_dir, {"target": str(target_edge_list), "shuffle_ids": shuffle_ids})
    return result


def write_run_dir(result: SearchResult, out_dir: str | os.PathLike, extra: dict | None = None) -> Path:
    """Write ``run.json``, ``history.csv``, ``best.gen``, ``shortest.gen`` and ``synthetic.edges``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    state = result.state
    run = {
        **(extra or {}),
        "seed": result.seed,
        "params": result.params.to_dict(),
        "generations": state.generation,
        "baseline_means": result.norms.per_metric_mean,
        "target_hash": result.norms.target_id,
        "best": {"program": print_program(result.best.program), **result.best.report.to_dict()},
        "shortest": {"program": print_program(result.shortest.program), **result.shortest.report.to_dict()},
    }
    (out / "run.json").write_text(json.dumps(run, indent=2) + "\n")
    (out / "history.csv").write_text(result.history_csv())
    save_program(result.best.program, out / "best.gen", f"best: fitness {result.best.fitness!r}")
    save_program(result.shortest.program, out / "shortest.gen", f"shortest: fitness {result.shortest.fitness!r}")
    if result.shortest.network is not None:
        (out / "synthetic.edges").write_text(format_edge_list(result.shortest.network))
    return out
