import json

import numpy as np
import pytest

from netmorph.fitness import (
    BaselineError,
    BaselineNorms,
    FitnessReport,
    Scorer,
    baseline_dissimilarities,
    baseline_norms,
    cached_baseline_norms,
    fitness,
    fitness_from_dissimilarities,
    graph_hash,
)
from netmorph.genlang import constant_program
from netmorph.growth import GrowthGraph, random_graph
from netmorph.netmetrics import DIRECTED_METRICS, UNDIRECTED_METRICS, ProfileParams, metric_profile


@pytest.fixture(scope="module")
def er_target():
    return random_graph(60, 400, True, np.random.default_rng(100))


def test_worked_ratio():
    norms = BaselineNorms("t", 30, {"k": 5.0})
    report = fitness_from_dissimilarities({"k": 3.0}, norms)
    assert report.ratios["k"] == 0.6
    assert report.fitness == 0.6


def test_fitness_is_max_ratio():
    norms = BaselineNorms("t", 1, {"a": 2.0, "b": 4.0, "c": 1.0})
    report = fitness_from_dissimilarities({"a": 1.0, "b": 6.0, "c": 0.5}, norms)
    assert report.fitness == max(report.ratios.values()) == 1.5


def test_metric_mismatch():
    with pytest.raises(ValueError):
        fitness_from_dissimilarities({"a": 1.0}, BaselineNorms("t", 1, {"b": 1.0}))


def test_zero_mean_refused():
    with pytest.raises(BaselineError):
        BaselineNorms("t", 1, {"a": 0.0})


def test_norms_shape_and_determinism(er_target):
    a = baseline_norms(er_target, 30, rng=np.random.default_rng(1))
    b = baseline_norms(er_target, 30, rng=np.random.default_rng(1))
    assert a == b
    assert tuple(a.per_metric_mean) == DIRECTED_METRICS
    assert all(v > 0 for v in a.per_metric_mean.values())
    assert a.ensemble_size == 30


def test_norms_independent_of_jobs(er_target):
    a = baseline_norms(er_target, 6, rng=np.random.default_rng(2))
    b = baseline_norms(er_target, 6, rng=np.random.default_rng(2), jobs=3)
    assert a == b


def test_undirected_norms():
    g = random_graph(40, 100, False, np.random.default_rng(3))
    norms = baseline_norms(g, 5, rng=np.random.default_rng(3))
    assert tuple(norms.per_metric_mean) == UNDIRECTED_METRICS


def test_self_fitness_zero(er_target):
    norms = baseline_norms(er_target, 5, rng=np.random.default_rng(4))
    p = metric_profile(er_target)
    report = fitness(p, p, norms)
    assert report.fitness == 0.0 and all(r == 0 for r in report.ratios.values())


def test_ratio_invariant_to_common_rescaling(er_target):
    rng = np.random.default_rng(5)
    rows = baseline_dissimilarities(er_target, 10, rng=rng)
    cand = rows[0]
    means = {k: np.mean([r[k] for r in rows[1:]]) for k in cand}
    base = fitness_from_dissimilarities(cand, BaselineNorms("t", 9, means))
    scaled_cand = {k: (v * 17.0 if k == "tau" else v) for k, v in cand.items()}
    scaled_means = {k: (v * 17.0 if k == "tau" else v) for k, v in means.items()}
    scaled = fitness_from_dissimilarities(scaled_cand, BaselineNorms("t", 9, scaled_means))
    assert scaled.ratios["tau"] == pytest.approx(base.ratios["tau"], rel=1e-12)
    assert scaled.fitness == pytest.approx(base.fitness, rel=1e-12)


def test_er_candidate_emd_ratios_near_one():
    # the EMD-based metrics aggregate over every vertex, so a fresh ER
    # candidate scores close to the ensemble mean on them
    rng = np.random.default_rng(6)
    target = random_graph(100, 1000, True, rng)
    norms = baseline_norms(target, 30, rng=rng)
    target_profile = metric_profile(target)
    ok = 0
    for _ in range(20):
        cand = metric_profile(random_graph(100, 1000, True, rng))
        report = fitness(cand, target_profile, norms)
        ok += all(0.5 <= report.ratios[k] <= 2.0 for k in ("k_in", "k_out", "PR_r"))
    assert ok >= 18


def test_graph_hash():
    a = GrowthGraph.from_arcs(3, [(0, 1), (1, 2)])
    b = GrowthGraph.from_arcs(3, [(1, 2), (0, 1)])
    c = GrowthGraph.from_arcs(3, [(1, 0), (1, 2)])
    assert graph_hash(a) == graph_hash(b) != graph_hash(c)
    ua = GrowthGraph.from_arcs(3, [(0, 1)], directed=False)
    ub = GrowthGraph.from_arcs(3, [(1, 0)], directed=False)
    assert graph_hash(ua) == graph_hash(ub)


def test_cache_round_trip(er_target, tmp_path):
    params = ProfileParams()
    first = cached_baseline_norms(er_target, 4, params, seed=9, cache_dir=tmp_path)
    files = list(tmp_path.glob("baseline-*.json"))
    assert len(files) == 1
    data = json.loads(files[0].read_text())
    assert set(data) == {"target_hash", "params_hash", "ensemble_size", "means", "seed"}
    assert data["seed"] == 9 and data["ensemble_size"] == 4
    # a doctored cache value proves the second call reads the file
    data["means"]["tau"] = 123.0
    files[0].write_text(json.dumps(data))
    second = cached_baseline_norms(er_target, 4, params, seed=9, cache_dir=tmp_path)
    assert second.per_metric_mean["tau"] == 123.0
    assert second.per_metric_mean["k_in"] == first.per_metric_mean["k_in"]


def test_scorer(er_target):
    norms = baseline_norms(er_target, 5, rng=np.random.default_rng(7))
    scorer = Scorer(er_target, norms)
    report, net = scorer.score(constant_program(), np.random.default_rng(8))
    assert isinstance(report, FitnessReport)
    assert net.m == er_target.m and net.n == er_target.n
    with pytest.raises(ValueError):
        scorer.score(constant_program(directed=False), np.random.default_rng(8))
