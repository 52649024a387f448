import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netmorph.genlang import TreeGenParams, constant_program, parse_program, preferential_program, random_program
from netmorph.gensim import GenDissimilarity, directed_dissim, generator_dissimilarity, uniformity_deviation

N, M = 40, 200


def test_self_zero():
    pa = preferential_program()
    assert directed_dissim(pa, pa, N, M, rng=np.random.default_rng(0)) == 0.0
    assert generator_dissimilarity(pa, pa, N, M).d == 0.0


def test_constant_scale_invariance():
    assert generator_dissimilarity(constant_program(1.0), constant_program(7.0), N, M).d == 0.0


def test_doubling_invariance():
    pa = preferential_program()
    doubled = parse_program("(* (indeg j) 2)")
    assert generator_dissimilarity(pa, doubled, N, M).d == pytest.approx(0.0, abs=1e-15)


def test_swap_symmetry():
    a, b = constant_program(), preferential_program()
    ab = generator_dissimilarity(a, b, N, M, seeds=(3, 4))
    ba = generator_dissimilarity(b, a, N, M, seeds=(4, 3))
    assert ab.d_ww2 == ba.d_w2w and ab.d_w2w == ba.d_ww2 and ab.d == ba.d


def test_er_vs_pa_positive():
    d = generator_dissimilarity(constant_program(), preferential_program(), 100, 1000)
    assert d.d > 0.001
    assert 0 <= d.d_ww2 <= 1 and 0 <= d.d_w2w <= 1


def test_mode_mismatch():
    with pytest.raises(ValueError):
        directed_dissim(constant_program(), constant_program(directed=False), N, M)


def test_to_dict():
    g = GenDissimilarity(0.2, 0.4, (1, 2))
    assert g.to_dict() == {"d_ww2": 0.2, "d_w2w": 0.4, "d": pytest.approx(0.3), "seeds": [1, 2]}


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_programs_bounded(seed):
    rng = np.random.default_rng(seed)
    params = TreeGenParams()
    w, w2 = random_program(params, rng), random_program(params, rng)
    assert generator_dissimilarity(w, w, 15, 30).d == 0.0
    d = generator_dissimilarity(w, w2, 15, 30, seeds=(seed % 7, seed % 11))
    assert 0.0 <= d.d <= 1.0


def test_uniformity_deviation():
    rng = np.random.default_rng(1)
    assert uniformity_deviation(constant_program(3.0), 30, 100, trials=50, rng=rng) == 0.0
    assert uniformity_deviation(preferential_program(), 30, 100, trials=50, rng=rng) > 1e-3
