"""Evolve generator programs that grow networks resembling a target network."""

from .genlang import (
    CONSTANT,
    PREFERENTIAL,
    ArcContext,
    GeneratorProgram,
    TreeGenParams,
    evaluate,
    mutate,
    parse_program,
    print_program,
    program_length,
    random_program,
)
from .growth import GrowthGraph, GrowthParams, SaturatedError, grow_network, random_graph
from .netmetrics import MetricProfile, ProfileParams, dissimilarity_vector, metric_profile
from .fitness import BaselineNorms, FitnessReport, baseline_norms, fitness
from .evolve import SearchParams, run_search, search
from .gensim import GenDissimilarity, generator_dissimilarity

__version__ = "0.1.0"
