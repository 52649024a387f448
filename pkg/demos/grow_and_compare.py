"""
Growing networks from generator programs
========================================

A generator program assigns a weight to every candidate arc; at each step
one arc is drawn with probability proportional to its weight. Here we grow
two networks of the same size, one from a constant program (every candidate
equally likely) and one from ``(indeg j)`` (preferential attachment), and
look at how they differ.
"""

import numpy as np

from netmorph import grow_network, metric_profile, dissimilarity_vector, parse_program
from netmorph.rng import stream

###############################################################################
# Programs are prefix s-expressions. Constants and arc-context variables are
# the leaves; ``(indeg j)`` reads the in-degree of the arc's head.

uniform = parse_program("1")
preferential = parse_program("(indeg j)")

###############################################################################
# Growth starts from isolated vertices and adds one arc per step.

seed = 7
g_uni = grow_network(uniform, 100, 1000, rng=stream(seed, "growth", 0))
g_pa = grow_network(preferential, 100, 1000, rng=stream(seed, "growth", 1))

for name, g in (("uniform", g_uni), ("preferential", g_pa)):
    print(f"{name:>12}: max in-degree {g.indeg.max():3d}, "
          f"in-degree std {g.indeg.std():.2f}")

###############################################################################
# The metric profile bundles degree and PageRank distributions, distance
# histograms and the triad profile. Comparing two profiles yields one
# dissimilarity per metric.

pu, pp = metric_profile(g_uni), metric_profile(g_pa)
for metric, value in dissimilarity_vector(pu, pp).items():
    print(f"{metric:>6}  {value:.4f}")

###############################################################################
# The distance histograms are plain counts per hop distance.

print(pp.histograms["d_d"].to_lines())
