"""
Recovering a generator by evolutionary search
=============================================

We grow a target network with preferential attachment and let the search
look for a program that reproduces it. Fitness is the worst per-metric
dissimilarity, each divided by the mean dissimilarity between the target
and an ensemble of same-size random graphs, so 1 means "no better than
random". The search keeps the best program and the shortest program within
10% of it; the shortest one is the answer.

A short run is used here; the command-line ``evolve`` defaults to 1000
stable generations.
"""

from netmorph import SearchParams, grow_network, parse_program, print_program, search
from netmorph.rng import stream

target = grow_network(parse_program("(indeg j)"), 60, 400, rng=stream(3, "target"))

###############################################################################
# The callback sees every generation; we print champion changes only.


def show(state, event):
    if event != "none":
        print(f"gen {state.generation:4d} {event:>8}  best {state.best.fitness:.3f}  "
              f"shortest {print_program(state.shortest.program)}")


result = search(target, SearchParams(stable_limit=80, ensemble_size=10), seed=3, callback=show)

###############################################################################
# The per-metric ratios of the final program show which aspects of the
# target it reproduces.

print("final:", print_program(result.shortest.program))
for metric, ratio in result.report.ratios.items():
    print(f"{metric:>6}  {ratio:.3f}")
