"""
Comparing generators by behaviour
=================================

Two programs can look different and still behave identically: weights are
normalised into probabilities, so ``(indeg j)`` and ``(* (indeg j) 2)`` pick
arcs the same way. The behavioural dissimilarity grows a network with one
program and, at every step, measures how far apart the two programs'
selection probabilities are over the same candidates; it then swaps roles
and averages.
"""

from netmorph import generator_dissimilarity, parse_program

programs = {
    "constant": "1",
    "preferential": "(indeg j)",
    "doubled": "(* (indeg j) 2)",
    "smoothed": "(+ (indeg j) 1)",
    "out-degree": "(outdeg i)",
}

reference = parse_program("(indeg j)")
for name, text in programs.items():
    d = generator_dissimilarity(parse_program(text), reference, 60, 400)
    print(f"{name:>12}  d = {d.d:.5f}   ({d.d_ww2:.5f} / {d.d_w2w:.5f})")
