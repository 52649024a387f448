"""Edge-list ingestion and export.

Input is UTF-8 text with one ``src dst`` label pair per line; blank lines and
``#`` comments are skipped. Labels become 1-based sequential identifiers in
order of first appearance (or in a seeded random order). Identifiers are
visible to generator programs, so the ordering matters.
"""

from __future__ import annotations

import logging
import os

import numpy as np

from .growth import GrowthGraph

log = logging.getLogger(__name__)


class EdgeListError(ValueError):
    pass


def parse_edge_list(lines, directed: bool = True, shuffle_ids: bool = False, rng=None):
    """Build a graph from edge-list lines.

    Returns ``(graph, labels)`` where ``labels[k]`` is the original label of
    vertex ``k`` (identifier ``k + 1``). Self-loops and duplicate arcs are
    dropped with a warning.
    """
    index: dict[str, int] = {}
    pairs = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) < 2:
            raise EdgeListError(f"line {lineno}: expected 'src dst', got {raw.strip()!r}")
        a, b = fields[0], fields[1]
        for label in (a, b):
            if label not in index:
                index[label] = len(index)
        pairs.append((index[a], index[b]))
    if not index:
        raise EdgeListError("edge list contains no arcs")

    labels = list(index)
    n = len(labels)
    perm = np.arange(n)
    if shuffle_ids:
        rng = rng if rng is not None else np.random.default_rng()
        perm = rng.permutation(n)
        labels = [labels[k] for k in np.argsort(perm)]

    g = GrowthGraph(n, directed)
    loops = dupes = 0
    for a, b in pairs:
        a, b = int(perm[a]), int(perm[b])
        if a == b:
            loops += 1
        elif g.adj[a, b]:
            dupes += 1
        else:
            g.add_arc(a, b)
    if loops or dupes:
        log.warning("dropped %d self-loops and %d duplicate arcs", loops, dupes)
    return g, labels


def read_edge_list(path: str | os.PathLike, directed: bool = True, shuffle_ids: bool = False, rng=None):
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, directed, shuffle_ids, rng)


def format_edge_list(g: GrowthGraph, labels=None) -> str:
    arcs = g.arcs()
    if labels is None:
        return "".join(f"{a + 1} {b + 1}\n" for a, b in arcs.tolist())
    return "".join(f"{labels[a]} {labels[b]}\n" for a, b in arcs.tolist())


def write_edge_list(g: GrowthGraph, path: str | os.PathLike, labels=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g, labels))
