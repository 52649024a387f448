import numpy as np
import pytest

from netmorph.edgelist import EdgeListError, format_edge_list, parse_edge_list, read_edge_list, write_edge_list
from netmorph.growth import random_graph


def test_first_appearance_ids():
    g, labels = parse_edge_list(["# comment", "b a", "", "a c  # trailing"])
    assert labels == ["b", "a", "c"]
    assert g.arcs().tolist() == [[0, 1], [1, 2]]


def test_loops_and_duplicates_dropped(caplog):
    g, _ = parse_edge_list(["1 2", "2 2", "1 2", "2 1"])
    assert g.m == 2
    assert "dropped 1 self-loops and 1 duplicate" in caplog.text


def test_undirected_duplicates():
    g, _ = parse_edge_list(["1 2", "2 1"], directed=False)
    assert g.m == 1


def test_bad_line():
    with pytest.raises(EdgeListError, match="line 2"):
        parse_edge_list(["1 2", "3"])
    with pytest.raises(EdgeListError):
        parse_edge_list(["# nothing"])


def test_shuffle_is_seeded_relabelling():
    lines = [f"v{a} v{b}" for a, b in [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]]
    g1, l1 = parse_edge_list(lines, shuffle_ids=True, rng=np.random.default_rng(5))
    g2, l2 = parse_edge_list(lines, shuffle_ids=True, rng=np.random.default_rng(5))
    assert l1 == l2 and g1.arcs().tolist() == g2.arcs().tolist()
    # same arcs by label
    assert sorted((l1[a], l1[b]) for a, b in g1.arcs().tolist()) == sorted(tuple(x.split()) for x in lines)


@pytest.mark.parametrize("directed", [True, False])
def test_round_trip(tmp_path, directed):
    g = random_graph(25, 60, directed, np.random.default_rng(1))
    path = tmp_path / "g.edges"
    write_edge_list(g, path)
    h, labels = read_edge_list(path, directed)
    # identifiers are re-assigned by first appearance; map back through labels
    back = sorted((int(labels[a]) - 1, int(labels[b]) - 1) for a, b in h.arcs().tolist())
    assert back == sorted(map(tuple, g.arcs().tolist()))


def test_labels_in_output():
    g, labels = parse_edge_list(["x y"])
    assert format_edge_list(g, labels) == "x y\n"
    assert format_edge_list(g) == "1 2\n"
