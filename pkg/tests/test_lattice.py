from __future__ import annotations

from itertools import product

import pytest

from hqs_accred.errors import NotTwoColourable
from hqs_accred.lattice import (
    InteractionGraph,
    checkerboard_set,
    cycle_graph,
    format_graph,
    is_bipartite,
    parse_graph,
    path_graph,
    square_lattice,
    two_color,
    validate_chromatic,
)


def brute_force_bipartite(g):
    for bits in product((0, 1), repeat=g.vertex_count):
        if all(bits[u - 1] != bits[v - 1] for u, v in g.edges):
            return True
    return False


def test_square_lattice_edges():
    g = square_lattice(2, 3)
    assert g.sorted_edges() == [(1, 2), (1, 4), (2, 3), (2, 5), (3, 6), (4, 5), (5, 6)]


def test_two_color_vertex_one_gets_colour_one():
    c = two_color(square_lattice(3, 3))
    assert c.color[1] == 1
    assert set(c.subset(1)) == {1, 3, 5, 7, 9}


@pytest.mark.parametrize("n", [3, 5, 7])
def test_odd_cycle_witness(n):
    with pytest.raises(NotTwoColourable) as exc:
        two_color(cycle_graph(n))
    w = exc.value.witness
    assert len(w) % 2 == 1
    g = cycle_graph(n)
    for a, b in zip(w, w[1:] + w[:1]):
        assert (min(a, b), max(a, b)) in g.edges


def test_witness_is_cycle_in_larger_graph():
    g = InteractionGraph.from_edges(6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 2)])
    with pytest.raises(NotTwoColourable) as exc:
        two_color(g)
    w = exc.value.witness
    assert len(w) == 5 and len(set(w)) == 5
    for a, b in zip(w, w[1:] + w[:1]):
        assert (min(a, b), max(a, b)) in g.edges


def test_random_graphs_agree_with_brute_force(rng):
    for _ in range(150):
        n = int(rng.integers(1, 8))
        edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < 0.35]
        g = InteractionGraph.from_edges(n, edges)
        assert is_bipartite(g) == brute_force_bipartite(g)
        if is_bipartite(g):
            assert two_color(g).is_valid_for(g)


@pytest.mark.parametrize("n_l", range(1, 8))
def test_checkerboard_is_chromatic(n_l):
    g = square_lattice(n_l, n_l)
    assert validate_chromatic(g, checkerboard_set(n_l))


def test_checkerboard_small_cases():
    assert set(checkerboard_set(3)) == {1, 3, 5, 7, 9}
    assert set(checkerboard_set(2)) == {1, 4}


def test_path_and_isolated():
    assert two_color(path_graph(4)).color == {1: 1, 2: 2, 3: 1, 4: 2}
    assert two_color(InteractionGraph(3)).color == {1: 1, 2: 1, 3: 1}


@pytest.mark.parametrize("edges", [[(1, 1)], [(1, 4)], [(1, 2), (2, 1)]])
def test_bad_edges(edges):
    with pytest.raises(ValueError):
        InteractionGraph.from_edges(3, edges)


def test_graph_roundtrip():
    g = square_lattice(2, 2)
    assert parse_graph(format_graph(g)) == g
    with pytest.raises(ValueError):
        parse_graph("3\n1 2 3\n")
