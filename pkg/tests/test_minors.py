import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bramble_forge.cutmatch import RandomMatchingPlayer, run_game
from bramble_forge.graph import Graph, clique, cycle, grid, path_graph, random_gnp
from bramble_forge.minors import MinorModel, find_clique_minor, touching_edge, verify_minor_model

from . import oracles


def test_verify_examples():
    assert verify_minor_model(clique(4), MinorModel.of([[0], [1], [2], [3]]))
    chk = verify_minor_model(grid(2, 2), MinorModel.of([[0], [1], [2], [3]]))
    assert not chk and "not adjacent" in chk.reason
    # three L-shapes in the 4x4 grid meeting pairwise
    ls = MinorModel.of([[0, 1, 4], [2, 3, 6, 5], [8, 9, 12]])
    assert verify_minor_model(grid(4, 4), ls)


def test_verify_defects():
    g = grid(3, 3)
    assert "empty" in verify_minor_model(g, MinorModel.of([[0], []])).reason
    assert "share" in verify_minor_model(g, MinorModel.of([[0, 1], [1, 2]])).reason
    assert "not connected" in verify_minor_model(g, MinorModel.of([[0, 2], [1]])).reason
    assert "leaves" in verify_minor_model(g, MinorModel.of([[0], [40]])).reason


def test_verify_against_pattern():
    m = MinorModel.of([[0], [1], [2], [3]])
    assert verify_minor_model(cycle(4), m, pattern=cycle(4))
    assert not verify_minor_model(cycle(4), m, pattern=clique(4))
    assert not verify_minor_model(cycle(4), m, pattern=cycle(3))


def test_touching_edge_is_smallest():
    assert touching_edge(grid(3, 3), {4, 1}, {2, 5}) == (1, 2)
    assert touching_edge(grid(3, 3), {0}, {8}) is None


def test_k5_and_trees():
    m = find_clique_minor(clique(5), target_t=5)
    assert m.t == 5 and all(len(s) == 1 for s in m.branch_sets)
    assert find_clique_minor(path_graph(6)).t == 2
    star = Graph.from_edges(6, [(0, i) for i in range(1, 6)])
    assert find_clique_minor(star).t == 2
    assert find_clique_minor(Graph(1)).t == 1


def test_target_truncates():
    m = find_clique_minor(clique(6), target_t=3)
    assert m.t == 3 and verify_minor_model(clique(6), m)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(3, 12))
def test_trees_never_exceed_two(seed, n):
    rng = np.random.default_rng(seed)
    edges = [(v, int(rng.integers(0, v))) for v in range(1, n)]
    t = Graph.from_edges(n, edges)
    m = find_clique_minor(t, attempts=5, seed=seed)
    assert m.t <= 2 and verify_minor_model(t, m)


@pytest.mark.parametrize("seed", range(30))
def test_hadwiger_oracle_small(seed):
    g = random_gnp(7, 0.5, seed=seed)
    exact = oracles.hadwiger(g)
    found = find_clique_minor(g, seed=seed).t
    assert found <= exact
    assert found == exact


def test_monotone_in_target():
    g = run_game(32, RandomMatchingPlayer(1), seed=1).multigraph.simple()
    full = find_clique_minor(g, seed=2)
    for t in range(1, full.t + 1):
        assert find_clique_minor(g, target_t=t, seed=2).t == t


def test_game_graph_clique():
    ok = 0
    for s in range(10):
        g = run_game(64, RandomMatchingPlayer(s), seed=s).multigraph.simple()
        m = find_clique_minor(g, seed=s)
        assert verify_minor_model(g, m)
        ok += m.t >= 4
    assert ok >= 8


def test_json_round_trip():
    m = MinorModel.of([[3, 1], [0]])
    assert MinorModel.from_json(m.to_json()) == m
    assert m.to_json() == {"branch_sets": [[1, 3], [0]]}
