import json
import math

import pytest

from bramble_forge.bramble import congestion, verify_bramble
from bramble_forge.errors import BudgetExceeded, CliqueTooSmall, DegenerateParameters, GameNotConverged
from bramble_forge.graph import Graph, is_connected_set
from bramble_forge.minors import MinorModel, find_clique_minor
from bramble_forge.pathsets import (
    PathOfSetsSystem,
    build_spines,
    check_spines,
    compute_parameters,
    embed_and_assemble,
    eval_poly,
    grid_system,
    verify_system,
)


def replace(sys, **kw):
    data = {f: getattr(sys, f) for f in ("host", "S", "A", "B", "P")}
    data.update(kw)
    return PathOfSetsSystem(**data)


def test_grid_system_shape():
    g, sys = grid_system(4, 5)
    assert (g.n, sys.r, sys.h) == (4 * 24, 5, 4)
    assert sys.S[1] == frozenset(row * 24 + c for row in range(4) for c in range(5, 9))
    assert sys.A[1] == (5, 29, 53, 77) and sys.B[1] == (8, 32, 56, 80)
    assert sys.P[0][0] == (3, 4, 5)


@pytest.mark.parametrize("h,r", [(3, 2), (4, 5), (2, 3), (2, 1)])
def test_grid_system_verifies(h, r):
    _, sys = grid_system(h, r)
    assert verify_system(sys, strong=True)


def test_h1_is_degenerate():
    g, sys = grid_system(1, 2)
    assert g.n == 3 and g.m == 2
    assert sys.S == (frozenset({0}), frozenset({2}))
    assert sys.P == (((0, 1, 2),),)
    chk = verify_system(sys)
    assert not chk and "intersect" in chk.reason


def test_missing_path_diagnostic():
    _, sys = grid_system(3, 3)
    broken = replace(sys, P=(sys.P[0][:-1], sys.P[1]))
    chk = verify_system(broken)
    assert not chk and chk.reason == "P_0: linkage size 2, expected 3"


def test_overlapping_clusters():
    _, sys = grid_system(3, 2)
    bad = replace(sys, S=(sys.S[0] | {sys.P[0][0][1]}, sys.S[1] | {sys.P[0][0][1]}))
    chk = verify_system(bad)
    assert not chk and "overlap" in chk.reason


def test_other_defects():
    _, sys = grid_system(3, 2)
    # A_1 moved off its cluster
    assert not verify_system(replace(sys, A=(sys.A[0], (0, 1, 2))))
    # a connecting path that wanders into a cluster
    _, s3 = grid_system(2, 2)
    cols = 5
    wander = ((1, 2, 3), (cols + 1, cols + 2, 3))
    assert not verify_system(replace(s3, P=(wander,)))
    # width above the exact budget
    with pytest.raises(BudgetExceeded):
        verify_system(sys, budget=2)


def test_blocked_cluster_detected():
    # star cluster: the centre is a 1-cut between A and B
    star = Graph.from_edges(5, [(0, i) for i in range(1, 5)])
    sys = PathOfSetsSystem(star, (frozenset(range(5)),), ((1, 2),), ((3, 4),), ())
    chk = verify_system(sys, strong=False)
    assert not chk and "no linkage" in chk.reason


def test_json_round_trip():
    _, sys = grid_system(3, 3)
    assert PathOfSetsSystem.from_json(json.loads(json.dumps(sys.to_json()))) == sys


def test_spines():
    _, sys = grid_system(3, 4)
    spines, blocks = build_spines(sys)
    assert len(spines) == 3 and len(blocks) == 4
    assert check_spines(sys, spines)
    assert not check_spines(sys, [spines[0], spines[0], spines[2]])


# ---------------------------------------------------------------- params


def hand_params(k, c, q):
    lk = math.log(k, 2)
    x = c * lk * lk + 1
    qv = sum(coef * lk**i * x**j for (i, j), coef in q.items())
    h = int(k // (qv * x**48))
    return h


def test_params_q1_large_k():
    k = 2.0**48 * 10
    p = compute_parameters(k, strict=False)
    assert p.h == hand_params(k, 1.0, {(0, 0): 1.0})
    assert p.degenerate


def test_params_tiny_k():
    p = compute_parameters(4, strict=False)
    assert p.h == hand_params(4, 1.0, {(0, 0): 1.0}) == 0
    with pytest.raises(DegenerateParameters) as exc:
        compute_parameters(4)
    assert exc.value.params.h == 0


def test_params_r_formula_when_h_positive():
    # k large enough that h >= 2 with q = 1, c = 1
    k = 2.0**1000
    p = compute_parameters(k)
    assert p.h == hand_params(k, 1.0, {(0, 0): 1.0}) >= 2
    assert p.r == math.floor(math.log2(p.h) ** 2 + 1)
    assert p.f == pytest.approx(p.h * p.r**48)
    assert p.f_le_k == (p.f <= k)


def test_params_validation_and_poly():
    assert eval_poly({(1, 0): 2.0, (0, 2): 1.0}, 3, 4) == 22
    with pytest.raises(ValueError):
        compute_parameters(1)
    with pytest.raises(ValueError):
        compute_parameters(100, c=0.5)
    with pytest.raises(ValueError):
        compute_parameters(100, q={(0, 0): -1})


# -------------------------------------------------------------- pipeline


@pytest.mark.parametrize("seed", [0, 3])
def test_embed_congestion_two(seed):
    _, sys = grid_system(4, 40)
    b, art = embed_and_assemble(sys, seed=seed)
    assert verify_bramble(sys.host, b)
    assert congestion(sys.host, b)[0] <= 2
    assert all(is_connected_set(sys.host, e) for e in b)
    assert len(b) == art.model.t >= 3
    assert art.checks["valid"] and art.checks["congestion"] <= 2
    for (i, u, v), q in art.edge_paths.items():
        assert set(q) <= sys.S[i]


def test_embed_deterministic():
    _, sys = grid_system(4, 20)
    a, _ = embed_and_assemble(sys, seed=5)
    b, _ = embed_and_assemble(sys, seed=5)
    assert a == b


def test_embed_forced_small_clique():
    _, sys = grid_system(4, 20)
    b, art = embed_and_assemble(sys, clique_finder=lambda H, s: find_clique_minor(H, target_t=2, seed=s))
    assert len(b) == 2 and verify_bramble(sys.host, b)


def test_embed_odd_width_uses_even_prefix():
    _, sys = grid_system(3, 30)
    b, art = embed_and_assemble(sys, seed=1)
    assert verify_bramble(sys.host, b) and congestion(sys.host, b)[0] <= 2
    assert art.game.state.h == 2


def test_embed_errors():
    _, sys = grid_system(4, 1)
    with pytest.raises(GameNotConverged) as exc:
        embed_and_assemble(sys, target_alpha=5.0)
    assert exc.value.partial.game.rounds == 1
    _, sys = grid_system(4, 20)
    with pytest.raises(CliqueTooSmall):
        embed_and_assemble(sys, clique_finder=lambda H, s: MinorModel.of([[0]]))
    _, sys = grid_system(1, 3)
    with pytest.raises(ValueError):
        embed_and_assemble(sys)


def test_artifacts_json():
    _, sys = grid_system(4, 10)
    _, art = embed_and_assemble(sys, seed=2)
    out = json.loads(json.dumps(art.to_json()))
    assert len(out["spines"]) == 4
