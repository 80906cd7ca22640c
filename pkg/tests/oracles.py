"""Independent reference implementations used only by the tests.

Each oracle is deliberately naive (enumeration or a third-party solver) and
shares no code with the package beyond the Graph container.
"""

from __future__ import annotations

import itertools
import math

import networkx as nx
import numpy as np
from scipy.optimize import linprog


def to_nx(g) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def components(g) -> list[frozenset[int]]:
    return sorted((frozenset(c) for c in nx.connected_components(to_nx(g))), key=min)


def is_bramble(g, elements) -> bool:
    """Quadratic check straight from the definition."""
    h = to_nx(g)
    sets = [set(e) for e in elements]
    for s in sets:
        if not s or not nx.is_connected(h.subgraph(s)):
            return False
    for a, b in itertools.combinations(sets, 2):
        if a & b:
            continue
        if not any(h.has_edge(x, y) for x in a for y in b):
            return False
    return True


def min_hitting_set(elements, n) -> int:
    sets = [set(e) for e in elements]
    if not sets:
        return 0
    for size in range(n + 1):
        for cand in itertools.combinations(range(n), size):
            c = set(cand)
            if all(s & c for s in sets):
                return size
    raise AssertionError("no hitting set")


def fractional_hitting_lp(elements, n) -> float:
    """min sum x_v  s.t.  sum_{v in B} x_v >= 1, 0 <= x."""
    a = np.zeros((len(elements), n))
    for i, e in enumerate(elements):
        a[i, list(e)] = 1
    res = linprog(np.ones(n), A_ub=-a, b_ub=-np.ones(len(elements)), bounds=(0, None), method="highs")
    assert res.status == 0
    return float(res.fun)


def linkage_exists(g, a, b, forbidden=()) -> bool:
    """Backtracking over simple paths: route a[0], a[1], ... in turn."""
    h = to_nx(g)
    blocked = set(forbidden)
    ends = set(a) | set(b)
    a = list(a)

    def go(i, used, free_b):
        if i == len(a):
            return True
        src = a[i]
        for dst in sorted(free_b):
            if src == dst:
                paths = [[src]]
            else:
                allowed = (set(h) - blocked - used - ends) | {src, dst}
                paths = nx.all_simple_paths(h.subgraph(allowed), src, dst)
            for p in paths:
                if go(i + 1, used | set(p), free_b - {dst}):
                    return True
        return False

    return go(0, set(), frozenset(b))


def edge_expansion(g) -> float:
    n = g.n
    best = math.inf
    for size in range(1, n // 2 + 1):
        for s in itertools.combinations(range(n), size):
            s = set(s)
            cut = sum(1 for u, v in g.edges if (u in s) != (v in s))
            best = min(best, cut / size)
    return best


def hadwiger(g) -> int:
    """Largest t with a K_t minor, by enumerating labelled partitions of a
    vertex subset (restricted-growth strings with a 'deleted' label)."""
    n = g.n
    h = to_nx(g)
    best = 1 if n else 0

    def ok(blocks):
        for blk in blocks:
            if not nx.is_connected(h.subgraph(blk)):
                return False
        for x, y in itertools.combinations(blocks, 2):
            if not any(h.has_edge(u, v) for u in x for v in y):
                return False
        return True

    def rec(v, blocks):
        nonlocal best
        if v == n:
            if len(blocks) > best and ok(blocks):
                best = len(blocks)
            return
        if len(blocks) + (n - v) <= best:
            return
        rec(v + 1, blocks)
        for blk in blocks:
            blk.append(v)
            rec(v + 1, blocks)
            blk.pop()
        blocks.append([v])
        rec(v + 1, blocks)
        blocks.pop()

    rec(0, [])
    return best


def exact_miss_probability(cf, ell: int, x) -> float:
    """Enumerate every hub sequence and every path choice per segment."""
    x = set(x)
    w = list(cf.w)
    total = 0.0
    for hubs in itertools.product(w, repeat=ell):
        fams = [cf.family(hubs[i], hubs[(i + 1) % ell]) for i in range(ell)]
        for choice in itertools.product(*fams):
            prob = math.prod(wt for _, wt in choice)
            if all(x.isdisjoint(p) for p, _ in choice):
                total += prob
    return total / len(w) ** ell


def throughput(cf) -> dict[int, float]:
    out: dict[int, float] = {}
    for fam in cf.families.values():
        for p, wt in fam:
            for v in set(p):
                out[v] = out.get(v, 0.0) + wt
    return out
