"""Brambles and their certificates: validity, congestion, order."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import BudgetExceeded
from .graph import OK, Check, Graph, SubdivisionModel, fail, is_connected_set, is_subdivision_model

ORDER_BUDGET = 10**7


@dataclass(frozen=True)
class Bramble:
    elements: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, elements: Iterable[Iterable[int]]) -> "Bramble":
        return cls(tuple(frozenset(int(v) for v in e) for e in elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def to_json(self) -> dict:
        return {"elements": [sorted(e) for e in self.elements]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Bramble":
        return cls.of(data["elements"])


def _as_sets(b) -> list[frozenset[int]]:
    return [frozenset(e) for e in b]


def _mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def verify_bramble(g: Graph, b) -> Check:
    elements = _as_sets(b)
    for i, e in enumerate(elements):
        if not e:
            return fail(f"element {i} is empty", i)
        if any(not 0 <= v < g.n for v in e):
            return fail(f"element {i} leaves the graph", i)
        if not is_connected_set(g, e):
            return fail(f"element {i} is not connected", i)
    masks = [_mask(e) for e in elements]
    closed = []
    for e in elements:
        c = 0
        for v in e:
            c |= g.adj_masks[v]
        closed.append(c)
    for i in range(len(elements)):
        for j in range(i + 1, len(elements)):
            if not masks[i] & closed[j]:
                return fail(f"elements {i} and {j} do not touch", (i, j))
    return OK


def congestion(g: Graph, b) -> tuple[int, int | None]:
    count = Counter(v for e in _as_sets(b) for v in e)
    if not count:
        return 0, None
    v, c = min(count.items(), key=lambda kv: (-kv[1], kv[0]))
    return c, v


def _greedy_hitting_set(masks: list[int], n: int) -> list[int]:
    remaining = list(masks)
    chosen = []
    while remaining:
        cover = Counter(v for m in remaining for v in _bits(m))
        best = min(cover, key=lambda v: (-cover[v], v))
        chosen.append(best)
        bit = 1 << best
        remaining = [m for m in remaining if not m & bit]
    return chosen


def _disjoint_packing(masks: list[int]) -> int:
    """Size of a greedy family of pairwise disjoint sets, smallest first."""
    used = 0
    count = 0
    for m in sorted(masks, key=int.bit_count):
        if not m & used:
            used |= m
            count += 1
    return count


def _bits(m: int) -> list[int]:
    out = []
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return out


def _minimal_sets(masks: Iterable[int]) -> list[int]:
    """Drop duplicates and supersets; hitting a subset hits its supersets."""
    uniq = sorted(set(masks), key=lambda m: (m.bit_count(), m))
    keep: list[int] = []
    for m in uniq:
        if not any(k & m == k for k in keep):
            keep.append(m)
    return keep


def order_exact(g: Graph, b, budget: int = ORDER_BUDGET) -> tuple[int, list[int]]:
    """Minimum hitting set by branch and bound.

    Branches on the smallest unhit element, trying its vertices by
    descending coverage; vertices already tried on an earlier sibling are
    excluded from later branches. A greedy disjoint packing of the unhit
    elements is the pruning bound.
    """
    elements = _as_sets(b)
    if not elements:
        return 0, []
    if any(not e for e in elements):
        raise ValueError("empty element cannot be hit")
    masks = _minimal_sets(_mask(e) for e in elements)
    best = _greedy_hitting_set(masks, g.n)
    best_size = len(best)
    nodes = 0

    def lower_bound(ms):
        return _disjoint_packing(ms)

    def search(chosen: list[int], ms: list[int]):
        nonlocal best, best_size, nodes
        nodes += 1
        if nodes > budget:
            raise _Stop
        if not ms:
            if len(chosen) < best_size:
                best, best_size = list(chosen), len(chosen)
            return
        if any(m == 0 for m in ms):
            return
        if len(chosen) + lower_bound(ms) >= best_size:
            return
        target = min(ms, key=lambda m: (m.bit_count(), m))
        cover = Counter()
        for m in ms:
            for v in _bits(m):
                cover[v] += 1
        cand = sorted(_bits(target), key=lambda v: (-cover[v], v))
        excluded = 0
        for v in cand:
            bit = 1 << v
            rest = [m & ~excluded for m in ms if not m & bit]
            chosen.append(v)
            search(chosen, rest)
            chosen.pop()
            excluded |= bit

    try:
        search([], masks)
    except _Stop:
        lb = max(lower_bound(masks), int(np.ceil(order_fractional(g, b) - 1e-9)))
        raise BudgetExceeded(
            f"order search exceeded {budget} nodes", bounds=(lb, best_size)
        ) from None
    hs = sorted(best)
    hit = set(hs)
    assert all(hit & e for e in elements), "hitting-set certificate failed"
    return best_size, hs


class _Stop(Exception):
    pass


def order_fractional(g: Graph, b, iterations: int = 4000, eta: float = 0.05) -> float:
    """Certified lower bound on the fractional hitting-set number.

    Multiplicative weights over vertices build a fractional packing of
    elements (the LP dual); the returned value is the best packing seen,
    rescaled to be feasible, so it is a valid lower bound after any number
    of iterations.
    """
    elements = _as_sets(b)
    if not elements:
        return 0.0
    verts = sorted(set().union(*elements))
    index = {v: i for i, v in enumerate(verts)}
    inc = np.zeros((len(elements), len(verts)))
    for i, e in enumerate(elements):
        inc[i, [index[v] for v in e]] = 1.0
    load = np.zeros(len(verts))
    y = np.zeros(len(elements))
    best = 0.0
    for _ in range(iterations):
        w = np.exp(eta * (load - load.max()))
        cost = inc @ w
        i = int(np.argmin(cost))
        y[i] += 1.0
        load += inc[i]
        value = y.sum() / load.max()
        if value > best:
            best = value
    return float(best)


def lift_bramble(host: Graph, m: SubdivisionModel, b, branch: Graph | None = None) -> Bramble:
    """Lift a bramble of a topological minor to the host.

    Each element keeps the images of its vertices and the full images of
    its internal branch edges; the interior of every branch-edge path is
    additionally given to each element containing the path's lower-indexed
    endpoint. Hitting sets transfer both ways, so the order is unchanged.
    """
    if branch is not None:
        chk = is_subdivision_model(host, branch, m)
        if not chk:
            raise ValueError(f"invalid subdivision model: {chk.reason}")
    vmap = m.vertex_map
    out = []
    for e in _as_sets(b):
        lifted = {vmap[v] for v in e}
        for (u, v), p in m.edge_map.items():
            lo, hi = min(u, v), max(u, v)
            if lo in e:
                lifted.update(p[1:-1])
                if hi in e:
                    lifted.update(p)
        out.append(frozenset(lifted))
    return Bramble(tuple(out))


def grid_cross_bramble(n: int) -> Bramble:
    """Crosses of the top-left (n-1)x(n-1) subgrid, the bottom row, and the
    right column without its bottom cell, on grid(n, n). Order n + 1."""
    if n < 2:
        raise ValueError("need n >= 2")
    idx = lambda i, j: i * n + j  # noqa: E731
    els = []
    for i in range(n - 1):
        for j in range(n - 1):
            cross = {idx(i, c) for c in range(n - 1)} | {idx(r, j) for r in range(n - 1)}
            els.append(cross)
    els.append({idx(n - 1, c) for c in range(n)})
    els.append({idx(r, n - 1) for r in range(n - 1)})
    return Bramble.of(els)


def certificate_report(g: Graph, b, budget: int = ORDER_BUDGET) -> dict:
    """The JSON certificate: validity, congestion, order (or bounds)."""
    chk = verify_bramble(g, b)
    c, _ = congestion(g, b)
    lb = order_fractional(g, b)
    report = {"valid": chk.ok, "congestion": c, "order_lb": lb, "order": None, "hitting_set": None}
    if not chk.ok:
        report["violation"] = chk.reason
    try:
        order, hs = order_exact(g, b, budget)
        report["order"] = order
        report["hitting_set"] = hs
    except BudgetExceeded as exc:
        report["order_bounds"] = list(exc.bounds)
    return report
