"""Concurrent multicommodity flow between all ordered pairs of a hub set.

The solver is a multiplicative-weights scheme: in each iteration every pair
is routed on a shortest path under vertex lengths ``exp(eta * load / max
load)``, where ``load`` is the running average throughput; the per-pair
path families are the uniform average of all iterations' routings. Values
are exact by construction, only the congestion depends on the budget.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DisconnectedPair
from .graph import Graph, Path, connected_components

BETA_FLOOR = 1 / 9
PairKey = tuple[int, int]


def log2k_scale(k: float) -> float:
    """k * log2(k), the congestion scale; clamped to 1 below k = 2."""
    return k * math.log2(k) if k >= 2 else 1.0


def effective_beta(gamma: float, k: float) -> float:
    return max(BETA_FLOOR, gamma / log2k_scale(k))


@dataclass
class ConcurrentFlow:
    w: tuple[int, ...]
    families: dict[PairKey, list[tuple[Path, float]]]
    nu: float = 1.0
    beta_eff: float = BETA_FLOOR
    k: float | None = None

    def family(self, u: int, v: int) -> list[tuple[Path, float]]:
        return self.families.get((u, v), [])

    def to_json(self) -> dict:
        fams = []
        for (u, v) in sorted(self.families):
            fams.append(
                {
                    "u": u,
                    "v": v,
                    "paths": [{"vertices": list(p), "weight": wt} for p, wt in self.families[(u, v)]],
                }
            )
        out = {"W": list(self.w), "nu": self.nu, "beta_eff": self.beta_eff, "families": fams}
        if self.k is not None:
            out["k"] = self.k
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "ConcurrentFlow":
        fams = {}
        for fam in data["families"]:
            fams[(int(fam["u"]), int(fam["v"]))] = [
                (tuple(int(x) for x in p["vertices"]), float(p["weight"])) for p in fam["paths"]
            ]
        return cls(
            w=tuple(int(x) for x in data["W"]),
            families=fams,
            nu=float(data.get("nu", 1.0)),
            beta_eff=float(data.get("beta_eff", BETA_FLOOR)),
            k=data.get("k"),
        )


def check_flow(g: Graph, cf: ConcurrentFlow, tol: float = 1e-9) -> list[str]:
    """Violations of the ConcurrentFlow invariants (empty list when valid)."""
    problems = []
    for u in cf.w:
        for v in cf.w:
            fam = cf.family(u, v)
            total = math.fsum(wt for _, wt in fam)
            if abs(total - cf.nu) > tol:
                problems.append(f"({u},{v}) carries {total}, expected {cf.nu}")
            paths = [p for p, _ in fam]
            if len(set(paths)) != len(paths):
                problems.append(f"({u},{v}) repeats a path")
            for p, wt in fam:
                if wt <= 0:
                    problems.append(f"({u},{v}) has non-positive weight {wt}")
                if p[0] != u or p[-1] != v:
                    problems.append(f"({u},{v}) path {p} has wrong endpoints")
                if len(set(p)) != len(p) or any(not g.has_edge(a, b) for a, b in zip(p, p[1:])):
                    problems.append(f"({u},{v}) path {p} is not a path")
            if u == v and [p for p, _ in fam] != [(u,)] and cf.nu > 0:
                problems.append(f"diagonal ({u},{u}) is not the zero-length path")
    return problems


def flow_congestion(cf: ConcurrentFlow) -> tuple[float, int | None, dict[int, float]]:
    """Per-vertex throughput table and its maximum (gamma, argmax, table)."""
    parts: dict[int, list[float]] = defaultdict(list)
    for fam in cf.families.values():
        for p, wt in fam:
            for x in p:
                parts[x].append(wt)
    fbar = {x: math.fsum(ws) for x, ws in sorted(parts.items())}
    if not fbar:
        return 0.0, None, {}
    arg = max(fbar, key=lambda x: (fbar[x], -x))
    return fbar[arg], arg, fbar


def _vertex_dijkstra(g: Graph, src: int, length: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Shortest paths where a path costs the sum of its vertex lengths."""
    dist = np.full(g.n, np.inf)
    parent = np.full(g.n, -1, dtype=np.int64)
    dist[src] = length[src]
    heap = [(dist[src], src)]
    adj = g.sorted_adj
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for w in adj[v]:
            nd = d + length[w]
            if nd < dist[w]:
                dist[w] = nd
                parent[w] = v
                heapq.heappush(heap, (nd, w))
    return dist, parent


def _trace(parent: np.ndarray, src: int, dst: int) -> Path:
    out = [dst]
    while out[-1] != src:
        out.append(int(parent[out[-1]]))
    return tuple(reversed(out))


def solve_concurrent_flow(
    g: Graph,
    w: Iterable[int],
    k: float | None = None,
    iterations: int = 20,
    eta: float | None = None,
    seed: int = 0,
) -> ConcurrentFlow:
    """Unit concurrent flow among all ordered pairs of ``w``.

    ``k`` only enters ``beta_eff``; it defaults to 3|W| (a hub set of size
    about k/3). ``eta`` defaults to log2(n).
    """
    w = tuple(sorted(set(int(x) for x in w)))
    if not w:
        raise ValueError("empty hub set")
    if any(not 0 <= x < g.n for x in w):
        raise ValueError("hub vertex outside the graph")
    comp_of = {}
    for i, comp in enumerate(connected_components(g)):
        for v in comp:
            comp_of[v] = i
    for u in w:
        if comp_of[u] != comp_of[w[0]]:
            raise DisconnectedPair(f"hubs {w[0]} and {u} lie in different components")
    if iterations < 1:
        raise ValueError("need at least one iteration")
    if k is None:
        k = 3 * len(w)
    if eta is None:
        eta = math.log2(max(g.n, 2))
    rng = np.random.default_rng(seed)
    jitter = 1.0 + 1e-6 * rng.random(g.n)

    counts: dict[PairKey, dict[Path, int]] = {(u, v): defaultdict(int) for u in w for v in w if u < v}
    load_sum = np.zeros(g.n)
    for it in range(iterations):
        avg = load_sum / max(1, it)
        peak = avg.max()
        scaled = avg / peak if peak > 0 else avg
        length = np.exp(eta * scaled) * jitter
        load = np.zeros(g.n)
        for u in w:
            _, parent = _vertex_dijkstra(g, u, length)
            for v in w:
                if v <= u:
                    continue
                p = _trace(parent, u, v)
                counts[(u, v)][p] += 1
                # both orientations of the pair use this path
                load[list(p)] += 2
        for u in w:
            load[u] += 1
        load_sum += load

    families: dict[PairKey, list[tuple[Path, float]]] = {}
    for u in w:
        families[(u, u)] = [((u,), 1.0)]
    for (u, v), fam in counts.items():
        items = sorted(fam.items())
        fwd = [(p, c / iterations) for p, c in items]
        families[(u, v)] = fwd
        families[(v, u)] = sorted((p[::-1], wt) for p, wt in fwd)
    cf = ConcurrentFlow(w=w, families=families, nu=1.0, k=k)
    gamma, _, _ = flow_congestion(cf)
    cf.beta_eff = effective_beta(gamma, k)
    return cf
