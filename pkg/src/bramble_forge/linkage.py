"""Vertex-disjoint linkages via unit-capacity max-flow, and well-linkedness."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .errors import BudgetExceeded, Infeasible
from .graph import OK, Check, Graph, Path, fail, is_path

WELL_LINKED_BUDGET = 12


class LinkageNetwork:
    """Split-vertex flow network of a graph, reusable across terminal sets.

    Node ``v`` is the in-copy of vertex v, ``n + v`` its out-copy; the last
    two nodes are the super source and sink. Every arc has capacity 1, so
    paths in a maximum flow are vertex-disjoint, terminals included.
    """

    def __init__(self, g: Graph):
        self.g = g
        n = g.n
        self.source, self.sink = 2 * n, 2 * n + 1
        rows, cols = [], []

        def arc(u, v):
            rows.append(u)
            cols.append(v)
            return len(rows) - 1

        self._split = np.array([arc(v, n + v) for v in range(n)], dtype=np.int64)
        for u, v in g.sorted_edges():
            arc(n + u, v)
            arc(n + v, u)
        self._n_fixed = len(rows)
        self._src = np.array([arc(self.source, v) for v in range(n)], dtype=np.int64)
        self._snk = np.array([arc(n + v, self.sink) for v in range(n)], dtype=np.int64)
        nnz = len(rows)
        marker = csr_matrix(
            (np.arange(1, nnz + 1, dtype=np.int64), (np.array(rows), np.array(cols))),
            shape=(2 * n + 2, 2 * n + 2),
        )
        self._perm = marker.data - 1
        self._indices = marker.indices.astype(np.int32)
        self._indptr = marker.indptr.astype(np.int32)
        self._base = np.zeros(nnz, dtype=np.int32)
        self._base[: self._n_fixed] = 1

    def _capacities(self, a, b, forbidden) -> csr_matrix:
        cap = self._base.copy()
        if len(forbidden):
            cap[self._split[list(forbidden)]] = 0
        cap[self._src[list(a)]] = 1
        cap[self._snk[list(b)]] = 1
        n = 2 * self.g.n + 2
        return csr_matrix((cap[self._perm], self._indices, self._indptr), shape=(n, n))

    def flow_value(self, a, b, forbidden=()) -> int:
        if not a:
            return 0
        res = maximum_flow(self._capacities(a, b, forbidden), self.source, self.sink, method="dinic")
        return int(res.flow_value)

    def solve(self, a, b, forbidden=()) -> tuple[int, list[Path]]:
        if not a:
            return 0, []
        res = maximum_flow(self._capacities(a, b, forbidden), self.source, self.sink, method="dinic")
        flow = res.flow.tocsr()
        succ = {}
        for u in range(flow.shape[0]):
            lo, hi = flow.indptr[u], flow.indptr[u + 1]
            for k in range(lo, hi):
                if flow.data[k] > 0:
                    succ.setdefault(u, []).append(int(flow.indices[k]))
        n = self.g.n
        paths = []
        for start in succ.get(self.source, []):
            path = [start]
            node = start
            while True:
                nxt = succ[node][0]
                if nxt == self.sink:
                    break
                if nxt >= n:  # in -> out arc
                    node = nxt
                    continue
                path.append(nxt)
                node = nxt
            paths.append(tuple(path))
        paths.sort()
        return int(res.flow_value), paths


def check_linkage(g: Graph, paths: Sequence[Path], a, b, forbidden=()) -> Check:
    """Structural A-B-linkage audit against the definition."""
    a, b, forbidden = set(a), set(b), set(forbidden)
    if len(paths) != len(a) or len(a) != len(b):
        return fail(f"linkage size {len(paths)} for |A|={len(a)}, |B|={len(b)}")
    seen: set[int] = set()
    starts, ends = set(), set()
    ab = a | b
    for p in paths:
        if not is_path(g, p):
            return fail(f"{p} is not a path", p)
        if p[0] not in a or p[-1] not in b:
            return fail(f"path {p} does not run from A to B", p)
        if any(v in ab for v in p[1:-1]):
            return fail(f"path {p} meets A or B internally", p)
        if any(v in forbidden for v in p):
            return fail(f"path {p} uses a forbidden vertex", p)
        if seen.intersection(p):
            return fail(f"path {p} is not disjoint from the others", p)
        seen.update(p)
        starts.add(p[0])
        ends.add(p[-1])
    if starts != a or ends != b:
        return fail("paths do not cover A and B")
    return OK


def find_linkage(
    g: Graph,
    a: Iterable[int],
    b: Iterable[int],
    forbidden: Iterable[int] = (),
    network: LinkageNetwork | None = None,
) -> list[Path]:
    """An A-B-linkage in g - forbidden, or :class:`Infeasible`.

    Paths are returned sorted by their A endpoint.
    """
    a, b, forbidden = sorted(set(a)), sorted(set(b)), sorted(set(forbidden))
    if len(a) != len(b):
        raise ValueError(f"|A|={len(a)} differs from |B|={len(b)}")
    if set(a) & set(b) or (set(a) | set(b)) & set(forbidden):
        raise ValueError("A, B and forbidden must be pairwise disjoint")
    net = network if network is not None else LinkageNetwork(g)
    value, paths = net.solve(a, b, forbidden)
    if value < len(a):
        raise Infeasible(f"only {value} disjoint paths for |A|={len(a)}", flow_value=value)
    audit = check_linkage(g, paths, a, b, forbidden)
    if not audit:
        raise AssertionError(f"max-flow decomposition produced a bad linkage: {audit.reason}")
    return paths


def disjoint_pairs(x: Sequence[int], ordered: bool = False):
    """Disjoint equal-size nonempty subset pairs (A, B) of x.

    Unordered pairs are canonicalised by putting min(A | B) into A.
    """
    x = sorted(x)
    for m in range(1, len(x) // 2 + 1):
        for a in combinations(x, m):
            rest = [v for v in x if v not in a]
            for b in combinations(rest, m):
                if ordered or a[0] < b[0]:
                    yield a, b


def is_well_linked(g: Graph, x: Iterable[int], budget: int = WELL_LINKED_BUDGET) -> Check:
    """Exact well-linkedness test.

    Overlapping A, B reduce to the disjoint case (shared vertices are their
    own zero-length paths), and linkage existence is symmetric in A and B,
    so only unordered disjoint pairs are enumerated.
    """
    x = sorted(set(x))
    if len(x) > budget:
        raise BudgetExceeded(f"|X|={len(x)} exceeds the exact-check budget {budget}")
    net = LinkageNetwork(g)
    xs = set(x)
    for a, b in disjoint_pairs(x):
        forbidden = xs.difference(a, b)
        if net.flow_value(a, b, forbidden) < len(a):
            return fail(f"no linkage between {list(a)} and {list(b)}", (a, b))
    return OK
