"""Simple undirected graphs on dense 0-based vertex indices.

Everything else in the package speaks in host-graph indices; subgraph
layers carry an explicit index map back to the host.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

Edge = tuple[int, int]
Path = tuple[int, ...]


@dataclass(frozen=True)
class Check:
    """Outcome of a structural verifier; truthy iff the object is valid."""

    ok: bool
    reason: str | None = None
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


OK = Check(True)


def fail(reason: str, witness=None) -> Check:
    return Check(False, reason, witness)


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"negative vertex count {self.n}")
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            norm.add(_norm(u, v))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nb: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return tuple(frozenset(s) for s in nb)

    @cached_property
    def sorted_adj(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(s)) for s in self.adj)

    @cached_property
    def adj_masks(self) -> tuple[int, ...]:
        """Closed neighbourhoods as int bitsets."""
        masks = []
        for v in range(self.n):
            m = 1 << v
            for w in self.adj[v]:
                m |= 1 << w
            masks.append(m)
        return tuple(masks)

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Graph":
        return cls.from_edges(int(data["n"]), data["edges"])


# ---------------------------------------------------------------- traversal


def bfs_order(g: Graph, start: int, allowed: set[int] | frozenset[int] | None = None) -> list[int]:
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in g.sorted_adj[v]:
            if w not in seen and (allowed is None or w in allowed):
                seen.add(w)
                order.append(w)
                queue.append(w)
    return order


def connected_components(g: Graph) -> list[frozenset[int]]:
    """Vertex sets of the connected components, ordered by minimum vertex."""
    seen: set[int] = set()
    parts = []
    for v in range(g.n):
        if v not in seen:
            comp = bfs_order(g, v)
            seen.update(comp)
            parts.append(frozenset(comp))
    return parts


def is_connected_set(g: Graph, s: Iterable[int]) -> bool:
    s = set(s)
    if not s:
        return False
    return len(bfs_order(g, min(s), s)) == len(s)


def bfs_tree(g: Graph, vertices: Iterable[int]) -> list[Edge]:
    """Edges of a BFS spanning tree of g[vertices] rooted at the minimum vertex."""
    allowed = set(vertices)
    if not allowed:
        return []
    root = min(allowed)
    seen = {root}
    tree = []
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in g.sorted_adj[v]:
            if w in allowed and w not in seen:
                seen.add(w)
                tree.append((v, w))
                queue.append(w)
    return tree


def shortest_path(g: Graph, src: int, dst: int, allowed=None) -> Path | None:
    if src == dst:
        return (src,)
    parent = {src: src}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for w in g.sorted_adj[v]:
            if w in parent or (allowed is not None and w not in allowed):
                continue
            parent[w] = v
            if w == dst:
                out = [w]
                while out[-1] != src:
                    out.append(parent[out[-1]])
                return tuple(reversed(out))
            queue.append(w)
    return None


@dataclass(frozen=True)
class Subgraph:
    graph: Graph
    to_host: tuple[int, ...]

    @cached_property
    def from_host(self) -> dict[int, int]:
        return {h: i for i, h in enumerate(self.to_host)}

    def lift(self, vertices: Iterable[int]) -> tuple[int, ...]:
        return tuple(self.to_host[v] for v in vertices)

    def local(self, vertices: Iterable[int]) -> tuple[int, ...]:
        fh = self.from_host
        return tuple(fh[v] for v in vertices)


def induced_subgraph(g: Graph, s: Iterable[int]) -> Subgraph:
    """g[s] relabelled to 0..|s|-1 in increasing host order."""
    verts = tuple(sorted(set(s)))
    index = {v: i for i, v in enumerate(verts)}
    edges = [(index[u], index[v]) for u, v in g.edges if u in index and v in index]
    return Subgraph(Graph.from_edges(len(verts), edges), verts)


def is_path(g: Graph, path: Sequence[int]) -> bool:
    if len(path) == 0 or len(set(path)) != len(path):
        return False
    if any(not 0 <= v < g.n for v in path):
        return False
    return all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


def is_walk(g: Graph, walk: Sequence[int], closed: bool = False) -> bool:
    if len(walk) == 0 or any(not 0 <= v < g.n for v in walk):
        return False
    if not all(g.has_edge(a, b) for a, b in zip(walk, walk[1:])):
        return False
    if closed:
        return walk[0] == walk[-1] or g.has_edge(walk[0], walk[-1])
    return True


@dataclass(frozen=True)
class Walk:
    vertices: tuple[int, ...]
    closed: bool = True
    hubs: tuple[int, ...] = ()
    segments: tuple[Path, ...] = ()


# ------------------------------------------------------------- subdivisions


@dataclass(frozen=True)
class SubdivisionModel:
    """Branch vertex -> host vertex, branch edge (u<v) -> host path u..v."""

    vertex_map: Mapping[int, int]
    edge_map: Mapping[Edge, Path]

    def oriented_path(self, u: int, v: int) -> Path:
        p = tuple(self.edge_map[_norm(u, v)])
        if p[0] == self.vertex_map[u]:
            return p
        return p[::-1]


def is_subdivision_model(host: Graph, branch: Graph, m: SubdivisionModel) -> Check:
    vmap = {int(k): int(v) for k, v in m.vertex_map.items()}
    if set(vmap) != set(range(branch.n)):
        return fail("vertex map does not cover the branch vertices")
    images = list(vmap.values())
    if len(set(images)) != len(images):
        return fail("vertex map is not injective")
    if any(not 0 <= x < host.n for x in images):
        return fail("vertex image outside host")
    emap = {_norm(*e): tuple(p) for e, p in m.edge_map.items()}
    if set(emap) != set(branch.edges):
        missing = sorted(set(branch.edges) - set(emap))
        return fail("edge map does not match branch edges", missing[:1] or sorted(set(emap) - set(branch.edges))[:1])
    image_set = set(images)
    used_interior: dict[int, Edge] = {}
    for e in sorted(emap):
        p = emap[e]
        if not is_path(host, p):
            return fail(f"image of branch edge {e} is not a host path", e)
        ends = {p[0], p[-1]}
        if ends != {vmap[e[0]], vmap[e[1]]}:
            return fail(f"image of branch edge {e} has wrong endpoints", e)
        for x in p[1:-1]:
            if x in image_set:
                return fail(f"path of {e} passes through branch image {x}", e)
            if x in used_interior:
                return fail(f"paths of {used_interior[x]} and {e} share vertex {x}", (used_interior[x], e))
            used_interior[x] = e
    return OK


def subdivide(g: Graph, times: int = 1) -> tuple[Graph, SubdivisionModel]:
    """Replace every edge by a path with ``times`` new inner vertices."""
    nxt = g.n
    edges = []
    emap = {}
    for u, v in g.sorted_edges():
        inner = list(range(nxt, nxt + times))
        nxt += times
        p = (u, *inner, v)
        edges.extend(zip(p, p[1:]))
        emap[(u, v)] = p
    return Graph.from_edges(nxt, edges), SubdivisionModel({v: v for v in range(g.n)}, emap)


# --------------------------------------------------------------- generators


def grid(a: int, b: int) -> Graph:
    """a rows by b columns; vertex (i, j) has index i*b + j."""
    if a < 1 or b < 1:
        raise ValueError("grid dimensions must be positive")
    edges = []
    for i in range(a):
        for j in range(b):
            v = i * b + j
            if j + 1 < b:
                edges.append((v, v + 1))
            if i + 1 < a:
                edges.append((v, v + b))
    return Graph.from_edges(a * b, edges)


def clique(n: int) -> Graph:
    if n < 0:
        raise ValueError("negative clique size")
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("a simple cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs at least one vertex")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def random_regular(n: int, d: int, seed: int = 0, max_tries: int = 10_000) -> Graph:
    """Pairing model, rejecting loops and multi-edges."""
    if n < 1 or d < 0 or d >= n or (n * d) % 2:
        raise ValueError(f"no simple {d}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    points = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        perm = rng.permutation(points)
        pairs = perm.reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        edges = {_norm(int(u), int(v)) for u, v in pairs}
        if len(edges) == len(pairs):
            return Graph(n, frozenset(edges))
    raise ValueError(f"pairing model failed {max_tries} times for n={n}, d={d}")


def random_gnp(n: int, p: float, seed: int = 0) -> Graph:
    rng = np.random.default_rng(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


GENERATORS = {
    "grid": grid,
    "clique": clique,
    "cycle": cycle,
    "path": path_graph,
    "random_regular": random_regular,
}


def generate(kind: str, *params, seed: int = 0) -> Graph:
    try:
        fn = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown graph kind {kind!r}") from None
    if kind == "random_regular":
        return fn(*params, seed=seed)
    return fn(*params)


# ---------------------------------------------------------------------- io


def dumps_graph(g: Graph) -> str:
    return json.dumps(g.to_json(), sort_keys=True)


def write_dimacs(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.m}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def read_dimacs(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise ValueError(f"line {lineno}: bad problem line {line!r}")
            n = int(parts[2])
        elif parts[0] == "e":
            if n is None:
                raise ValueError(f"line {lineno}: edge before problem line")
            u, v = int(parts[1]) - 1, int(parts[2]) - 1
            edges.append((u, v))
        else:
            raise ValueError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise ValueError("missing problem line")
    return Graph.from_edges(n, edges)


def load_graph(path) -> Graph:
    with open(path) as fh:
        text = fh.read()
    if str(path).endswith((".json", ".JSON")) or text.lstrip().startswith("{"):
        return Graph.from_json(json.loads(text))
    return read_dimacs(text)
