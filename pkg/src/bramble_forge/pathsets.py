"""Path-of-sets systems and the congestion-2 bramble pipeline built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Mapping

from .bramble import Bramble, congestion, verify_bramble
from .cutmatch import DEFAULT_TARGET, GameResult, run_game
from .errors import BudgetExceeded, CliqueTooSmall, DegenerateParameters, GameNotConverged, MaxRoundsExceeded
from .graph import OK, Check, Graph, Path, bfs_tree, fail, grid, induced_subgraph, is_connected_set, is_path
from .linkage import WELL_LINKED_BUDGET, LinkageNetwork, find_linkage, is_well_linked
from .minors import MinorModel, find_clique_minor, touching_edge


@dataclass(frozen=True)
class PathOfSetsSystem:
    host: Graph
    S: tuple[frozenset[int], ...]
    A: tuple[tuple[int, ...], ...]
    B: tuple[tuple[int, ...], ...]
    P: tuple[tuple[Path, ...], ...]

    @property
    def r(self) -> int:
        return len(self.S)

    @property
    def h(self) -> int:
        return len(self.A[0]) if self.A else 0

    def to_json(self) -> dict:
        return {
            "host": self.host.to_json(),
            "S": [sorted(s) for s in self.S],
            "A": [list(a) for a in self.A],
            "B": [list(b) for b in self.B],
            "P": [[list(p) for p in link] for link in self.P],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PathOfSetsSystem":
        return cls(
            host=Graph.from_json(data["host"]),
            S=tuple(frozenset(s) for s in data["S"]),
            A=tuple(tuple(a) for a in data["A"]),
            B=tuple(tuple(b) for b in data["B"]),
            P=tuple(tuple(tuple(p) for p in link) for link in data["P"]),
        )


def grid_system(h: int, r: int) -> tuple[Graph, PathOfSetsSystem]:
    """h x h blocks of grid(h, r*h + r - 1) separated by single columns.

    A_i / B_i are the left / right columns of block i (top to bottom), and
    the i-th linkage is the h horizontal length-2 paths crossing the
    separating column. For h = 1 the blocks are single vertices, so
    A_i = B_i and the result is not a valid system.
    """
    if h < 1 or r < 1:
        raise ValueError("need h >= 1 and r >= 1")
    cols = r * h + (r - 1)
    g = grid(h, cols)
    S, A, B, P = [], [], [], []
    for i in range(r):
        left = i * (h + 1)
        right = left + h - 1
        S.append(frozenset(row * cols + c for row in range(h) for c in range(left, right + 1)))
        A.append(tuple(row * cols + left for row in range(h)))
        B.append(tuple(row * cols + right for row in range(h)))
        if i + 1 < r:
            P.append(tuple((row * cols + right, row * cols + right + 1, row * cols + right + 2) for row in range(h)))
    return g, PathOfSetsSystem(g, tuple(S), tuple(A), tuple(B), tuple(P))


def _pairs_linked(g: Graph, a, b) -> tuple[bool, tuple | None]:
    """Every equal-size pair of subsets of a and b has a linkage in g."""
    net = LinkageNetwork(g)
    for m in range(1, len(a) + 1):
        for sa in combinations(a, m):
            for sb in combinations(b, m):
                if net.flow_value(sa, sb) < m:
                    return False, (sa, sb)
    return True, None


def verify_system(sys: PathOfSetsSystem, strong: bool = True, budget: int = WELL_LINKED_BUDGET) -> Check:
    g, r = sys.host, sys.r
    if r < 1:
        return fail("empty system")
    if not (len(sys.A) == len(sys.B) == r and len(sys.P) == r - 1):
        return fail("sequence lengths disagree")
    h = sys.h
    if h > budget:
        raise BudgetExceeded(f"width {h} exceeds the exact-check budget {budget}")
    owner: dict[int, int] = {}
    for i, s in enumerate(sys.S):
        for v in s:
            if v in owner:
                return fail(f"S_{owner[v]} and S_{i} overlap at {v}", (owner[v], i))
            owner[v] = i
        if not is_connected_set(g, s):
            return fail(f"G[S_{i}] is not connected", i)
    for i in range(r):
        a, b = set(sys.A[i]), set(sys.B[i])
        if len(a) != h or len(b) != h or len(sys.A[i]) != h or len(sys.B[i]) != h:
            return fail(f"|A_{i}| or |B_{i}| differs from {h}", i)
        if a & b:
            return fail(f"A_{i} and B_{i} intersect", i)
        if not (a | b) <= sys.S[i]:
            return fail(f"A_{i} or B_{i} not inside S_{i}", i)

    used: dict[int, int] = {}
    for i, link in enumerate(sys.P):
        if len(link) != h:
            return fail(f"P_{i}: linkage size {len(link)}, expected {h}", i)
        starts, ends = set(), set()
        for p in link:
            if not is_path(g, p):
                return fail(f"P_{i}: {p} is not a path", i)
            if p[0] in sys.A[i + 1] and p[-1] in sys.B[i]:
                p = p[::-1]
            if p[0] not in sys.B[i] or p[-1] not in sys.A[i + 1]:
                return fail(f"P_{i}: path {p} does not run from B_{i} to A_{i + 1}", i)
            if any(v in owner for v in p[1:-1]):
                return fail(f"P_{i}: path {p} enters a cluster internally", i)
            for v in p:
                if v in used:
                    return fail(f"P_{used[v]} and P_{i} share vertex {v}", (used[v], i))
                used[v] = i
            starts.add(p[0])
            ends.add(p[-1])
        if starts != set(sys.B[i]) or ends != set(sys.A[i + 1]):
            return fail(f"P_{i} does not cover B_{i} and A_{i + 1}", i)

    for i in range(r):
        sub = induced_subgraph(g, sys.S[i])
        la, lb = sub.local(sys.A[i]), sub.local(sys.B[i])
        ok, witness = _pairs_linked(sub.graph, la, lb)
        if not ok:
            return fail(f"S_{i}: no linkage between {sub.lift(witness[0])} and {sub.lift(witness[1])}", i)
        if strong:
            for name, x in (("A", la), ("B", lb)):
                chk = is_well_linked(sub.graph, x, budget)
                if not chk:
                    return fail(f"{name}_{i} is not well-linked in G[S_{i}]", i)
    return OK


# -------------------------------------------------------------- parameters


@dataclass
class Parameters:
    k: float
    c: float
    q: dict
    h: int
    r: int | None
    f: float | None
    f_le_k: bool | None

    @property
    def degenerate(self) -> bool:
        return self.h < 2

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "c": self.c,
            "q": [[i, j, coef] for (i, j), coef in sorted(self.q.items())],
            "h": self.h,
            "r": self.r,
            "f": self.f,
            "f_le_k": self.f_le_k,
            "degenerate": self.degenerate,
        }


def eval_poly(q: Mapping[tuple[int, int], float], x: float, y: float) -> float:
    return math.fsum(coef * x**i * y**j for (i, j), coef in q.items())


def compute_parameters(k: float, c: float = 1.0, q: Mapping | None = None, strict: bool = True) -> Parameters:
    """Width h and length r for treewidth k; logs are base 2.

    ``q`` maps exponent pairs (i, j) to positive coefficients of q(x, y).
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if c < 1:
        raise ValueError("c must be at least 1")
    q = dict(q) if q is not None else {(0, 0): 1.0}
    if not q or any(coef <= 0 for coef in q.values()):
        raise ValueError("q needs positive coefficients")
    lk = math.log2(k)
    rounds_k = c * lk**2 + 1
    h = math.floor(k / (eval_poly(q, lk, rounds_k) * rounds_k**48))
    r = f = f_le_k = None
    if h >= 1:
        lh = math.log2(h)
        r = math.floor(c * lh**2 + 1)
        f = h * r**48 * eval_poly(q, lh, math.log2(r))
        f_le_k = f <= k
    params = Parameters(k, c, q, h, r, f, f_le_k)
    if strict and params.degenerate:
        raise DegenerateParameters(f"h = {h} < 2 for k = {k}", params=params)
    return params


# ---------------------------------------------------------------- pipeline


@dataclass
class EmbeddingArtifacts:
    spines: list[Path]
    block_linkages: list[list[Path]]
    round_linkages: list[list[Path]] = field(default_factory=list)
    edge_paths: dict[tuple[int, int, int], Path] = field(default_factory=dict)
    game: GameResult | None = None
    model: MinorModel | None = None
    trees: list[list[tuple[int, int]]] = field(default_factory=list)
    connectors: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    def path_of_edge(self, u: int, v: int) -> Path:
        """Q(e) for the earliest round containing the edge uv."""
        key = min(k for k in self.edge_paths if k[1:] == (min(u, v), max(u, v)))
        return self.edge_paths[key]

    def to_json(self) -> dict:
        return {
            "spines": [list(p) for p in self.spines],
            "rounds": self.game.transcript()["rounds"] if self.game else [],
            "alpha": self.game.certificate.alpha if self.game else None,
            "method": self.game.certificate.method if self.game else None,
            "edge_paths": [[i, u, v, list(p)] for (i, u, v), p in sorted(self.edge_paths.items())],
            "branch_sets": self.model.to_json()["branch_sets"] if self.model else None,
            "checks": self.checks,
        }


def build_spines(sys: PathOfSetsSystem) -> tuple[list[Path], list[list[Path]]]:
    """Splice per-block A_i-B_i linkages with the P_i into h spine paths.

    Spine j starts at A_1[j]; inside each block it follows the linkage path
    starting where the previous connector ended.
    """
    g = sys.host
    blocks = []
    for i in range(sys.r):
        sub = induced_subgraph(g, sys.S[i])
        local = find_linkage(sub.graph, sub.local(sys.A[i]), sub.local(sys.B[i]))
        blocks.append([sub.lift(p) for p in local])
    connectors = []
    for link in sys.P:
        by_start = {}
        for p in link:
            p = tuple(p)
            by_start[p[0]] = p
            by_start[p[-1]] = p[::-1]
        connectors.append(by_start)
    spines = []
    for a in sys.A[0]:
        walk = [a]
        cur = a
        for i in range(sys.r):
            seg = next(p for p in blocks[i] if p[0] == cur)
            walk.extend(seg[1:])
            cur = seg[-1]
            if i + 1 < sys.r:
                con = connectors[i][cur]
                walk.extend(con[1:])
                cur = con[-1]
        spines.append(tuple(walk))
    return spines, blocks


def check_spines(sys: PathOfSetsSystem, spines: list[Path]) -> Check:
    seen: set[int] = set()
    for j, p in enumerate(spines):
        if not is_path(sys.host, p):
            return fail(f"spine {j} is not a path", j)
        if seen.intersection(p):
            return fail(f"spine {j} meets an earlier spine", j)
        seen.update(p)
        ps = set(p)
        for i in range(sys.r):
            if len(ps & set(sys.A[i])) != 1 or len(ps & set(sys.B[i])) != 1:
                return fail(f"spine {j} does not meet A_{i} and B_{i} exactly once", (j, i))
    return OK


def embed_and_assemble(
    sys: PathOfSetsSystem,
    clique_finder: Callable[[Graph, int], MinorModel] | None = None,
    seed: int = 0,
    target_alpha: float = DEFAULT_TARGET,
    strategy: str = "projection",
) -> tuple[Bramble, EmbeddingArtifacts]:
    """Congestion-2 bramble from a strong path-of-sets system.

    Round i of the cut-matching game on the h spines is answered inside
    G[S_i]; the clique-minor model of the resulting multigraph is turned
    into one connected subgraph per branch set. For odd h the game runs on
    spines 0..h-2 and the last spine stays unused.
    """
    if clique_finder is None:
        clique_finder = lambda H, s: find_clique_minor(H, seed=s)  # noqa: E731
    g, h = sys.host, sys.h - sys.h % 2
    if h < 2:
        raise ValueError(f"need at least two spines for the game, got h = {sys.h}")
    spines, blocks = build_spines(sys)
    art = EmbeddingArtifacts(spines=spines, block_linkages=blocks)
    chk = check_spines(sys, spines)
    if not chk:
        raise AssertionError(f"spine splicing failed: {chk.reason}")
    spine_of = {v: j for j, p in enumerate(spines) for v in p}
    subs = [induced_subgraph(g, s) for s in sys.S]

    def player(i: int, side1, side2):
        sub = subs[i]
        a_sets = []
        for side in (side1, side2):
            side = set(side)
            a_sets.append([v for v in sys.A[i] if spine_of[v] in side])
        local = find_linkage(sub.graph, sub.local(a_sets[0]), sub.local(a_sets[1]))
        paths = [sub.lift(p) for p in local]
        art.round_linkages.append(paths)
        matching = []
        for p in paths:
            x, y = spine_of[p[0]], spine_of[p[-1]]
            matching.append((x, y))
            art.edge_paths[(i, min(x, y), max(x, y))] = p if x < y else p[::-1]
        return matching

    try:
        art.game = run_game(h, player, target_alpha=target_alpha, max_rounds=sys.r, seed=seed, strategy=strategy)
    except MaxRoundsExceeded as exc:
        art.game = exc.partial
        raise GameNotConverged(f"game did not converge within r = {sys.r} rounds", partial=art) from None

    H = art.game.multigraph.simple()
    model = clique_finder(H, seed)
    art.model = model
    t = model.t
    if t < 2:
        raise CliqueTooSmall(f"clique minor of size {t} in the game graph")

    elements = []
    for a, ka in enumerate(model.branch_sets):
        verts = set()
        for alpha in ka:
            verts.update(spines[alpha])
        tree = bfs_tree(H, ka)
        art.trees.append(tree)
        for x, y in tree:
            verts.update(art.path_of_edge(x, y))
        for b in range(a + 1, t):
            x, y = touching_edge(H, ka, model.branch_sets[b])
            art.connectors[(a, b)] = (x, y)
            q = art.path_of_edge(x, y)
            verts.update(v for v in q if not (v in spine_of and spine_of[v] == y and v in (q[0], q[-1])))
        elements.append(frozenset(verts))
    bramble = Bramble(tuple(elements))

    valid = verify_bramble(g, bramble)
    c, witness = congestion(g, bramble)
    art.checks = {
        "valid": valid.ok,
        "violation": valid.reason,
        "congestion": c,
        "elements_connected": all(is_connected_set(g, e) for e in elements),
        "t": t,
        "rounds": art.game.rounds,
    }
    if c > 2:
        raise AssertionError(f"congestion {c} at vertex {witness}")
    return bramble, art
