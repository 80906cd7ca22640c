"""Cut-matching game: projection cut player, matching players, expansion."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import MaxRoundsExceeded
from .graph import Graph, Path, connected_components
from .linkage import find_linkage

EXACT_BUDGET = 22
DEFAULT_TARGET = 0.25

Bipartition = tuple[tuple[int, ...], tuple[int, ...]]
Matching = list[tuple[int, int]]


@dataclass
class MultiGraph:
    n: int
    counts: Counter = field(default_factory=Counter)

    def add(self, u: int, v: int, times: int = 1):
        self.counts[(min(u, v), max(u, v))] += times

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for (u, v), c in self.counts.items():
            deg[u] += c
            deg[v] += c
        return deg

    def simple(self) -> Graph:
        return Graph(self.n, frozenset(self.counts))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [[u, v, c] for (u, v), c in sorted(self.counts.items())]}


@dataclass
class ExpansionCertificate:
    alpha: float
    method: str
    witness_cut: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    def to_json(self) -> dict:
        out = {"alpha": self.alpha, "method": self.method}
        if self.witness_cut is not None:
            out["witness_cut"] = [list(s) for s in self.witness_cut]
        return out


def _weighted_edges(g) -> tuple[int, list[tuple[int, int, int]]]:
    if isinstance(g, MultiGraph):
        return g.n, [(u, v, c) for (u, v), c in sorted(g.counts.items())]
    return g.n, [(u, v, 1) for u, v in g.sorted_edges()]


def laplacian(g) -> np.ndarray:
    n, edges = _weighted_edges(g)
    lap = np.zeros((n, n))
    for u, v, c in edges:
        lap[u, v] -= c
        lap[v, u] -= c
        lap[u, u] += c
        lap[v, v] += c
    return lap


def spectral_expansion(g) -> ExpansionCertificate:
    """lambda_2 / 2, a lower bound on edge expansion."""
    lam = np.linalg.eigvalsh(laplacian(g))
    return ExpansionCertificate(max(0.0, float(lam[1]) / 2), "spectral")


def exact_expansion(g, chunk: int = 1 << 18) -> ExpansionCertificate:
    """Minimum of |E(S,S')| / min(|S|,|S'|) over all 2^(n-1)-1 bipartitions.

    Vertex n-1 is pinned to S'; S ranges over the nonempty subsets of the
    other n-1 vertices.
    """
    n, edges = _weighted_edges(g)
    best, best_mask = math.inf, None
    total = 1 << (n - 1)
    eu = np.array([e[0] for e in edges], dtype=np.int64)
    ev = np.array([e[1] for e in edges], dtype=np.int64)
    ec = np.array([e[2] for e in edges], dtype=np.int64)
    for lo in range(1, total, chunk):
        masks = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        cut = np.zeros(len(masks), dtype=np.int64)
        for u, v, c in zip(eu, ev, ec):
            cut += c * (((masks >> u) ^ (masks >> v)) & 1)
        size = np.bitwise_count(masks).astype(np.int64)
        ratio = cut / np.minimum(size, n - size)
        i = int(np.argmin(ratio))
        if ratio[i] < best:
            best, best_mask = float(ratio[i]), int(masks[i])
    s = tuple(v for v in range(n) if best_mask >> v & 1)
    rest = tuple(v for v in range(n) if not best_mask >> v & 1)
    return ExpansionCertificate(best, "exact", (s, rest))


def expansion(g, exact_budget: int = EXACT_BUDGET) -> ExpansionCertificate:
    n = g.n
    if n < 2:
        raise ValueError("expansion needs at least two vertices")
    if n <= exact_budget:
        return exact_expansion(g)
    return spectral_expansion(g)


# ----------------------------------------------------------------- players


@dataclass
class GameState:
    h: int
    embedding: np.ndarray
    multigraph: MultiGraph
    matchings: list[Matching] = field(default_factory=list)
    cuts: list[Bipartition] = field(default_factory=list)
    round: int = 0

    @classmethod
    def start(cls, h: int) -> "GameState":
        if h < 2 or h % 2:
            raise ValueError(f"the game needs an even vertex count >= 2, got {h}")
        return cls(h, np.eye(h), MultiGraph(h))

    def accept(self, cut: Bipartition, matching: Matching):
        check_matching(self.h, cut, matching)
        for a, b in matching:
            self.multigraph.add(a, b)
            mean = (self.embedding[a] + self.embedding[b]) / 2
            self.embedding[a] = mean
            self.embedding[b] = mean
        self.cuts.append(cut)
        self.matchings.append(sorted((min(a, b), max(a, b)) for a, b in matching))
        self.round += 1


def check_matching(h: int, cut: Bipartition, matching: Matching):
    left, right = set(cut[0]), set(cut[1])
    seen = set()
    for a, b in matching:
        if not ((a in left and b in right) or (a in right and b in left)):
            raise ValueError(f"matching edge ({a}, {b}) does not cross the cut")
        seen.update((a, b))
    if len(matching) != h // 2 or len(seen) != h:
        raise ValueError("matching is not perfect")


def cut_player_step(state: GameState, rng: np.random.Generator, strategy: str = "projection") -> Bipartition:
    """Balanced bipartition (A, B), each side sorted.

    ``projection``: project the current per-vertex vectors onto a random
    unit direction and split at the median, ties to A by vertex index.
    ``random``: uniformly random balanced split (ablation).
    """
    h = state.h
    if strategy == "projection":
        r = rng.standard_normal(h)
        r /= np.linalg.norm(r)
        proj = state.embedding @ r
        order = np.lexsort((np.arange(h), proj))
    elif strategy == "random":
        order = rng.permutation(h)
    else:
        raise ValueError(f"unknown cut strategy {strategy!r}")
    a = tuple(sorted(int(v) for v in order[: h // 2]))
    b = tuple(sorted(int(v) for v in order[h // 2 :]))
    return a, b


class RandomMatchingPlayer:
    """Uniformly random perfect matching across the cut."""

    def __init__(self, seed: int = 0):
        self.rng = np.random.default_rng(seed)

    def __call__(self, round_index: int, a, b) -> Matching:
        perm = self.rng.permutation(len(b))
        return [(a[i], b[j]) for i, j in enumerate(perm)]


class AdversarialMatchingPlayer:
    """Always pairs the i-th smallest of A with the i-th smallest of B."""

    def __call__(self, round_index: int, a, b) -> Matching:
        return list(zip(sorted(a), sorted(b)))


def matching_player_flow(
    g: Graph, reps: Sequence[int], cut: Bipartition, forbidden=()
) -> tuple[Matching, list[Path]]:
    """Answer a cut with the matching induced by an A-B linkage in g.

    ``reps[j]`` is the host vertex standing for game vertex j.
    Raises :class:`Infeasible` when no linkage exists.
    """
    back = {v: j for j, v in enumerate(reps)}
    side_a = [reps[j] for j in cut[0]]
    side_b = [reps[j] for j in cut[1]]
    paths = find_linkage(g, side_a, side_b, forbidden)
    matching = [(back[p[0]], back[p[-1]]) for p in paths]
    return matching, paths


class FlowMatchingPlayer:
    def __init__(self, g: Graph, x: Sequence[int]):
        self.g = g
        self.reps = tuple(x)
        self.linkages: list[list[Path]] = []

    def __call__(self, round_index: int, a, b) -> Matching:
        matching, paths = matching_player_flow(self.g, self.reps, (a, b))
        self.linkages.append(paths)
        return matching


@dataclass
class GameResult:
    state: GameState
    certificate: ExpansionCertificate

    @property
    def rounds(self) -> int:
        return self.state.round

    @property
    def multigraph(self) -> MultiGraph:
        return self.state.multigraph

    def transcript(self) -> dict:
        return {
            "h": self.state.h,
            "rounds": [
                {"cut": [list(c[0]), list(c[1])], "matching": [list(e) for e in m]}
                for c, m in zip(self.state.cuts, self.state.matchings)
            ],
            "alpha": self.certificate.alpha,
            "method": self.certificate.method,
        }


def default_max_rounds(h: int) -> int:
    return max(1, math.ceil(4 * math.log2(h) ** 2))


def certify(mg: MultiGraph, exact_budget: int = EXACT_BUDGET) -> ExpansionCertificate:
    spectral = spectral_expansion(mg)
    if mg.n > exact_budget:
        return spectral
    if spectral.alpha < 1e-9 and _disconnected(mg):
        return ExpansionCertificate(0.0, "exact", None)
    return exact_expansion(mg)


def _disconnected(mg: MultiGraph) -> bool:
    return len(connected_components(mg.simple())) > 1


def run_game(
    h: int,
    player: Callable[[int, tuple, tuple], Matching],
    target_alpha: float = DEFAULT_TARGET,
    max_rounds: int | None = None,
    seed: int = 0,
    strategy: str = "projection",
    exact_budget: int = EXACT_BUDGET,
) -> GameResult:
    """Play until the accumulated multigraph certifies ``target_alpha``."""
    state = GameState.start(h)
    if max_rounds is None:
        max_rounds = default_max_rounds(h)
    rng = np.random.default_rng(seed)
    cert = ExpansionCertificate(0.0, "exact")
    for i in range(max_rounds):
        cut = cut_player_step(state, rng, strategy)
        matching = player(i, cut[0], cut[1])
        state.accept(cut, matching)
        cert = certify(state.multigraph, exact_budget)
        if cert.alpha >= target_alpha:
            return GameResult(state, cert)
    raise MaxRoundsExceeded(
        f"alpha {cert.alpha:.4f} < {target_alpha} after {max_rounds} rounds",
        partial=GameResult(state, cert),
    )
