"""Clique-minor models: exact verification and a randomized search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .graph import OK, Check, Graph, fail, is_connected_set


@dataclass(frozen=True)
class MinorModel:
    branch_sets: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, sets: Iterable[Iterable[int]]) -> "MinorModel":
        return cls(tuple(frozenset(int(v) for v in s) for s in sets))

    @property
    def t(self) -> int:
        return len(self.branch_sets)

    def to_json(self) -> dict:
        return {"branch_sets": [sorted(s) for s in self.branch_sets]}

    @classmethod
    def from_json(cls, data: Mapping) -> "MinorModel":
        return cls.of(data["branch_sets"])


def touching_edge(host: Graph, a: Iterable[int], b: Iterable[int]) -> tuple[int, int] | None:
    """Lexicographically smallest host edge (x, y) with x in a, y in b."""
    b = set(b)
    for x in sorted(a):
        for y in host.sorted_adj[x]:
            if y in b:
                return x, y
    return None


def verify_minor_model(host: Graph, model: MinorModel, pattern: Graph | None = None) -> Check:
    """Check a model of ``pattern`` (default: the clique on t vertices)."""
    sets = model.branch_sets
    seen: dict[int, int] = {}
    for i, s in enumerate(sets):
        if not s:
            return fail(f"branch set {i} is empty", i)
        if any(not 0 <= v < host.n for v in s):
            return fail(f"branch set {i} leaves the host", i)
        for v in s:
            if v in seen:
                return fail(f"branch sets {seen[v]} and {i} share vertex {v}", (seen[v], i))
            seen[v] = i
        if not is_connected_set(host, s):
            return fail(f"branch set {i} is not connected", i)
    if pattern is None:
        pairs = [(a, b) for a in range(len(sets)) for b in range(a + 1, len(sets))]
    else:
        if pattern.n != len(sets):
            return fail(f"pattern has {pattern.n} vertices, model has {len(sets)} sets")
        pairs = pattern.sorted_edges()
    for a, b in pairs:
        if touching_edge(host, sets[a], sets[b]) is None:
            return fail(f"branch sets {a} and {b} are not adjacent", (a, b))
    return OK


def _attempt(host: Graph, rng: np.random.Generator) -> list[frozenset[int]]:
    """One randomized contraction run; returns the best clique model seen.

    Repeatedly contracts a minimum-degree quotient vertex into the neighbour
    sharing the fewest neighbours with it, and after every contraction
    extracts a clique of the quotient greedily by degree.
    """
    groups = {v: {v} for v in range(host.n)}
    qadj = {v: set(host.adj[v]) for v in range(host.n)}
    best: list[frozenset[int]] = [frozenset({0})] if host.n else []

    def greedy_clique():
        keys = list(qadj)
        noise = rng.random(len(keys))
        order = sorted(range(len(keys)), key=lambda i: (-len(qadj[keys[i]]), noise[i]))
        clique = []
        for i in order:
            c = keys[i]
            if all(c in qadj[m] for m in clique):
                clique.append(c)
        return clique

    while qadj:
        clique = greedy_clique()
        if len(clique) > len(best):
            best = [frozenset(groups[c]) for c in clique]
        if len(clique) == len(qadj):
            break
        keys = list(qadj)
        noise = rng.random(len(keys))
        v = keys[min(range(len(keys)), key=lambda i: (len(qadj[keys[i]]), noise[i]))]
        if not qadj[v]:
            del qadj[v]
            continue
        nbrs = sorted(qadj[v])
        noise = rng.random(len(nbrs))
        w = nbrs[min(range(len(nbrs)), key=lambda i: (len(qadj[v] & qadj[nbrs[i]]), noise[i]))]
        groups[w] |= groups.pop(v)
        for x in qadj.pop(v):
            qadj[x].discard(v)
            if x != w:
                qadj[x].add(w)
                qadj[w].add(x)
    return best


def find_clique_minor(
    host: Graph, target_t: int | None = None, attempts: int = 20, seed: int = 0
) -> MinorModel:
    """Largest verified clique-minor model found by randomized contraction.

    Attempts are independent streams derived from (seed, attempt); the
    winner is the first attempt reaching the maximum size. With a target,
    the search stops once it is reached and the model is cut down to it.
    """
    best: list[frozenset[int]] = []
    for i in range(attempts):
        rng = np.random.default_rng([seed, i])
        cand = _attempt(host, rng)
        if len(cand) > len(best) and verify_minor_model(host, MinorModel(tuple(cand))):
            best = cand
        if target_t is not None and len(best) >= target_t:
            break
    if target_t is not None and len(best) > target_t:
        best = best[:target_t]
    model = MinorModel(tuple(sorted(best, key=min)))
    chk = verify_minor_model(host, model)
    if not chk:
        raise AssertionError(f"search returned an invalid model: {chk.reason}")
    return model
