"""Closed-walk sampling from a concurrent flow, and bramble families of walks."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np
from scipy.stats import binomtest

from .bramble import ORDER_BUDGET, congestion, order_exact, order_fractional, verify_bramble
from .errors import BudgetExceeded
from .flow import ConcurrentFlow
from .graph import Graph, Path, Walk


@dataclass
class SamplerConfig:
    k: float
    delta: float = 0.25
    ell: int | None = None
    lam: float = 0.1
    family: int | None = None
    family_cap: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.delta <= 0.5:
            raise ValueError(f"delta must lie in (0, 0.5], got {self.delta}")
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.ell is not None and self.ell < 1:
            raise ValueError("ell must be at least 1")
        if self.family is not None and self.family < 1:
            raise ValueError("family size must be at least 1")

    def resolve_ell(self, beta_eff: float) -> int:
        if self.ell is not None:
            return self.ell
        return max(1, math.floor(self.k ** (0.5 + self.delta) / (72 * beta_eff)))

    def family_size(self) -> int:
        if self.family is not None:
            return self.family
        expo = self.lam * self.k ** (2 * self.delta)
        if expo >= math.log(self.family_cap):
            return self.family_cap
        return min(self.family_cap, math.floor(math.exp(expo)))

    def resolved(self, cf: ConcurrentFlow) -> dict:
        out = asdict(self)
        out["ell"] = self.resolve_ell(cf.beta_eff)
        out["family"] = self.family_size()
        out["beta_eff"] = cf.beta_eff
        return out


class _Tables:
    """Cumulative weights per ordered hub pair, for inverse-CDF draws."""

    def __init__(self, cf: ConcurrentFlow):
        self.w = cf.w
        self.paths: dict[tuple[int, int], list[Path]] = {}
        self.cum: dict[tuple[int, int], np.ndarray] = {}
        for key, fam in cf.families.items():
            self.paths[key] = [p for p, _ in fam]
            self.cum[key] = np.cumsum([wt for _, wt in fam])

    def draw(self, u: int, v: int, x: float) -> Path:
        cum = self.cum[(u, v)]
        i = int(np.searchsorted(cum, x * cum[-1], side="right"))
        return self.paths[(u, v)][min(i, len(cum) - 1)]


def _tables(cf: ConcurrentFlow) -> _Tables:
    # families are not mutated after solving; cache on the instance
    tab = cf.__dict__.get("_tables")
    if tab is None:
        tab = cf.__dict__["_tables"] = _Tables(cf)
    return tab


def sample_walk(cf: ConcurrentFlow, ell: int, rng: np.random.Generator) -> Walk:
    """Hubs s_1..s_ell i.i.d. uniform on W, then one flow path per
    consecutive (cyclic) hub pair; the walk is their concatenation."""
    tab = _tables(cf)
    hubs = [cf.w[i] for i in rng.integers(0, len(cf.w), size=ell)]
    draws = rng.random(ell)
    segments = []
    verts = [hubs[0]]
    for i in range(ell):
        p = tab.draw(hubs[i], hubs[(i + 1) % ell], draws[i])
        segments.append(p)
        verts.extend(p[1:])
    return Walk(tuple(verts), True, tuple(hubs), tuple(segments))


def sample_path(cf: ConcurrentFlow, rng: np.random.Generator) -> Path:
    """One path: independent uniform endpoints u, v in W, then P ~ f_{u,v}."""
    tab = _tables(cf)
    u, v = (cf.w[i] for i in rng.integers(0, len(cf.w), size=2))
    return tab.draw(u, v, rng.random())


def hit_probability(cf: ConcurrentFlow, x: int) -> float:
    """Probability that ``x`` lies on a path drawn by :func:`sample_path`."""
    terms = []
    for u in cf.w:
        for v in cf.w:
            for p, wt in cf.family(u, v):
                if x in p:
                    terms.append(wt)
    return math.fsum(terms) / len(cf.w) ** 2


def walk_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


@dataclass
class FamilyResult:
    walks: list[Walk]
    report: dict

    def to_json(self) -> dict:
        return {
            "walks": [list(w.vertices) for w in self.walks],
            "elements": [sorted(set(w.vertices)) for w in self.walks],
            "report": self.report,
        }


def pairwise_intersections(sets: list[frozenset[int]]) -> int:
    return sum(1 for i in range(len(sets)) for j in range(i + 1, len(sets)) if sets[i] & sets[j])


def sample_bramble(
    g: Graph,
    cf: ConcurrentFlow,
    cfg: SamplerConfig,
    order_budget: int = 200_000,
    exact_order: bool = True,
) -> FamilyResult:
    """Sample the walk family and certify it; a non-bramble is reported, not raised."""
    ell = cfg.resolve_ell(cf.beta_eff)
    size = cfg.family_size()
    walks = [sample_walk(cf, ell, walk_stream(cfg.seed, i)) for i in range(size)]
    sets = [frozenset(w.vertices) for w in walks]
    pairs = size * (size - 1) // 2
    inter = pairwise_intersections(sets)
    chk = verify_bramble(g, sets)
    c, _ = congestion(g, sets)
    report = {
        "config": cfg.resolved(cf),
        "family_size": size,
        "ell": ell,
        "valid": chk.ok,
        "violation": chk.reason,
        "pairs": pairs,
        "pairwise_intersecting": inter,
        "pairwise_fraction": inter / pairs if pairs else 1.0,
        "congestion": c,
        "order_lb": order_fractional(g, sets),
        "order": None,
        "hitting_set": None,
    }
    if exact_order:
        try:
            order, hs = order_exact(g, sets, min(order_budget, ORDER_BUDGET))
            report["order"], report["hitting_set"] = order, hs
        except BudgetExceeded as exc:
            report["order_bounds"] = list(exc.bounds)
    return FamilyResult(walks, report)


@dataclass
class MissEstimate:
    p: float
    lo: float
    hi: float
    misses: int
    trials: int


def estimate_miss_probability(
    cf: ConcurrentFlow, ell: int, x: Iterable[int], trials: int, seed: int = 0
) -> MissEstimate:
    """Fraction of sampled walks avoiding ``x``, with a 95% Wilson interval.

    Walks come from one stream per seed, so estimates for different ``x``
    with the same seed share their samples.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    x = set(x)
    rng = np.random.default_rng(seed)
    misses = 0
    for _ in range(trials):
        w = sample_walk(cf, ell, rng)
        if x.isdisjoint(w.vertices):
            misses += 1
    ci = binomtest(misses, trials).proportion_ci(0.95, method="wilson")
    return MissEstimate(misses / trials, float(ci.low), float(ci.high), misses, trials)
