"""Hop-constrained Ramsey-type embeddings into ultrametrics.

Implements the recursive embedding (scale-descending padded partitions with
cluster carving), the log-log alternative cluster rule, and the
multiplicative-weights builder for distributions with per-vertex inclusion
guarantees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .graph_core import (INFINITY, ExtReal, WeightedGraph, finite_completion,
                         hop_diameter, hop_profile, is_inf)
from .ultrametric import Ultrametric, join_under_root, saturate_labels

_REL_TOL = 1e-12

Measure = Sequence[float]


def measure_of(mu: Measure, S) -> float:
    return sum(mu[v] for v in S)


@dataclass(frozen=True)
class ClusterTriple:
    inner: FrozenSet[int]
    mid: FrozenSet[int]
    outer: FrozenSet[int]
    center: int
    index: int

    def __post_init__(self):
        if not (self.inner <= self.mid <= self.outer):
            raise ValueError("cluster triple must be nested")


@dataclass
class RamseyEmbedding:
    U: Ultrametric
    M: FrozenSet[int]
    t: float
    beta: int          # domination holds at hop budget beta*h
    h: int
    k: int
    variant: str
    phi: int
    omega: Optional[float]   # infinity-transform edge weight, if applied
    max_j: int               # largest cluster index observed

    def leaf_of(self) -> Dict[int, int]:
        return self.U.leaf_index()


def _check_ge1(mu: Measure, verts) -> None:
    for v in verts:
        if mu[v] < 1.0 - 1e-12:
            raise ValueError("measure must be >= 1 on every vertex")


def create_cluster(G: WeightedGraph, Y: Set[int], M: Set[int], mu: Measure,
                   h: int, k: int, scale_i: int) -> ClusterTriple:
    """Carve a cluster triple from G[Y] around a max-marked-ball center."""
    MY = M & Y
    if not MY:
        raise ValueError("marked set must intersect Y")
    hprime = 2 * k * h
    r0 = 2.0 ** (scale_i - 3)
    rho = 2.0 ** scale_i / (16.0 * k)
    b0 = scale_i * hprime if scale_i > 0 else 0
    allowed = sorted(Y)

    def ball(dist: List[ExtReal], r: float) -> FrozenSet[int]:
        return frozenset(u for u in allowed
                         if not is_inf(dist[u]) and dist[u] <= r + _REL_TOL)

    best_v, best_m = -1, -1.0
    for v in allowed:
        prof = hop_profile(G, v, [b0], maxr=r0, allowed=allowed)
        m = sum(mu[u] for u in ball(prof[b0], r0) if u in MY)
        if m > best_m + _REL_TOL:
            best_v, best_m = v, m
    v = best_v
    budgets = [b0 + j * h for j in range(2 * k + 1)]
    maxr = r0 + 2 * k * rho
    prof = hop_profile(G, v, budgets, maxr=maxr, allowed=allowed)
    A = [ball(prof[b0 + j * h], r0 + j * rho) for j in range(2 * k + 1)]
    muA = [sum(mu[u] for u in A[j] if u in MY) for j in range(2 * k + 1)]
    target = (muA[2 * k] / muA[0]) ** (1.0 / k)
    for j in range(2 * (k - 1) + 1):
        if muA[j + 2] <= muA[j] * target * (1.0 + 1e-9):
            return ClusterTriple(A[j], A[j + 1], A[j + 2], v, j)
    raise AssertionError("no admissible cluster index j <= 2(k-1)")


def create_cluster_alt(G: WeightedGraph, Y: Set[int], M: Set[int], mu: Measure,
                       h: int, k: int, scale_i: int) -> ClusterTriple:
    """Alternative cluster rule: hop budget independent of the scale count."""
    MY = M & Y
    if not MY:
        raise ValueError("marked set must intersect Y")
    muM_total = sum(mu[u] for u in MY)
    L = alt_levels(muM_total)
    delta = 2.0 ** scale_i
    allowed = sorted(Y)
    bball = 2 * k * L * h

    def ball(dist: List[ExtReal], r: float) -> FrozenSet[int]:
        return frozenset(u for u in allowed
                         if not is_inf(dist[u]) and dist[u] <= r + _REL_TOL)

    best_v, best_m = -1, math.inf
    for v in sorted(MY):
        prof = hop_profile(G, v, [bball], maxr=delta / 4.0, allowed=allowed)
        m = sum(mu[u] for u in ball(prof[bball], delta / 4.0) if u in MY)
        if m < best_m - _REL_TOL:
            best_v, best_m = v, m
    v = best_v
    if best_m > 0.5 * muM_total + _REL_TOL:
        # trivial return claims diam^{(4kLh)}(G[Y]) <= delta/2; certify it,
        # since far-away unmarked vertices can break the claim, in which
        # case the scale-bounded rule still guarantees progress
        if _bounded_diam_at_most(G, allowed, 2 * bball, delta / 2.0):
            X = frozenset(Y)
            return ClusterTriple(X, X, X, v, 0)
        return create_cluster(G, Y, M, mu, h, k, scale_i)

    def budget(a: int, j: int) -> int:
        return (2 * k * a + j) * h

    def radius(a: int, j: int) -> float:
        return (a + j / (2.0 * k)) * delta / (4.0 * L)

    budgets = sorted({budget(a, j) for a in range(L + 1) for j in range(2 * k + 1)})
    prof = hop_profile(G, v, budgets, maxr=delta / 4.0 + _REL_TOL, allowed=allowed)

    def muA(a: int, j: int) -> float:
        b = ball(prof[budget(a, j)], radius(a, j))
        return sum(mu[u] for u in b if u in MY)

    a_sel = -1
    for a in range(L):
        if muA(a, 0) >= muA(a + 1, 0) ** 2 / muM_total * (1.0 - 1e-9):
            a_sel = a
            break
    if a_sel < 0:
        raise AssertionError("no admissible level index a")  # impossible: the
        # trivial-return branch would have fired first
    a = a_sel
    target = (muA(a + 1, 0) / muA(a, 0)) ** (1.0 / k)
    for j in range(2 * (k - 1) + 1):
        if muA(a, j + 2) <= muA(a, j) * target * (1.0 + 1e-9):
            inner = ball(prof[budget(a, j)], radius(a, j))
            mid = ball(prof[budget(a, j + 1)], radius(a, j + 1))
            outer = ball(prof[budget(a, j + 2)], radius(a, j + 2))
            return ClusterTriple(inner, mid, outer, v, j)
    raise AssertionError("no admissible cluster index j <= 2(k-1)")


def _bounded_diam_at_most(G: WeightedGraph, allowed: List[int], budget: int,
                          bound: float) -> bool:
    for s in allowed:
        prof = hop_profile(G, s, [budget], maxr=bound, allowed=allowed)
        d = prof[budget]
        for u in allowed:
            if is_inf(d[u]) or d[u] > bound + _REL_TOL:
                return False
    return True


def alt_levels(mu_total: float) -> int:
    """L = ceil(1 + log2 log2 mu), floored at 1."""
    if mu_total <= 2.0:
        return 1
    return max(1, math.ceil(1.0 + math.log2(math.log2(mu_total))))


def padded_partition(G: WeightedGraph, X: Set[int], mu: Measure, M: Set[int],
                     h: int, k: int, scale_i: int,
                     variant: str = "standard",
                     stats: Optional[dict] = None) -> List[Tuple[FrozenSet[int], FrozenSet[int]]]:
    """Partition X into clusters with nested marked subsets.

    Returns [(cluster, marked-subset)] in creation order; once the live
    marked set empties, the remaining vertices become singleton clusters.
    """
    if not X:
        raise ValueError("X must be nonempty")
    carve = create_cluster if variant == "standard" else create_cluster_alt
    Y = set(X)
    MY = set(M) & Y
    out: List[Tuple[FrozenSet[int], FrozenSet[int]]] = []
    while Y:
        if not MY:
            for v in sorted(Y):
                out.append((frozenset([v]), frozenset()))
            break
        trip = carve(G, Y, MY, mu, h, k, scale_i)
        if stats is not None:
            stats.setdefault("j_values", []).append(trip.index)
        cluster = trip.mid & Y
        out.append((frozenset(cluster), frozenset(MY & trip.inner)))
        Y -= cluster
        MY -= trip.outer
        MY &= Y
    return out


def ramsey_embed(G: WeightedGraph, mu: Measure, M0: Set[int], h: int, k: int,
                 variant: str = "standard") -> RamseyEmbedding:
    """Build the full Ramsey-type embedding of G (all vertices as leaves)."""
    if variant not in ("standard", "alt"):
        raise ValueError(f"unknown variant {variant!r}")
    _check_ge1(mu, range(G.n))
    M0 = set(M0)
    omega: Optional[float] = None
    Gw = G
    diam = hop_diameter(G, h)
    if is_inf(diam):
        Gw, omega = finite_completion(G, h, k)
        diam = hop_diameter(Gw, h)
    if G.n == 1 or diam == 0.0:
        U = Ultrametric.leaf(0) if G.n == 1 else None
        if U is None:
            raise AssertionError("distinct vertices at distance 0")
        return RamseyEmbedding(U, frozenset(M0), 16.0 * k, 1, h, k, variant,
                               0, omega, 0)
    phi = max(0, math.ceil(math.log2(diam)))
    stats: dict = {}

    def recurse(X: Set[int], M: Set[int], i: int) -> Tuple[Ultrametric, Set[int]]:
        if len(X) == 1:
            v = next(iter(X))
            return Ultrametric.leaf(v), set(M) & X
        if i < 0:
            raise AssertionError("scale exhausted with a non-singleton cluster")
        parts = padded_partition(Gw, X, mu, M, h, k, i, variant, stats=stats)
        subs: List[Ultrametric] = []
        survivors: Set[int] = set()
        for cluster, marked in parts:
            Uq, Sq = recurse(set(cluster), set(marked), i - 1)
            subs.append(Uq)
            survivors |= Sq
        if len(subs) == 1:
            return subs[0], survivors
        return join_under_root(subs, 2.0 ** i), survivors

    U, M = recurse(set(range(G.n)), M0, phi)
    if omega is not None:
        U = saturate_labels(U, omega)
    if variant == "standard":
        t = 16.0 * k
        beta = 2 * (phi + 2) * 2 * k
    else:
        L_top = alt_levels(measure_of(mu, M0) if M0 else measure_of(mu, range(G.n)))
        t = 16.0 * k * L_top
        beta = 4 * k * L_top
    max_j = max(stats.get("j_values", [0]))
    emb = RamseyEmbedding(U, frozenset(M), t, beta, h, k, variant, phi, omega, max_j)
    # measure survival guarantee, asserted on every run
    if M0:
        surv = measure_of(mu, M)
        need = measure_of(mu, M0) ** (1.0 - 1.0 / k)
        if surv < need - 1e-6:
            raise AssertionError(f"measure survival violated: {surv} < {need}")
    return emb


def mwu_measures(weights: Sequence[float], k: int) -> List[float]:
    """Scale MWU weights to the mixed (>=1)-measure used each round."""
    n = len(weights)
    total = sum(weights)
    delta = (k + 1) ** (-(k + 1) / k)
    s = n ** (1.0 / k) / delta
    return [s * n * (1.0 / (s * n) + (s - 1.0) / s * (w / total)) for w in weights]


def ramsey_distribution(G: WeightedGraph, h: int, mode: str, rounds: int,
                        seed: int = 0, k: int = 2, epsilon: float = 0.25,
                        variant: str = "standard") -> List[Tuple[RamseyEmbedding, float]]:
    """Multiplicative-weights distribution over Ramsey embeddings.

    mode "fixed_k": per-vertex inclusion probability Omega(n^{-1/k});
    mode "inclusion": k is derived from epsilon and inclusion >= 1-epsilon.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    n = G.n
    if mode == "fixed_k":
        kk = k
    elif mode == "inclusion":
        kk = max(1, math.ceil(4.0 * math.log(n) / epsilon)) if n > 1 else 1
    else:
        raise ValueError(f"unknown mode {mode!r}")
    eta = 0.5 / math.sqrt(rounds)
    weights = [1.0] * n
    out: List[Tuple[RamseyEmbedding, float]] = []
    for _ in range(rounds):
        mu = mwu_measures(weights, kk)
        emb = ramsey_embed(G, mu, set(range(n)), h, kk + 1, variant)
        out.append((emb, 1.0 / rounds))
        for v in range(n):
            if v not in emb.M:
                weights[v] *= 1.0 + eta
    return out
