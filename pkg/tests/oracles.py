"""Independent reference implementations used to freeze expected values.

Deliberately written with different algorithmic structure than the library:
depth-limited walk enumeration instead of round-synchronous relaxation,
edge-count Bellman-Ford instead of Dijkstra, ancestor-set intersection
instead of the library's LCA walk, and a literal transcription of the
cluster-carving rules driven by plain ball queries.
"""
from __future__ import annotations

import math
import random
from typing import Dict, List, Optional, Sequence, Set, Tuple

from hopmetric.graph_core import WeightedGraph, hop_distance_all, is_inf
from hopmetric.ultrametric import Ultrametric


def walk_enum_distance(G: WeightedGraph, s: int, h: int) -> List[float]:
    """Min weight over all walks of <= h edges, by depth-first enumeration
    with dominance pruning on (vertex, hops-used)."""
    n = G.n
    best = [[math.inf] * (h + 1) for _ in range(n)]
    best[s][0] = 0.0

    def go(v: int, used: int, w: float) -> None:
        if used == h:
            return
        for u, wu in G.adj[v]:
            nw = w + wu
            if any(best[u][r] <= nw + 1e-15 for r in range(used + 2)):
                continue
            best[u][used + 1] = nw
            go(u, used + 1, nw)

    go(s, 0, 0.0)
    return [min(row) for row in best]


def edge_count_bellman_ford(G: WeightedGraph, s: int) -> List[float]:
    """Unbounded shortest paths by |V|-1 rounds of edge relaxation."""
    dist = [math.inf] * G.n
    dist[s] = 0.0
    for _ in range(max(0, G.n - 1)):
        for u, v, w in G.edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
            if dist[v] + w < dist[u]:
                dist[u] = dist[v] + w
    return dist


def ancestor_set_distance(U: Ultrametric, x: int, y: int):
    """Ultrametric leaf distance via explicit ancestor-list intersection."""
    if x == y:
        return 0.0

    def ancestors(z: int) -> List[int]:
        out = [z]
        while U.parent[out[-1]] is not None:
            out.append(U.parent[out[-1]])
        return out

    ax, ay = ancestors(x), set(ancestors(y))
    for z in ax:
        if z in ay:
            return U.label[z]
    raise AssertionError("leaves share no ancestor")


def _ball(G: WeightedGraph, v: int, hops: int, radius: float,
          allowed: Set[int]) -> Set[int]:
    sub = sorted(allowed)
    dist = hop_distance_all(G, v, hops, allowed=sub) if hops > 0 else None
    out = set()
    for u in sub:
        if hops == 0:
            if u == v:
                out.add(u)
            continue
        d = dist[u]
        if not is_inf(d) and d <= radius + 1e-12:
            out.add(u)
    return out


def simulate_create_cluster(G: WeightedGraph, Y: Set[int], M: Set[int],
                            mu: Sequence[float], h: int, k: int, i: int):
    """Literal transcription of the marked-ball carving rule."""
    hprime = 2 * k * h
    rho = 2.0 ** i / (16.0 * k)
    MY = M & Y
    # center: vertex of Y with max marked-measure ball
    best_v, best_m = None, -1.0
    for v in sorted(Y):
        ball = _ball(G, v, i * hprime, 2.0 ** (i - 3), Y)
        m = sum(mu[u] for u in ball & MY)
        if m > best_m + 1e-12:
            best_v, best_m = v, m
    v = best_v
    A = [_ball(G, v, i * hprime + j * h, 2.0 ** (i - 3) + j * rho, Y)
         for j in range(2 * k + 1)]
    muA = [sum(mu[u] for u in a & MY) for a in A]
    target = (muA[2 * k] / muA[0]) ** (1.0 / k)
    for j in range(2 * (k - 1) + 1):
        if muA[j + 2] <= muA[j] * target * (1 + 1e-9):
            return A[j], A[j + 1], A[j + 2], v, j
    raise AssertionError("no admissible j in simulation")


def simulate_clan_create_cluster(G: WeightedGraph, Y: Set[int],
                                 mu: Sequence[float], h: int, k: int, i: int):
    """Literal transcription of the full-measure carving rule with the
    one-third/two-thirds side condition."""
    hprime = 2 * (k + 1) * h
    rho = 2.0 ** i / (16.0 * (k + 1))
    muY = sum(mu[u] for u in Y)
    best_v, best_m = None, -1.0
    for v in sorted(Y):
        ball = _ball(G, v, i * hprime, 2.0 ** (i - 3), Y)
        m = sum(mu[u] for u in ball)
        if m > best_m + 1e-12:
            best_v, best_m = v, m
    v = best_v
    nb = 2 * (k + 1)
    A = [_ball(G, v, i * hprime + j * h, 2.0 ** (i - 3) + j * rho, Y)
         for j in range(nb + 1)]
    muA = [sum(mu[u] for u in a) for a in A]
    target = (muA[nb] / muA[0]) ** (1.0 / k)
    for j in range(2 * k + 1):
        if muA[j + 2] <= muA[j] * target * (1 + 1e-9):
            if muA[j] > muY / 3.0 + 1e-12 or muA[j + 2] <= 2.0 * muY / 3.0 + 1e-12:
                return A[j], A[j + 1], A[j + 2], v, j
    raise AssertionError("no admissible j in simulation")


def brute_force_path_copies(emb, P: Sequence[int]) -> float:
    """Minimum copy-assignment cost by full cartesian enumeration."""
    import itertools

    from hopmetric.ultrametric import ultra_distance

    best = math.inf
    for combo in itertools.product(*(emb.f[v] for v in P)):
        cost = 0.0
        for a, b in zip(combo, combo[1:]):
            d = ultra_distance(emb.U, a, b)
            if is_inf(d):
                cost = math.inf
                break
            cost += d
        best = min(best, cost)
    return best


def random_graph(rng: random.Random, n: int, p: float,
                 wmin: float = 1.0, wmax: float = 1.0) -> WeightedGraph:
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                w = wmin if wmin == wmax else rng.uniform(wmin, wmax)
                edges.append((u, v, w))
    if not edges and n > 1:
        edges = [(0, 1, 1.0)]
    return WeightedGraph(n, edges)


def connected_random_graph(rng: random.Random, n: int, p: float,
                           wmin: float = 1.0, wmax: float = 1.0) -> WeightedGraph:
    """Random graph plus a random spanning chain, so it is connected."""
    edges: Dict[Tuple[int, int], float] = {}
    perm = list(range(n))
    rng.shuffle(perm)
    for a, b in zip(perm, perm[1:]):
        w = wmin if wmin == wmax else rng.uniform(wmin, wmax)
        edges[(min(a, b), max(a, b))] = w
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < p:
                w = wmin if wmin == wmax else rng.uniform(wmin, wmax)
                edges[(u, v)] = w
    return WeightedGraph(n, [(u, v, w) for (u, v), w in edges.items()])
