"""Weighted graphs and exact hop-bounded shortest-path computation.

The hop-bounded distances computed here are the ground truth that every
other module is checked against.  A distance with hop budget h is the
minimum weight of a path using at most h edges; pairs with no such path
are at distance INFINITY (a distinguished value, not a float sentinel).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Set, Tuple, Union


class _Infinity:
    """Distinguished infinite distance: absorbs addition, compares above all reals."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other):
        return self

    def __radd__(self, other):
        return self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("hopmetric-infinity")

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()

ExtReal = Union[float, _Infinity]


def is_inf(x: ExtReal) -> bool:
    return x is INFINITY


def ext_min(a: ExtReal, b: ExtReal) -> ExtReal:
    if is_inf(a):
        return b
    if is_inf(b):
        return a
    return a if a <= b else b


def ext_max(a: ExtReal, b: ExtReal) -> ExtReal:
    if is_inf(a) or is_inf(b):
        return INFINITY
    return a if a >= b else b


@dataclass(frozen=True)
class HopParams:
    """Common parameter bundle: hop budget h, distortion parameter k, epsilon."""

    h: int
    k: int = 1
    epsilon: float = 0.5

    def __post_init__(self):
        if self.h < 1:
            raise ValueError("h must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError("epsilon must be in (0,1)")


class WeightedGraph:
    """Undirected weighted graph with positive finite edge weights.

    Weights are normalized at construction so the minimum edge weight is 1;
    the applied scale factor is recorded in ``scale`` (original weight =
    stored weight * scale).  Instances are immutable after construction.
    """

    __slots__ = ("n", "edges", "adj", "scale")

    def __init__(self, n: int, edges: Iterable[Tuple[int, int, float]],
                 normalize: bool = True):
        if n < 1:
            raise ValueError("graph must have at least one vertex")
        seen: Set[Tuple[int, int]] = set()
        clean: List[Tuple[int, int, float]] = []
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (w > 0 and w != float("inf")):
                raise ValueError(f"edge ({u},{v}) has non-positive or infinite weight {w}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            clean.append((key[0], key[1], float(w)))
        clean.sort()
        scale = 1.0
        if normalize and clean:
            wmin = min(w for _, _, w in clean)
            if wmin != 1.0:
                scale = wmin
                clean = [(u, v, w / wmin) for u, v, w in clean]
        self.n = n
        self.edges = tuple(clean)
        self.scale = scale
        adj: List[List[Tuple[int, float]]] = [[] for _ in range(n)]
        for u, v, w in clean:
            adj[u].append((v, w))
            adj[v].append((u, w))
        for lst in adj:
            lst.sort()
        self.adj = tuple(tuple(lst) for lst in adj)

    # -- serialization ---------------------------------------------------

    @classmethod
    def from_json(cls, text: str) -> "WeightedGraph":
        data = json.loads(text)
        return cls(int(data["n"]), [(int(u), int(v), float(w)) for u, v, w in data["edges"]])

    @classmethod
    def load(cls, path: str) -> "WeightedGraph":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [[u, v, w] for u, v, w in self.edges]})

    # -- helpers ---------------------------------------------------------

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges)

    def max_weight(self) -> float:
        return max((w for _, _, w in self.edges), default=1.0)

    def has_edge(self, u: int, v: int) -> bool:
        a, b = min(u, v), max(u, v)
        return any(x == b for x, _ in self.adj[a])

    def edge_weight(self, u: int, v: int) -> float:
        for x, w in self.adj[u]:
            if x == v:
                return w
        raise KeyError((u, v))

    def induced(self, vertices: Iterable[int]) -> Tuple["WeightedGraph", Dict[int, int]]:
        """Induced subgraph plus the old-id -> new-id map (weights kept as-is)."""
        keep = sorted(set(vertices))
        idx = {v: i for i, v in enumerate(keep)}
        es = [(idx[u], idx[v], w) for u, v, w in self.edges if u in idx and v in idx]
        return WeightedGraph(len(keep), es, normalize=False), idx

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise ValueError(f"invalid vertex id {v}")


def hop_distance_all(G: WeightedGraph, s: int, h: int,
                     allowed: Sequence[int] | None = None) -> List[ExtReal]:
    """h rounds of Bellman-Ford from s; entry v = d^{(h)}(s,v).

    ``allowed`` optionally restricts relaxation to an induced vertex subset
    (so other modules can work on G[Y] without rebuilding the graph).
    """
    G._check_vertex(s)
    if h < 0:
        raise ValueError("h must be >= 0")
    dist: List[ExtReal] = [INFINITY] * G.n
    dist[s] = 0.0
    if allowed is not None:
        mask = [False] * G.n
        for v in allowed:
            mask[v] = True
        if not mask[s]:
            raise ValueError("source not in allowed set")
    else:
        mask = None
    frontier = [s]
    for _ in range(h):
        updates: Dict[int, float] = {}
        for u in frontier:
            du = dist[u]
            for v, w in G.adj[u]:
                if mask is not None and not mask[v]:
                    continue
                nd = du + w
                cur = updates.get(v)
                if (cur is None or nd < cur) and nd < dist[v]:
                    updates[v] = nd
        if not updates:
            break
        for v, nd in updates.items():
            dist[v] = nd
        frontier = list(updates)
    return dist


def hop_profile(G: WeightedGraph, s: int, budgets: Sequence[int],
                maxr: float | None = None,
                allowed: Sequence[int] | None = None) -> Dict[int, List[ExtReal]]:
    """Snapshots of truncated Bellman-Ford distances from s at several budgets.

    One relaxation sweep serves all requested budgets.  ``maxr`` prunes the
    search to distances <= maxr (valid since weights are positive: every
    prefix of a shortest path is no longer than the path itself).
    """
    G._check_vertex(s)
    want = sorted(set(int(b) for b in budgets))
    if not want or want[0] < 0:
        raise ValueError("budgets must be nonnegative")
    if allowed is not None:
        mask = [False] * G.n
        for v in allowed:
            mask[v] = True
        if not mask[s]:
            raise ValueError("source not in allowed set")
    else:
        mask = None
    dist: List[ExtReal] = [INFINITY] * G.n
    dist[s] = 0.0
    out: Dict[int, List[ExtReal]] = {}
    if want[0] == 0:
        out[0] = list(dist)
    frontier = [s]
    settled = False
    for rnd in range(1, want[-1] + 1):
        if not settled:
            updates: Dict[int, float] = {}
            for u in frontier:
                du = dist[u]
                for v, w in G.adj[u]:
                    if mask is not None and not mask[v]:
                        continue
                    nd = du + w
                    if maxr is not None and nd > maxr + 1e-12:
                        continue
                    cur = updates.get(v)
                    if (cur is None or nd < cur) and nd < dist[v]:
                        updates[v] = nd
            if updates:
                for v, nd in updates.items():
                    dist[v] = nd
                frontier = list(updates)
            else:
                settled = True
        if rnd in out:
            continue
        if rnd in want:
            out[rnd] = list(dist)
        if settled:
            break
    for b in want:
        if b not in out:
            out[b] = list(dist)
    return out


def hop_distance(G: WeightedGraph, u: int, v: int, h: int) -> ExtReal:
    G._check_vertex(u)
    G._check_vertex(v)
    if u == v:
        return 0.0
    return hop_distance_all(G, u, h)[v]


def hop_ball(G: WeightedGraph, v: int, r: float, h: int,
             allowed: Sequence[int] | None = None) -> Set[int]:
    """{ u : d^{(h)}(v,u) <= r }; always contains v."""
    if r < 0:
        raise ValueError("r must be >= 0")
    dist = hop_distance_all(G, v, h, allowed=allowed)
    return {u for u, d in enumerate(dist) if not is_inf(d) and d <= r}


def hop_diameter(G: WeightedGraph, h: int) -> ExtReal:
    best: ExtReal = 0.0
    for s in range(G.n):
        dist = hop_distance_all(G, s, h)
        for v in range(s + 1, G.n):
            best = ext_max(best, dist[v])
            if is_inf(best):
                return INFINITY
    return best


def max_finite_hop_distance(G: WeightedGraph, h: int) -> float:
    """D' = max over pairs with hop_G(u,v) <= h of d^{(h)}(u,v); 0 if none."""
    best = 0.0
    for s in range(G.n):
        dist = hop_distance_all(G, s, h)
        for v in range(s + 1, G.n):
            d = dist[v]
            if not is_inf(d) and d > best:
                best = d
    return best


def finite_completion(G: WeightedGraph, h: int, k: int) -> Tuple[WeightedGraph, float]:
    """Add an edge of weight omega = 17k*D' for every pair not h-hop connected."""
    if k < 1:
        raise ValueError("k must be >= 1")
    dprime = max_finite_hop_distance(G, h)
    if dprime == 0.0:
        # no finite pair other than trivial ones; fall back to max edge weight
        dprime = G.max_weight()
    omega = 17.0 * k * dprime
    extra: List[Tuple[int, int, float]] = []
    for s in range(G.n):
        dist = hop_distance_all(G, s, h)
        for v in range(s + 1, G.n):
            if is_inf(dist[v]):
                extra.append((s, v, omega))
    if not extra:
        return G, omega
    Gp = WeightedGraph(G.n, list(G.edges) + extra, normalize=False)
    return Gp, omega


def dijkstra(edges_adj: Sequence[Sequence[Tuple[int, float]]], s: int) -> List[ExtReal]:
    """Plain Dijkstra over an adjacency structure (no hop constraint)."""
    import heapq

    n = len(edges_adj)
    dist: List[ExtReal] = [INFINITY] * n
    dist[s] = 0.0
    pq: List[Tuple[float, int]] = [(0.0, s)]
    while pq:
        d, u = heapq.heappop(pq)
        if is_inf(dist[u]) or d > dist[u]:
            continue
        for v, w in edges_adj[u]:
            nd = d + w
            if is_inf(dist[v]) or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(pq, (nd, v))
    return dist


def is_h_respecting(G: WeightedGraph, H_edges: Iterable[Tuple[int, int]], h: int) -> bool:
    """True iff for all u,v in V(H): d_G^{(h)}(u,v) <= d_H(u,v)."""
    hset = set()
    for u, v in H_edges:
        if not G.has_edge(u, v):
            raise ValueError(f"({u},{v}) is not an edge of G")
        hset.add((min(u, v), max(u, v)))
    verts = sorted({x for e in hset for x in e})
    if not verts:
        return True
    idx = {v: i for i, v in enumerate(verts)}
    adj: List[List[Tuple[int, float]]] = [[] for _ in verts]
    for u, v in hset:
        w = G.edge_weight(u, v)
        adj[idx[u]].append((idx[v], w))
        adj[idx[v]].append((idx[u], w))
    for u in verts:
        dh = dijkstra(adj, idx[u])
        dg = hop_distance_all(G, u, h)
        for v in verts:
            dHv = dh[idx[v]]
            if is_inf(dHv):
                continue
            dGv = dg[v]
            if is_inf(dGv) or dGv > dHv + 1e-9:
                return False
    return True
