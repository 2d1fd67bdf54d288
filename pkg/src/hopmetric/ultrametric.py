"""Rooted labeled trees realizing ultrametrics, plus weighted trees and
Steiner point removal.

Leaf-to-leaf distance in an ultrametric is the label of the least common
ancestor; labels never increase from the root down and leaves carry label 0.
"""
from __future__ import annotations

import itertools
import json
import math
import random
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .graph_core import INFINITY, ExtReal, ext_max, is_inf

_EPS = 1e-9


class Ultrametric:
    """Rooted labeled tree; nodes are indices into parallel arrays.

    parent[root] is None.  payload[x] is the carried vertex/copy id for
    leaves and None for internal nodes.
    """

    __slots__ = ("parent", "label", "payload", "_children", "_root")

    def __init__(self, parent: List[Optional[int]], label: List[ExtReal],
                 payload: List[Optional[object]]):
        if not (len(parent) == len(label) == len(payload)):
            raise ValueError("array lengths differ")
        roots = [i for i, p in enumerate(parent) if p is None]
        if len(roots) != 1:
            raise ValueError("tree must have exactly one root")
        self.parent = list(parent)
        self.label = list(label)
        self.payload = list(payload)
        self._root = roots[0]
        ch: List[List[int]] = [[] for _ in parent]
        for i, p in enumerate(parent):
            if p is not None:
                ch[p].append(i)
        self._children = ch

    # -- construction ----------------------------------------------------

    @classmethod
    def leaf(cls, payload: object) -> "Ultrametric":
        return cls([None], [0.0], [payload])

    @property
    def root(self) -> int:
        return self._root

    def children(self, x: int) -> Sequence[int]:
        return self._children[x]

    def is_leaf(self, x: int) -> bool:
        return not self._children[x]

    def leaves(self) -> List[int]:
        return [i for i in range(len(self.parent)) if self.is_leaf(i)]

    def leaf_index(self) -> Dict[object, int]:
        """payload -> leaf node id (payloads must be unique)."""
        out: Dict[object, int] = {}
        for i in self.leaves():
            p = self.payload[i]
            if p in out:
                raise ValueError(f"duplicate leaf payload {p!r}")
            out[p] = i
        return out

    def depth(self) -> int:
        best = 0
        for x in self.leaves():
            d = 0
            while self.parent[x] is not None:
                x = self.parent[x]
                d += 1
            best = max(best, d)
        return best

    def path_to_root(self, x: int) -> List[int]:
        out = [x]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out

    # -- serialization ---------------------------------------------------

    def to_json(self) -> str:
        lab = ["inf" if is_inf(l) else l for l in self.label]
        return json.dumps({"parent": self.parent, "label": lab, "payload": self.payload})

    @classmethod
    def from_json(cls, text: str) -> "Ultrametric":
        d = json.loads(text)
        lab: List[ExtReal] = [INFINITY if l == "inf" else float(l) for l in d["label"]]
        return cls(d["parent"], lab, d["payload"])


def ultra_distance(U: Ultrametric, x: int, y: int) -> ExtReal:
    """Label of lca(x,y); 0 when x == y.  Arguments are leaf node ids."""
    if not U.is_leaf(x) or not U.is_leaf(y):
        raise ValueError("ultra_distance arguments must be leaves")
    if x == y:
        return 0.0
    anc = set(U.path_to_root(x))
    z = y
    while z not in anc:
        z = U.parent[z]
    return U.label[z]


def validate_ultrametric(U: Ultrametric, sample_triples: int = 200,
                         rng: Optional[random.Random] = None) -> bool:
    """Label monotonicity plus the strong triangle inequality on triples
    (exhaustive for small leaf counts, sampled otherwise)."""
    for i, p in enumerate(U.parent):
        if p is not None:
            la, lb = U.label[p], U.label[i]
            if not is_inf(la):
                if is_inf(lb) or lb > la + _EPS:
                    return False
        if U.is_leaf(i) and U.label[i] != 0.0:
            return False
        if U.is_leaf(i) is (U.payload[i] is None):
            return False
    lvs = U.leaves()
    if len(lvs) < 3:
        return True
    triples: Iterable[Tuple[int, int, int]]
    if len(lvs) <= 24:
        triples = itertools.combinations(lvs, 3)
    else:
        rng = rng or random.Random(0)
        triples = ((rng.choice(lvs), rng.choice(lvs), rng.choice(lvs))
                   for _ in range(sample_triples))
    for a, b, c in triples:
        dab = ultra_distance(U, a, b)
        dbc = ultra_distance(U, b, c)
        dac = ultra_distance(U, a, c)
        m = ext_max(dab, dbc)
        if not is_inf(dac) and not is_inf(m) and dac > m + _EPS:
            return False
        if is_inf(dac) and not is_inf(m):
            return False
    return True


def join_under_root(children: Sequence[Ultrametric], label: ExtReal) -> Ultrametric:
    """New root with the given label, the given ultrametrics as subtrees."""
    if not children:
        raise ValueError("need at least one child")
    for c in children:
        cl = c.label[c.root]
        if not is_inf(label) and (is_inf(cl) or cl > label + _EPS):
            raise ValueError("root label smaller than a child root label")
    parent: List[Optional[int]] = [None]
    lab: List[ExtReal] = [label]
    payload: List[Optional[object]] = [None]
    for c in children:
        off = len(parent)
        for i in range(len(c.parent)):
            p = c.parent[i]
            parent.append(off + p if p is not None else 0)
            lab.append(c.label[i])
            payload.append(c.payload[i])
    return Ultrametric(parent, lab, payload)


def saturate_labels(U: Ultrametric, omega: ExtReal) -> Ultrametric:
    """Replace each label >= omega by INFINITY."""
    if is_inf(omega):
        return U
    lab = [INFINITY if (is_inf(l) or l >= omega - _EPS) else l for l in U.label]
    return Ultrametric(list(U.parent), lab, list(U.payload))


class WeightedTree:
    """Rooted tree with positive edge weights; payload per node."""

    __slots__ = ("parent", "weight", "payload", "_children", "_root")

    def __init__(self, parent: List[Optional[int]], weight: List[float],
                 payload: List[Optional[object]]):
        roots = [i for i, p in enumerate(parent) if p is None]
        if len(roots) != 1:
            raise ValueError("tree must have exactly one root")
        self.parent = list(parent)
        self.weight = list(weight)  # weight of edge to parent; 0 at root
        self.payload = list(payload)
        self._root = roots[0]
        ch: List[List[int]] = [[] for _ in parent]
        for i, p in enumerate(parent):
            if p is not None:
                ch[p].append(i)
        self._children = ch

    @property
    def root(self) -> int:
        return self._root

    def children(self, x: int) -> Sequence[int]:
        return self._children[x]

    def n_nodes(self) -> int:
        return len(self.parent)

    def hop_depth(self) -> int:
        best = 0
        for x in range(len(self.parent)):
            d = 0
            y = x
            while self.parent[y] is not None:
                y = self.parent[y]
                d += 1
            best = max(best, d)
        return best

    def path(self, u: int, v: int) -> List[int]:
        """Node sequence of the unique u-v path."""
        au = [u]
        while self.parent[au[-1]] is not None:
            au.append(self.parent[au[-1]])
        pos = {x: i for i, x in enumerate(au)}
        av = [v]
        while av[-1] not in pos:
            av.append(self.parent[av[-1]])
        lca = av[-1]
        return au[:pos[lca] + 1] + list(reversed(av[:-1]))

    def to_json(self) -> str:
        return json.dumps({"parent": self.parent, "weight": self.weight,
                           "payload": self.payload})


def tree_distance(T: WeightedTree, u: int, v: int) -> float:
    p = T.path(u, v)
    total = 0.0
    for a, b in zip(p, p[1:]):
        total += T.weight[b] if T.parent[b] == a else T.weight[a]
    return total


def steiner_point_removal(T: WeightedTree, K: Iterable[int]) -> Tuple[WeightedTree, Dict[int, int]]:
    """Contraction-only minor of T with vertex set exactly K.

    Every node is contracted into its nearest K-leaf among descendants
    (ties toward the smallest node id); subtrees containing no K node are
    folded into their parent's class.  Returns the new tree plus the map
    old node id in K -> new node id.
    """
    Kset = set(K)
    if not Kset:
        raise ValueError("K must be nonempty")
    for x in Kset:
        if not (0 <= x < T.n_nodes()):
            raise ValueError(f"{x} not a node of T")
    n = T.n_nodes()
    order: List[int] = [T.root]
    for x in order:
        order.extend(T.children(x))
    # bottom-up: nearest K descendant as (distance, node id)
    best: List[Optional[Tuple[float, int]]] = [None] * n
    for x in reversed(order):
        if x in Kset:
            best[x] = (0.0, x)
        for c in T.children(x):
            if best[c] is not None:
                cand = (best[c][0] + T.weight[c], best[c][1])
                if best[x] is None or cand < best[x]:
                    best[x] = cand
    assign: List[int] = [-1] * n
    for x in order:  # top-down; root guaranteed to have a K descendant
        if best[x] is not None:
            assign[x] = best[x][1]
        else:
            assign[x] = assign[T.parent[x]]
    # Quotient edges: classes are connected subtrees, so any two classes are
    # joined by at most one T edge; the quotient edge gets the distance
    # between the class representatives, keeping distances non-contracting.
    edge_w: Dict[Tuple[int, int], float] = {}
    for c in range(n):
        p = T.parent[c]
        if p is None:
            continue
        a, b = assign[p], assign[c]
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        w = best[p][0] + T.weight[c] + best[c][0]
        if key not in edge_w or w < edge_w[key]:
            edge_w[key] = w
    members = sorted(Kset)
    new_id = {x: i for i, x in enumerate(members)}
    adj: List[List[Tuple[int, float]]] = [[] for _ in members]
    for (a, b), w in edge_w.items():
        adj[new_id[a]].append((new_id[b], w))
        adj[new_id[b]].append((new_id[a], w))
    root_new = new_id[assign[T.root]]
    parent: List[Optional[int]] = [None] * len(members)
    weight = [0.0] * len(members)
    seen = [False] * len(members)
    seen[root_new] = True
    stack = [root_new]
    while stack:
        x = stack.pop()
        for y, w in adj[x]:
            if not seen[y]:
                seen[y] = True
                parent[y] = x
                weight[y] = w
                stack.append(y)
    if not all(seen):
        raise AssertionError("steiner quotient is not connected")
    payload = [T.payload[x] for x in members]
    return WeightedTree(parent, weight, payload), new_id


def ultrametric_to_tree(U: Ultrametric,
                        allow_infinite: bool = False) -> Tuple[WeightedTree, Dict[int, int]]:
    """Realize U as a weighted tree with identical leaf-to-leaf distances.

    Edge to parent gets weight (label(parent) - label(child))/2, so a
    leaf-to-LCA path weighs label(LCA)/2 and leaf distances match exactly.
    With allow_infinite, saturated labels become float('inf') edge weights
    (an edge between two saturated nodes weighs 0); otherwise labels must
    all be finite.
    """
    if not allow_infinite:
        for l in U.label:
            if is_inf(l):
                raise ValueError("cannot realize infinite labels as a finite tree")
    parent = list(U.parent)
    weight = [0.0] * len(parent)
    for i, p in enumerate(parent):
        if p is not None:
            if is_inf(U.label[p]):
                weight[i] = 0.0 if is_inf(U.label[i]) else math.inf
            else:
                weight[i] = (U.label[p] - U.label[i]) / 2.0
    payload = list(U.payload)
    T = WeightedTree(parent, weight, payload)
    return T, {i: i for i in range(len(parent))}
