"""Path-tree embeddings, induced low-hop paths, and subgraph images."""
from __future__ import annotations

import math
import random

import pytest

from hopmetric.graph_core import (WeightedGraph, hop_distance_all,
                                  is_h_respecting, is_inf)
from hopmetric.preserve import (Unreachable, bounded_hop_path,
                                build_path_tree_embedding,
                                image_of_general_subgraph,
                                image_of_respecting_subgraph, induced_path)
from oracles import connected_random_graph, random_graph, walk_enum_distance


def _assert_walk(G: WeightedGraph, walk, weight):
    for a, b in zip(walk, walk[1:]):
        assert G.has_edge(a, b)
    assert sum(G.edge_weight(a, b) for a, b in zip(walk, walk[1:])) == \
        pytest.approx(weight)


class TestBoundedHopPath:
    def test_matches_walk_enumeration(self):
        rng = random.Random(111)
        for _ in range(15):
            n = rng.randint(2, 10)
            G = random_graph(rng, n, 0.35, 1.0, 7.0)
            for budget in (1, 2, 3):
                for s in range(n):
                    ref = walk_enum_distance(G, s, budget)
                    for t in range(n):
                        got = bounded_hop_path(G, s, t, budget)
                        if ref[t] == math.inf:
                            assert got is None
                        else:
                            path, w = got
                            assert w == pytest.approx(ref[t])
                            assert path[0] == s and path[-1] == t
                            assert len(path) - 1 <= budget
                            _assert_walk(G, path, w)

    def test_zero_budget(self):
        G = WeightedGraph(2, [(0, 1, 1.0)])
        assert bounded_hop_path(G, 0, 0, 0) == ([0], 0.0)
        assert bounded_hop_path(G, 0, 1, 0) is None


def _check_pte(G, pte):
    n = G.n
    assert len(pte.f[pte.root_vertex]) == 1
    payload = pte.T.payload
    for v in range(n):
        assert pte.f[v], "every vertex keeps at least one copy"
        assert pte.chi[v] in pte.f[v]
        assert all(payload[c] == v for c in pte.f[v])
    assert sorted(c for v in range(n) for c in pte.f[v]) == \
        list(range(pte.T.n_nodes()))
    # every finite tree edge carries a bounded-hop path of matching endpoints
    for c in range(pte.T.n_nodes()):
        p = pte.T.parent[c]
        if p is None:
            continue
        key = (min(c, p), max(c, p))
        entry = pte.assoc[key]
        if pte.T.weight[c] == math.inf:
            assert entry is None
            continue
        path, w = entry
        assert {path[0], path[-1]} <= {payload[c], payload[p]} | {path[0]}
        assert len(path) - 1 <= pte.edge_hop_budget
        assert w <= pte.T.weight[c] * (1 + 1e-9) + 1e-12
        _assert_walk(G, path, w)


class TestPathTreeEmbedding:
    def test_invariants_random(self):
        rng = random.Random(121)
        for _ in range(8):
            n = rng.randint(2, 9)
            G = connected_random_graph(rng, n, 0.35, 1.0, 5.0)
            root = rng.randrange(n)
            h = rng.randint(1, 3)
            pte = build_path_tree_embedding(G, root, h)
            _check_pte(G, pte)

    def test_alt_variant(self):
        rng = random.Random(122)
        G = connected_random_graph(rng, 8, 0.3, 1.0, 4.0)
        pte = build_path_tree_embedding(G, 0, 2, "alt")
        _check_pte(G, pte)

    def test_singleton(self):
        pte = build_path_tree_embedding(WeightedGraph(1, []), 0, 1)
        assert pte.f[0] == (0,) and pte.root_copy() == 0

    def test_induced_paths(self):
        rng = random.Random(123)
        for _ in range(6):
            n = rng.randint(2, 8)
            G = connected_random_graph(rng, n, 0.35, 1.0, 4.0)
            pte = build_path_tree_embedding(G, 0, 2)
            copies = list(range(pte.T.n_nodes()))
            for _ in range(10):
                a, b = rng.choice(copies), rng.choice(copies)
                walk, w = induced_path(pte, a, b)
                assert walk[0] == pte.T.payload[a]
                assert walk[-1] == pte.T.payload[b]
                assert len(walk) - 1 <= pte.hop_bound
                _assert_walk(G, walk, w)

    def test_unreachable_across_components(self):
        G = WeightedGraph(4, [(0, 1, 1.0), (2, 3, 1.0)])
        pte = build_path_tree_embedding(G, 0, 1)
        a = pte.f[0][0]
        b = pte.f[2][0]
        with pytest.raises(Unreachable):
            induced_path(pte, a, b)

    def test_copy_range_validated(self):
        pte = build_path_tree_embedding(WeightedGraph(2, [(0, 1, 1.0)]), 0, 1)
        with pytest.raises(ValueError):
            induced_path(pte, 0, pte.T.n_nodes())


class TestRespectingImage:
    def test_path_subgraphs(self):
        rng = random.Random(131)
        for _ in range(8):
            n = rng.randint(3, 8)
            G = connected_random_graph(rng, n, 0.35, 1.0, 4.0)
            h = rng.randint(1, 2)
            pte = build_path_tree_embedding(G, 0, h)
            u, v = rng.sample(range(n), 2)
            got = bounded_hop_path(G, u, v, h)
            if got is None:
                continue
            path, _ = got
            H = list(zip(path, path[1:]))
            if not H:
                continue
            assert is_h_respecting(G, H, h)
            img = image_of_respecting_subgraph(pte, H)
            # the image is a tree containing a copy of every H vertex
            assert len(img.edges) == len(img.nodes) - 1
            for x in set(path):
                assert img.has_copy_of(x, pte.T.payload)
                assert pte.T.payload[img.witness[x]] == x
            wH = sum(G.edge_weight(a, b) for a, b in H)
            assert img.weight <= pte.path_bound * 2.0 * wH * (1 + 1e-9)
            # connectivity of the image subtree
            adj = {x: set() for x in img.nodes}
            for a, b in img.edges:
                adj[a].add(b)
                adj[b].add(a)
            seen = {next(iter(img.nodes))}
            stack = list(seen)
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            assert seen == set(img.nodes)

    def test_rejects_bad_subgraphs(self):
        G = WeightedGraph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
        pte = build_path_tree_embedding(G, 0, 2)
        with pytest.raises(ValueError):
            image_of_respecting_subgraph(pte, [])
        with pytest.raises(ValueError):
            # 3 hops in a single path exceed h = 2
            image_of_respecting_subgraph(pte, [(0, 1), (1, 2), (2, 3)])


class TestGeneralImage:
    def test_low_hop_pairs_co_componented(self):
        rng = random.Random(141)
        for _ in range(4):
            n = rng.randint(4, 8)
            G = connected_random_graph(rng, n, 0.4, 1.0, 3.0)
            h = rng.randint(1, 2)
            edges = [(u, v) for u, v, _ in G.edges]
            H = rng.sample(edges, max(1, len(edges) // 2))
            pte, gi = image_of_general_subgraph(G, H, h, seed=rng.randrange(100))
            H1 = WeightedGraph(n, [(min(u, v), max(u, v), 1.0)
                                   for u, v in set(map(lambda e: (min(e), max(e)), H))])
            for u in range(n):
                dh = hop_distance_all(H1, u, h)
                for v in range(u + 1, n):
                    if not is_inf(dh[v]):
                        assert gi.co_component(pte.T.payload, u, v)

    def test_empty_subgraph(self):
        G = WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
        pte, gi = image_of_general_subgraph(G, [], 1)
        assert gi.images == () and not gi.edges

    def test_rejects_non_edges(self):
        G = WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
        with pytest.raises(ValueError):
            image_of_general_subgraph(G, [(0, 2)], 1)
