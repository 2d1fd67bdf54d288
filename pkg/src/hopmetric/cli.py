"""Command-line entry point: graph generators, constructions, and the
invariant-report harness.

Every subcommand builds one structure and then replays the module's
invariants against the exact bounded-hop oracle, emitting a machine-readable
JSON report.  Reports are byte-identical for identical (config, seed).
"""
from __future__ import annotations

import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import click

from . import datastructures as ds
from .clan import clan_embed, optimal_path_copies
from .cover import edge_costs, sparse_cover
from .graph_core import (WeightedGraph, dijkstra, hop_diameter,
                         hop_distance_all, is_inf)
from .preserve import (Unreachable, build_path_tree_embedding,
                       image_of_general_subgraph, induced_path)
from .ramsey import ramsey_embed
from .rng import substream
from .ultrametric import validate_ultrametric

SEED_ENV = "HOPMETRIC_SEED"


def _default_seed() -> int:
    try:
        return int(os.environ.get(SEED_ENV, "0"))
    except ValueError:
        return 0


# -- graph generation ------------------------------------------------------

def gen_graph(family: str, params: Dict[str, float], seed: int = 0) -> WeightedGraph:
    """Deterministic graph families: path, cycle, grid, gnp, random-weighted."""
    rng = substream(seed, f"gen-{family}")
    if family == "path":
        n = int(params["n"])
        return WeightedGraph(n, [(i, i + 1, 1.0) for i in range(n - 1)])
    if family == "cycle":
        n = int(params["n"])
        if n < 3:
            raise ValueError("cycle needs n >= 3")
        return WeightedGraph(n, [(i, (i + 1) % n, 1.0) for i in range(n)])
    if family == "grid":
        rows, cols = int(params["rows"]), int(params["cols"])
        idx = lambda r, c: r * cols + c
        edges = []
        for r in range(rows):
            for c in range(cols):
                if c + 1 < cols:
                    edges.append((idx(r, c), idx(r, c + 1), 1.0))
                if r + 1 < rows:
                    edges.append((idx(r, c), idx(r + 1, c), 1.0))
        return WeightedGraph(rows * cols, edges)
    if family in ("gnp", "random-weighted"):
        n, p = int(params["n"]), float(params["p"])
        wmin = float(params.get("wmin", 1.0))
        wmax = float(params.get("wmax", 1.0))
        edges = []
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p:
                    w = 1.0 if family == "gnp" else rng.uniform(wmin, wmax)
                    edges.append((u, v, w))
        if not edges:
            edges = [(0, min(1, n - 1), 1.0)] if n > 1 else []
        return WeightedGraph(n, edges)
    raise ValueError(f"unknown family {family!r}")


# -- invariant reports -----------------------------------------------------

@dataclass
class ExperimentConfig:
    subcommand: str
    graph: Optional[str] = None          # path to a graph JSON file
    family: Optional[str] = None
    params: Optional[Dict[str, float]] = None
    h: int = 2
    k: int = 2
    epsilon: float = 0.5
    seed: int = 0
    delta: float = 1.0
    root: int = 0
    variant: str = "standard"
    subgraph: Optional[str] = None
    pairs: int = 200


def _fmt(x: float) -> float:
    return float(f"{x:.12g}")


class Report:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.invariants: List[Dict[str, object]] = []
        self.constants: Dict[str, object] = {}

    def check(self, name: str, passed: bool, detail: Optional[str] = None) -> None:
        entry: Dict[str, object] = {"name": name, "passed": bool(passed)}
        if detail is not None:
            entry["counterexample" if not passed else "detail"] = detail
        self.invariants.append(entry)

    def to_json(self) -> str:
        payload = {
            "config": {k: v for k, v in asdict(self.cfg).items() if v is not None},
            "constants": self.constants,
            "invariants": self.invariants,
            "passed": all(e["passed"] for e in self.invariants),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @property
    def passed(self) -> bool:
        return all(e["passed"] for e in self.invariants)


def _load_graph(cfg: ExperimentConfig) -> WeightedGraph:
    if cfg.graph:
        return WeightedGraph.load(cfg.graph)
    if cfg.family:
        return gen_graph(cfg.family, cfg.params or {}, cfg.seed)
    raise click.UsageError("provide --graph or a generator family")


def _sample_pairs(n: int, count: int, seed: int) -> List[Tuple[int, int]]:
    if n < 2:
        return []
    all_pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    if len(all_pairs) <= count:
        return all_pairs
    rng = substream(seed, "pairs")
    return [all_pairs[rng.randrange(len(all_pairs))] for _ in range(count)]


def run_experiment(cfg: ExperimentConfig) -> Report:
    G = _load_graph(cfg)
    rep = Report(cfg)
    fn = _RUNNERS.get(cfg.subcommand)
    if fn is None:
        raise click.UsageError(f"unknown subcommand {cfg.subcommand!r}")
    fn(G, cfg, rep)
    return rep


def _run_check(G: WeightedGraph, cfg: ExperimentConfig, rep: Report) -> None:
    diam = hop_diameter(G, cfg.h)
    rep.constants.update({
        "n": G.n, "m": len(G.edges), "scale": _fmt(G.scale),
        "aspect_ratio": _fmt(G.max_weight()),
        "hop_diameter": "inf" if is_inf(diam) else _fmt(diam),
        "total_weight": _fmt(G.total_weight()),
    })
    rep.check("graph well-formed", True)


def _run_ramsey(G: WeightedGraph, cfg: ExperimentConfig, rep: Report) -> None:
    mu = [1.0] * G.n
    emb = ramsey_embed(G, mu, set(range(G.n)), cfg.h, cfg.k, cfg.variant)
    rep.constants.update({"t": _fmt(emb.t), "beta": emb.beta, "phi": emb.phi,
                          "survivors": len(emb.M), "max_j": emb.max_j})
    rep.check("ultrametric valid", validate_ultrametric(emb.U))
    need = G.n ** (1.0 - 1.0 / cfg.k)
    rep.check("measure survival mu(M) >= mu(M0)^(1-1/k)",
              len(emb.M) >= need - 1e-9, f"{len(emb.M)} vs {need}")
    leaf = emb.leaf_of()
    from .ultrametric import ultra_distance
    bad = 0
    for u in range(G.n):
        dh = hop_distance_all(G, u, cfg.h)
        dB = hop_distance_all(G, u, emb.beta * cfg.h)
        for v in range(G.n):
            if v == u:
                continue
            dU = ultra_distance(emb.U, leaf[u], leaf[v])
            if not is_inf(dB[v]) and not is_inf(dU) and dU < dB[v] * (1 - 1e-9):
                bad += 1
            if (u in emb.M or v in emb.M) and not is_inf(dh[v]):
                if is_inf(dU) or dU > emb.t * dh[v] * (1 + 1e-9):
                    bad += 1
    rep.check("domination and marked-pair distortion", bad == 0, f"{bad} violations")
    jmax = 2 * (cfg.k - 1)
    rep.check("cluster index j <= 2(k-1)", emb.max_j <= jmax,
              f"{emb.max_j} vs {jmax}")


def _run_clan(G: WeightedGraph, cfg: ExperimentConfig, rep: Report) -> None:
    mu = [1.0] * G.n
    emb = clan_embed(G, mu, cfg.h, cfg.k, cfg.variant)
    size = emb.clan_size()
    bound = G.n ** (1.0 + 1.0 / cfg.k)
    rep.constants.update({"t": _fmt(emb.t), "beta": emb.beta,
                          "clan_size": size, "size_bound": _fmt(bound)})
    rep.check("ultrametric valid", validate_ultrametric(emb.U))
    rep.check("weighted clan size <= mu(V)^(1+1/k)", size <= bound + 1e-9,
              f"{size} vs {bound}")
    bad = 0
    for u in range(G.n):
        dh = hop_distance_all(G, u, cfg.h)
        dB = hop_distance_all(G, u, emb.beta * cfg.h)
        for v in range(G.n):
            if v == u:
                continue
            dmin = emb.min_copy_distance(u, v)
            if not is_inf(dB[v]) and not is_inf(dmin) and dmin < dB[v] * (1 - 1e-9):
                bad += 1
            if not is_inf(dh[v]):
                dc = emb.chief_distance(u, v)
                if is_inf(dc) or dc > emb.t * dh[v] * (1 + 1e-9):
                    bad += 1
    rep.check("domination and chief distortion", bad == 0, f"{bad} violations")


def _run_cover(G: WeightedGraph, cfg: ExperimentConfig, rep: Report) -> None:
    sc = sparse_cover(G, cfg.delta, cfg.seed)
    mu = edge_costs(G)
    muG = sum(mu.values()) or 1.0
    rep.constants.update({
        "clusters": len(sc.clusters), "attempts": sc.attempts,
        "cost_ratio": _fmt(sc.cluster_cost(mu) / muG),
        "mean_multiplicity": _fmt(sum(sc.multiplicity(v) for v in range(G.n)) / G.n),
    })
    apsp = [dijkstra(G.adj, u) for u in range(G.n)]
    miss = 0
    for u in range(G.n):
        for v in range(u + 1, G.n):
            d = apsp[u][v]
            if not is_inf(d) and d <= cfg.delta + 1e-12:
                if not any(u in C and v in C for C, _, _ in sc.clusters):
                    miss += 1
    rep.check("cover property for delta-close pairs", miss == 0, f"{miss} misses")
    rmax = math.log2(2 * G.n)
    rep.check("radius <= delta*log(2n)",
              all(r <= rmax for _, _, r in sc.clusters))


def _run_preserve(G: WeightedGraph, cfg: ExperimentConfig, rep: Report) -> None:
    if cfg.subgraph:
        with open(cfg.subgraph, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        H_edges = [(int(u), int(v)) for u, v, *_ in data["edges"]]
        pte, gi = image_of_general_subgraph(G, H_edges, cfg.h, cfg.variant,
                                            cfg.seed, cfg.root)
        H1 = WeightedGraph(G.n, [(u, v, 1.0) for u, v in
                                 {(min(a, b), max(a, b)) for a, b in H_edges}])
        miss = 0
        for u in range(G.n):
            dh = hop_distance_all(H1, u, cfg.h)
            for v in range(u + 1, G.n):
                if not is_inf(dh[v]) and not gi.co_component(pte.T.payload, u, v):
                    miss += 1
        rep.constants.update({"images": len(gi.images),
                              "image_edges": len(gi.edges)})
        rep.check("low-hop pairs co-componented", miss == 0, f"{miss} misses")
        return
    pte = build_path_tree_embedding(G, cfg.root, cfg.h, cfg.variant)
    rep.constants.update({
        "root_copies": len(pte.f[cfg.root]), "hop_bound": pte.hop_bound,
        "edge_hop_budget": pte.edge_hop_budget,
        "path_bound": _fmt(pte.path_bound),
        "copies": sum(len(c) for c in pte.f.values()),
    })
    rep.check("unique root copy", len(pte.f[cfg.root]) == 1)
    copies = [c for v in range(G.n) for c in pte.f[v]]
    rng = substream(cfg.seed, "preserve-pairs")
    sample = [(rng.choice(copies), rng.choice(copies)) for _ in range(cfg.pairs)]
    bad = 0
    for a, b in sample:
        try:
            p, _w = induced_path(pte, a, b)
        except Unreachable:
            continue
        if len(p) - 1 > pte.hop_bound:
            bad += 1
    rep.check("induced paths within hop bound", bad == 0, f"{bad} violations")


def _sandwich_report(G: WeightedGraph, cfg: ExperimentConfig, rep: Report,
                     query, budget: int, stretch: float) -> None:
    bad = 0
    checked = 0
    for u in range(G.n):
        dh = hop_distance_all(G, u, cfg.h)
        dB = hop_distance_all(G, u, budget * cfg.h)
        for v in range(G.n):
            if v == u:
                continue
            q = query(u, v)
            checked += 1
            if not is_inf(q) and not is_inf(dB[v]) and q < dB[v] * (1 - 1e-9):
                bad += 1
            if not is_inf(dh[v]) and (is_inf(q) or q > stretch * dh[v] * (1 + 1e-9)):
                bad += 1
    rep.check("sandwich d^(Bh) <= query <= stretch*d^(h)", bad == 0,
              f"{bad}/{checked} violations")


def _run_oracle(G: WeightedGraph, cfg: ExperimentConfig, rep: Report) -> None:
    O = ds.build_hop_oracle(G, cfg.h, cfg.k, cfg.epsilon, cfg.seed)
    rep.constants.update({"B": O.hop_budget, "stretch": _fmt(O.stretch),
                          "t_coarse": _fmt(O.coarse.t_coarse),
                          "beta_hops": O.coarse.beta_hops,
                          "size_words": O.size_words()})
    _sandwich_report(G, cfg, rep,
                     lambda u, v: ds.hop_oracle_query(O, u, v),
                     O.hop_budget, O.stretch)


def _run_labels(G: WeightedGraph, cfg: ExperimentConfig, rep: Report) -> None:
    L = ds.build_hop_labeling(G, cfg.h, cfg.k, cfg.epsilon)
    rep.constants.update({"B": L.hop_budget, "stretch": _fmt(L.stretch),
                          "size_words": L.size_words()})
    _sandwich_report(G, cfg, rep,
                     lambda u, v: ds.labeling_query(L, L.label(u), L.label(v)),
                     L.hop_budget, L.stretch)


def _run_route(G: WeightedGraph, cfg: ExperimentConfig, rep: Report) -> None:
    S = ds.build_routing_scheme(G, cfg.h, cfg.k, cfg.epsilon, cfg.seed)
    rep.constants.update({"stretch": _fmt(S.stretch),
                          "size_words": S.size_words()})
    undelivered = weight_bad = hops_bad = nonlocal_bad = 0
    routed = 0
    for u, v in _sample_pairs(G.n, cfg.pairs, cfg.seed):
        dh = hop_distance_all(G, u, cfg.h)[v]
        if is_inf(dh):
            continue
        r = ds.route(S, u, v)
        routed += 1
        if not r.delivered:
            undelivered += 1
            continue
        if r.weight > S.stretch * dh * (1 + 1e-9):
            weight_bad += 1
        if len(r.path) - 1 > r.weight_aux / S.omegas[r.scale] * (1 + 1e-9):
            hops_bad += 1
        if not set(r.table_reads) <= set(r.path):
            nonlocal_bad += 1
    rep.constants["routed_pairs"] = routed
    rep.check("delivery for h-hop-connected pairs", undelivered == 0,
              f"{undelivered} undelivered")
    rep.check("delivered weight <= stretch*d^(h)", weight_bad == 0,
              f"{weight_bad} violations")
    rep.check("delivered hops <= w_i(P)/omega_i", hops_bad == 0,
              f"{hops_bad} violations")
    rep.check("forwarding reads only local tables", nonlocal_bad == 0,
              f"{nonlocal_bad} violations")


_RUNNERS = {
    "check": _run_check,
    "ramsey": _run_ramsey,
    "clan": _run_clan,
    "cover": _run_cover,
    "preserve": _run_preserve,
    "oracle": _run_oracle,
    "labels": _run_labels,
    "route": _run_route,
}


# -- click wiring ----------------------------------------------------------

def _emit(rep: Report, output: Optional[str]) -> None:
    text = rep.to_json()
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    if not rep.passed:
        sys.exit(1)


def _common(fn):
    fn = click.option("--graph", type=click.Path(exists=True), default=None,
                      help="Graph JSON file.")(fn)
    fn = click.option("--seed", type=int, default=None,
                      help=f"PRNG seed (default: ${SEED_ENV} or 0).")(fn)
    fn = click.option("-o", "--output", type=click.Path(), default=None)(fn)
    return fn


def _mkcfg(sub: str, graph: Optional[str], seed: Optional[int],
           **kw) -> ExperimentConfig:
    return ExperimentConfig(subcommand=sub, graph=graph,
                            seed=_default_seed() if seed is None else seed, **kw)


@click.group()
def main() -> None:
    """Hop-constrained metric embeddings toolkit."""


@main.command()
@click.option("--family", required=True,
              type=click.Choice(["path", "cycle", "grid", "gnp", "random-weighted"]))
@click.option("--n", type=int, default=8)
@click.option("--rows", type=int, default=4)
@click.option("--cols", type=int, default=4)
@click.option("--p", type=float, default=0.2)
@click.option("--wmin", type=float, default=1.0)
@click.option("--wmax", type=float, default=10.0)
@click.option("--seed", type=int, default=None)
@click.option("-o", "--output", type=click.Path(), default=None)
def gen(family, n, rows, cols, p, wmin, wmax, seed, output):
    """Generate a graph from a deterministic family."""
    seed = _default_seed() if seed is None else seed
    G = gen_graph(family, {"n": n, "rows": rows, "cols": cols, "p": p,
                           "wmin": wmin, "wmax": wmax}, seed)
    text = G.to_json() + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command()
@_common
@click.option("--h", type=int, default=2)
def check(graph, seed, output, h):
    """Report basic graph statistics."""
    _emit(run_experiment(_mkcfg("check", graph, seed, h=h)), output)


@main.command()
@_common
@click.option("--h", type=int, default=2)
@click.option("--k", type=int, default=2)
@click.option("--alt", is_flag=True)
def ramsey(graph, seed, output, h, k, alt):
    """Ramsey-type ultrametric embedding + invariant suite."""
    cfg = _mkcfg("ramsey", graph, seed, h=h, k=k,
                 variant="alt" if alt else "standard")
    _emit(run_experiment(cfg), output)


@main.command()
@_common
@click.option("--h", type=int, default=2)
@click.option("--k", type=int, default=2)
@click.option("--alt", is_flag=True)
def clan(graph, seed, output, h, k, alt):
    """Clan embedding + invariant suite."""
    cfg = _mkcfg("clan", graph, seed, h=h, k=k,
                 variant="alt" if alt else "standard")
    _emit(run_experiment(cfg), output)


@main.command()
@_common
@click.option("--delta", type=float, required=True)
def cover(graph, seed, output, delta):
    """Sparse cover + invariant suite."""
    _emit(run_experiment(_mkcfg("cover", graph, seed, delta=delta)), output)


@main.command()
@_common
@click.option("--h", type=int, default=2)
@click.option("--root", type=int, default=0)
@click.option("--alt", is_flag=True)
@click.option("--subgraph", type=click.Path(exists=True), default=None)
def preserve(graph, seed, output, h, root, alt, subgraph):
    """Path-tree embedding (or general-subgraph image) + invariant suite."""
    cfg = _mkcfg("preserve", graph, seed, h=h, root=root, subgraph=subgraph,
                 variant="alt" if alt else "standard")
    _emit(run_experiment(cfg), output)


def _final_command(name: str):
    @main.command(name=name)
    @_common
    @click.option("--h", type=int, default=2)
    @click.option("--k", type=int, default=2)
    @click.option("--epsilon", type=float, default=0.5)
    @click.option("--pairs", type=int, default=200)
    def _cmd(graph, seed, output, h, k, epsilon, pairs):
        cfg = _mkcfg(name, graph, seed, h=h, k=k, epsilon=epsilon, pairs=pairs)
        _emit(run_experiment(cfg), output)
    _cmd.__doc__ = f"Hop-constrained {name} structure + invariant suite."
    return _cmd


oracle = _final_command("oracle")
labels = _final_command("labels")
route = _final_command("route")


if __name__ == "__main__":
    main()
