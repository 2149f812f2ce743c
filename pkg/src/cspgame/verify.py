"""Verification suites: exhaustive and randomized sweeps behind the
acceptance criteria, shared by the CLI and the test suite.

Exhaustive enumerations use the graph atlas (all graphs on up to seven
vertices) and the nonisomorphic-tree generator; (start, customer-set)
choices are deduplicated by each graph's automorphism orbits before
solving.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional

import networkx as nx
from networkx.generators.atlas import graph_atlas_g

from .catalog import catalog, gen_random, gen_star
from .model import (
    DRAW,
    Graph,
    Instance,
    Outcome,
    Player,
    outcome_key,
)
from .solver import DEFAULT_BUDGET, BudgetExceeded, oracle_value, solve_value
from .strategies import (
    GreedyStrategy,
    OptimalStrategy,
    RandomStrategy,
    StolenStrategy,
    best_response,
    run_match,
)


@dataclass
class SuiteReport:
    suite: str
    ok: bool = True
    checked: int = 0
    counterexample: Optional[Instance] = None
    details: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    def fail(self, inst: Instance, message: str) -> None:
        self.ok = False
        if self.counterexample is None:
            self.counterexample = inst
        self.details.append(message)


def _atlas_graphs(max_n: int, bipartite: bool) -> list[nx.Graph]:
    out = []
    for g in graph_atlas_g():
        n = g.number_of_nodes()
        if n < 2 or n > max_n:
            continue
        if not nx.is_connected(g):
            continue
        if bipartite and not nx.is_bipartite(g):
            continue
        out.append(nx.convert_node_labels_to_integers(g))
    return out


def _automorphisms(g: nx.Graph) -> list[dict]:
    gm = nx.algorithms.isomorphism.GraphMatcher(g, g)
    return list(gm.isomorphisms_iter())


def _placements(g: nx.Graph, customer_counts: Iterable[int],
                leaf_only: bool = False):
    """Distinct (start, customer-set) choices up to automorphism."""
    n = g.number_of_nodes()
    autos = _automorphisms(g)
    pool = [v for v in range(n) if not leaf_only or g.degree[v] == 1]
    seen = set()
    for count in customer_counts:
        if count > len(pool):
            continue
        for cust in combinations(pool, count):
            cset = set(cust)
            for start in range(n):
                if start in cset:
                    continue
                canon = min((a[start], tuple(sorted(a[c] for c in cust)))
                            for a in autos)
                if canon in seen:
                    continue
                seen.add(canon)
                yield start, cust


def _to_instance(g: nx.Graph, start: int, customers) -> Instance:
    graph = Graph.from_edges(g.number_of_nodes(), list(g.edges()))
    return Instance(graph, frozenset(customers), (start,), (start,))


def bipartite_corpus(max_n: int = 7, random_count: int = 200,
                     random_max_n: int = 12, seed: int = 0) -> list[Instance]:
    """Criterion corpus: every connected undirected bipartite graph up to
    max_n vertices with 2-4 customers and a common start (one instance
    per automorphism orbit), plus seeded random bipartite instances."""
    out = []
    for g in _atlas_graphs(max_n, bipartite=True):
        for start, cust in _placements(g, (2, 3, 4)):
            out.append(_to_instance(g, start, cust))
    rng = random.Random(seed)
    for i in range(random_count):
        n = rng.randint(5, random_max_n)
        c = rng.randint(2, 4)
        out.append(gen_random("bipartite", n, c, seed=rng.randrange(10**9)))
    return out


def suite_bipartite_no_loss(max_n: int = 7, random_count: int = 200,
                            seed: int = 0, budget: int = DEFAULT_BUDGET) -> SuiteReport:
    """On bipartite same-start instances the first player never loses."""
    rep = SuiteReport("bipartite-no-loss")
    t0 = time.monotonic()
    for inst in bipartite_corpus(max_n, random_count, seed=seed):
        v = solve_value(inst, budget)
        rep.checked += 1
        if inst.outcome_key(v) < inst.outcome_key(DRAW):
            rep.fail(inst, f"first player loses {v} on a bipartite same-start instance")
    rep.details.append(f"{rep.checked} instances, first player never loses: {rep.ok}")
    rep.elapsed = time.monotonic() - t0
    return rep


def tree_corpus(max_n: int = 9, random_count: int = 500,
                random_max_n: int = 13, seed: int = 0) -> list[Instance]:
    """Every tree up to max_n vertices with 2-4 leaf-only customers and a
    common start (per automorphism orbit), plus seeded random trees."""
    out = []
    for n in range(3, max_n + 1):
        for t in nx.nonisomorphic_trees(n):
            g = nx.convert_node_labels_to_integers(t)
            for start, cust in _placements(g, (2, 3, 4), leaf_only=True):
                out.append(_to_instance(g, start, cust))
    rng = random.Random(seed)
    for _ in range(random_count):
        n = rng.randint(6, random_max_n)
        c = rng.randint(2, 4)
        out.append(gen_random("tree", n, c, seed=rng.randrange(10**9),
                              customers_on="leaves"))
    return out


def suite_tree_margin(max_n: int = 9, random_count: int = 500, seed: int = 0,
                      budget: int = DEFAULT_BUDGET,
                      collect_draws: bool = False) -> SuiteReport:
    """With leaf-only customers on a tree, the second player never loses
    by more than one customer (first-player value <= Ended(+1))."""
    rep = SuiteReport("tree-margin")
    t0 = time.monotonic()
    bound = outcome_key(Outcome.ended(1))
    draws = 0
    for inst in tree_corpus(max_n, random_count, seed=seed):
        v = solve_value(inst, budget)
        rep.checked += 1
        if inst.outcome_key(v) > bound:
            rep.fail(inst, f"first player wins by more than one: {v}")
        if collect_draws and v.is_draw:
            draws += 1
            if rep.counterexample is None:
                rep.counterexample = inst
    if collect_draws:
        rep.details.append(f"draw-valued tree instances: {draws}")
    rep.details.append(f"{rep.checked} instances, margin bound holds: {rep.ok}")
    rep.elapsed = time.monotonic() - t0
    return rep


def suite_conjecture(max_n: int = 9, random_count: int = 0, seed: int = 0,
                     budget: int = DEFAULT_BUDGET) -> SuiteReport:
    """Explorer, not an assertion: sweep tree instances for any whose
    exact value is Draw (one would refute the someone-can-force-an-ending
    reading). Reports findings; ok stays true either way."""
    rep = SuiteReport("conjecture")
    t0 = time.monotonic()
    draws = 0
    for inst in tree_corpus(max_n, random_count, seed=seed):
        v = solve_value(inst, budget)
        rep.checked += 1
        if v.is_draw:
            draws += 1
            if rep.counterexample is None:
                rep.counterexample = inst
            rep.details.append("draw-valued tree instance found")
    rep.details.append(f"{rep.checked} tree instances, draw-valued: {draws}")
    rep.elapsed = time.monotonic() - t0
    return rep


def _random_star(rng: random.Random) -> Instance:
    rays = []
    ray_count = rng.randint(2, 6)
    for _ in range(ray_count):
        rays.append(rng.randint(1, 4))
    tips = min(6, ray_count)
    cust_rays = rng.sample(range(ray_count), rng.randint(2, tips))
    return gen_star([(length, (length,) if i in cust_rays else ())
                     for i, length in enumerate(rays)])


def suite_star_greedy(count: int = 200, seed: int = 0,
                      budget: int = DEFAULT_BUDGET) -> SuiteReport:
    """On stars with leaf-only customers, greedy is optimal for both
    players: the greedy-vs-greedy margin equals the exact value and a
    best response against greedy cannot beat it from either side."""
    rep = SuiteReport("star-greedy")
    t0 = time.monotonic()
    rng = random.Random(seed)
    for _ in range(count):
        inst = _random_star(rng)
        v = solve_value(inst, budget)
        key = inst.outcome_key
        rec = run_match(inst, GreedyStrategy(), GreedyStrategy())
        rep.checked += 1
        if key(rec.outcome) != key(v):
            rep.fail(inst, f"greedy vs greedy gives {rec.outcome}, value {v}")
            continue
        br_ii = best_response(inst, GreedyStrategy(), Player.I, budget)
        br_i = best_response(inst, GreedyStrategy(), Player.II, budget)
        if key(br_ii) != key(v):
            rep.fail(inst, f"second player improves on greedy: {br_ii} vs {v}")
        if key(br_i) != key(v):
            rep.fail(inst, f"first player improves on greedy: {br_i} vs {v}")
    rep.details.append(f"{rep.checked} stars, greedy exact on all: {rep.ok}")
    rep.elapsed = time.monotonic() - t0
    return rep


def suite_stealing(max_n: int = 7, random_count: int = 200, seed: int = 0,
                   random_seeds: tuple[int, ...] = (11, 22, 33),
                   budget: int = DEFAULT_BUDGET) -> SuiteReport:
    """steal(S) vs S never loses on the bipartite same-start corpus, for
    S greedy, seeded random, and optimal."""
    rep = SuiteReport("stealing")
    t0 = time.monotonic()
    losses = 0
    for inst in bipartite_corpus(max_n, random_count, seed=seed):
        variants = [("greedy", lambda: GreedyStrategy())]
        variants += [(f"random:{s}", lambda s=s: RandomStrategy(s)) for s in random_seeds]
        variants.append(("optimal", lambda: OptimalStrategy(budget)))
        for name, mk in variants:
            rec = run_match(inst, StolenStrategy(mk()), mk())
            rep.checked += 1
            if rec.flags:
                rep.fail(inst, f"stolen({name}) fell back: {rec.flags}")
            if not rec.outcome.is_draw and rec.outcome.margin < 0:
                losses += 1
                rep.fail(inst, f"stolen({name}) lost {rec.outcome}")
    rep.details.append(f"{rep.checked} matches, losses: {losses}")
    rep.elapsed = time.monotonic() - t0
    return rep


def suite_catalog(budget: int = DEFAULT_BUDGET, include_heavy: bool = True) -> SuiteReport:
    """Re-verify every shipped catalog entry's certificate from scratch."""
    rep = SuiteReport("catalog")
    t0 = time.monotonic()
    for entry in catalog():
        if entry.heavy and not include_heavy:
            rep.details.append(f"{entry.name}: skipped (heavy)")
            continue
        cert = entry.verify(budget)
        rep.checked += 1
        if not cert.ok:
            rep.fail(entry.instance, f"{entry.name}: " + "; ".join(cert.details))
        else:
            rep.details.append(f"{entry.name}: certified")
    rep.elapsed = time.monotonic() - t0
    return rep


def suite_reduction_audit() -> SuiteReport:
    """Build the padded (4,3) and (6,5) reductions and audit the counts."""
    from .q3sat import QFormula, pad_formula
    from .reduction import build_reduction, verify_reduction

    rep = SuiteReport("reduction-audit")
    t0 = time.monotonic()
    # the first pads by the evenness postfix to (4,3), the second by the
    # complementary-pair postfix to (6,5)
    cases = [
        QFormula(1, ("e",), ((1, -1, 1),)),
        QFormula(4, ("e", "a", "e", "a"), ((1, 2, 3), (-1, 2, -4), (2, 3, 4))),
    ]
    for f in cases:
        padded = pad_formula(f)
        art = build_reduction(padded)
        audit = verify_reduction(art)
        rep.checked += 1
        label = f"(n={art.n}, m={art.m})"
        if not audit.ok:
            rep.fail(art.pre_subdivision.instance,
                     f"{label} audit failed:\n{audit.format_table()}")
        else:
            delta = next(r for r in audit.rows if r.name == "vertices_total")
            rep.details.append(f"{label} audit passes; vertex delta "
                               f"{delta.actual - delta.expected:+d} (= n^3+2) reported")
    if {(a.n, a.m) for a in
            [build_reduction(pad_formula(c)) for c in cases]} != {(4, 3), (6, 5)}:
        rep.ok = False
        rep.details.append("padded sizes are not (4,3) and (6,5)")
    rep.elapsed = time.monotonic() - t0
    return rep


def suite_oracle_equivalence(random_count: int = 100, seed: int = 0,
                             state_cap: int = 10**5,
                             oracle_budget: int = 4 * 10**6) -> SuiteReport:
    """solve() agrees with the monolithic-attractor oracle on every
    catalog entry and on random instances within the state cap."""
    rep = SuiteReport("oracle-equivalence")
    t0 = time.monotonic()
    for entry in catalog():
        v = solve_value(entry.instance, DEFAULT_BUDGET)
        ov = oracle_value(entry.instance, oracle_budget)
        rep.checked += 1
        if v != ov:
            rep.fail(entry.instance, f"{entry.name}: solve {v} != oracle {ov}")
    rng = random.Random(seed)
    families = ("tree", "star", "bipartite", "general")
    done = 0
    while done < random_count:
        fam = families[done % len(families)]
        n = rng.randint(4, 11)
        c = rng.randint(1, min(5, n - 1))
        inst = gen_random(fam, n, c, seed=rng.randrange(10**9))
        try:
            v = solve_value(inst, state_cap)
        except BudgetExceeded:
            continue
        ov = oracle_value(inst, oracle_budget)
        rep.checked += 1
        done += 1
        if v != ov:
            rep.fail(inst, f"{fam} n={n}: solve {v} != oracle {ov}")
    rep.details.append(f"{rep.checked} instances, full agreement: {rep.ok}")
    rep.elapsed = time.monotonic() - t0
    return rep


SUITES = {
    "bipartite-no-loss": suite_bipartite_no_loss,
    "tree-margin": suite_tree_margin,
    "star-greedy": suite_star_greedy,
    "stealing": suite_stealing,
    "catalog": suite_catalog,
    "reduction-audit": lambda **kw: suite_reduction_audit(),
    "conjecture": suite_conjecture,
    "oracle-equivalence": suite_oracle_equivalence,
}
