"""Submodule detection by reachability on a finite window.

A basis vector u reaches w when some chain of single Witt basis elements
carries u to a vector with a nonzero coefficient on w.  The submodule
generated by u contains every vector u reaches, so a window on which some
node fails to reach another exhibits a candidate proper submodule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from ..foundations import Window, iter_basis, multiindices
from ..modules import Module


@dataclass
class ReachabilityGraph:
    graph: nx.DiGraph
    window_nodes: list
    generators: list

    def witness(self, u, w):
        """A generator g with act(g, u) having a nonzero coefficient on w."""
        return self.graph.edges[u, w]["g"]


@dataclass
class ScanVerdict:
    kind: str  # simple_on_window | trivial_submodule_found | proper_submodule_found
    vector: tuple | None = None
    basis: list = field(default_factory=list)
    nodes: int = 0
    edges: int = 0

    @property
    def simple(self) -> bool:
        return self.kind == "simple_on_window"


def generator_keys(M: Module, gamma_bound: int, level_bound: int) -> list:
    idxs = multiindices(M.sig.n_t, level_bound)
    return [(mu, idx, p) for mu in M.lattice.box(gamma_bound) for idx in idxs for p in M.sig.indices]


def build_graph(M: Module, window: Window) -> ReachabilityGraph:
    if window.margin < 1:
        raise ValueError("reachability needs a margin of at least 1")
    big = window.enlarged()
    nodes = M.window_keys(big.gamma_bound, big.level_bound)
    node_set = set(nodes)
    gens = generator_keys(M, window.gamma_bound, window.level_bound)
    G = nx.DiGraph()
    G.add_nodes_from(nodes)
    for v in nodes:
        for g in gens:
            for w in M.act_basis(g, v):
                if w in node_set and w != v and not G.has_edge(v, w):
                    G.add_edge(v, w, g=g)
    small = [k for k in iter_basis(M.lattice, M.sig.n_t, window.gamma_bound, window.level_bound)
             if k not in M.killed]
    if not small:
        raise ValueError("empty window")
    return ReachabilityGraph(G, small, gens)


def _annihilated(M: Module, v, gens) -> bool:
    return all(not M.act_basis(g, v) for g in gens)


def simplicity_scan(M: Module, window: Window = Window()) -> ScanVerdict:
    R = build_graph(M, window)
    G = R.graph
    comp_of = {}
    sccs = list(nx.strongly_connected_components(G))
    for i, c in enumerate(sccs):
        for v in c:
            comp_of[v] = i
    win = R.window_nodes
    n, m = G.number_of_nodes(), G.number_of_edges()
    if len({comp_of[v] for v in win}) == 1:
        return ScanVerdict("simple_on_window", nodes=n, edges=m)

    C = nx.condensation(G, sccs)
    in_window = set(win)
    best = None
    for ci in sorted({comp_of[v] for v in win}):
        reach = {ci} | nx.descendants(C, ci)
        members = sorted(v for cj in reach for v in sccs[cj] if v in in_window)
        key = (len(members), members)
        if best is None or key < best[0]:
            best = (key, ci, members)
    _, ci, members = best
    if len(members) == 1:
        u = members[0]
        if _annihilated(M, u, R.generators):
            return ScanVerdict("trivial_submodule_found", vector=u, basis=[u], nodes=n, edges=m)
    return ScanVerdict("proper_submodule_found", basis=members, nodes=n, edges=m)


def predicted_simple(M: Module) -> bool:
    """The simplicity criterion for the closed-form modules.

    Nongraded A_{alpha,b}: simple iff alpha is outside the lattice or b != 0.
    Graded A_{alpha,b}: simple iff alpha is outside the lattice or b is
    neither 0 nor 1.
    """
    s = M.spec
    outside = not s.alpha_in_lattice
    if s.family == "GeneralAb":
        return outside or s.b != 0
    if s.family == "GradedAb":
        return outside or s.b not in (0, 1)
    return False


def predicted_structure(M: Module) -> tuple[str, tuple | None]:
    """Expected scan verdict kind, with the trivial vector when there is one.

    The quotient of A_{0,0} by its trivial vector is simple.  In the graded
    families the trivial line sits at weight -alpha (or 0 for B(beta)), and
    A_{0,1} and A(beta) instead contain the proper submodule spanned by
    every basis vector except that one.
    """
    s = M.spec
    if M.killed:
        return "simple_on_window", None
    if predicted_simple(M) and s.family in ("GeneralAb", "GradedAb"):
        return "simple_on_window", None
    n_t = M.sig.n_t
    if s.family in ("GeneralAb", "GradedAb"):
        where = tuple(-c for c in M.lattice.coordinates(s.alpha))
        if s.b == 0:
            return "trivial_submodule_found", (where, (0,) * n_t)
        return "proper_submodule_found", None
    zero = (M.lattice.zero(), ())
    if s.family == "GradedBbeta":
        return "trivial_submodule_found", zero
    return "proper_submodule_found", None
