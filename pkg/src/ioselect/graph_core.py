"""State and system digraphs, SCCs, coverage tables, reachability conditions.

The state digraph D(A) has an edge x_j -> x_i exactly when A_ij is starred.
The system digraph adds input edges u_j -> x_i (from B), output edges
x_j -> y_i (from C) and feedback edges y_j -> u_i (from K).

Vertices are encoded as integers: states 0..n-1, inputs n..n+m-1, outputs
n+m..n+m+p-1.  ``vertex_name`` renders the 1-based labels x1/u1/y1 used in
messages and debug dumps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ioselect.system_model import (
    Selection,
    StructuredSystem,
    restrict,
)

EDGE_X = "EX"
EDGE_U = "EU"
EDGE_Y = "EY"
EDGE_K = "EK"


def vertex_name(v: int, n: int, m: int) -> str:
    if v < n:
        return f"x{v + 1}"
    if v < n + m:
        return f"u{v - n + 1}"
    return f"y{v - n - m + 1}"


@dataclass(frozen=True)
class StateDigraph:
    """D(A): one vertex per state, edge (x_j, x_i) iff A_ij is starred."""

    n: int
    edges: frozenset[tuple[int, int]]

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for src, dst in self.edges:
            out[src].append(dst)
        return tuple(tuple(sorted(s)) for s in out)


@dataclass(frozen=True)
class SystemDigraph:
    """D(A, B, C, K) with per-class edge sets (global vertex ids)."""

    n: int
    m: int
    p: int
    ex: frozenset[tuple[int, int]]
    eu: frozenset[tuple[int, int]]
    ey: frozenset[tuple[int, int]]
    ek: frozenset[tuple[int, int]]

    @property
    def size(self) -> int:
        return self.n + self.m + self.p

    def all_edges(self) -> list[tuple[int, int, str]]:
        out = [(s, d, EDGE_X) for s, d in self.ex]
        out += [(s, d, EDGE_U) for s, d in self.eu]
        out += [(s, d, EDGE_Y) for s, d in self.ey]
        out += [(s, d, EDGE_K) for s, d in self.ek]
        return out

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.size)]
        for s, d, _cls in self.all_edges():
            out[s].append(d)
        return tuple(tuple(sorted(lst)) for lst in out)

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.size)]
        for s, d, _cls in self.all_edges():
            out[d].append(s)
        return tuple(tuple(sorted(lst)) for lst in out)


def build_graphs(system: StructuredSystem) -> tuple[StateDigraph, SystemDigraph]:
    """Construct D(A) and D(A, B, C, K); a complete K expands to all m*p edges."""
    n, m = system.n, system.m
    ex = frozenset((j, i) for i, j in system.A.stars)
    eu = frozenset((n + j, i) for i, j in system.B.stars)
    ey = frozenset((j, n + m + i) for i, j in system.C.stars)
    ek = frozenset((n + m + j, n + i) for i, j in system.k_stars())
    return (
        StateDigraph(n, ex),
        SystemDigraph(n, m, system.p, ex, eu, ey, ek),
    )


def _tarjan(num_vertices: int, successors) -> list[list[int]]:
    """Iterative Tarjan; components returned in reverse topological order."""
    index = [0] * num_vertices
    low = [0] * num_vertices
    on_stack = [False] * num_vertices
    visited = [False] * num_vertices
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 1

    for root in range(num_vertices):
        if visited[root]:
            continue
        work = [(root, 0)]
        while work:
            v, ei = work[-1]
            if ei == 0:
                visited[v] = True
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            succ = successors[v]
            advanced = False
            while ei < len(succ):
                w = succ[ei]
                ei += 1
                if not visited[w]:
                    work[-1] = (v, ei)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


@dataclass(frozen=True)
class SccDecomposition:
    """SCCs of a state digraph plus the condensation DAG.

    Components are numbered by their minimum contained state, ascending, so
    set-cover universes built from them are deterministic.  An SCC is
    non-top when no condensation edge enters it and non-bottom when none
    leaves; self-loops inside an SCC create no condensation edge, so an
    isolated singleton with a self-loop is both.
    """

    components: tuple[tuple[int, ...], ...]
    component_of: tuple[int, ...]
    dag_edges: frozenset[tuple[int, int]]
    non_top: tuple[int, ...]
    non_bottom: tuple[int, ...]
    isolated: tuple[int, ...]

    @property
    def q(self) -> int:
        return len(self.non_top)

    @property
    def k(self) -> int:
        return len(self.non_bottom)


def decompose_sccs(g: StateDigraph) -> SccDecomposition:
    raw = _tarjan(g.n, g.successors)
    comps = sorted((tuple(sorted(c)) for c in raw), key=lambda c: c[0])
    comp_of = [0] * g.n
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    dag = frozenset(
        (comp_of[s], comp_of[d]) for s, d in g.edges if comp_of[s] != comp_of[d]
    )
    has_in = {d for _s, d in dag}
    has_out = {s for s, _d in dag}
    non_top = tuple(ci for ci in range(len(comps)) if ci not in has_in)
    non_bottom = tuple(ci for ci in range(len(comps)) if ci not in has_out)
    isolated = tuple(
        ci for ci in range(len(comps)) if ci not in has_in and ci not in has_out
    )
    return SccDecomposition(
        components=tuple(comps),
        component_of=tuple(comp_of),
        dag_edges=dag,
        non_top=non_top,
        non_bottom=non_bottom,
        isolated=isolated,
    )


@dataclass(frozen=True)
class CoverageTables:
    """Which non-top SCCs each input covers and which non-bottom SCCs each output covers.

    Entries are positions into ``scc.non_top`` / ``scc.non_bottom`` (0-based),
    i.e. the elements of the set-cover universes derived from the system.
    """

    input_covers: tuple[frozenset[int], ...]
    output_covers: tuple[frozenset[int], ...]

    @property
    def mu(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.input_covers)

    @property
    def eta(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.output_covers)

    @property
    def mu_max(self) -> int:
        return max(self.mu, default=0)

    @property
    def eta_max(self) -> int:
        return max(self.eta, default=0)


def coverage(system: StructuredSystem, scc: SccDecomposition) -> CoverageTables:
    top_pos = {ci: t for t, ci in enumerate(scc.non_top)}
    bot_pos = {ci: t for t, ci in enumerate(scc.non_bottom)}
    in_covers: list[set[int]] = [set() for _ in range(system.m)]
    for r, i in system.B.stars:
        t = top_pos.get(scc.component_of[r]) if 0 <= r < len(scc.component_of) else None
        if t is not None:
            in_covers[i].add(t)
    out_covers: list[set[int]] = [set() for _ in range(system.p)]
    for j, r in system.C.stars:
        t = bot_pos.get(scc.component_of[r]) if 0 <= r < len(scc.component_of) else None
        if t is not None:
            out_covers[j].add(t)
    return CoverageTables(
        input_covers=tuple(frozenset(s) for s in in_covers),
        output_covers=tuple(frozenset(s) for s in out_covers),
    )


def _bfs(start: list[int], successors) -> set[int]:
    seen = set(start)
    frontier = list(start)
    while frontier:
        nxt = []
        for v in frontier:
            for w in successors[v]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def all_accessible(system: StructuredSystem, sel: Selection) -> bool:
    """True iff every state is reachable from a selected input.

    Computed two ways and cross-checked: BFS from the retained input
    vertices in the restricted system digraph, and the condensation
    criterion (every non-top SCC covered by the selection).  Feedback edges
    cannot extend reachability from the full input set, so both agree.
    """
    restricted = restrict(system, sel)
    _sg, dg = build_graphs(restricted)
    n = restricted.n
    sources = list(range(n, n + restricted.m))
    reached = _bfs(sources, dg.successors)
    by_bfs = all(v in reached for v in range(n))

    scc = decompose_sccs(build_graphs(system)[0])
    cov = coverage(system, scc)
    covered: set[int] = set()
    for i in sel.inputs:
        covered |= cov.input_covers[i]
    by_cover = len(covered) == scc.q

    assert by_bfs == by_cover, "reachability and coverage criteria disagree"
    return by_bfs


def all_sensable(system: StructuredSystem, sel: Selection) -> bool:
    """True iff every state reaches a selected output (mirror of accessibility)."""
    restricted = restrict(system, sel)
    _sg, dg = build_graphs(restricted)
    n, m = restricted.n, restricted.m
    sinks = list(range(n + m, n + m + restricted.p))
    reaches_out = _bfs(sinks, dg.predecessors)
    by_bfs = all(v in reaches_out for v in range(n))

    scc = decompose_sccs(build_graphs(system)[0])
    cov = coverage(system, scc)
    covered: set[int] = set()
    for j in sel.outputs:
        covered |= cov.output_covers[j]
    by_cover = len(covered) == scc.k

    assert by_bfs == by_cover, "reachability and coverage criteria disagree"
    return by_bfs


def _system_sccs(dg: SystemDigraph) -> list[list[int]]:
    return _tarjan(dg.size, dg.successors)


def condition_a_holds(system: StructuredSystem, sel: Selection) -> bool:
    """True iff every state lies in an SCC of the restricted system digraph
    that contains at least one feedback edge.

    This is the general test; for a complete K and nonempty selection it is
    equivalent to accessibility plus sensability, which callers may assert
    as a cross-check.
    """
    restricted = restrict(system, sel)
    _sg, dg = build_graphs(restricted)
    comps = _system_sccs(dg)
    comp_of = [0] * dg.size
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    has_k_edge = [False] * len(comps)
    for s, d in dg.ek:
        if comp_of[s] == comp_of[d]:
            has_k_edge[comp_of[s]] = True
    return all(has_k_edge[comp_of[v]] for v in range(restricted.n))


def condition_a_witness(
    system: StructuredSystem, sel: Selection
) -> dict[str, dict[str, object]]:
    """Per-state certificate: the SCC of the restricted system digraph the
    state belongs to and one feedback edge inside it (None when absent).

    Vertex labels refer to original (unrestricted) indices.
    """
    restricted = restrict(system, sel)
    in_keep = sel.sorted_inputs()
    out_keep = sel.sorted_outputs()
    _sg, dg = build_graphs(restricted)
    n, m = restricted.n, restricted.m

    def label(v: int) -> str:
        if v < n:
            return f"x{v + 1}"
        if v < n + m:
            return f"u{in_keep[v - n] + 1}"
        return f"y{out_keep[v - n - m] + 1}"

    comps = _system_sccs(dg)
    comp_of = [0] * dg.size
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    k_edge_of: dict[int, tuple[int, int]] = {}
    for s, d in sorted(dg.ek):
        ci = comp_of[s]
        if comp_of[d] == ci and ci not in k_edge_of:
            k_edge_of[ci] = (s, d)
    witness: dict[str, dict[str, object]] = {}
    for v in range(n):
        ci = comp_of[v]
        edge = k_edge_of.get(ci)
        witness[label(v)] = {
            "scc": [label(w) for w in sorted(comps[ci])],
            "feedback_edge": [label(edge[0]), label(edge[1])] if edge else None,
        }
    return witness


def dump_system_digraph(dg: SystemDigraph) -> str:
    """One edge per line: ``src dst class`` with 1-based x/u/y labels."""
    lines = []
    for s, d, cls in sorted(dg.all_edges()):
        lines.append(f"{vertex_name(s, dg.n, dg.m)} {vertex_name(d, dg.n, dg.m)} {cls}")
    return "\n".join(lines) + ("\n" if lines else "")


def dump_condensation(scc: SccDecomposition) -> str:
    """Condensation DAG, one edge per line: ``sccI sccJ cond``.

    Header comments list the members of each component.
    """
    lines = []
    for ci, comp in enumerate(scc.components):
        members = " ".join(f"x{v + 1}" for v in comp)
        lines.append(f"# scc{ci + 1} = {members}")
    for s, d in sorted(scc.dag_edges):
        lines.append(f"scc{s + 1} scc{d + 1} cond")
    return "\n".join(lines) + ("\n" if lines else "")
