"""Directed graph (X, E) underlying a Markov chain, with canonical edge indexing.

All vectorized quantities in the library are laid out in the canonical edge
order: lexicographic by (source, target). The graph is validated strongly
connected at construction and is immutable afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateEdge,
    NotStronglyConnected,
    OutOfRangeState,
    ParseError,
    TooFewStates,
)

__all__ = [
    "ChainGraph",
    "build_graph",
    "strongly_connected",
    "parse_chain_file",
    "format_chain_file",
]


@dataclass(frozen=True)
class ChainGraph:
    """The directed graph (X, E) with |X| = num_states, edges in canonical order."""

    num_states: int
    edges: tuple[tuple[int, int], ...]
    edge_index: dict[tuple[int, int], int] = field(compare=False, repr=False)
    out_edges: tuple[tuple[int, ...], ...] = field(compare=False, repr=False)
    in_edges: tuple[tuple[int, ...], ...] = field(compare=False, repr=False)
    # per-edge source/target state arrays, for vectorized gathers
    sources: np.ndarray = field(compare=False, repr=False)
    targets: np.ndarray = field(compare=False, repr=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def __eq__(self, other):
        if not isinstance(other, ChainGraph):
            return NotImplemented
        return self.num_states == other.num_states and self.edges == other.edges

    def __hash__(self):
        return hash((self.num_states, self.edges))


def _check_edges(num_states, edges):
    seen = set()
    for x, y in edges:
        if not (0 <= x < num_states and 0 <= y < num_states):
            raise OutOfRangeState(f"edge ({x}, {y}) outside state range [0, {num_states})")
        if (x, y) in seen:
            raise DuplicateEdge(f"edge ({x}, {y}) listed twice")
        seen.add((x, y))


def _tarjan_scc_count(num_states, adjacency):
    """Number of strongly connected components (iterative Tarjan)."""
    index = [-1] * num_states
    lowlink = [0] * num_states
    on_stack = [False] * num_states
    stack = []
    counter = 0
    n_components = 0

    for root in range(num_states):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, child_pos = work.pop()
            if child_pos == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for pos in range(child_pos, len(adjacency[v])):
                u = adjacency[v][pos]
                if index[u] == -1:
                    work.append((v, pos + 1))
                    work.append((u, 0))
                    advanced = True
                    break
                if on_stack[u]:
                    lowlink[v] = min(lowlink[v], index[u])
            if advanced:
                continue
            if lowlink[v] == index[v]:
                n_components += 1
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    if u == v:
                        break
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
    return n_components


def strongly_connected(num_states: int, edges) -> bool:
    """True iff every ordered pair of states is joined by a directed path."""
    for x, y in edges:
        if not (0 <= x < num_states and 0 <= y < num_states):
            raise OutOfRangeState(f"edge ({x}, {y}) outside state range [0, {num_states})")
    adjacency = [[] for _ in range(num_states)]
    for x, y in set((x, y) for x, y in edges):
        adjacency[x].append(y)
    return _tarjan_scc_count(num_states, adjacency) == 1


def _connectivity_witness(num_states, edges):
    """A pair (x, y) with no directed path x -> y, found by BFS from each state."""
    adjacency = [[] for _ in range(num_states)]
    for x, y in edges:
        adjacency[x].append(y)
    for start in range(num_states):
        reached = [False] * num_states
        reached[start] = True
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for u in adjacency[v]:
                if not reached[u]:
                    reached[u] = True
                    frontier.append(u)
        for target in range(num_states):
            if not reached[target]:
                return (start, target)
    return None


def build_graph(num_states: int, edges) -> ChainGraph:
    """Validate and build a ChainGraph with canonical (lexicographic) edge order."""
    if num_states < 2:
        raise TooFewStates(f"need at least 2 states, got {num_states}")
    edges = [(int(x), int(y)) for x, y in edges]
    _check_edges(num_states, edges)
    if not strongly_connected(num_states, edges):
        raise NotStronglyConnected(_connectivity_witness(num_states, edges))

    ordered = tuple(sorted(edges))
    edge_index = {edge: k for k, edge in enumerate(ordered)}
    out_lists = [[] for _ in range(num_states)]
    in_lists = [[] for _ in range(num_states)]
    for k, (x, y) in enumerate(ordered):
        out_lists[x].append(k)
        in_lists[y].append(k)
    sources = np.array([x for x, _ in ordered], dtype=np.intp)
    targets = np.array([y for _, y in ordered], dtype=np.intp)
    return ChainGraph(
        num_states=num_states,
        edges=ordered,
        edge_index=edge_index,
        out_edges=tuple(tuple(v) for v in out_lists),
        in_edges=tuple(tuple(v) for v in in_lists),
        sources=sources,
        targets=targets,
    )


def parse_chain_file(text: str):
    """Parse the chain file format.

    Format (UTF-8, line oriented, '#' starts a comment):
        states N
        mode edge|expectation        (optional; default edge)
        edge X Y [VALUE]

    Returns (graph, values, mode) where values is an ndarray in canonical edge
    order, or None if no edge carried a VALUE. Mixing valued and bare edges is
    an error.
    """
    num_states = None
    mode = "edge"
    raw_edges = []
    raw_values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if num_states is None:
            if parts[0] != "states" or len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'states N', got {line!r}")
            try:
                num_states = int(parts[1])
            except ValueError:
                raise ParseError(f"line {lineno}: bad state count {parts[1]!r}") from None
            continue
        if parts[0] == "mode":
            if len(parts) != 2 or parts[1] not in ("edge", "expectation"):
                raise ParseError(f"line {lineno}: expected 'mode edge|expectation'")
            mode = parts[1]
            continue
        if parts[0] != "edge" or len(parts) not in (3, 4):
            raise ParseError(f"line {lineno}: expected 'edge X Y [VALUE]', got {line!r}")
        try:
            x, y = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"line {lineno}: bad edge endpoints {line!r}") from None
        value = None
        if len(parts) == 4:
            try:
                value = float(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: bad value {parts[3]!r}") from None
        raw_edges.append((x, y))
        raw_values.append(value)
    if num_states is None:
        raise ParseError("missing 'states N' line")
    if not raw_edges:
        raise ParseError("no edges")

    has_values = [v is not None for v in raw_values]
    if any(has_values) and not all(has_values):
        raise ParseError("either all edges or none must carry a value")

    graph = build_graph(num_states, raw_edges)
    values = None
    if all(has_values):
        values = np.empty(graph.num_edges)
        for (x, y), v in zip(raw_edges, raw_values):
            values[graph.edge_index[(x, y)]] = v
    return graph, values, mode


def format_chain_file(graph: ChainGraph, values=None, mode: str = "edge") -> str:
    """Render a graph (optionally with edge values) in the chain file format."""
    lines = [f"states {graph.num_states}"]
    if mode != "edge":
        lines.append(f"mode {mode}")
    for k, (x, y) in enumerate(graph.edges):
        if values is None:
            lines.append(f"edge {x} {y}")
        else:
            lines.append(f"edge {x} {y} {values[k]:.17g}")
    return "\n".join(lines) + "\n"
