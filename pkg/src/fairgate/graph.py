"""Causal graphs: validated DAGs over named variables.

A graph is immutable once built.  Construction validates names, rejects
self-loops, duplicate edges and cycles (with a witness walk), and
precomputes the adjacency maps every other module queries.
"""

from __future__ import annotations

from .errors import (
    CycleDetected,
    DuplicateEdge,
    InputError,
    MalformedName,
    SelfLoop,
    UnknownVariable,
)

__all__ = [
    "RESERVED_NAME_CHARS",
    "validate_name",
    "CausalGraph",
    "build_graph",
    "parse_graph",
    "load_graph",
]

# Characters that would collide with the file and DSL syntax.
RESERVED_NAME_CHARS = frozenset("->:,=@#")


def validate_name(name: str) -> str:
    """Return ``name`` if it is a legal variable name, else raise MalformedName."""
    if not isinstance(name, str) or not name:
        raise MalformedName("variable names must be non-empty strings")
    bad = {c for c in name if c in RESERVED_NAME_CHARS or c.isspace()}
    if bad:
        shown = "".join(sorted(bad))
        raise MalformedName(f"variable name {name!r} contains reserved characters: {shown!r}")
    return name


class CausalGraph:
    """A directed acyclic graph of variables.

    ``nodes`` and ``edges`` are frozensets; all query methods are pure, so
    instances can be shared freely (including across threads).
    """

    __slots__ = ("nodes", "edges", "_parents", "_children", "_descendants")

    def __init__(self, nodes=(), edges=()):
        node_set = set()
        for name in nodes:
            node_set.add(validate_name(name))
        edge_list = []
        seen = set()
        for edge in edges:
            source, target = edge
            validate_name(source)
            validate_name(target)
            if source == target:
                raise SelfLoop(f"self-loop on {source!r}")
            pair = (source, target)
            if pair in seen:
                raise DuplicateEdge(f"edge {source} -> {target} given twice")
            seen.add(pair)
            edge_list.append(pair)
            node_set.add(source)
            node_set.add(target)

        self.nodes: frozenset[str] = frozenset(node_set)
        self.edges: frozenset[tuple[str, str]] = frozenset(edge_list)

        parents: dict[str, list[str]] = {v: [] for v in node_set}
        children: dict[str, list[str]] = {v: [] for v in node_set}
        for source, target in edge_list:
            children[source].append(target)
            parents[target].append(source)
        self._parents = {v: tuple(sorted(ps)) for v, ps in parents.items()}
        self._children = {v: tuple(sorted(cs)) for v, cs in children.items()}
        self._descendants: dict[str, frozenset[str]] = {}

        cycle = self._find_cycle()
        if cycle is not None:
            raise CycleDetected(cycle)

    def _find_cycle(self) -> list[str] | None:
        # Iterative colored DFS; returns a closed walk [a, ..., a] if one exists.
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {v: WHITE for v in self.nodes}
        for root in sorted(self.nodes):
            if color[root] != WHITE:
                continue
            stack: list[tuple[str, int]] = [(root, 0)]
            path = [root]
            color[root] = GRAY
            while stack:
                node, i = stack[-1]
                kids = self._children[node]
                if i < len(kids):
                    stack[-1] = (node, i + 1)
                    child = kids[i]
                    if color[child] == GRAY:
                        start = path.index(child)
                        return path[start:] + [child]
                    if color[child] == WHITE:
                        color[child] = GRAY
                        stack.append((child, 0))
                        path.append(child)
                else:
                    color[node] = BLACK
                    stack.pop()
                    path.pop()
        return None

    def _require_node(self, name: str) -> None:
        if name not in self.nodes:
            raise UnknownVariable(f"variable {name!r} is not a node of the graph")

    def has_node(self, name: str) -> bool:
        return name in self.nodes

    def parents(self, v: str) -> tuple[str, ...]:
        self._require_node(v)
        return self._parents[v]

    def children(self, v: str) -> tuple[str, ...]:
        self._require_node(v)
        return self._children[v]

    def undirected_neighbors(self, v: str) -> tuple[str, ...]:
        self._require_node(v)
        return tuple(sorted(set(self._parents[v]) | set(self._children[v])))

    def is_immediate_cause(self, x: str, y: str) -> bool:
        """True iff the edge x -> y exists."""
        self._require_node(x)
        self._require_node(y)
        return (x, y) in self.edges

    def descendants(self, x: str) -> frozenset[str]:
        """All nodes reachable from ``x`` by directed edges, excluding ``x``."""
        self._require_node(x)
        cached = self._descendants.get(x)
        if cached is not None:
            return cached
        seen: set[str] = set()
        frontier = list(self._children[x])
        while frontier:
            node = frontier.pop()
            if node in seen:
                continue
            seen.add(node)
            frontier.extend(self._children[node])
        result = frozenset(seen)
        self._descendants[x] = result
        return result

    def topological_order(self) -> tuple[str, ...]:
        """A topological order of the nodes (ties broken by name)."""
        indegree = {v: len(self._parents[v]) for v in self.nodes}
        ready = sorted(v for v, d in indegree.items() if d == 0)
        order: list[str] = []
        while ready:
            node = ready.pop(0)
            order.append(node)
            changed = False
            for child in self._children[node]:
                indegree[child] -= 1
                if indegree[child] == 0:
                    ready.append(child)
                    changed = True
            if changed:
                ready.sort()
        return tuple(order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CausalGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.nodes, self.edges))

    def __repr__(self) -> str:
        return f"CausalGraph(nodes={sorted(self.nodes)}, edges={sorted(self.edges)})"


def build_graph(nodes, edges) -> CausalGraph:
    """Validate and build a graph from node names and (source, target) pairs."""
    return CausalGraph(nodes, edges)


def parse_graph(text: str) -> CausalGraph:
    """Parse the plain-text graph format.

    One item per line: ``A -> B`` declares an edge, ``node X`` declares an
    isolated node, ``#`` starts a comment, blank lines are ignored.
    """
    nodes: list[str] = []
    edges: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("node "):
            name = line[len("node "):].strip()
            try:
                validate_name(name)
            except MalformedName as exc:
                raise MalformedName(f"line {lineno}: {exc}") from None
            nodes.append(name)
            continue
        if "->" not in line:
            raise InputError(
                f"line {lineno}: expected 'A -> B', 'node X', comment or blank, got {line!r}"
            )
        left, _, right = line.partition("->")
        source, target = left.strip(), right.strip()
        try:
            validate_name(source)
            validate_name(target)
        except MalformedName as exc:
            raise MalformedName(f"line {lineno}: {exc}") from None
        edges.append((source, target))
    return build_graph(nodes, edges)


def load_graph(path) -> CausalGraph:
    """Read a graph file (see :func:`parse_graph` for the format)."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_graph(handle.read())
