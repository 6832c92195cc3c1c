"""Derived cause and path relations over a causal graph.

Two independent routes to conditional independence live here and are
deliberately kept separate:

* a fixpoint engine that closes the graph's immediate-cause edges under
  six derivation rules (Reflexive cause, Transitive cause, Chain, Fork,
  Collider, Transitivity*), producing mediate-cause facts and path facts
  whose blocking status decides independence, and
* a textbook d-separation oracle that enumerates simple undirected paths
  directly and never looks at derived facts.

Cross-checking the two is part of the test contract; nothing in this
module shares state between them.

Every path fact is certified by a concrete simple undirected path.
Transitivity* is applied only to certified paths that overlap in exactly
two nodes, which keeps each interior node classified by exactly one
premise and therefore keeps one collider-descendant set per collider.
The engine tracks (fact, certifying path) pairs so that a fact reachable
along several paths can keep feeding compositions through each of them.
"""

from __future__ import annotations

import os
from collections import defaultdict, deque
from dataclasses import dataclass
from itertools import combinations

from .errors import InputError, ResourceLimit, UnknownVariable
from .graph import CausalGraph

__all__ = [
    "DEFAULT_FACT_BUDGET",
    "FACT_BUDGET_ENV_VAR",
    "MediateCauseFact",
    "PathFact",
    "TraceRecord",
    "BlockReason",
    "Closure",
    "close",
    "is_fact_blocked",
    "blocking_reason",
    "independent_by_rules",
    "dsep_oracle",
    "enumerate_classified_paths",
    "path_is_active",
    "closure_dump",
    "saturation_gap",
    "render_mediate",
    "render_path_fact",
    "render_edge",
]

DEFAULT_FACT_BUDGET = 10**6
FACT_BUDGET_ENV_VAR = "FAIRGATE_FACT_BUDGET"


def resolve_fact_budget(explicit: int | None) -> int:
    """Explicit argument wins, then the environment variable, then the default."""
    if explicit is not None:
        return explicit
    raw = os.environ.get(FACT_BUDGET_ENV_VAR)
    if raw is None:
        return DEFAULT_FACT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{FACT_BUDGET_ENV_VAR} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise InputError(f"{FACT_BUDGET_ENV_VAR} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class MediateCauseFact:
    """``source`` causes ``target`` through the given intermediate nodes.

    The intermediates are the nodes of one directed path from source to
    target, both ends included; a reflexive fact has intermediates equal
    to ``{source}``.
    """

    source: str
    target: str
    intermediates: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "intermediates", frozenset(self.intermediates))
        if self.source == self.target:
            if self.intermediates != frozenset([self.source]):
                raise ValueError("reflexive facts carry exactly their own node")
        elif self.target not in self.intermediates:
            raise ValueError("intermediates must contain the target")


@dataclass(frozen=True)
class PathFact:
    """A potential dependence channel between two distinct variables.

    ``noncolliders`` holds the interior path nodes that transmit unless
    conditioned on.  ``collider_sets`` holds one set per collider on the
    path: the collider plus the nodes of one directed chain to a chosen
    descendant; the path transmits through the collider only when the
    chosen set meets the conditioning set.  Endpoints never appear in
    either field.
    """

    left: str
    right: str
    noncolliders: frozenset[str]
    collider_sets: frozenset[frozenset[str]]

    def __post_init__(self):
        object.__setattr__(self, "noncolliders", frozenset(self.noncolliders))
        object.__setattr__(
            self, "collider_sets", frozenset(frozenset(s) for s in self.collider_sets)
        )
        if self.left == self.right:
            raise ValueError("path facts relate two distinct variables")
        ends = {self.left, self.right}
        if self.noncolliders & ends:
            raise ValueError("endpoints cannot be noncolliders of their own fact")
        for group in self.collider_sets:
            if not group:
                raise ValueError("collider sets are non-empty")
            if group & ends:
                raise ValueError("endpoints cannot appear in a collider set")


@dataclass(frozen=True)
class TraceRecord:
    """One productive rule firing: premises and conclusion in display form."""

    rule: str
    premises: tuple[str, ...]
    conclusion: str


@dataclass(frozen=True)
class BlockReason:
    """Why a fact is blocked: a conditioned noncollider or an unmet collider set."""

    kind: str  # "noncollider" or "collider-set"
    nodes: frozenset[str]


def render_edge(source: str, target: str) -> str:
    return f"{source} -> {target}"


def _render_set(nodes) -> str:
    return "{" + ",".join(sorted(nodes)) + "}"


def _render_family(sets) -> str:
    return "{" + ",".join(_render_set(s) for s in sorted(sets, key=lambda s: tuple(sorted(s)))) + "}"


def render_mediate(fact: MediateCauseFact) -> str:
    return f"{fact.source} |>^{_render_set(fact.intermediates)} {fact.target}"


def render_path_fact(fact: PathFact) -> str:
    return (
        f"{fact.left} <>^{_render_set(fact.noncolliders)}"
        f"_{_render_family(fact.collider_sets)} {fact.right}"
    )


def _mediate_sort_key(fact: MediateCauseFact):
    return (fact.source, fact.target, tuple(sorted(fact.intermediates)))


def _fact_sort_key(fact: PathFact):
    return (
        fact.left,
        fact.right,
        tuple(sorted(fact.noncolliders)),
        tuple(sorted(tuple(sorted(s)) for s in fact.collider_sets)),
    )


class Closure:
    """The fixpoint of the six derivation rules over one graph."""

    __slots__ = ("mediate", "paths", "trace", "_certifying", "_derivations", "_by_pair")

    def __init__(self, mediate, certifying, derivations, trace):
        self.mediate: frozenset[MediateCauseFact] = frozenset(mediate)
        self.paths: frozenset[PathFact] = frozenset(certifying)
        self.trace: tuple[TraceRecord, ...] = tuple(trace)
        self._certifying: dict[PathFact, tuple[str, ...]] = dict(certifying)
        self._derivations: frozenset[tuple[PathFact, tuple[str, ...]]] = frozenset(derivations)
        by_pair: dict[tuple[str, str], list[PathFact]] = defaultdict(list)
        for fact in self.paths:
            by_pair[(fact.left, fact.right)].append(fact)
        self._by_pair = {
            pair: tuple(sorted(facts, key=_fact_sort_key)) for pair, facts in by_pair.items()
        }

    def certifying_path(self, fact: PathFact) -> tuple[str, ...]:
        """The first simple path that certified the fact, left to right."""
        return self._certifying[fact]

    def facts_between(self, x: str, y: str) -> tuple[PathFact, ...]:
        """All path facts with endpoints {x, y}, in canonical order."""
        key = (x, y) if x <= y else (y, x)
        return self._by_pair.get(key, ())

    def derivations(self) -> frozenset[tuple[PathFact, tuple[str, ...]]]:
        """Every recorded (fact, certifying path) pair."""
        return self._derivations


def _canonical(noncolliders, collider_sets, path):
    if path[0] <= path[-1]:
        left, right, stored = path[0], path[-1], tuple(path)
    else:
        left, right, stored = path[-1], path[0], tuple(reversed(path))
    fact = PathFact(left, right, frozenset(noncolliders), frozenset(collider_sets))
    return fact, stored


def _iter_window_conclusions(g: CausalGraph, mediate_by_source):
    """Chain, Fork and Collider conclusions for every 3-node window."""
    for y in sorted(g.nodes):
        parent_list = g.parents(y)
        child_list = g.children(y)
        for x in parent_list:
            for z in child_list:
                if x == z:
                    continue
                fact, path = _canonical({y}, frozenset(), (x, y, z))
                yield fact, path, "Chain", (render_edge(x, y), render_edge(y, z))
        for x, z in combinations(child_list, 2):
            fact, path = _canonical({y}, frozenset(), (x, y, z))
            yield fact, path, "Fork", (render_edge(y, x), render_edge(y, z))
        for x, z in combinations(parent_list, 2):
            for mf in mediate_by_source.get(y, ()):
                chain = mf.intermediates
                if x in chain or z in chain:
                    continue
                fact, path = _canonical(frozenset(), {chain}, (x, y, z))
                yield fact, path, "Collider", (
                    render_edge(x, y),
                    render_edge(z, y),
                    render_mediate(mf),
                )


def _try_glue(fact1: PathFact, p1, fact2: PathFact, p2):
    """Transitivity* on certified views.

    ``p1`` must end with the two nodes that start ``p2``; the junction
    condition requires p1's far endpoint to be interior to fact2 and
    p2's near endpoint interior to fact1.  Conclusions whose collider
    sets would contain the new endpoints are not generated (they are
    unreachable in any query, since conditioning sets exclude the tested
    endpoints).
    """
    if p1[-2:] != p2[:2]:
        return None
    glued = p1 + p2[2:]
    if len(set(glued)) != len(glued):
        return None
    i, j = p1[-1], p2[0]
    if not (i in fact2.noncolliders or any(i in s for s in fact2.collider_sets)):
        return None
    if not (j in fact1.noncolliders or any(j in s for s in fact1.collider_sets)):
        return None
    noncolliders = fact1.noncolliders | fact2.noncolliders
    collider_sets = fact1.collider_sets | fact2.collider_sets
    x, y = glued[0], glued[-1]
    if any(x in s or y in s for s in collider_sets):
        return None
    return noncolliders, collider_sets, glued


def close(g: CausalGraph, *, fact_budget: int | None = None, record_trace: bool = True) -> Closure:
    """Close the graph under all six rules and return the least fixpoint.

    Deterministic: seeds and rule applications run in sorted order, so
    identical graphs yield identical closures, traces included.  Raises
    ResourceLimit once more than ``fact_budget`` facts (counting each
    certifying-path variant) have been derived.
    """
    budget = resolve_fact_budget(fact_budget)
    count = 0
    trace: list[TraceRecord] = []

    def note(rule, premises, conclusion):
        if record_trace:
            trace.append(TraceRecord(rule, tuple(premises), conclusion))

    def spend():
        nonlocal count
        count += 1
        if count > budget:
            raise ResourceLimit(f"fact budget of {budget} exceeded while closing the graph")

    mediate: dict[MediateCauseFact, None] = {}
    by_source: dict[str, list[MediateCauseFact]] = defaultdict(list)
    mqueue: deque[MediateCauseFact] = deque()

    def add_mediate(fact, rule, premises):
        if fact in mediate:
            return
        spend()
        mediate[fact] = None
        by_source[fact.source].append(fact)
        note(rule, premises, render_mediate(fact))
        mqueue.append(fact)

    for x in sorted(g.nodes):
        add_mediate(MediateCauseFact(x, x, frozenset([x])), "Reflexive cause", ())
    while mqueue:
        fact = mqueue.popleft()
        for k in g.children(fact.target):
            add_mediate(
                MediateCauseFact(fact.source, k, fact.intermediates | {k}),
                "Transitive cause",
                (render_mediate(fact), render_edge(fact.target, k)),
            )

    certifying: dict[PathFact, tuple[str, ...]] = {}
    derivations: set[tuple[PathFact, tuple[str, ...]]] = set()
    by_first2: dict[tuple[str, str], list[tuple[PathFact, tuple[str, ...]]]] = defaultdict(list)
    by_last2: dict[tuple[str, str], list[tuple[PathFact, tuple[str, ...]]]] = defaultdict(list)
    pqueue: deque[tuple[PathFact, tuple[str, ...]]] = deque()

    def add_path_fact(fact, path, rule, premises):
        key = (fact, path)
        if key in derivations:
            return
        spend()
        derivations.add(key)
        if fact not in certifying:
            certifying[fact] = path
            note(rule, premises, render_path_fact(fact))
        for view in (path, path[::-1]):
            by_first2[view[:2]].append((fact, view))
            by_last2[view[-2:]].append((fact, view))
        pqueue.append(key)

    for fact, path, rule, premises in _iter_window_conclusions(g, by_source):
        add_path_fact(fact, path, rule, premises)

    while pqueue:
        fact, path = pqueue.popleft()
        for view in (path, path[::-1]):
            for other, oview in list(by_first2.get(view[-2:], ())):
                glued = _try_glue(fact, view, other, oview)
                if glued is not None:
                    new_fact, stored = _canonical(*glued)
                    add_path_fact(
                        new_fact, stored, "Transitivity*",
                        (render_path_fact(fact), render_path_fact(other)),
                    )
            for other, oview in list(by_last2.get(view[:2], ())):
                glued = _try_glue(other, oview, fact, view)
                if glued is not None:
                    new_fact, stored = _canonical(*glued)
                    add_path_fact(
                        new_fact, stored, "Transitivity*",
                        (render_path_fact(other), render_path_fact(fact)),
                    )

    return Closure(mediate, certifying, derivations, trace)


def is_fact_blocked(fact: PathFact, conditioning) -> bool:
    """Blocked iff a noncollider is conditioned on, or some collider set is unmet."""
    cond = frozenset(conditioning)
    if fact.noncolliders & cond:
        return True
    return any(not (s & cond) for s in fact.collider_sets)


def blocking_reason(fact: PathFact, conditioning) -> BlockReason | None:
    """The deterministic reason a fact is blocked, or None when it transmits."""
    cond = frozenset(conditioning)
    hit = fact.noncolliders & cond
    if hit:
        return BlockReason("noncollider", frozenset(hit))
    unmet = sorted(
        (s for s in fact.collider_sets if not (s & cond)),
        key=lambda s: tuple(sorted(s)),
    )
    if unmet:
        return BlockReason("collider-set", unmet[0])
    return None


def independent_by_rules(closure: Closure, g: CausalGraph, x: str, y: str, conditioning) -> bool:
    """Rule-based independence: no edge either way and every path fact blocked.

    ``conditioning`` must not contain x or y.
    """
    cond = frozenset(conditioning)
    if (x, y) in g.edges or (y, x) in g.edges:
        return False
    return all(is_fact_blocked(fact, cond) for fact in closure.facts_between(x, y))


# --- Independent textbook oracle -----------------------------------------


def enumerate_classified_paths(g: CausalGraph, x: str, y: str):
    """Every simple undirected path x..y with its interior classification.

    Returns tuples (path, noncolliders, colliders) in a deterministic
    order.  A direct edge contributes a path with no interior nodes.
    """
    if x not in g.nodes or y not in g.nodes:
        raise UnknownVariable(f"both path endpoints must be graph nodes: {x!r}, {y!r}")
    if x == y:
        raise ValueError("path endpoints must differ")
    results = []
    path = [x]
    seen = {x}

    def classify(nodes):
        noncolliders = []
        colliders = []
        for prev, node, nxt in zip(nodes, nodes[1:], nodes[2:]):
            if (prev, node) in g.edges and (nxt, node) in g.edges:
                colliders.append(node)
            else:
                noncolliders.append(node)
        return frozenset(noncolliders), tuple(colliders)

    def walk(node):
        if node == y:
            nodes = tuple(path)
            noncolliders, colliders = classify(nodes)
            results.append((nodes, noncolliders, colliders))
            return
        for nxt in g.undirected_neighbors(node):
            if nxt in seen:
                continue
            seen.add(nxt)
            path.append(nxt)
            walk(nxt)
            path.pop()
            seen.remove(nxt)

    walk(x)
    return tuple(results)


def path_is_active(g: CausalGraph, noncolliders, colliders, conditioning) -> bool:
    """Textbook activity: noncolliders unconditioned, every collider woken."""
    cond = frozenset(conditioning)
    if noncolliders & cond:
        return False
    for collider in colliders:
        if collider not in cond and not (g.descendants(collider) & cond):
            return False
    return True


def dsep_oracle(g: CausalGraph, x: str, y: str, conditioning) -> bool:
    """d-separation by exhaustive simple-path enumeration.

    True iff every simple undirected path between x and y is blocked by
    the conditioning set.  This route never consults derived facts.
    """
    cond = frozenset(conditioning)
    for _, noncolliders, colliders in enumerate_classified_paths(g, x, y):
        if path_is_active(g, noncolliders, colliders, cond):
            return False
    return True


# --- Reporting and saturation --------------------------------------------


def closure_dump(closure: Closure) -> dict:
    """JSON-ready closure listing with a deterministic order throughout."""
    mediate = [
        {
            "source": f.source,
            "target": f.target,
            "intermediates": sorted(f.intermediates),
        }
        for f in sorted(closure.mediate, key=_mediate_sort_key)
    ]
    paths = [
        {
            "left": f.left,
            "right": f.right,
            "noncolliders": sorted(f.noncolliders),
            "colliderSets": sorted(
                (sorted(s) for s in f.collider_sets), key=lambda s: tuple(s)
            ),
            "certifyingPath": list(closure.certifying_path(f)),
        }
        for f in sorted(closure.paths, key=_fact_sort_key)
    ]
    trace = [
        {"rule": r.rule, "premises": list(r.premises), "conclusion": r.conclusion}
        for r in closure.trace
    ]
    return {"mediate": mediate, "paths": paths, "trace": trace}


def saturation_gap(closure: Closure, g: CausalGraph) -> int:
    """How many new facts one more pass of every rule would add (0 when closed)."""
    mediate = set(closure.mediate)
    missing_mediate: set[MediateCauseFact] = set()
    for x in g.nodes:
        fact = MediateCauseFact(x, x, frozenset([x]))
        if fact not in mediate:
            missing_mediate.add(fact)
    for fact in mediate:
        for k in g.children(fact.target):
            new = MediateCauseFact(fact.source, k, fact.intermediates | {k})
            if new not in mediate:
                missing_mediate.add(new)

    by_source: dict[str, list[MediateCauseFact]] = defaultdict(list)
    for fact in sorted(mediate, key=_mediate_sort_key):
        by_source[fact.source].append(fact)

    have = set(closure.paths)
    missing_paths: set[PathFact] = set()
    for fact, _path, _rule, _premises in _iter_window_conclusions(g, by_source):
        if fact not in have:
            missing_paths.add(fact)

    views = []
    for fact, path in closure.derivations():
        views.append((fact, path))
        views.append((fact, path[::-1]))
    for fact1, p1 in views:
        for fact2, p2 in views:
            glued = _try_glue(fact1, p1, fact2, p2)
            if glued is not None:
                new_fact, _ = _canonical(*glued)
                if new_fact not in have:
                    missing_paths.add(new_fact)

    return len(missing_mediate) + len(missing_paths)
