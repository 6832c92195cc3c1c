import itertools
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from fairgate import (
    DEFAULT_FACT_BUDGET,
    FACT_BUDGET_ENV_VAR,
    BlockReason,
    InputError,
    MediateCauseFact,
    PathFact,
    ResourceLimit,
    UnknownVariable,
    build_graph,
    blocking_reason,
    close,
    closure_dump,
    dsep_oracle,
    enumerate_classified_paths,
    enumerate_dags,
    independent_by_rules,
    is_fact_blocked,
    random_dag,
    render_path_fact,
    resolve_fact_budget,
    saturation_gap,
)

RULE_NAMES = {
    "Reflexive cause",
    "Transitive cause",
    "Chain",
    "Fork",
    "Collider",
    "Transitivity*",
}


def chain_graph():
    return build_graph(["A", "B", "C"], [("A", "B"), ("B", "C")])


def fork_graph():
    return build_graph(["A", "B", "C"], [("B", "A"), ("B", "C")])


def collider_graph(with_descendant=False):
    edges = [("A", "B"), ("C", "B")]
    nodes = ["A", "B", "C"]
    if with_descendant:
        nodes.append("D")
        edges.append(("B", "D"))
    return build_graph(nodes, edges)


# --- ground truth built directly from path enumeration ---------------------


def directed_path_sets(g, start):
    """Node sets of every directed path leaving ``start`` (itself included)."""
    sets = set()
    path = [start]

    def walk(node):
        sets.add(frozenset(path))
        for child in g.children(node):
            path.append(child)
            walk(child)
            path.pop()

    walk(start)
    return sets


def expected_facts(g):
    """Every path fact the engine should reach, straight from the paths."""
    facts = set()
    nodes = sorted(g.nodes)
    for x, y in itertools.combinations(nodes, 2):
        for path, noncolliders, colliders in enumerate_classified_paths(g, x, y):
            if len(path) == 2:
                continue
            choices = [
                [s for s in directed_path_sets(g, c) if x not in s and y not in s]
                for c in colliders
            ]
            for combo in itertools.product(*choices):
                facts.add(PathFact(x, y, noncolliders, frozenset(combo)))
    return facts


# --- fact value objects -----------------------------------------------------


def test_mediate_fact_invariants():
    MediateCauseFact("A", "A", frozenset(["A"]))
    MediateCauseFact("A", "C", frozenset(["A", "B", "C"]))
    with pytest.raises(ValueError):
        MediateCauseFact("A", "A", frozenset(["A", "B"]))
    with pytest.raises(ValueError):
        MediateCauseFact("A", "C", frozenset(["A", "B"]))


def test_path_fact_invariants():
    PathFact("A", "C", frozenset(["B"]), frozenset())
    with pytest.raises(ValueError):
        PathFact("A", "A", frozenset(), frozenset())
    with pytest.raises(ValueError):
        PathFact("A", "C", frozenset(["A"]), frozenset())
    with pytest.raises(ValueError):
        PathFact("A", "C", frozenset(), frozenset([frozenset()]))
    with pytest.raises(ValueError):
        PathFact("A", "C", frozenset(), frozenset([frozenset(["C"])]))


def test_render_path_fact_sorts_contents():
    fact = PathFact(
        "A", "Z", frozenset(["M", "B"]), frozenset([frozenset(["D", "C"])])
    )
    assert render_path_fact(fact) == "A <>^{B,M}_{{C,D}} Z"


# --- small shapes ------------------------------------------------------------


def test_chain_and_fork_yield_one_noncollider_fact():
    for g in (chain_graph(), fork_graph()):
        closure = close(g)
        facts = closure.facts_between("A", "C")
        assert len(facts) == 1
        fact = facts[0]
        assert fact.noncolliders == frozenset(["B"])
        assert fact.collider_sets == frozenset()


def test_collider_yields_one_set_per_descendant_chain():
    closure = close(collider_graph(with_descendant=True))
    facts = closure.facts_between("A", "C")
    families = {fact.collider_sets for fact in facts}
    assert families == {
        frozenset([frozenset(["B"])]),
        frozenset([frozenset(["B", "D"])]),
    }
    assert all(fact.noncolliders == frozenset() for fact in facts)


def test_triplet_verdicts_match_oracle_on_both_routes():
    cases = [
        (chain_graph(), frozenset(), False),
        (chain_graph(), frozenset(["B"]), True),
        (fork_graph(), frozenset(), False),
        (fork_graph(), frozenset(["B"]), True),
        (collider_graph(), frozenset(), True),
        (collider_graph(), frozenset(["B"]), False),
        (collider_graph(True), frozenset(["D"]), False),
    ]
    for g, cond, want in cases:
        closure = close(g)
        assert independent_by_rules(closure, g, "A", "C", cond) is want
        assert dsep_oracle(g, "A", "C", cond) is want


def test_loan_facts_between_ms_and_loan(loan_graph, loan_closure):
    facts = loan_closure.facts_between("MS", "Loan")
    assert [render_path_fact(f) for f in facts] == [
        "Loan <>^{Age}_{} MS",
        "Loan <>^{Age,GAI}_{} MS",
    ]
    assert loan_closure.certifying_path(facts[0]) == ("Loan", "Age", "MS")
    assert loan_closure.certifying_path(facts[1]) == ("Loan", "GAI", "Age", "MS")


def test_loan_closure_shape(loan_closure):
    assert len(loan_closure.mediate) == 9
    assert len(loan_closure.paths) == 7
    assert len(loan_closure.trace) == 16


# --- trace discipline --------------------------------------------------------


def test_trace_names_and_productivity(loan_closure):
    conclusions = [record.conclusion for record in loan_closure.trace]
    assert len(conclusions) == len(set(conclusions))
    assert {record.rule for record in loan_closure.trace} <= RULE_NAMES
    first_rules = [r.rule for r in loan_closure.trace[: len(loan_closure.mediate)]]
    assert first_rules[0] == "Reflexive cause"


def test_record_trace_flag(loan_graph):
    closure = close(loan_graph, record_trace=False)
    assert closure.trace == ()
    assert len(closure.paths) == 7


# --- budgets -----------------------------------------------------------------


def test_tiny_budget_raises_resource_limit(loan_graph):
    with pytest.raises(ResourceLimit, match="fact budget of 3"):
        close(loan_graph, fact_budget=3)


def test_budget_resolution(monkeypatch):
    monkeypatch.delenv(FACT_BUDGET_ENV_VAR, raising=False)
    assert resolve_fact_budget(None) == DEFAULT_FACT_BUDGET
    assert resolve_fact_budget(42) == 42
    monkeypatch.setenv(FACT_BUDGET_ENV_VAR, "17")
    assert resolve_fact_budget(None) == 17
    assert resolve_fact_budget(42) == 42
    monkeypatch.setenv(FACT_BUDGET_ENV_VAR, "zero")
    with pytest.raises(InputError):
        resolve_fact_budget(None)
    monkeypatch.setenv(FACT_BUDGET_ENV_VAR, "0")
    with pytest.raises(InputError):
        resolve_fact_budget(None)


def test_env_budget_limits_closure(monkeypatch, loan_graph):
    monkeypatch.setenv(FACT_BUDGET_ENV_VAR, "2")
    with pytest.raises(ResourceLimit):
        close(loan_graph)
    close(loan_graph, fact_budget=10_000)


# --- blocking ----------------------------------------------------------------


def test_is_fact_blocked():
    noncollider = PathFact("A", "C", frozenset(["B"]), frozenset())
    assert is_fact_blocked(noncollider, frozenset(["B"]))
    assert is_fact_blocked(noncollider, frozenset(["B", "Z"]))
    assert not is_fact_blocked(noncollider, frozenset())
    assert not is_fact_blocked(noncollider, frozenset(["Z"]))

    collider = PathFact("A", "C", frozenset(), frozenset([frozenset(["B", "D"])]))
    assert is_fact_blocked(collider, frozenset())
    assert is_fact_blocked(collider, frozenset(["Z"]))
    assert not is_fact_blocked(collider, frozenset(["D"]))
    assert not is_fact_blocked(collider, frozenset(["B"]))

    mixed = PathFact(
        "A", "D", frozenset(["M"]), frozenset([frozenset(["B"]), frozenset(["C"])])
    )
    assert is_fact_blocked(mixed, frozenset(["M", "B", "C"]))
    assert is_fact_blocked(mixed, frozenset(["B"]))
    assert not is_fact_blocked(mixed, frozenset(["B", "C"]))


def test_blocking_reason_prefers_noncolliders_then_least_set():
    mixed = PathFact(
        "A", "D", frozenset(["M"]), frozenset([frozenset(["C"]), frozenset(["B"])])
    )
    hit = blocking_reason(mixed, frozenset(["M", "Z"]))
    assert hit == BlockReason("noncollider", frozenset(["M"]))
    dark = blocking_reason(mixed, frozenset())
    assert dark == BlockReason("collider-set", frozenset(["B"]))
    assert blocking_reason(mixed, frozenset(["B", "C"])) is None


# --- path enumeration and the oracle -----------------------------------------


def test_enumerate_classified_paths_validates():
    g = chain_graph()
    with pytest.raises(UnknownVariable):
        enumerate_classified_paths(g, "A", "Z")
    with pytest.raises(ValueError):
        enumerate_classified_paths(g, "A", "A")


def test_enumerate_classified_paths_contents():
    g = collider_graph(with_descendant=True)
    paths = enumerate_classified_paths(g, "A", "C")
    assert paths == ((("A", "B", "C"), frozenset(), ("B",)),)
    direct = enumerate_classified_paths(g, "A", "B")
    assert (("A", "B"), frozenset(), ()) in direct


def test_dsep_oracle_validates_nodes():
    g = chain_graph()
    with pytest.raises(UnknownVariable):
        dsep_oracle(g, "A", "Z", frozenset())


def test_dsep_on_disconnected_nodes():
    g = build_graph(["A", "B"], [])
    assert dsep_oracle(g, "A", "B", frozenset())
    closure = close(g)
    assert independent_by_rules(closure, g, "A", "B", frozenset())


# --- engine equals ground truth ----------------------------------------------


def test_extensional_equality_on_exhaustive_small_family():
    for n in range(1, 5):
        for g in enumerate_dags(n):
            closure = close(g, record_trace=False)
            assert closure.paths == expected_facts(g), g.edges


def test_extensional_equality_on_random_graphs():
    rng = random.Random(7)
    for _ in range(40):
        g = random_dag(rng, max_nodes=6, edge_prob=0.4)
        closure = close(g, record_trace=False)
        assert closure.paths == expected_facts(g), g.edges


def test_saturation_gap_is_zero_on_random_graphs():
    rng = random.Random(11)
    for _ in range(25):
        g = random_dag(rng, max_nodes=6, edge_prob=0.35)
        assert saturation_gap(close(g), g) == 0


def test_adding_an_edge_never_removes_facts():
    rng = random.Random(3)
    for _ in range(20):
        g = random_dag(rng, max_nodes=6, edge_prob=0.3)
        order = g.topological_order()
        missing = [
            (a, b)
            for i, a in enumerate(order)
            for b in order[i + 1 :]
            if (a, b) not in g.edges
        ]
        if not missing:
            continue
        extra = rng.choice(missing)
        bigger = build_graph(g.nodes, list(g.edges) + [extra])
        assert close(g, record_trace=False).paths <= close(
            bigger, record_trace=False
        ).paths


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.data())
def test_independence_is_symmetric(seed, data):
    g = random_dag(random.Random(seed), max_nodes=6, edge_prob=0.35)
    closure = close(g, record_trace=False)
    nodes = sorted(g.nodes)
    x = data.draw(st.sampled_from(nodes))
    y = data.draw(st.sampled_from([n for n in nodes if n != x]))
    rest = [n for n in nodes if n not in (x, y)]
    cond = frozenset(data.draw(st.sets(st.sampled_from(rest)))) if rest else frozenset()
    assert independent_by_rules(closure, g, x, y, cond) == independent_by_rules(
        closure, g, y, x, cond
    )


# --- dump determinism ---------------------------------------------------------


def test_closure_dump_is_deterministic(loan_graph):
    first = json.dumps(closure_dump(close(loan_graph)), indent=2, ensure_ascii=False)
    second = json.dumps(closure_dump(close(loan_graph)), indent=2, ensure_ascii=False)
    assert first == second


def test_closure_dump_shape(loan_closure):
    dump = closure_dump(loan_closure)
    assert set(dump) == {"mediate", "paths", "trace"}
    sources = [(m["source"], m["target"]) for m in dump["mediate"]]
    assert sources == sorted(sources)
    keys = [
        (p["left"], p["right"], p["noncolliders"], p["colliderSets"])
        for p in dump["paths"]
    ]
    assert keys == sorted(keys)
    for p in dump["paths"]:
        assert p["certifyingPath"][0] == p["left"]
        assert p["certifyingPath"][-1] == p["right"]
    for record in dump["trace"]:
        assert set(record) == {"rule", "premises", "conclusion"}
        assert record["rule"] in RULE_NAMES
