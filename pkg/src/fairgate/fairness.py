"""Fairness checks: graphical, empirical over datasets, and intersectional.

The graphical route asks whether a protected attribute could be added to
a context without changing any prediction (the two admissibility
conditions over the causal graph).  The empirical route compares exact
conditional frequencies in a dataset.  Both use reduced rationals end to
end; no floats enter the arithmetic.

Intersectionality is not a separate notion here: a set of protected
attributes is checked by testing each member with the others folded into
the conditioning side, over every non-empty subset.  The bundled
two-attribute dataset generator exists to show why subsets matter: each
attribute passes alone while the pair fails.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .closure import Closure, close
from .errors import (
    EmptyConditioningSet,
    InputError,
    MalformedDataset,
    SubsetExplosion,
    UnknownColumn,
    VariableAlreadyInContext,
    WeakeningTargetIsGoal,
)
from .graph import CausalGraph, build_graph, validate_name
from .judgments import Attribution, Context, Value, value_matches
from .weakening import Verdict, evaluate_conditions, verdict_to_json

__all__ = [
    "Dataset",
    "CiResult",
    "IfCheckResult",
    "Decomposition",
    "SubsetResult",
    "FairnessReport",
    "DEFAULT_SUBSET_CAP",
    "empirical_probability",
    "empirical_ci",
    "check_if",
    "check_intersectionality",
    "generate_table1",
    "table1_graph",
    "fraction_str",
    "ci_result_to_json",
    "if_result_to_json",
    "fairness_report_to_json",
]

DEFAULT_SUBSET_CAP = 12


def fraction_str(q: Fraction) -> str:
    """Reduced "m/n" form; the denominator is always written."""
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Dataset:
    """An immutable table of atomic value strings with a designated target column."""

    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    target_column: str

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(row) for row in self.rows))
        for name in self.columns:
            validate_name(name)
        if len(set(self.columns)) != len(self.columns):
            raise MalformedDataset("duplicate column names")
        if self.target_column not in self.columns:
            raise UnknownColumn(f"target column {self.target_column!r} is not a column")
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise MalformedDataset(
                    f"row {i + 1} has {len(row)} cells, expected {width}"
                )
            for cell in row:
                Value.atomic(cell)

    def col(self, name: str) -> int:
        """Column index, or UnknownColumn."""
        try:
            return self.columns.index(name)
        except ValueError:
            raise UnknownColumn(f"no column named {name!r}") from None

    @classmethod
    def from_csv(cls, path, target_column: str) -> "Dataset":
        """Load a UTF-8 CSV whose first row is the column headers.

        Cells are stripped of surrounding whitespace and must be atomic
        values.
        """
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise MalformedDataset(f"{path}: empty file") from None
            rows = [tuple(cell.strip() for cell in row) for row in reader]
        columns = tuple(cell.strip() for cell in header)
        return cls(columns=columns, rows=tuple(rows), target_column=target_column)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            writer.writerows(self.rows)

    def matching_rows(self, ctx: Context) -> tuple[tuple[str, ...], ...]:
        """Rows whose cells satisfy every attribution of the context."""
        tests = [(self.col(attr.variable), attr.value) for attr in ctx]
        return tuple(
            row
            for row in self.rows
            if all(value_matches(value, row[idx]) for idx, value in tests)
        )


def empirical_probability(dataset: Dataset, ctx: Context, outcome: Value) -> Fraction:
    """Exact frequency of the outcome on the target column among ctx-matching rows."""
    matching = dataset.matching_rows(ctx)
    if not matching:
        raise EmptyConditioningSet("no rows match the conditioning context")
    t = dataset.col(dataset.target_column)
    hits = sum(1 for row in matching if value_matches(outcome, row[t]))
    return Fraction(hits, len(matching))


@dataclass(frozen=True)
class CiResult:
    """Exact empirical conditional-independence comparison.

    For every observed value of the tested attribute and every observed
    outcome, the conditional frequency is compared against the marginal
    one (both within the given context); passed iff the largest gap is
    at most epsilon.
    """

    passed: bool
    epsilon: Fraction
    max_delta: Fraction
    witness: tuple[str, str] | None  # (attribute value, outcome value)
    marginal: dict  # outcome -> Fraction
    conditional: dict  # attribute value -> {outcome -> Fraction}


def empirical_ci(
    dataset: Dataset, attr: str, target: str, ctx: Context, epsilon: Fraction
) -> CiResult:
    """Test whether the target is empirically independent of attr given ctx."""
    epsilon = Fraction(epsilon)
    if epsilon < 0:
        raise InputError(f"epsilon must be nonnegative, got {epsilon}")
    ai = dataset.col(attr)
    ti = dataset.col(target)
    if attr == target:
        raise WeakeningTargetIsGoal(f"cannot test {attr!r} against itself")
    if attr in ctx.variables():
        raise VariableAlreadyInContext(f"{attr!r} is already fixed by the context")
    matching = dataset.matching_rows(ctx)
    if not matching:
        raise EmptyConditioningSet("no rows match the conditioning context")

    alphas = sorted({row[ai] for row in matching})
    betas = sorted({row[ti] for row in matching})
    total = len(matching)
    marginal = {
        beta: Fraction(sum(1 for row in matching if row[ti] == beta), total)
        for beta in betas
    }
    conditional = {}
    for alpha in alphas:
        cell = [row for row in matching if row[ai] == alpha]
        conditional[alpha] = {
            beta: Fraction(sum(1 for row in cell if row[ti] == beta), len(cell))
            for beta in betas
        }

    max_delta = Fraction(0)
    witness = None
    for alpha in alphas:
        for beta in betas:
            delta = abs(conditional[alpha][beta] - marginal[beta])
            if delta > max_delta:
                max_delta = delta
                witness = (alpha, beta)
    return CiResult(
        passed=max_delta <= epsilon,
        epsilon=epsilon,
        max_delta=max_delta,
        witness=witness,
        marginal=marginal,
        conditional=conditional,
    )


@dataclass(frozen=True)
class IfCheckResult:
    """One protected attribute checked against one context."""

    protected_attr: str
    target: str
    context_vars: tuple[str, ...]
    mode: str  # "graphical", "empirical" or "both"
    graphical: Verdict | None
    empirical: CiResult | None
    agreement: bool | None  # both-mode only
    passed: bool


def _validate_mode(mode: str):
    if mode not in ("graphical", "empirical", "both"):
        raise InputError(f"mode must be graphical, empirical or both, got {mode!r}")


def check_if(
    g: CausalGraph | None,
    closure: Closure | None,
    dataset: Dataset | None,
    ctx: Context,
    target: str,
    protected_attr: str,
    epsilon: Fraction = Fraction(0),
    mode: str = "graphical",
) -> IfCheckResult:
    """Individual-fairness check for one protected attribute.

    Graphical mode asks whether the attribute could be weakened into the
    context (values play no role); empirical mode compares frequencies
    in the dataset; both runs the two and reports whether they agree.
    """
    _validate_mode(mode)
    if protected_attr == target:
        raise WeakeningTargetIsGoal("protected attribute equals the target")
    if protected_attr in ctx.variables():
        raise VariableAlreadyInContext(
            f"protected attribute {protected_attr!r} is already in the context"
        )

    verdict = None
    ci = None
    if mode in ("graphical", "both"):
        if g is None:
            raise InputError("graphical mode requires a graph")
        verdict = evaluate_conditions(
            g, protected_attr, target, ctx.variables(), closure=closure
        )
    if mode in ("empirical", "both"):
        if dataset is None:
            raise InputError("empirical mode requires a dataset")
        ci = empirical_ci(dataset, protected_attr, target, ctx, epsilon)

    agreement = None
    if mode == "both":
        agreement = verdict.admissible == ci.passed
    passed = (verdict.admissible if verdict is not None else True) and (
        ci.passed if ci is not None else True
    )
    return IfCheckResult(
        protected_attr=protected_attr,
        target=target,
        context_vars=tuple(sorted(ctx.variables())),
        mode=mode,
        graphical=verdict,
        empirical=ci,
        agreement=agreement,
        passed=passed,
    )


@dataclass(frozen=True)
class Decomposition:
    """One member of a subset checked with the rest folded into the context.

    ``empirical`` holds one CiResult per observed value combination of
    the rest, keyed by the (variable, value) pairs that were fixed.
    """

    attr: str
    rest: tuple[str, ...]
    graphical: Verdict | None
    empirical: tuple[tuple[tuple[tuple[str, str], ...], CiResult], ...] | None
    max_delta: Fraction | None
    agreement: bool | None
    passed: bool


@dataclass(frozen=True)
class SubsetResult:
    subset: tuple[str, ...]
    decompositions: tuple[Decomposition, ...]
    passed: bool


@dataclass(frozen=True)
class FairnessReport:
    """Verdicts for every non-empty subset of the protected attributes."""

    protected_attrs: tuple[str, ...]
    target: str
    context_vars: tuple[str, ...]
    mode: str
    threshold: Fraction
    subsets: tuple[SubsetResult, ...]
    max_delta: Fraction | None  # None when no empirical check ran
    passed: bool


def check_intersectionality(
    g: CausalGraph | None,
    closure: Closure | None,
    dataset: Dataset | None,
    ctx: Context,
    target: str,
    protected_set,
    epsilon: Fraction = Fraction(0),
    mode: str = "graphical",
    subset_cap: int = DEFAULT_SUBSET_CAP,
) -> FairnessReport:
    """Check every non-empty subset of the protected attributes.

    Each subset is decomposed once per member: the member is the tested
    attribute, the remaining members join the conditioning side.  In
    empirical modes the rest is instantiated with every value
    combination observed among context-matching rows.  The report never
    depends on enumeration order; everything is sorted.
    """
    _validate_mode(mode)
    protected = sorted(set(protected_set))
    if not protected:
        raise InputError("at least one protected attribute is required")
    if len(protected) > subset_cap:
        raise SubsetExplosion(
            f"{len(protected)} protected attributes exceed the cap of {subset_cap}"
        )
    ctx_vars = ctx.variables()
    for attr in protected:
        if attr == target:
            raise WeakeningTargetIsGoal("protected attribute equals the target")
        if attr in ctx_vars:
            raise VariableAlreadyInContext(
                f"protected attribute {attr!r} is already in the context"
            )

    if mode in ("graphical", "both"):
        if g is None:
            raise InputError("graphical mode requires a graph")
        if closure is None:
            closure = close(g)
    if mode in ("empirical", "both") and dataset is None:
        raise InputError("empirical mode requires a dataset")

    subsets = []
    overall_max: Fraction | None = None
    for size in range(1, len(protected) + 1):
        for subset in combinations(protected, size):
            decomps = []
            for attr in subset:
                rest = tuple(v for v in subset if v != attr)
                verdict = None
                per_combo = None
                max_delta = None
                if mode in ("graphical", "both"):
                    verdict = evaluate_conditions(
                        g, attr, target, ctx_vars | set(rest), closure=closure
                    )
                if mode in ("empirical", "both"):
                    per_combo = []
                    max_delta = Fraction(0)
                    rest_cols = [dataset.col(v) for v in rest]
                    matching = dataset.matching_rows(ctx)
                    if not matching:
                        raise EmptyConditioningSet(
                            "no rows match the conditioning context"
                        )
                    combos = sorted({tuple(row[c] for c in rest_cols) for row in matching})
                    for combo in combos:
                        extended = ctx
                        for var, val in zip(rest, combo):
                            extended = extended.extended(
                                Attribution(var, Value.atomic(val))
                            )
                        ci = empirical_ci(dataset, attr, target, extended, epsilon)
                        per_combo.append((tuple(zip(rest, combo)), ci))
                        if ci.max_delta > max_delta:
                            max_delta = ci.max_delta
                    per_combo = tuple(per_combo)
                    if overall_max is None or max_delta > overall_max:
                        overall_max = max_delta

                empirical_ok = per_combo is None or all(
                    ci.passed for _, ci in per_combo
                )
                graphical_ok = verdict is None or verdict.admissible
                agreement = None
                if mode == "both":
                    agreement = verdict.admissible == empirical_ok
                decomps.append(
                    Decomposition(
                        attr=attr,
                        rest=rest,
                        graphical=verdict,
                        empirical=per_combo,
                        max_delta=max_delta,
                        agreement=agreement,
                        passed=graphical_ok and empirical_ok,
                    )
                )
            subsets.append(
                SubsetResult(
                    subset=subset,
                    decompositions=tuple(decomps),
                    passed=all(d.passed for d in decomps),
                )
            )

    return FairnessReport(
        protected_attrs=tuple(protected),
        target=target,
        context_vars=tuple(sorted(ctx_vars)),
        mode=mode,
        threshold=Fraction(epsilon),
        subsets=tuple(subsets),
        max_delta=overall_max,
        passed=all(s.passed for s in subsets),
    )


# --- The two-attribute counterexample dataset -----------------------------

# Cell layout: (a1 value, a2 value, rows with t=β, rows with t=β′).
_TABLE1_CELLS = (
    ("v11", "v21", 90, 10),
    ("v11", "v22", 180, 60),
    ("v12", "v21", 180, 60),
    ("v12", "v22", 90, 10),
)


def generate_table1() -> Dataset:
    """680 deterministic rows over (a1, a2, t).

    Each attribute is marginally uninformative about t (all marginals
    equal 27/34) while the four joint cells split 9/10 against 3/4, so
    singleton checks pass and the pair check fails.
    """
    rows = []
    for a1, a2, n_pos, n_neg in _TABLE1_CELLS:
        rows.extend((a1, a2, "β") for _ in range(n_pos))
        rows.extend((a1, a2, "β′") for _ in range(n_neg))
    return Dataset(columns=("a1", "a2", "t"), rows=tuple(rows), target_column="t")


def table1_graph() -> CausalGraph:
    """The matching causal structure: both attributes feed the target directly."""
    return build_graph(["a1", "a2", "t"], [("a1", "t"), ("a2", "t")])


# --- JSON builders ---------------------------------------------------------


def ci_result_to_json(ci: CiResult) -> dict:
    return {
        "passed": ci.passed,
        "epsilon": fraction_str(ci.epsilon),
        "maxDelta": fraction_str(ci.max_delta),
        "witness": None
        if ci.witness is None
        else {"value": ci.witness[0], "outcome": ci.witness[1]},
        "marginal": {beta: fraction_str(p) for beta, p in sorted(ci.marginal.items())},
        "conditional": {
            alpha: {beta: fraction_str(p) for beta, p in sorted(row.items())}
            for alpha, row in sorted(ci.conditional.items())
        },
    }


def if_result_to_json(result: IfCheckResult) -> dict:
    return {
        "protected": result.protected_attr,
        "target": result.target,
        "context": list(result.context_vars),
        "mode": result.mode,
        "passed": result.passed,
        "agreement": result.agreement,
        "graphical": None if result.graphical is None else verdict_to_json(result.graphical),
        "empirical": None if result.empirical is None else ci_result_to_json(result.empirical),
    }


def _decomposition_to_json(d: Decomposition) -> dict:
    empirical = None
    if d.empirical is not None:
        empirical = [
            {
                "restValues": {var: val for var, val in fixed},
                "ci": ci_result_to_json(ci),
            }
            for fixed, ci in d.empirical
        ]
    return {
        "attr": d.attr,
        "rest": list(d.rest),
        "passed": d.passed,
        "agreement": d.agreement,
        "maxDelta": None if d.max_delta is None else fraction_str(d.max_delta),
        "graphical": None if d.graphical is None else verdict_to_json(d.graphical),
        "empirical": empirical,
    }


def fairness_report_to_json(report: FairnessReport) -> dict:
    return {
        "protectedAttrs": list(report.protected_attrs),
        "target": report.target,
        "context": list(report.context_vars),
        "mode": report.mode,
        "threshold": fraction_str(report.threshold),
        "maxDelta": None if report.max_delta is None else fraction_str(report.max_delta),
        "passed": report.passed,
        "subsets": [
            {
                "subset": list(s.subset),
                "passed": s.passed,
                "decompositions": [_decomposition_to_json(d) for d in s.decompositions],
            }
            for s in report.subsets
        ],
    }
