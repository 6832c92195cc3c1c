"""Command-line front end.

Subcommands: paths, weaken, if, intersect, oracle, demo-table1.
Exit codes: 0 pass/admissible, 1 fail/inadmissible, 2 input error,
3 resource limit.  Reports go to standard output (JSON by default),
error text to standard error.  JSON output is byte-identical for
identical inputs and seeds.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .closure import close, closure_dump, render_path_fact
from .errors import InputError, ResourceLimit
from .fairness import (
    DEFAULT_SUBSET_CAP,
    check_if,
    check_intersectionality,
    empirical_probability,
    fairness_report_to_json,
    fraction_str,
    generate_table1,
    if_result_to_json,
    Dataset,
    Value,
)
from .graph import load_graph
from .judgments import (
    Context,
    load_context,
    load_judgment,
    parse_attribution,
    parse_context,
    serialize_judgment,
)
from .sweep import exhaustive_sweep, random_sweep, sweep_report_to_json
from .weakening import apply_weakening, check_weakening, verdict_to_json

__all__ = ["main"]


def _parse_epsilon(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"epsilon must be a rational like 1/20 or 0.05, got {text!r}") from None
    if value < 0:
        raise InputError(f"epsilon must be nonnegative, got {text}")
    return value


def _load_ctx(args, graph):
    if getattr(args, "context", None) and getattr(args, "context_inline", None):
        raise InputError("pass either --context or --context-inline, not both")
    if getattr(args, "context", None):
        return load_context(args.context, graph)
    if getattr(args, "context_inline", None):
        return parse_context(args.context_inline, graph)
    return Context(())


def _emit(args, payload: dict, text_renderer) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text_renderer(payload))


def _frac_text(s: str) -> str:
    return f"{s} (~{float(Fraction(s)):.4f})"


# --- paths -----------------------------------------------------------------


def _paths_text(payload: dict) -> str:
    lines = [f"mediate facts: {len(payload['mediate'])}"]
    for m in payload["mediate"]:
        joined = ",".join(m["intermediates"])
        lines.append(f"  {m['source']} |>^{{{joined}}} {m['target']}")
    lines.append(f"path facts: {len(payload['paths'])}")
    for p in payload["paths"]:
        sets = ",".join("{" + ",".join(s) + "}" for s in p["colliderSets"])
        lines.append(
            f"  {p['left']} <>^{{{','.join(p['noncolliders'])}}}_{{{sets}}} {p['right']}"
            f"  via {'-'.join(p['certifyingPath'])}"
        )
    lines.append(f"rule firings: {len(payload['trace'])}")
    return "\n".join(lines)


def _cmd_paths(args) -> int:
    g = load_graph(args.graph)
    closure = close(g, fact_budget=args.fact_budget)
    _emit(args, closure_dump(closure), _paths_text)
    return 0


# --- weaken ----------------------------------------------------------------


def _weaken_text(payload: dict) -> str:
    lines = [
        f"subject: {payload['subject']}",
        f"target: {payload['target']}",
        f"context: {', '.join(payload['context']) or '(empty)'}",
        f"admissible: {'yes' if payload['admissible'] else 'no'}",
    ]
    if payload["failedCondition"]:
        lines.append(f"failed: {payload['failedCondition']}")
    w = payload["witness"]
    if w is not None:
        if w["kind"] == "edge":
            lines.append(f"witness: edge {w['source']} -> {w['target']}")
        else:
            lines.append(f"witness: open path fact between {w['endpoints'][0]} and {w['endpoints'][1]}")
    for f in payload["facts"]:
        reason = f["blockedBy"]
        if reason is None:
            status = "OPEN"
        else:
            status = f"blocked by {reason['kind']} {{{','.join(reason['nodes'])}}}"
        sets = ",".join("{" + ",".join(s) + "}" for s in f["colliderSets"])
        lines.append(
            f"  fact {f['endpoints'][0]} <>^{{{','.join(f['noncolliders'])}}}_{{{sets}}}"
            f" {f['endpoints'][1]}: {status}"
        )
    if "weakened" in payload and payload["weakened"] is not None:
        lines.append(f"weakened judgment: {payload['weakened']}")
    return "\n".join(lines)


def _cmd_weaken(args) -> int:
    g = load_graph(args.graph)
    judgment = load_judgment(args.judgment, g)
    attr = parse_attribution(args.attr, g)
    verdict = check_weakening(g, judgment, attr, fact_budget=args.fact_budget)
    payload = verdict_to_json(verdict)
    if verdict.admissible:
        payload["weakened"] = serialize_judgment(apply_weakening(judgment, attr, verdict))
    else:
        payload["weakened"] = None
    _emit(args, payload, _weaken_text)
    return 0 if verdict.admissible else 1


# --- if --------------------------------------------------------------------


def _if_text(payload: dict) -> str:
    lines = [
        f"protected: {payload['protected']}",
        f"target: {payload['target']}",
        f"context: {', '.join(payload['context']) or '(empty)'}",
        f"mode: {payload['mode']}",
        f"passed: {'yes' if payload['passed'] else 'no'}",
    ]
    if payload["graphical"] is not None:
        v = payload["graphical"]
        state = "admissible" if v["admissible"] else f"inadmissible ({v['failedCondition']})"
        lines.append(f"graphical: {state}")
    if payload["empirical"] is not None:
        ci = payload["empirical"]
        lines.append(
            f"empirical: {'pass' if ci['passed'] else 'fail'},"
            f" max delta {_frac_text(ci['maxDelta'])} at epsilon {ci['epsilon']}"
        )
        if ci["witness"] is not None:
            lines.append(
                f"  witness: value {ci['witness']['value']}, outcome {ci['witness']['outcome']}"
            )
    if payload["agreement"] is not None:
        lines.append(f"routes agree: {'yes' if payload['agreement'] else 'no'}")
    return "\n".join(lines)


def _resolve_mode(args, need_dataset_default: bool = True) -> str:
    if args.mode is not None:
        return args.mode
    if need_dataset_default and args.dataset and args.graph:
        return "both"
    if args.dataset and not args.graph:
        return "empirical"
    return "graphical"


def _cmd_if(args) -> int:
    g = load_graph(args.graph) if args.graph else None
    dataset = Dataset.from_csv(args.dataset, args.target) if args.dataset else None
    mode = _resolve_mode(args)
    ctx = _load_ctx(args, g)
    protected = args.protected
    if "," in protected:
        raise InputError("if takes a single protected attribute; use intersect for sets")
    result = check_if(
        g,
        None,
        dataset,
        ctx,
        args.target,
        protected,
        epsilon=_parse_epsilon(args.epsilon),
        mode=mode,
    )
    _emit(args, if_result_to_json(result), _if_text)
    return 0 if result.passed else 1


# --- intersect ---------------------------------------------------------------


def _intersect_text(payload: dict) -> str:
    lines = [
        f"protected set: {', '.join(payload['protectedAttrs'])}",
        f"target: {payload['target']}",
        f"context: {', '.join(payload['context']) or '(empty)'}",
        f"mode: {payload['mode']}, threshold {payload['threshold']}",
        f"passed: {'yes' if payload['passed'] else 'no'}",
    ]
    if payload["maxDelta"] is not None:
        lines.append(f"max delta: {_frac_text(payload['maxDelta'])}")
    for s in payload["subsets"]:
        lines.append(f"subset {{{', '.join(s['subset'])}}}: {'pass' if s['passed'] else 'FAIL'}")
        for d in s["decompositions"]:
            rest = ", ".join(d["rest"]) or "(none)"
            detail = []
            if d["graphical"] is not None:
                detail.append(
                    "graphical "
                    + ("admissible" if d["graphical"]["admissible"] else "inadmissible")
                )
            if d["maxDelta"] is not None:
                detail.append(f"max delta {d['maxDelta']}")
            lines.append(
                f"  test {d['attr']} given rest {{{rest}}}:"
                f" {'pass' if d['passed'] else 'FAIL'} ({'; '.join(detail)})"
            )
    return "\n".join(lines)


def _cmd_intersect(args) -> int:
    g = load_graph(args.graph) if args.graph else None
    dataset = Dataset.from_csv(args.dataset, args.target) if args.dataset else None
    mode = _resolve_mode(args)
    ctx = _load_ctx(args, g)
    protected = [p.strip() for p in args.protected.split(",") if p.strip()]
    report = check_intersectionality(
        g,
        None,
        dataset,
        ctx,
        args.target,
        protected,
        epsilon=_parse_epsilon(args.epsilon),
        mode=mode,
        subset_cap=args.subset_cap,
    )
    _emit(args, fairness_report_to_json(report), _intersect_text)
    return 0 if report.passed else 1


# --- oracle ------------------------------------------------------------------


def _oracle_text(payload: dict) -> str:
    lines = [
        f"mode: {payload['mode']}",
        f"graphs checked: {payload['graphsChecked']}",
        f"checks run: {payload['checksRun']}",
        f"discrepancies: {len(payload['discrepancies'])}",
        f"passed: {'yes' if payload['passed'] else 'no'}",
    ]
    for d in payload["discrepancies"]:
        edges = ", ".join("->".join(e) for e in d["edges"])
        lines.append(
            f"  DISAGREE on [{edges}] x={d['x']} y={d['y']}"
            f" given {{{','.join(d['conditioning'])}}}:"
            f" rules={d['byRules']} oracle={d['byOracle']}"
        )
    return "\n".join(lines)


def _cmd_oracle(args) -> int:
    if args.trials is not None:
        report = random_sweep(
            trials=args.trials,
            max_nodes=args.max_nodes if args.max_nodes is not None else 8,
            seed=args.seed,
            edge_prob=args.edge_prob,
            fact_budget=args.fact_budget,
        )
    else:
        report = exhaustive_sweep(
            max_nodes=args.max_nodes if args.max_nodes is not None else 5,
            fact_budget=args.fact_budget,
        )
    _emit(args, sweep_report_to_json(report), _oracle_text)
    return 0 if report.passed else 1


# --- demo-table1 -------------------------------------------------------------


def _demo_text(payload: dict) -> str:
    lines = [
        f"rows: {payload['rowCount']}",
        "joint cells P(t=β | a1, a2):",
    ]
    for cell in payload["cells"]:
        lines.append(f"  a1={cell['a1']}, a2={cell['a2']}: {_frac_text(cell['probability'])}")
    lines.append("marginals P(t=β | one attribute):")
    for m in payload["marginals"]:
        lines.append(f"  {m['attr']}={m['value']}: {_frac_text(m['probability'])}")
    lines.append(f"overall P(t=β): {_frac_text(payload['overall'])}")
    lines.append(_intersect_text(payload["intersectionality"]))
    return "\n".join(lines)


def _cmd_demo_table1(args) -> int:
    dataset = generate_table1()
    beta = Value.atomic("β")
    cells = []
    for a1, a2 in (("v11", "v21"), ("v11", "v22"), ("v12", "v21"), ("v12", "v22")):
        ctx = parse_context(f"a1={a1}, a2={a2}", None)
        cells.append(
            {"a1": a1, "a2": a2, "probability": fraction_str(empirical_probability(dataset, ctx, beta))}
        )
    marginals = []
    for attr, values in (("a1", ("v11", "v12")), ("a2", ("v21", "v22"))):
        for value in values:
            ctx = parse_context(f"{attr}={value}", None)
            marginals.append(
                {
                    "attr": attr,
                    "value": value,
                    "probability": fraction_str(empirical_probability(dataset, ctx, beta)),
                }
            )
    overall = fraction_str(empirical_probability(dataset, Context(()), beta))
    report = check_intersectionality(
        None,
        None,
        dataset,
        Context(()),
        "t",
        ["a1", "a2"],
        epsilon=Fraction(0),
        mode="empirical",
    )
    payload = {
        "rowCount": len(dataset.rows),
        "target": "t",
        "cells": cells,
        "marginals": marginals,
        "overall": overall,
        "intersectionality": fairness_report_to_json(report),
    }
    _emit(args, payload, _demo_text)
    return 0 if report.passed else 1


# --- parser ------------------------------------------------------------------


def _add_common(sub, *, graph=False, dataset=False, context=False, target=False):
    sub.add_argument("--format", choices=("json", "text"), default="json",
                     help="output format (default: json)")
    sub.add_argument("--fact-budget", type=int, default=None,
                     help="cap on derived facts (default 10^6; FAIRGATE_FACT_BUDGET overrides)")
    if graph:
        sub.add_argument("--graph", help="causal graph file (.cg)")
    if dataset:
        sub.add_argument("--dataset", help="CSV dataset with a header row")
    if context:
        sub.add_argument("--context", help="context file (.ctx), one Var=value list")
        sub.add_argument("--context-inline", help="context given directly, e.g. 'Age=27, GAI=40K'")
    if target:
        sub.add_argument("--target", required=True, help="target variable / column")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairgate",
        description="Causal-graph fairness checks with exact arithmetic.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("paths", help="derive and dump all mediate and path facts")
    _add_common(p)
    p.add_argument("--graph", required=True, help="causal graph file (.cg)")
    p.set_defaults(handler=_cmd_paths)

    p = sub.add_parser("weaken", help="check one judgment weakening")
    _add_common(p)
    p.add_argument("--graph", required=True, help="causal graph file (.cg)")
    p.add_argument("--judgment", required=True, help="judgment file (.jdg)")
    p.add_argument("--attr", required=True, help="new attribution, e.g. MS=married")
    p.set_defaults(handler=_cmd_weaken)

    p = sub.add_parser("if", help="individual-fairness check for one attribute")
    _add_common(p, graph=True, dataset=True, context=True, target=True)
    p.add_argument("--protected", required=True, help="protected attribute")
    p.add_argument("--epsilon", default="0", help="tolerance as a rational (default 0)")
    p.add_argument("--mode", choices=("graphical", "empirical", "both"), default=None,
                   help="default: both when graph and dataset are given")
    p.set_defaults(handler=_cmd_if)

    p = sub.add_parser("intersect", help="intersectional check over attribute subsets")
    _add_common(p, graph=True, dataset=True, context=True, target=True)
    p.add_argument("--protected", required=True, help="comma-separated protected attributes")
    p.add_argument("--epsilon", default="0", help="tolerance as a rational (default 0)")
    p.add_argument("--mode", choices=("graphical", "empirical", "both"), default=None,
                   help="default: both when graph and dataset are given")
    p.add_argument("--subset-cap", type=int, default=DEFAULT_SUBSET_CAP,
                   help=f"max protected attributes (default {DEFAULT_SUBSET_CAP})")
    p.set_defaults(handler=_cmd_intersect)

    p = sub.add_parser("oracle", help="rule closure vs d-separation agreement sweep")
    _add_common(p)
    p.add_argument("--trials", type=int, default=None,
                   help="random graphs to test; omit for the exhaustive sweep")
    p.add_argument("--max-nodes", type=int, default=None,
                   help="node cap (default 5 exhaustive, 8 random)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed for random sweeps")
    p.add_argument("--edge-prob", type=float, default=0.3,
                   help="edge probability for random graphs (default 0.3)")
    p.set_defaults(handler=_cmd_oracle)

    p = sub.add_parser("demo-table1", help="generate the two-attribute counterexample")
    _add_common(p)
    p.set_defaults(handler=_cmd_demo_table1)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
