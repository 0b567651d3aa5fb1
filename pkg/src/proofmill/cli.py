"""Command-line front end.

Every subcommand is a thin adapter: parse the arguments, call the same
library functions any program would, format the result.  Exit status is
0 when the requested check fully succeeds, 1 when it runs but the
verdict is negative (not proved, proof fails checking, model invalid,
corpus mismatch, no countermodel found), and 2 on usage or input parse
errors.

Agent-indexed systems may be named bare (``RSBIAT``, ``SRSBIAT``) on
subcommands that also take a sequent; the agent alphabet is then read
off the ``E[...]`` operators in the sequent text, in order of first
occurrence.  ``model-eval`` infers the whole system from the model: a
serial operation selects the tree-context family, agent neighbourhood
tables select the agent-indexed family.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .calculus import (
    check_proof,
    cut_count,
    proof_from_json,
    proof_to_json,
    proof_size,
)
from .context import parse_sequent
from .corpus import load_corpus_dir, run_corpus, verdict_word
from .cutelim import CutEliminationError, eliminate_cuts
from .hilbert import (
    check_deduction,
    deduction_from_json,
    hilbert_to_sequent,
)
from .search import Proved, SearchBudget, prove
from .semantics import (
    Evaluator,
    Model,
    find_countermodel,
    model_from_json,
    model_to_json,
    sequent_valid,
    validate_model,
)
from .syntax import System, parse_system

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

_AGENT_TOKEN = re.compile(r"E\[([A-Za-z0-9_]+)\]")


class UsageError(Exception):
    pass


def _system_name(system: System) -> str:
    if system.agents:
        return f"{system.ident.value}:{','.join(system.agents)}"
    return system.ident.value


def _infer_agents(text: str) -> list[str]:
    seen: list[str] = []
    for name in _AGENT_TOKEN.findall(text):
        if name not in seen:
            seen.append(name)
    return seen


def _system_for(name: str, sequent_text: str) -> System:
    if ":" not in name and name.strip().upper() in ("RSBIAT", "SRSBIAT"):
        agents = _infer_agents(sequent_text)
        if agents:
            name = f"{name}:{','.join(agents)}"
    try:
        return parse_system(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse(text: str, system: System):
    try:
        return parse_sequent(text, system)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _load_model(path: str) -> Model:
    try:
        return model_from_json(_load_json(path))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _model_system(m: Model, sequent_text: str) -> System:
    agents = [k for k in m.neighbourhoods if k != "box"]
    for name in _infer_agents(sequent_text):
        if name not in agents:
            agents.append(name)
    serial = m.serial_op is not None
    if agents:
        ident = "SRSBIAT" if serial else "RSBIAT"
        return parse_system(f"{ident}:{','.join(agents)}")
    return parse_system("PCMILL" if serial else "MILL")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_prove(args) -> int:
    system = _system_for(args.system, args.sequent)
    seq = _parse(args.sequent, system)
    budget = SearchBudget(max_depth=args.depth) if args.depth else None
    result = prove(seq, budget)
    print(verdict_word(result, system))
    print(f"explored {result.explored} sequents, "
          f"peak depth {result.peak_depth}")
    if isinstance(result, Proved):
        if args.emit_proof:
            with open(args.emit_proof, "w") as fh:
                json.dump(proof_to_json(result.proof), fh, indent=2)
                fh.write("\n")
            print(f"proof written to {args.emit_proof}")
        return EXIT_OK
    hint = find_countermodel(seq, max_size=3, attempts=8)
    if hint is not None:
        print(f"countermodel hint: {len(hint.model.worlds)} worlds, "
              f"falsified at world {hint.world!r} "
              f"(try the countermodel subcommand)")
    return EXIT_FAIL


def _cmd_check_proof(args) -> int:
    try:
        p = proof_from_json(_load_json(args.path))
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{args.path}: {exc}") from None
    report = check_proof(p)
    if report.ok:
        print(f"ok: {p.conclusion.key}  [{_system_name(p.conclusion.system)},"
              f" {proof_size(p)} nodes, {cut_count(p)} cuts]")
        return EXIT_OK
    for path, msg in report.violations:
        print(f"at node {list(path)}: {msg}")
    return EXIT_FAIL


def _cmd_cut_eliminate(args) -> int:
    try:
        p = proof_from_json(_load_json(args.path))
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{args.path}: {exc}") from None
    try:
        cut_free, trace = eliminate_cuts(p)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    except CutEliminationError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    if args.trace:
        for i, step in enumerate(trace.steps, start=1):
            print(f"{i:4d}. {step.kind:11s} {step.formula.key}  "
                  f"at {list(step.path)}")
    print(f"cut-free proof of {cut_free.conclusion.key} "
          f"in {len(trace)} steps "
          f"({proof_size(p)} -> {proof_size(cut_free)} nodes)")
    if args.emit_proof:
        with open(args.emit_proof, "w") as fh:
            json.dump(proof_to_json(cut_free), fh, indent=2)
            fh.write("\n")
        print(f"proof written to {args.emit_proof}")
    return EXIT_OK


def _load_deduction(path: str):
    try:
        return deduction_from_json(_load_json(path))
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _cmd_hilbert_check(args) -> int:
    tree, system = _load_deduction(args.path)
    report = check_deduction(tree, system)
    if report.ok:
        print(f"ok: {tree.statement()}  [{_system_name(system)}]")
        return EXIT_OK
    for path, msg in report.violations:
        print(f"at node {list(path)}: {msg}")
    return EXIT_FAIL


def _cmd_hilbert_to_sequent(args) -> int:
    tree, system = _load_deduction(args.path)
    try:
        p = hilbert_to_sequent(tree, system)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    print(f"sequent proof of {p.conclusion.key}  "
          f"[{proof_size(p)} nodes, {cut_count(p)} cuts]")
    if args.emit_proof:
        with open(args.emit_proof, "w") as fh:
            json.dump(proof_to_json(p), fh, indent=2)
            fh.write("\n")
        print(f"proof written to {args.emit_proof}")
    return EXIT_OK


def _cmd_model_check(args) -> int:
    m = _load_model(args.model)
    name = args.system
    if ":" not in name and name.strip().upper() in ("RSBIAT", "SRSBIAT"):
        agents = [k for k in m.neighbourhoods if k != "box"]
        if agents:
            name = f"{name}:{','.join(agents)}"
    try:
        system = parse_system(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = validate_model(m, system)
    if report.ok:
        print(f"valid {_system_name(system)} model "
              f"({len(m.worlds)} worlds)")
        return EXIT_OK
    for msg in report.failures:
        print(msg)
    return EXIT_FAIL


def _cmd_model_eval(args) -> int:
    m = _load_model(args.model)
    system = _model_system(m, args.sequent)
    seq = _parse(args.sequent, system)
    if sequent_valid(m, seq):
        print(f"valid in the model  [{_system_name(system)}]")
        return EXIT_OK
    world = Evaluator(m).falsifying_world(seq)
    print(f"invalid: falsified at world {world!r}  "
          f"[{_system_name(system)}]")
    return EXIT_FAIL


def _cmd_countermodel(args) -> int:
    system = _system_for(args.system, args.sequent)
    seq = _parse(args.sequent, system)
    cm = find_countermodel(seq, max_size=args.max_size, seed=args.seed)
    if cm is None:
        print(f"no countermodel found (worlds <= {args.max_size}, "
              f"seed {args.seed}); this is not a provability claim")
        return EXIT_FAIL
    print(f"countermodel with {len(cm.model.worlds)} worlds, "
          f"falsified at world {cm.world!r}")
    print(json.dumps(model_to_json(cm.model), indent=2))
    return EXIT_OK


def _cmd_corpus(args) -> int:
    try:
        entries = load_corpus_dir(args.dir)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    results = run_corpus(entries)
    width = max(len(r.entry.entry_id) for r in results)
    failures = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        failures += not r.passed
        print(f"{mark}  {r.entry.entry_id:{width}s}  "
              f"{r.verdict}  (expected {r.entry.expected})")
    print(f"{len(results) - failures}/{len(results)} entries matched")
    return EXIT_OK if failures == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proofmill",
        description="Sequent proof search, proof checking, cut "
                    "elimination, Hilbert deductions and finite "
                    "resource-model semantics for modal extensions of "
                    "intuitionistic linear logic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="bounded backward proof search")
    p.add_argument("system", help="MILL, PCMILL, RSBIAT[:a,b], SRSBIAT[:a,b]")
    p.add_argument("sequent", help="e.g. 'p, p -o q |- q'")
    p.add_argument("--depth", type=int, default=None,
                   help="override the depth bound (default 4x complexity)")
    p.add_argument("--emit-proof", metavar="PATH",
                   help="write the found proof as JSON")
    p.set_defaults(fn=_cmd_prove)

    p = sub.add_parser("check-proof", help="verify a JSON proof object")
    p.add_argument("path")
    p.set_defaults(fn=_cmd_check_proof)

    p = sub.add_parser("cut-eliminate",
                       help="rewrite a proof to cut-free form")
    p.add_argument("path")
    p.add_argument("--trace", action="store_true",
                   help="print every reduction step")
    p.add_argument("--emit-proof", metavar="PATH",
                   help="write the cut-free proof as JSON")
    p.set_defaults(fn=_cmd_cut_eliminate)

    p = sub.add_parser("hilbert-check",
                       help="verify a JSON Hilbert deduction tree")
    p.add_argument("path")
    p.set_defaults(fn=_cmd_hilbert_check)

    p = sub.add_parser("hilbert-to-sequent",
                       help="translate a deduction tree to a sequent proof")
    p.add_argument("path")
    p.add_argument("--emit-proof", metavar="PATH",
                   help="write the translated proof as JSON")
    p.set_defaults(fn=_cmd_hilbert_to_sequent)

    p = sub.add_parser("model-check",
                       help="validate a JSON model against a system's "
                            "frame conditions")
    p.add_argument("model")
    p.add_argument("system")
    p.set_defaults(fn=_cmd_model_check)

    p = sub.add_parser("model-eval",
                       help="evaluate a sequent in a JSON model")
    p.add_argument("model")
    p.add_argument("sequent")
    p.set_defaults(fn=_cmd_model_eval)

    p = sub.add_parser("countermodel",
                       help="search random models for one falsifying "
                            "the sequent")
    p.add_argument("system")
    p.add_argument("sequent")
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_countermodel)

    p = sub.add_parser("corpus", help="run every entry in a corpus "
                                      "directory and compare verdicts")
    p.add_argument("dir")
    p.set_defaults(fn=_cmd_corpus)

    return parser


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
