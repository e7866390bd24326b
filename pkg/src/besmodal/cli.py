"""Command-line front end.

Exit status: 0 on success / valid / pass, 1 on invalid / fail, 2 on usage
errors, 3 when a size bound is exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .base import Base, RuleUniverse, SizeBoundError, build_universe
from .formula import FormulaSyntaxError, atoms_of, is_modal, parse, render
from .hilbert import HilbertProof, check_proof
from .kripke import KripkeModel, find_countermodel
from .lemmas import REGISTRY, run_suite
from .relations import Logic, check_frame, check_modal, relation_from_json
from .semantics import classical_evaluator, evaluator, valid_exhaustive, valid_sampled

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SIZE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--logic", help="K, KT, K4, S4 or K-euclidean (default K)")
    p.add_argument("--atoms", help="comma-separated alphabet, e.g. p,q (default: atoms of the formula, or p)")
    p.add_argument("--max-premises", type=int, help="rule premise bound (default 1; bridge picks its own)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="enumerate every gamma-modal relation")
    mode.add_argument("--samples", type=int, default=100, help="number of sampled relations (default 100)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--max-worlds", type=int, default=3, help="Kripke search bound (default 3)")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out", help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    top = argparse.ArgumentParser(prog="besmodal", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("eval", parents=[common], help="support of a formula at a base")
    p.add_argument("formula", help="formula text, or @FILE")
    p.add_argument("--base", required=True, help="base JSON file")
    p.add_argument("--relation", help="relation JSON file (omit for classical formulas)")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("valid", parents=[common], help="validity over a universe")
    p.add_argument("formula", help="formula text, or @FILE")
    p.set_defaults(run=cmd_valid)

    p = sub.add_parser("kripke", parents=[common], help="Kripke evaluation, or 'kripke find FORMULA'")
    p.add_argument("args", nargs="+", metavar="[find] FORMULA")
    p.add_argument("--model", help="model JSON file")
    p.add_argument("--world", help="world id")
    p.set_defaults(run=cmd_kripke)

    p = sub.add_parser("check-relation", parents=[common], help="modal and frame conditions of a relation")
    p.add_argument("relation", help="relation JSON file")
    p.set_defaults(run=cmd_check_relation)

    p = sub.add_parser("check-proof", parents=[common], help="check a Hilbert proof")
    p.add_argument("proof", help="proof JSON file")
    p.set_defaults(run=cmd_check_proof)

    p = sub.add_parser("bridge", parents=[common], help="carry a Kripke countermodel over to bases")
    p.add_argument("formula", help="formula text, or @FILE")
    p.set_defaults(run=cmd_bridge)

    p = sub.add_parser("euclid-demo", parents=[common], help="euclidean relation refuting <>p -> []<>p")
    p.add_argument("--budget", type=int, default=64, help="repair candidates to try (default 64)")
    p.set_defaults(run=cmd_euclid)

    p = sub.add_parser("lemmas", parents=[common], help="run the lemma suite")
    p.add_argument("pattern", nargs="?", default="*", help="check id glob or dotted prefix (default *)")
    p.add_argument("--budget", type=int, default=1000, help="cases per check (default 1000)")
    p.add_argument("--list", action="store_true", help="list check ids and statements")
    p.set_defaults(run=cmd_lemmas)
    return top


# --------------------------------------------------------------------------
# input helpers


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from None


def _formula(text: str):
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text().strip()
        except OSError as e:
            raise UsageError(f"cannot read {text[1:]}: {e.strerror}") from None
    return parse(text)


def _logic(args, default: Logic | str = Logic.K) -> Logic:
    try:
        return Logic.parse(args.logic or default)
    except ValueError:
        raise UsageError(f"unknown logic {args.logic!r}") from None


def _universe(args, f=None) -> RuleUniverse:
    if args.atoms:
        atoms = [a.strip() for a in args.atoms.split(",") if a.strip()]
    else:
        atoms = sorted(atoms_of(f)) if f is not None else []
        atoms = atoms or ["p"]
    if f is not None:
        missing = sorted(set(atoms_of(f)) - set(atoms))
        if missing:
            raise UsageError(f"formula atoms {missing} are not in --atoms")
    mp = 1 if args.max_premises is None else args.max_premises
    if mp < 0:
        raise UsageError("--max-premises must be >= 0")
    try:
        return build_universe(atoms, mp)
    except ValueError as e:
        if isinstance(e, SizeBoundError):
            raise
        raise UsageError(str(e)) from None


class Output:
    def __init__(self, args):
        self.format = args.format
        self.path = args.out
        self.chunks: list[str] = []

    def emit(self, data, text: str) -> None:
        self.chunks.append(json.dumps(data, indent=2) if self.format == "json" else text)

    def flush(self) -> None:
        body = "\n".join(self.chunks) + "\n"
        if self.path:
            Path(self.path).write_text(body)
        else:
            sys.stdout.write(body)


# --------------------------------------------------------------------------
# commands


def cmd_eval(args, out: Output) -> int:
    f = _formula(args.formula)
    if args.relation:
        rel = relation_from_json(_read_json(args.relation))
        u = rel.universe
        b = Base.from_json(u, _read_json(args.base))
        value = evaluator(rel, _logic(args)).holds(b, f)
    else:
        if is_modal(f):
            raise UsageError("modal formula needs --relation")
        u = _universe(args, f)
        b = Base.from_json(u, _read_json(args.base))
        value = classical_evaluator(u).holds(b, f)
    out.emit({"formula": render(f), "base": b.to_json(), "holds": value},
             f"{'supported' if value else 'not supported'}: {render(f)} at {b.render()}")
    return EXIT_OK if value else EXIT_FAIL


def cmd_valid(args, out: Output) -> int:
    f = _formula(args.formula)
    u = _universe(args, f)
    logic = _logic(args)
    if args.exhaustive:
        v = valid_exhaustive(u, logic, f)
    else:
        if args.samples < 1:
            raise UsageError("--samples must be >= 1")
        v = valid_sampled(u, logic, f, args.samples, args.seed)
    lines = [f"{v.status}: {render(f)} under {logic.value} ({v.coverage}, {v.relations_checked} relations)"]
    if v.invalid:
        lines.append(f"witness base: {v.witness_base.render()}")
        if v.witness_relation is not None:
            lines.append(f"witness relation: {json.dumps(v.witness_relation.to_json())}")
    out.emit(v.to_json(), "\n".join(lines))
    return EXIT_FAIL if v.invalid else EXIT_OK


def cmd_kripke(args, out: Output) -> int:
    logic = _logic(args)
    if args.args[0] == "find":
        if len(args.args) != 2:
            raise UsageError("usage: kripke find FORMULA")
        f = _formula(args.args[1])
        if args.max_worlds < 1:
            raise UsageError("--max-worlds must be >= 1")
        found = find_countermodel(logic, f, args.max_worlds)
        if found is None:
            out.emit({"formula": render(f), "logic": logic.value, "countermodel": None},
                     f"no countermodel for {render(f)} under {logic.value} within {args.max_worlds} worlds")
            return EXIT_FAIL
        m, w = found
        out.emit({"formula": render(f), "logic": logic.value, "countermodel": m.to_json(), "world": w},
                 f"countermodel {json.dumps(m.to_json())}, false at {w}")
        return EXIT_OK
    if len(args.args) != 1:
        raise UsageError("usage: kripke --model FILE --world W FORMULA")
    if not args.model or not args.world:
        raise UsageError("kripke evaluation needs --model and --world")
    f = _formula(args.args[0])
    try:
        m = KripkeModel.from_json(_read_json(args.model))
        value = m.eval(args.world, f)
    except (KeyError, ValueError) as e:
        raise UsageError(str(e)) from None
    out.emit({"formula": render(f), "world": args.world, "holds": value},
             f"{'true' if value else 'false'}: {render(f)} at {args.world}")
    return EXIT_OK if value else EXIT_FAIL


def cmd_check_relation(args, out: Output) -> int:
    data = _read_json(args.relation)
    rel = relation_from_json(data)
    logic = _logic(args, data.get("logic", Logic.K))
    modal = check_modal(rel, seed=args.seed)
    frame = check_frame(rel, logic, conditions=logic.frame_conditions)
    report = modal.merged(frame)
    ok = modal.modal_ok and frame.frame_ok(logic)
    data = {"logic": logic.value, "gamma_modal": ok, **report.to_json(rel.universe)}
    text = [f"{'gamma-modal' if ok else 'not gamma-modal'} for {logic.value} ({report.coverage})"]
    for k, v in report.verdicts.items():
        tag = " (informational)" if k in report.informational else ""
        text.append(f"  {k}: {'pass' if v else 'FAIL'}{tag}")
    out.emit(data, "\n".join(text))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check_proof(args, out: Output) -> int:
    try:
        pr = HilbertProof.from_json(_read_json(args.proof))
    except (KeyError, ValueError, TypeError) as e:
        if isinstance(e, FormulaSyntaxError):
            raise
        raise UsageError(f"malformed proof: {e}") from None
    res = check_proof(pr)
    text = "proof ok: " + render(pr.conclusion) if res.ok else f"proof rejected at step {res.step}: {res.reason}"
    out.emit(res.to_json(), text)
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_bridge(args, out: Output) -> int:
    from .bridge import falsify_in_bes

    f = _formula(args.formula)
    logic = _logic(args)
    rep = falsify_in_bes(logic, f, args.max_worlds, args.max_premises)
    if rep is None:
        out.emit({"formula": render(f), "logic": logic.value, "verdict": "no-countermodel"},
                 f"no Kripke countermodel for {render(f)} under {logic.value} within {args.max_worlds} worlds")
        return EXIT_FAIL
    out.emit(rep.to_json(), rep.render_text())
    return EXIT_OK if rep.success else EXIT_FAIL


def cmd_euclid(args, out: Output) -> int:
    from .bridge import euclidean_demo

    u = _universe(args) if args.atoms else None
    try:
        rep = euclidean_demo(u, args.budget)
    except ValueError as e:
        if isinstance(e, SizeBoundError):
            raise
        raise UsageError(str(e)) from None
    out.emit(rep.to_json(), rep.render_text())
    return EXIT_OK if rep.success else EXIT_FAIL


def cmd_lemmas(args, out: Output) -> int:
    if args.list:
        out.emit([{"id": c.id, "statement": c.statement} for c in REGISTRY.values()],
                 "\n".join(f"{c.id}: {c.statement}" for c in REGISTRY.values()))
        return EXIT_OK
    results = run_suite(args.pattern, args.budget, args.seed)
    if not results:
        raise UsageError(f"no check matches {args.pattern!r}")
    text = [f"{r.status.upper():4}  {r.id}  ({r.cases} cases)" for r in results]
    for r in results:
        if r.witness is not None:
            text.append(f"witness for {r.id}: {json.dumps(r.witness)}")
    out.emit([r.to_json() for r in results], "\n".join(text))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# --------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        # `kripke find --logic KT FORMULA`: options may split the positionals
        if extra and args.command == "kripke" and not any(x.startswith("-") for x in extra):
            args.args += extra
        elif extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as e:
        return int(e.code or 0)
    out = Output(args)
    try:
        code = args.run(args, out)
    except SizeBoundError as e:
        print(f"size bound: {e}", file=sys.stderr)
        return EXIT_SIZE
    except (UsageError, FormulaSyntaxError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyError, ValueError) as e:
        # malformed JSON inputs: unknown rules, atoms or worlds
        print(f"error: bad input: {e}", file=sys.stderr)
        return EXIT_USAGE
    out.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
