"""From Kripke countermodels to countermodels over bases, and the euclidean demo.

Pipeline for a formula ``phi`` false at world ``w`` of a model ``M``:

1. freshen ``M``: one new atom ``q_v`` per world, true everywhere except ``v``;
2. build, for every world, the maximally-consistent base ``B_w`` that derives
   exactly the atoms true at ``w`` (it avoids ``q_w``);
3. seed a relation with ``(B_w, B_v)`` for every edge and close it;
4. check the relation and compare truth at ``w`` with support at ``B_w`` for
   every subformula of ``phi``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Optional

import numpy as np

from .base import (
    DENSE_RULE_LIMIT,
    Base,
    RuleUniverse,
    SizeBoundError,
    build_universe,
    derives_atom,
    extend_max_consistent_avoiding,
    is_max_consistent,
    max_consistent_supersets,
)
from .formula import Formula, atoms_of, parse, render, subformulas
from .kripke import KripkeModel, find_countermodel
from .relations import (
    ConditionReport,
    GeneratedRelation,
    Logic,
    check_frame,
    check_modal,
    close_relation,
)
from .semantics import evaluator

MAX_BRIDGE_ATOMS = 4
# default premise bound is 2 only while the universe stays this small
COMPACT_RULE_LIMIT = 12


def _rule_count(n_atoms: int, max_premises: int) -> int:
    return n_atoms * sum(comb(n_atoms, k) for k in range(max_premises + 1))


def fresh_atom_names(m: KripkeModel, f: Formula) -> dict[str, str]:
    taken = set(atoms_of(f)) | set(m.val)
    out: dict[str, str] = {}
    for w in m.worlds:
        stem = "q_" + re.sub(r"[^a-z0-9_]", "_", w.lower())
        name, k = stem, 1
        while name in taken:
            name = f"{stem}_{k}"
            k += 1
        taken.add(name)
        out[w] = name
    return out


def freshen_model(m: KripkeModel, f: Formula) -> KripkeModel:
    """Add ``q_v`` with valuation ``W - {v}`` for every world ``v``."""
    fresh = fresh_atom_names(m, f)
    val = dict(m.val)
    for w, q in fresh.items():
        val[q] = frozenset(v for v in m.worlds if v != w)
    return KripkeModel(m.worlds, m.rel, val, fresh)


@lru_cache(maxsize=32)
def _universe(alphabet: tuple[str, ...], max_premises: int) -> RuleUniverse:
    return build_universe(alphabet, max_premises)


def bridge_universe(m2: KripkeModel, f: Formula, max_premises: Optional[int] = None) -> RuleUniverse:
    """Atoms of ``f`` followed by the fresh atoms, in world order.

    Without an explicit bound, premises go up to 2 when that keeps the universe
    at most 12 rules and up to 1 otherwise.
    """
    alphabet = tuple(sorted(atoms_of(f))) + tuple(m2.fresh[w] for w in m2.worlds)
    n = len(alphabet)
    if n > MAX_BRIDGE_ATOMS:
        raise SizeBoundError(
            f"bridge alphabet has {n} atoms; evaluation supports at most {MAX_BRIDGE_ATOMS}"
        )
    if max_premises is None:
        max_premises = 2 if _rule_count(n, min(2, n)) <= COMPACT_RULE_LIMIT else 1
    max_premises = min(max_premises, n)
    if _rule_count(n, max_premises) > DENSE_RULE_LIMIT:
        raise SizeBoundError(
            f"{_rule_count(n, max_premises)} rules exceed the evaluation limit {DENSE_RULE_LIMIT}"
        )
    return _universe(alphabet, max_premises)


def generating_set(m2: KripkeModel, w: str, u: RuleUniverse) -> Base:
    """``{=> a : a true at w} + {a => q_w, q_w => a : a false at w}``."""
    q = m2.fresh[w]
    rules = []
    for a in u.alphabet:
        if w in m2.val.get(a, ()):
            rules.append(u.rule([], a))
        elif a != q:
            rules.append(u.rule([a], q))
            rules.append(u.rule([q], a))
    return u.base_of(rules)


def world_base(m2: KripkeModel, w: str, u: RuleUniverse) -> Base:
    q = m2.fresh[w]
    start = generating_set(m2, w, u)
    if derives_atom(start, q):
        raise RuntimeError(f"generating set for {w} already derives {q}")
    return extend_max_consistent_avoiding(start, q)


def world_bases(m2: KripkeModel, u: RuleUniverse) -> dict[str, Base]:
    return {w: world_base(m2, w, u) for w in m2.worlds}


def build_bridge_relation(m2: KripkeModel, bases: dict[str, Base], logic: Logic | str) -> GeneratedRelation:
    u = next(iter(bases.values())).universe
    seeds = [(bases[a], bases[b]) for a, b in sorted(m2.rel)]
    return close_relation(seeds, u, logic, [bases[w] for w in m2.worlds])


# --------------------------------------------------------------------------
# reports


@dataclass
class AgreementCell:
    world: str
    formula: Formula
    kripke: bool
    bases: bool

    @property
    def agrees(self) -> bool:
        return self.kripke == self.bases


@dataclass
class BridgeReport:
    kind: str  # "soundness" or "euclidean"
    logic: Logic
    formula: Formula
    universe: RuleUniverse
    relation: GeneratedRelation
    modal: ConditionReport
    frame: ConditionReport
    verdict: str
    model: Optional[KripkeModel] = None
    world: Optional[str] = None
    freshened: Optional[KripkeModel] = None
    bases: dict[str, Base] = field(default_factory=dict)
    table: list[AgreementCell] = field(default_factory=list)
    target_holds: Optional[bool] = None
    notes: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.verdict == "success"

    @property
    def disagreements(self) -> list[AgreementCell]:
        return [c for c in self.table if not c.agrees]

    def relation_ok(self) -> bool:
        return self.modal.modal_ok and self.frame.frame_ok(self.logic)

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "logic": self.logic.value,
            "formula": render(self.formula),
            "verdict": self.verdict,
            "universe": self.universe.to_json(),
            "relation": self.relation.to_json(),
            "modal_check": self.modal.to_json(self.universe),
            "frame_check": self.frame.to_json(self.universe),
        }
        if self.model is not None:
            out["model"] = self.model.to_json()
            out["world"] = self.world
            out["freshened"] = self.freshened.to_json()
            out["world_bases"] = {w: b.render() for w, b in self.bases.items()}
            out["agreement"] = [
                {"world": c.world, "formula": render(c.formula), "kripke": c.kripke, "bases": c.bases}
                for c in self.table
            ]
            out["disagreements"] = len(self.disagreements)
            out["target_holds_at_world_base"] = self.target_holds
        if self.notes:
            out["notes"] = _jsonable(self.notes)
        return out

    def render_text(self) -> str:
        lines = [
            f"{self.kind} report: {self.verdict}",
            f"logic {self.logic.value}, formula {render(self.formula)}",
            f"universe {self.universe.describe()}",
        ]
        if self.model is not None:
            lines.append(f"countermodel {self.model.to_json()} at {self.world}")
            for w, b in self.bases.items():
                lines.append(f"  B_{w} = {b.render()}")
        lines.append(f"relation seeds: {len(self.relation.seeds)} ({self.modal.coverage})")
        lines.append("modal conditions: " + _verdict_line(self.modal.verdicts))
        lines.append("frame conditions: " + _verdict_line(self.frame.verdicts))
        if self.table:
            lines.append("agreement (world, subformula, kripke, bases):")
            for c in self.table:
                mark = "" if c.agrees else "  <-- disagreement"
                lines.append(f"  {c.world:>4}  {render(c.formula):<28} {int(c.kripke)} {int(c.bases)}{mark}")
            lines.append(f"formula supported at B_{self.world}: {self.target_holds}")
        for k, v in self.notes.items():
            lines.append(f"{k}: {v}")
        return "\n".join(lines)


def _verdict_line(v: dict[str, bool]) -> str:
    return ", ".join(f"{k}={'pass' if ok else 'FAIL'}" for k, ok in v.items())


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, Base):
        return x.render()
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def verify_agreement(
    m2: KripkeModel,
    bases: dict[str, Base],
    r: GeneratedRelation,
    f: Formula,
    logic: Logic | str,
) -> list[AgreementCell]:
    ev = evaluator(r, logic)
    cells = []
    for w in m2.worlds:
        for g in subformulas(f):
            cells.append(AgreementCell(w, g, m2.eval(w, g), ev.holds(bases[w], g)))
    return cells


def bridge_model(
    logic: Logic | str,
    f: Formula,
    m: KripkeModel,
    w: str,
    max_premises: Optional[int] = None,
) -> BridgeReport:
    """Run the construction on a given countermodel ``(m, w)`` of ``f``."""
    logic = Logic.parse(logic)
    m2 = freshen_model(m, f)
    u = bridge_universe(m2, f, max_premises)
    bases = world_bases(m2, u)
    rel = build_bridge_relation(m2, bases, logic)
    modal = check_modal(rel)
    frame = check_frame(rel, logic, conditions=logic.frame_conditions)
    table = verify_agreement(m2, bases, rel, f, logic)
    target = evaluator(rel, logic).holds(bases[w], f)
    notes = {
        "world_bases_max_consistent": all(is_max_consistent(b) for b in bases.values()),
        "world_bases_distinct": len({b.members for b in bases.values()}) == len(bases),
    }
    ok = modal.modal_ok and frame.frame_ok(logic) and all(c.agrees for c in table) and not target
    return BridgeReport(
        "soundness", logic, f, u, rel, modal, frame, "success" if ok else "failure",
        m, w, m2, bases, table, target, notes,
    )


def falsify_in_bes(
    logic: Logic | str, f: Formula, max_worlds: int = 3, max_premises: Optional[int] = None
) -> Optional[BridgeReport]:
    """Find a Kripke countermodel and carry it over to bases; ``None`` if there is none."""
    found = find_countermodel(logic, f, max_worlds)
    if found is None:
        return None
    m, w = found
    return bridge_model(logic, f, m, w, max_premises)


# --------------------------------------------------------------------------
# euclidean demo

LITERAL = "literal construction verified"
REPAIRED = "repaired construction verified"
NO_WITNESS = "no witness found in budget"


def _euclid_relation(u: RuleUniverse, seeds) -> GeneratedRelation:
    return GeneratedRelation(u, seeds, Logic.K5, (), transitive_closure=False, reflexive=False)


def euclidean_demo(u: Optional[RuleUniverse] = None, budget: int = 64) -> BridgeReport:
    """Relation that is modal and euclidean, with ``<>p`` but not ``[]<>p`` at a maximal base.

    Seeds ``(B,C), (C,C), (C,D), (E,D), (F,C)`` with ``C = {=> p}``,
    ``D = {=> q}`` and ``E``, ``F`` maximal above ``C``, then close under the
    inconsistent block and the downward copy. When the result is not
    euclidean, a bounded search adds forced pairs: ``(y, z)`` for every
    euclidean violation and ``(G, c)`` with ``G`` maximal above ``b`` for every
    violation ``(b, c)`` of condition (c).
    """
    if u is None:
        u = _universe(("p", "q", "r"), 1)
    for a in ("p", "q"):
        if a not in u.alphabet:
            raise ValueError(f"euclidean demo needs atom {a!r} in the universe")
    c = u.parse_base("=> p")
    d = u.parse_base("=> q")
    above_c = max_consistent_supersets(c)
    if len(above_c) < 2:
        raise ValueError(
            "euclidean demo needs two maximally-consistent supersets of {=> p}; "
            f"{u.describe()} has {len(above_c)}"
        )
    e, f_ = above_c[0], above_c[1]
    others = [Base(u, int(m)) for m in u.max_consistent_indices if int(m) not in (e.members, f_.members)]
    outside = [b for b in others if not c <= b]
    b = (outside or others)[0]
    literal = [(b, c), (c, c), (c, d), (e, d), (f_, c)]
    dia, boxdia = parse("<>p"), parse("[]<>p")

    def assess(seeds):
        rel = _euclid_relation(u, seeds)
        modal = check_modal(rel)
        frame = check_frame(rel, Logic.K5, conditions=("euclidean",))
        ev = evaluator(rel, Logic.K5)
        return rel, modal, frame, ev.holds(b, dia), ev.holds(b, boxdia)

    def good(a) -> bool:
        _, modal, frame, h_dia, h_boxdia = a
        return modal.modal_ok and frame.passed(["euclidean"]) and h_dia and not h_boxdia

    tried = 0
    first = assess(literal)
    tried += 1
    literal_verdicts = {**first[1].verdicts, **first[2].verdicts, "<>p": first[3], "[]<>p": first[4]}
    result, mode, added = None, NO_WITNESS, []
    if good(first):
        result, mode = first, LITERAL
    else:
        stack = [(tuple(_as_masks(literal)), first)]
        seen = {frozenset(stack[0][0])}
        while stack and tried < budget:
            seeds, a = stack.pop()
            rel, modal, frame, _, _ = a
            moves = _repair_moves(u, rel, modal, frame)
            for extra in reversed(moves):
                nxt = tuple(sorted(set(seeds) | set(extra)))
                if frozenset(nxt) in seen or tried >= budget:
                    continue
                seen.add(frozenset(nxt))
                cand = assess(nxt)
                tried += 1
                if good(cand):
                    result, mode = cand, REPAIRED
                    added = sorted(set(nxt) - set(_as_masks(literal)))
                    break
                stack.append((nxt, cand))
            if result is not None:
                break
    final = result or first
    rel, modal, frame, h_dia, h_boxdia = final
    notes = {
        "outcome": mode,
        "B": b.render(),
        "C": c.render(),
        "D": d.render(),
        "E": e.render(),
        "F": f_.render(),
        "literal_checks": literal_verdicts,
        "added_pairs": [[u.base(x).render(), u.base(y).render()] for x, y in added],
        "candidates_tried": tried,
        "holds(B, <>p)": h_dia,
        "holds(B, []<>p)": h_boxdia,
    }
    verdict = "success" if result is not None else "failure"
    return BridgeReport("euclidean", Logic.K5, parse("<>p -> []<>p"), u, rel, modal, frame,
                        verdict, notes=notes)


def _as_masks(pairs) -> list[tuple[int, int]]:
    return [(x.members, y.members) for x, y in pairs]


def _repair_moves(u: RuleUniverse, rel: GeneratedRelation, modal: ConditionReport,
                  frame: ConditionReport) -> list[list[tuple[int, int]]]:
    """Alternative pair sets to add next; forced additions form a single move."""
    if not all(modal.verdicts[k] for k in ("a", "b", "d")):
        return []
    m = rel.as_matrix()
    if not frame.verdicts["euclidean"]:
        # every euclidean consequence at once: R x y and R x z give R y z
        rows = m[m.any(axis=1)]
        forced = np.zeros_like(m)
        for row in np.unique(rows, axis=0):
            forced[np.ix_(row, row)] = True
        pairs = [tuple(map(int, p)) for p in np.argwhere(forced & ~m)]
        return [pairs] if pairs else []
    if not modal.verdicts["c"]:
        bad, c = modal.violations["c"][0]
        return [[(g.members, c)] for g in max_consistent_supersets(u.base(bad))]
    return []
