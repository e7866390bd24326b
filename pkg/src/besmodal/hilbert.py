"""Hilbert proofs for K, KT, K4, S4 (and the euclidean extension).

Schemas are matched on the sugar-free AST, so axiom 3 reads
``((phi -> bot) -> (psi -> bot)) -> (psi -> phi)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

from .formula import (
    BOT,
    Atom,
    Bottom,
    Box,
    Diamond,
    Formula,
    Implies,
    depth,
    enumerate_formulas,
    parse,
    render,
)
from .relations import Logic


@dataclass(frozen=True)
class Meta:
    """Schema metavariable."""

    name: str


_P, _Q, _R = Meta("phi"), Meta("psi"), Meta("chi")


def _imp(a, b):
    return Implies(a, b)


class Axiom(str, Enum):
    AX1 = "AX1"
    AX2 = "AX2"
    AX3 = "AX3"
    K = "AXK"
    T = "AXT"
    FOUR = "AX4"
    FIVE = "AX5"

    @property
    def schema(self):
        return _SCHEMAS[self]

    @classmethod
    def parse(cls, name: str) -> "Axiom":
        key = name.upper().replace("AXIOM", "AX")
        aliases = {"AXK": "AXK", "K": "AXK", "T": "AXT", "4": "AX4", "5": "AX5",
                   "AX1": "AX1", "AX2": "AX2", "AX3": "AX3", "AXT": "AXT",
                   "AX4": "AX4", "AX5": "AX5", "1": "AX1", "2": "AX2", "3": "AX3"}
        if key not in aliases:
            raise ValueError(f"unknown axiom {name!r}")
        return cls(aliases[key])


_SCHEMAS = {
    Axiom.AX1: _imp(_P, _imp(_Q, _P)),
    Axiom.AX2: _imp(_imp(_P, _imp(_Q, _R)), _imp(_imp(_P, _Q), _imp(_P, _R))),
    Axiom.AX3: _imp(_imp(_imp(_P, BOT), _imp(_Q, BOT)), _imp(_Q, _P)),
    Axiom.K: _imp(Box(_imp(_P, _Q)), _imp(Box(_P), Box(_Q))),
    Axiom.T: _imp(Box(_P), _P),
    Axiom.FOUR: _imp(Box(_P), Box(Box(_P))),
    Axiom.FIVE: _imp(Diamond(_P), Box(Diamond(_P))),
}


def axioms_of(logic: Logic | str) -> tuple[Axiom, ...]:
    logic = Logic.parse(logic)
    out = [Axiom.AX1, Axiom.AX2, Axiom.AX3, Axiom.K]
    if logic.reflexive:
        out.append(Axiom.T)
    if logic.transitive:
        out.append(Axiom.FOUR)
    if logic.euclidean:
        out.append(Axiom.FIVE)
    return tuple(out)


def _match(pattern, f: Formula, sub: dict) -> bool:
    if isinstance(pattern, Meta):
        if pattern.name in sub:
            return sub[pattern.name] == f
        sub[pattern.name] = f
        return True
    if isinstance(pattern, Bottom):
        return isinstance(f, Bottom)
    if isinstance(pattern, Atom):
        return pattern == f
    if isinstance(pattern, Implies):
        return isinstance(f, Implies) and _match(pattern.left, f.left, sub) and _match(pattern.right, f.right, sub)
    if isinstance(pattern, (Box, Diamond)):
        return type(f) is type(pattern) and _match(pattern.body, f.body, sub)
    return False


def match_axiom(f: Formula, schema: Axiom | str) -> Optional[dict[str, Formula]]:
    """Substitution making ``f`` an instance of ``schema``, or ``None``."""
    ax = schema if isinstance(schema, Axiom) else Axiom.parse(schema)
    sub: dict[str, Formula] = {}
    return sub if _match(ax.schema, f, sub) else None


def instantiate(schema: Axiom | str, **sub: Formula) -> Formula:
    ax = schema if isinstance(schema, Axiom) else Axiom.parse(schema)

    def go(p):
        if isinstance(p, Meta):
            return sub[p.name]
        if isinstance(p, Implies):
            return Implies(go(p.left), go(p.right))
        if isinstance(p, Box):
            return Box(go(p.body))
        if isinstance(p, Diamond):
            return Diamond(go(p.body))
        return p

    return go(ax.schema)


# --------------------------------------------------------------------------
# proofs


@dataclass(frozen=True)
class ProofStep:
    formula: Formula
    by: str  # an Axiom value, "MP" or "NEC"
    refs: tuple[int, ...] = ()

    def to_json(self) -> dict:
        out = {"formula": render(self.formula), "by": self.by}
        if self.refs:
            out["refs"] = list(self.refs)
        return out


@dataclass
class HilbertProof:
    logic: Logic
    steps: list[ProofStep] = field(default_factory=list)

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1].formula

    def to_json(self) -> dict:
        return {"logic": self.logic.value, "steps": [s.to_json() for s in self.steps]}

    @classmethod
    def from_json(cls, data: Union[dict, str]) -> "HilbertProof":
        if isinstance(data, str):
            data = json.loads(data)
        steps = []
        for s in data["steps"]:
            by = s["by"].upper()
            if by not in ("MP", "NEC"):
                by = Axiom.parse(by).value
            steps.append(ProofStep(parse(s["formula"]), by, tuple(s.get("refs", ()))))
        return cls(Logic.parse(data["logic"]), steps)


@dataclass(frozen=True)
class ProofCheck:
    ok: bool
    step: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        if self.ok:
            return {"ok": True}
        return {"ok": False, "step": self.step, "reason": self.reason}


def check_proof(pr: HilbertProof) -> ProofCheck:
    """Check every step; report the first failing one.

    ``MP`` takes refs ``[i, j]`` with step ``j`` equal to ``step_i -> this``
    (the two refs may come in either order). ``NEC`` takes ``[i]``; proofs have
    no open assumptions, so any earlier step is a theorem.
    """
    if not pr.steps:
        return ProofCheck(False, 0, "empty proof")
    allowed = axioms_of(pr.logic)
    for k, s in enumerate(pr.steps):
        if any(not 0 <= i < k for i in s.refs):
            return ProofCheck(False, k, f"reference out of range in {list(s.refs)}")
        if s.by == "MP":
            if len(s.refs) != 2:
                return ProofCheck(False, k, "MP needs two references")
            a, b = (pr.steps[i].formula for i in s.refs)
            if b != Implies(a, s.formula) and a != Implies(b, s.formula):
                return ProofCheck(False, k, "MP premises do not fit")
        elif s.by == "NEC":
            if len(s.refs) != 1:
                return ProofCheck(False, k, "NEC needs one reference")
            if s.formula != Box(pr.steps[s.refs[0]].formula):
                return ProofCheck(False, k, "NEC conclusion is not box of its premise")
        else:
            try:
                ax = Axiom.parse(s.by)
            except ValueError:
                return ProofCheck(False, k, f"unknown justification {s.by!r}")
            if ax not in allowed:
                return ProofCheck(False, k, f"axiom {ax.value} not in {pr.logic.value}")
            if s.refs:
                return ProofCheck(False, k, "axiom steps take no references")
            if match_axiom(s.formula, ax) is None:
                return ProofCheck(False, k, f"not an instance of {ax.value}")
    return ProofCheck(True)


# --------------------------------------------------------------------------
# proof builders


def axiom_proof(logic: Logic | str, ax: Axiom, **sub: Formula) -> HilbertProof:
    return HilbertProof(Logic.parse(logic), [ProofStep(instantiate(ax, **sub), ax.value)])


def identity_proof(logic: Logic | str, phi: Formula) -> HilbertProof:
    """The five-line derivation of ``phi -> phi`` from axioms 1 and 2."""
    pp = Implies(phi, phi)
    s1 = instantiate(Axiom.AX1, phi=phi, psi=pp)
    s2 = instantiate(Axiom.AX2, phi=phi, psi=pp, chi=phi)
    s3 = Implies(Implies(phi, pp), pp)
    s4 = instantiate(Axiom.AX1, phi=phi, psi=phi)
    return HilbertProof(Logic.parse(logic), [
        ProofStep(s1, Axiom.AX1.value),
        ProofStep(s2, Axiom.AX2.value),
        ProofStep(s3, "MP", (0, 1)),
        ProofStep(s4, Axiom.AX1.value),
        ProofStep(pp, "MP", (3, 2)),
    ])


def necessitate(pr: HilbertProof) -> HilbertProof:
    steps = list(pr.steps)
    steps.append(ProofStep(Box(pr.conclusion), "NEC", (len(steps) - 1,)))
    return HilbertProof(pr.logic, steps)


def proof_corpus(logic: Logic | str, alphabet: Sequence[str], max_depth: int) -> list[HilbertProof]:
    """Checked proofs whose conclusions have depth <= ``max_depth``.

    Covers single-step axiom instances over atoms and ``bot``, the identity
    derivation, and necessitation of anything already in the corpus.
    """
    logic = Logic.parse(logic)
    leaves = [f for f in enumerate_formulas(alphabet, max_depth, True) if depth(f) <= max_depth - 1]
    out: list[HilbertProof] = []
    seen: set[Formula] = set()

    def add(pr: HilbertProof) -> None:
        if depth(pr.conclusion) <= max_depth and pr.conclusion not in seen:
            seen.add(pr.conclusion)
            out.append(pr)

    metas = {ax: sorted({m.name for m in _metas(ax.schema)}) for ax in axioms_of(logic)}
    for ax, names in metas.items():
        for combo in itertools.product(leaves, repeat=len(names)):
            add(axiom_proof(logic, ax, **dict(zip(names, combo))))
    for phi in leaves:
        add(identity_proof(logic, phi))
    changed = True
    while changed:
        changed = False
        for pr in list(out):
            nxt = necessitate(pr)
            if depth(nxt.conclusion) <= max_depth and nxt.conclusion not in seen:
                add(nxt)
                changed = True
    return out


def _metas(p) -> set[Meta]:
    if isinstance(p, Meta):
        return {p}
    if isinstance(p, Implies):
        return _metas(p.left) | _metas(p.right)
    if isinstance(p, (Box, Diamond)):
        return _metas(p.body)
    return set()
