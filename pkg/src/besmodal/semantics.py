"""Support at bases: classical and modal evaluation, entailment, validity verdicts.

Every formula is evaluated at all bases of the universe at once, as a boolean
vector indexed by member mask. The superset quantifier of implication, box and
diamond is a single ``sup_all`` pass over the lattice, and each subformula is
computed once per (relation, logic) pair.

Clauses, for ``v(phi)`` the set of bases supporting ``phi``:

* atom ``p``: ``p`` is in the closure of the base
* ``bot``: the base is inconsistent
* ``phi -> psi``: every superset supporting ``phi`` supports ``psi``
* ``[]phi``: every successor of every superset supports ``phi``
* ``<>phi``: every superset has some successor supporting ``phi``
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from . import lattice
from .base import Base, RuleUniverse
from .formula import Atom, Bottom, Box, Diamond, Formula, Implies, is_modal, render
from .relations import (
    ENUMERATION_BASE_LIMIT,
    Logic,
    Relation,
    enumerate_modal_relations,
    relation_from_json,
    sample_modal_relation,
)

VALID = "valid-over-universe"
INVALID = "invalid"


class ClassicalModeError(ValueError):
    """A modal operator was met while evaluating without a relation."""


class Evaluator:
    """Memoized truth vectors for one universe and (optionally) one relation."""

    def __init__(self, universe: RuleUniverse, relation: Optional[Relation] = None,
                 logic: Logic | str = Logic.K):
        universe.require_dense()
        if relation is not None and relation.universe != universe:
            raise ValueError("relation belongs to a different universe")
        self.universe = universe
        self.relation = relation
        self.logic = Logic.parse(logic)
        self._n = universe.n_rules
        self._memo: dict[Formula, np.ndarray] = {}

    @property
    def classical(self) -> bool:
        return self.relation is None

    def truth(self, f: Formula) -> np.ndarray:
        """Boolean vector: entry ``m`` is support of ``f`` at the base with mask ``m``."""
        hit = self._memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Atom):
            i = self.universe.alphabet.index(f.name)
            out = (self.universe.closures >> i & 1).astype(bool)
        elif isinstance(f, Bottom):
            out = self.universe.inconsistent_mask
        elif isinstance(f, Implies):
            out = lattice.sup_all(~self.truth(f.left) | self.truth(f.right), self._n)
        elif isinstance(f, (Box, Diamond)):
            if self.relation is None:
                raise ClassicalModeError(f"modal formula {render(f)} in classical mode")
            body = self.truth(f.body)
            step = self.relation.box_pre(body) if isinstance(f, Box) else self.relation.dia_pre(body)
            out = lattice.sup_all(step, self._n)
        else:
            raise TypeError(f"not a formula: {f!r}")
        out.flags.writeable = False
        self._memo[f] = out
        return out

    def holds(self, b: Base | int, f: Formula) -> bool:
        m = b.members if isinstance(b, Base) else b
        return bool(self.truth(f)[m])

    def entailment(self, gamma: Sequence[Formula], f: Formula) -> np.ndarray:
        """Vector of bases where every superset supporting all of ``gamma`` supports ``f``."""
        prem = np.ones(self.universe.n_bases, dtype=bool)
        for g in gamma:
            prem &= self.truth(g)
        return lattice.sup_all(~prem | self.truth(f), self._n)

    def entails(self, b: Base | int, gamma: Sequence[Formula], f: Formula) -> bool:
        m = b.members if isinstance(b, Base) else b
        return bool(self.entailment(gamma, f)[m])


@lru_cache(maxsize=16)
def classical_evaluator(u: RuleUniverse) -> Evaluator:
    return Evaluator(u, None)


_modal_cache: "weakref.WeakKeyDictionary[object, dict[Logic, Evaluator]]" = weakref.WeakKeyDictionary()


def evaluator(r: Relation, logic: Logic | str = Logic.K) -> Evaluator:
    """Shared evaluator for ``(r, logic)``; memo entries live as long as ``r``."""
    logic = Logic.parse(logic)
    per = _modal_cache.setdefault(r, {})
    if logic not in per:
        per[logic] = Evaluator(r.universe, r, logic)
    return per[logic]


def holds_classical(b: Base, f: Formula) -> bool:
    if is_modal(f):
        raise ClassicalModeError(f"modal formula {render(f)} in classical mode")
    return classical_evaluator(b.universe).holds(b, f)


def holds(b: Base, r: Relation, f: Formula, logic: Logic | str = Logic.K) -> bool:
    """Support of ``f`` at ``b`` under ``r``. ``r`` is assumed to be modal."""
    return evaluator(r, logic).holds(b, f)


def entails(b: Base, r: Optional[Relation], gamma: Sequence[Formula], f: Formula,
            logic: Logic | str = Logic.K) -> bool:
    ev = classical_evaluator(b.universe) if r is None else evaluator(r, logic)
    return ev.entails(b, gamma, f)


# --------------------------------------------------------------------------
# verdicts


@dataclass
class Verdict:
    status: str
    formula: Formula
    logic: Logic
    coverage: str
    relations_checked: int = 0
    witness_base: Optional[Base] = None
    witness_relation: Optional[Relation] = field(default=None, repr=False)

    @property
    def valid(self) -> bool:
        return self.status == VALID

    @property
    def invalid(self) -> bool:
        return self.status == INVALID

    def recheck(self) -> bool:
        """True when the stored witness really falsifies the formula."""
        if not self.invalid:
            return False
        return not holds(self.witness_base, self.witness_relation, self.formula, self.logic)

    def to_json(self) -> dict:
        out = {
            "formula": render(self.formula),
            "logic": self.logic.value,
            "status": self.status,
            "coverage": self.coverage,
            "relations_checked": self.relations_checked,
        }
        if self.invalid:
            out["witness"] = {
                "base": self.witness_base.to_json(),
                "base_text": self.witness_base.render(),
            }
            if self.witness_relation is not None:
                out["witness"]["relation"] = self.witness_relation.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Verdict":
        from .formula import parse

        v = cls(data["status"], parse(data["formula"]), Logic.parse(data["logic"]),
                data["coverage"], data.get("relations_checked", 0))
        if "witness" in data and "relation" in data["witness"]:
            rel = relation_from_json(data["witness"]["relation"])
            v.witness_relation = rel
            v.witness_base = Base.from_json(rel.universe, data["witness"]["base"])
        return v


def _first_failure(r: Relation, f: Formula, logic: Logic) -> Optional[int]:
    t = evaluator(r, logic).truth(f)
    if t.all():
        return None
    return int(np.flatnonzero(~t)[0])


def valid_exhaustive(u: RuleUniverse, logic: Logic | str, f: Formula) -> Verdict:
    """Check ``f`` at every base under every gamma-modal relation of a tiny universe."""
    logic = Logic.parse(logic)
    count = 0
    for r in _enumerated(u, logic):
        count += 1
        bad = _first_failure(r, f, logic)
        if bad is not None:
            return Verdict(INVALID, f, logic, "exhaustive", count, u.base(bad), r)
    return Verdict(VALID, f, logic, "exhaustive", count)


@lru_cache(maxsize=16)
def _enumerated(u: RuleUniverse, logic: Logic) -> tuple:
    if u.n_bases > ENUMERATION_BASE_LIMIT:
        from .base import SizeBoundError

        raise SizeBoundError(
            f"exhaustive validity needs <= {ENUMERATION_BASE_LIMIT} bases, universe has {u.n_bases}"
        )
    return tuple(enumerate_modal_relations(u, logic))


def relation_seeds(seed: int, n: int) -> list[int]:
    """Per-relation sampler seeds derived from one master seed."""
    ss = np.random.SeedSequence(seed)
    return [int(x) for x in ss.generate_state(n, dtype=np.uint32)]


@lru_cache(maxsize=4096)
def cached_sample(u: RuleUniverse, logic: Logic, seed: int):
    return sample_modal_relation(u, logic, seed)


def sampled_relations(u: RuleUniverse, logic: Logic | str, n: int, seed: int) -> list:
    logic = Logic.parse(logic)
    return [cached_sample(u, logic, s) for s in relation_seeds(seed, n)]


def valid_sampled(u: RuleUniverse, logic: Logic | str, f: Formula, n: int, seed: int) -> Verdict:
    """Check ``f`` at every base under ``n`` seeded gamma-modal relations.

    Never reports validity: the best outcome is ``no-counterexample-found(n)``.
    """
    logic = Logic.parse(logic)
    coverage = f"sampled({n}, {seed})"
    for k, r in enumerate(sampled_relations(u, logic, n, seed), 1):
        bad = _first_failure(r, f, logic)
        if bad is not None:
            return Verdict(INVALID, f, logic, coverage, k, u.base(bad), r)
    return Verdict(f"no-counterexample-found({n})", f, logic, coverage, n)


def valid_classical(u: RuleUniverse, f: Formula) -> Verdict:
    t = classical_evaluator(u).truth(f)
    if t.all():
        return Verdict(VALID, f, Logic.K, "exhaustive")
    bad = int(np.flatnonzero(~t)[0])
    return Verdict(INVALID, f, Logic.K, "exhaustive", 0, u.base(bad), None)


def supported_everywhere(ev: Evaluator, formulas: Iterable[Formula]) -> bool:
    return all(ev.truth(f).all() for f in formulas)
