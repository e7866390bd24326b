"""Finite rule universes, bases as bitsets, closure and maximal consistency.

A :class:`RuleUniverse` lists every rule ``L => p`` with ``|L| <= max_premises``
over a finite atom alphabet, in canonical order (conclusion index, then the
premise bitmask as an unsigned integer). A :class:`Base` is a subset of those
rules, stored as a bitmask over the universe's rule list, so the base with
member mask ``m`` is also the ``m``-th point of the lattice of all bases.

Inconsistency is the finite reading of the falsum clause: a base is
inconsistent when its closure is the whole alphabet.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import lattice
from .formula import AtomAlphabet

# exhaustive superset walks refuse more free rules than this
EXHAUSTIVE_RULE_LIMIT = 24
# dense per-base arrays are built only up to this many rules
DENSE_RULE_LIMIT = 22


class SizeBoundError(ValueError):
    """Raised when an exhaustive operation would exceed its size bound."""


@dataclass(frozen=True, order=True)
class BaseRule:
    conclusion: int
    premises: int  # bitmask over atom indices

    def premise_indices(self) -> list[int]:
        return [i for i in range(self.premises.bit_length()) if self.premises >> i & 1]

    def render(self, alphabet: Sequence[str]) -> str:
        prem = ", ".join(alphabet[i] for i in self.premise_indices())
        return f"{prem} => {alphabet[self.conclusion]}".strip()

    def to_json(self, alphabet: Sequence[str]) -> dict:
        return {
            "premises": [alphabet[i] for i in self.premise_indices()],
            "conclusion": alphabet[self.conclusion],
        }


@dataclass(frozen=True)
class RuleUniverse:
    alphabet: AtomAlphabet
    max_premises: int
    rules: tuple[BaseRule, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        alphabet = AtomAlphabet(self.alphabet)
        object.__setattr__(self, "alphabet", alphabet)
        n = len(alphabet)
        if not 1 <= self.max_premises <= n:
            raise ValueError(
                f"max_premises must be in [1, {n}], got {self.max_premises}"
            )
        rules = [
            BaseRule(p, mask)
            for p in range(n)
            for mask in range(1 << n)
            if mask.bit_count() <= self.max_premises
        ]
        object.__setattr__(self, "rules", tuple(sorted(rules)))

    # -- basic facts -----------------------------------------------------

    @property
    def n_atoms(self) -> int:
        return len(self.alphabet)

    @property
    def n_rules(self) -> int:
        return len(self.rules)

    @property
    def n_bases(self) -> int:
        return 1 << self.n_rules

    @property
    def full_atoms(self) -> int:
        return (1 << self.n_atoms) - 1

    @property
    def full_members(self) -> int:
        return (1 << self.n_rules) - 1

    def describe(self) -> str:
        return (
            f"atoms={','.join(self.alphabet)} max_premises={self.max_premises} "
            f"rules={self.n_rules} bases={self.n_bases}"
        )

    def rule_index(self, rule: BaseRule) -> int:
        return self._rule_pos[rule]

    @cached_property
    def _rule_pos(self) -> dict[BaseRule, int]:
        return {r: i for i, r in enumerate(self.rules)}

    def rule(self, premises: Iterable[str], conclusion: str) -> BaseRule:
        mask = 0
        for a in premises:
            mask |= 1 << self.alphabet.index(a)
        r = BaseRule(self.alphabet.index(conclusion), mask)
        if r not in self._rule_pos:
            raise KeyError(f"rule {r.render(self.alphabet)} not in universe")
        return r

    def base(self, members: int) -> "Base":
        return Base(self, members)

    def base_of(self, rules: Iterable[BaseRule]) -> "Base":
        m = 0
        for r in rules:
            m |= 1 << self.rule_index(r)
        return Base(self, m)

    def parse_base(self, text: str) -> "Base":
        """Parse ``"=> p; p => q"`` into a base (``;`` separates rules)."""
        rules = []
        for chunk in filter(None, (c.strip() for c in text.split(";"))):
            lhs, _, rhs = chunk.partition("=>")
            prem = [a.strip() for a in lhs.split(",") if a.strip()]
            rules.append(self.rule(prem, rhs.strip()))
        return self.base_of(rules)

    # -- dense tables ----------------------------------------------------

    def require_dense(self) -> None:
        if self.n_rules > DENSE_RULE_LIMIT:
            raise SizeBoundError(
                f"universe has {self.n_rules} rules; dense evaluation supports "
                f"at most {DENSE_RULE_LIMIT}"
            )

    @cached_property
    def closures(self) -> np.ndarray:
        """Closure (atom bitmask) of every base, indexed by member mask."""
        self.require_dense()
        size = self.n_bases
        idx = np.arange(size, dtype=np.int64)
        closed = np.zeros(size, dtype=np.int64)
        members = [((idx >> j) & 1).astype(bool) for j in range(self.n_rules)]
        changed = True
        while changed:
            changed = False
            for j, r in enumerate(self.rules):
                fire = members[j] & ((closed & r.premises) == r.premises)
                fire &= (closed >> r.conclusion & 1) == 0
                if fire.any():
                    closed[fire] |= 1 << r.conclusion
                    changed = True
        return closed

    @cached_property
    def inconsistent_mask(self) -> np.ndarray:
        return self.closures == self.full_atoms

    @cached_property
    def consistent_mask(self) -> np.ndarray:
        return ~self.inconsistent_mask

    @cached_property
    def max_consistent_mask(self) -> np.ndarray:
        """Consistent bases where every one-rule extension is inconsistent."""
        inc = self.inconsistent_mask
        ok = self.consistent_mask.copy()
        n = self.n_rules
        for i in range(n):
            w_ok = lattice._split(ok, n, i)
            w_inc = lattice._split(inc, n, i)
            w_ok[:, 0] &= w_inc[:, 1]
        return ok

    @cached_property
    def max_consistent_indices(self) -> np.ndarray:
        return np.flatnonzero(self.max_consistent_mask)

    def to_json(self) -> dict:
        return {"atoms": list(self.alphabet), "max_premises": self.max_premises}

    @classmethod
    def from_json(cls, data: dict) -> "RuleUniverse":
        return cls(AtomAlphabet(data["atoms"]), int(data["max_premises"]))


def build_universe(alphabet: Sequence[str], max_premises: int) -> RuleUniverse:
    """All rules with at most ``max_premises`` premises, canonically ordered."""
    u = RuleUniverse(AtomAlphabet(alphabet), max_premises)
    n = u.n_atoms
    assert u.n_rules == n * sum(comb(n, k) for k in range(max_premises + 1))
    return u


@dataclass(frozen=True)
class Base:
    universe: RuleUniverse
    members: int

    def __post_init__(self):
        if self.members < 0 or self.members > self.universe.full_members:
            raise ValueError("member mask outside universe")

    @cached_property
    def closure(self) -> int:
        return _forward_chain(self.universe.rules, self.members)

    @property
    def inconsistent(self) -> bool:
        return self.closure == self.universe.full_atoms

    @property
    def consistent(self) -> bool:
        return not self.inconsistent

    @property
    def rules(self) -> list[BaseRule]:
        return [r for i, r in enumerate(self.universe.rules) if self.members >> i & 1]

    def __len__(self) -> int:
        return self.members.bit_count()

    def __contains__(self, rule: BaseRule) -> bool:
        return bool(self.members >> self.universe.rule_index(rule) & 1)

    def __le__(self, other: "Base") -> bool:
        return self.members & ~other.members == 0

    def __lt__(self, other: "Base") -> bool:
        return self <= other and self.members != other.members

    def add(self, *rules: BaseRule) -> "Base":
        m = self.members
        for r in rules:
            m |= 1 << self.universe.rule_index(r)
        return Base(self.universe, m)

    def union(self, other: "Base") -> "Base":
        return Base(self.universe, self.members | other.members)

    def render(self) -> str:
        a = self.universe.alphabet
        return "{" + "; ".join(r.render(a) for r in self.rules) + "}"

    def __repr__(self) -> str:
        return f"Base({self.render()})"

    def to_json(self) -> dict:
        a = self.universe.alphabet
        return {"rules": [r.to_json(a) for r in self.rules]}

    @classmethod
    def from_json(cls, universe: RuleUniverse, data: dict) -> "Base":
        return universe.base_of(
            universe.rule(r["premises"], r["conclusion"]) for r in data["rules"]
        )


def _forward_chain(rules: Sequence[BaseRule], members: int, seed: int = 0) -> int:
    closed = seed
    active = [r for i, r in enumerate(rules) if members >> i & 1]
    changed = True
    while changed:
        changed = False
        for r in active:
            if r.premises & ~closed == 0 and not closed >> r.conclusion & 1:
                closed |= 1 << r.conclusion
                changed = True
    return closed


def closure(b: Base) -> int:
    """Least atom set closed under the rules of ``b`` (as a bitmask)."""
    return b.closure


def closure_atoms(b: Base) -> set[str]:
    a = b.universe.alphabet
    return {a[i] for i in range(len(a)) if b.closure >> i & 1}


def derives_atom(b: Base, atom: str | int) -> bool:
    i = b.universe.alphabet.index(atom) if isinstance(atom, str) else atom
    if not 0 <= i < b.universe.n_atoms:
        raise KeyError(f"unknown atom index {i}")
    return bool(b.closure >> i & 1)


def is_inconsistent(b: Base) -> bool:
    return b.inconsistent


def _free_bits(b: Base) -> list[int]:
    free = b.universe.full_members & ~b.members
    return [i for i in range(b.universe.n_rules) if free >> i & 1]


def supersets(b: Base) -> Iterator[Base]:
    """All supersets of ``b`` in the universe, ``b`` first.

    Order: binary counting over the free rules, lowest rule index fastest.
    """
    free = _free_bits(b)
    if len(free) > EXHAUSTIVE_RULE_LIMIT:
        raise SizeBoundError(
            f"{len(free)} free rules exceed the exhaustive limit "
            f"{EXHAUSTIVE_RULE_LIMIT}"
        )
    u = b.universe
    for k in range(1 << len(free)):
        m = b.members
        for j, bit in enumerate(free):
            if k >> j & 1:
                m |= 1 << bit
        yield Base(u, m)


def is_max_consistent(b: Base) -> bool:
    if b.inconsistent:
        return False
    rules = b.universe.rules
    full = b.universe.full_atoms
    return all(
        _forward_chain(rules, b.members | 1 << i) == full for i in _free_bits(b)
    )


def extend_max_consistent_avoiding(b: Base, p: str | int) -> Base:
    """Walk the rules in canonical order, keeping each one that leaves ``p`` underived."""
    u = b.universe
    i = u.alphabet.index(p) if isinstance(p, str) else p
    if derives_atom(b, i):
        raise ValueError(f"base already derives {u.alphabet[i]}")
    m = b.members
    for j in range(u.n_rules):
        if m >> j & 1:
            continue
        if not _forward_chain(u.rules, m | 1 << j) >> i & 1:
            m |= 1 << j
    return Base(u, m)


def max_consistent_supersets(b: Base) -> list[Base]:
    """Every maximally-consistent superset of ``b``, ascending member mask."""
    u = b.universe
    if b.inconsistent:
        return []
    if u.n_rules <= DENSE_RULE_LIMIT:
        idx = u.max_consistent_indices
        hits = idx[(idx & b.members) == b.members]
        return [Base(u, int(m)) for m in hits]
    found = [c for c in supersets(b) if is_max_consistent(c)]
    return sorted(found, key=lambda c: c.members)


def all_bases(u: RuleUniverse) -> Iterator[Base]:
    if u.n_rules > EXHAUSTIVE_RULE_LIMIT:
        raise SizeBoundError(f"universe has {u.n_rules} rules")
    for m in range(u.n_bases):
        yield Base(u, m)


def powerset(items: Sequence) -> Iterator[tuple]:
    return itertools.chain.from_iterable(
        itertools.combinations(items, k) for k in range(len(items) + 1)
    )
