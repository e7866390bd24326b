"""Relations on bases: modal-relation conditions, frame conditions, generation.

Two representations share one interface (``box_pre``, ``dia_pre``, ``image``,
``contains``):

* :class:`ExtensionalRelation` stores a boolean matrix over the full lattice of
  bases and is limited to universes with at most 4096 bases.
* :class:`GeneratedRelation` is the least relation containing some seed pairs
  and closed under the generation rules (inconsistent block, downward copy from
  consistent supersets, transitivity, reflexive rules). Its set operations are
  computed from that structure as fixpoints over the lattice, never by listing
  pairs.

Condition (d) is enforced for consistent sources only; the literal reading
(every source) is reported alongside as ``d_literal`` and is informational.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from . import lattice
from .base import Base, RuleUniverse, SizeBoundError

EXTENSIONAL_BASE_LIMIT = 4096
ENUMERATION_BASE_LIMIT = 4
MODAL_CONDITIONS = ("a", "b", "c", "d")
FRAME_CONDITIONS = ("reflexive", "transitive", "euclidean")


class Logic(str, Enum):
    K = "K"
    KT = "KT"
    K4 = "K4"
    S4 = "S4"
    K5 = "K-euclidean"

    @property
    def reflexive(self) -> bool:
        return self in (Logic.KT, Logic.S4)

    @property
    def transitive(self) -> bool:
        return self in (Logic.K4, Logic.S4)

    @property
    def euclidean(self) -> bool:
        return self is Logic.K5

    @property
    def frame_conditions(self) -> tuple[str, ...]:
        return tuple(
            c for c, on in zip(FRAME_CONDITIONS, (self.reflexive, self.transitive, self.euclidean))
            if on
        )

    @classmethod
    def parse(cls, name: Union[str, "Logic"]) -> "Logic":
        if isinstance(name, Logic):
            return name
        key = name.strip().upper()
        aliases = {"K5": cls.K5, "KE": cls.K5, "K-EUCLIDEAN": cls.K5, "T": cls.KT, "KT4": cls.S4}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown logic {name!r}") from None


@dataclass
class ConditionReport:
    verdicts: dict[str, bool] = field(default_factory=dict)
    violations: dict[str, list[tuple[int, ...]]] = field(default_factory=dict)
    coverage: str = "exhaustive"
    informational: tuple[str, ...] = ("d_literal",)

    def record(self, name: str, witnesses: list[tuple[int, ...]]) -> None:
        self.violations[name] = witnesses
        self.verdicts[name] = not witnesses

    def passed(self, names: Iterable[str] | None = None) -> bool:
        if names is None:
            names = [k for k in self.verdicts if k not in self.informational]
        return all(self.verdicts[k] for k in names)

    @property
    def modal_ok(self) -> bool:
        return self.passed(MODAL_CONDITIONS)

    def frame_ok(self, logic: Logic) -> bool:
        return self.passed(logic.frame_conditions)

    def merged(self, other: "ConditionReport") -> "ConditionReport":
        cov = self.coverage if self.coverage == other.coverage else f"{self.coverage}; {other.coverage}"
        return ConditionReport(
            {**self.verdicts, **other.verdicts},
            {**self.violations, **other.violations},
            cov,
        )

    def to_json(self, universe: RuleUniverse | None = None) -> dict:
        def show(i: int):
            return universe.base(i).render() if universe is not None else i

        return {
            "coverage": self.coverage,
            "verdicts": dict(self.verdicts),
            "violations": {
                k: [[show(i) for i in w] for w in v] for k, v in self.violations.items()
            },
        }


def _members(b: Union[Base, int]) -> int:
    return b.members if isinstance(b, Base) else int(b)


# --------------------------------------------------------------------------
# extensional relations


class ExtensionalRelation:
    """A relation stored as a boolean matrix over all bases of a universe."""

    def __init__(self, universe: RuleUniverse, matrix: np.ndarray):
        if universe.n_bases > EXTENSIONAL_BASE_LIMIT:
            raise SizeBoundError(
                f"extensional relations need <= {EXTENSIONAL_BASE_LIMIT} bases, "
                f"universe has {universe.n_bases}"
            )
        matrix = np.asarray(matrix, dtype=bool)
        if matrix.shape != (universe.n_bases, universe.n_bases):
            raise ValueError("matrix shape does not match universe")
        self.universe = universe
        self.matrix = matrix

    @classmethod
    def from_pairs(cls, universe: RuleUniverse, pairs: Iterable[tuple]) -> "ExtensionalRelation":
        m = np.zeros((universe.n_bases, universe.n_bases), dtype=bool)
        for x, y in pairs:
            m[_members(x), _members(y)] = True
        return cls(universe, m)

    @property
    def size(self) -> int:
        return self.universe.n_bases

    def contains(self, x, y) -> bool:
        return bool(self.matrix[_members(x), _members(y)])

    def successors(self, x) -> np.ndarray:
        return self.matrix[_members(x)].copy()

    def pairs(self) -> list[tuple[int, int]]:
        return [tuple(map(int, p)) for p in np.argwhere(self.matrix)]

    def box_pre(self, y: np.ndarray) -> np.ndarray:
        """Bases all of whose successors lie in ``y``."""
        return ~self.matrix[:, ~y].any(axis=1)

    def dia_pre(self, y: np.ndarray) -> np.ndarray:
        """Bases with at least one successor in ``y``."""
        return self.matrix[:, y].any(axis=1)

    def image(self, x: np.ndarray) -> np.ndarray:
        return self.matrix[x].any(axis=0)

    def as_matrix(self) -> np.ndarray:
        return self.matrix

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExtensionalRelation)
            and self.universe == other.universe
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"ExtensionalRelation({len(self.pairs())} pairs over {self.universe.describe()})"

    def to_json(self) -> dict:
        pairs = self.pairs()
        used = sorted({i for p in pairs for i in p})
        pos = {m: k for k, m in enumerate(used)}
        return {
            "universe": self.universe.to_json(),
            "bases": [self.universe.base(m).to_json() for m in used],
            "pairs": [[pos[a], pos[b]] for a, b in pairs],
        }

    @classmethod
    def from_json(cls, data: dict, universe: RuleUniverse | None = None) -> "ExtensionalRelation":
        universe = universe or RuleUniverse.from_json(data["universe"])
        bases = [Base.from_json(universe, b).members for b in data["bases"]]
        return cls.from_pairs(universe, [(bases[i], bases[j]) for i, j in data["pairs"]])


# --------------------------------------------------------------------------
# generated relations


class GeneratedRelation:
    """Least relation containing ``seeds`` and closed under the enabled rules.

    Rules, by flag:

    * ``include_inconsistent_total``: every inconsistent base relates to every
      inconsistent base.
    * ``downward_closure``: if a consistent ``D ⊇ B`` relates to ``C`` then
      ``B`` relates to ``C``.
    * ``transitive_closure``: composition.
    * ``reflexive``: every base relates to itself; a maximally-consistent base
      that is not a world base relates to all of its subsets; a world base
      relates to every base whose only maximally-consistent superset it is.
    """

    def __init__(
        self,
        universe: RuleUniverse,
        seeds: Iterable[tuple],
        logic: Logic | str = Logic.K,
        world_bases: Sequence = (),
        *,
        include_inconsistent_total: bool = True,
        downward_closure: bool = True,
        transitive_closure: bool | None = None,
        reflexive: bool | None = None,
    ):
        universe.require_dense()
        self.universe = universe
        self.logic = Logic.parse(logic)
        self.seeds = sorted({(_members(a), _members(b)) for a, b in seeds})
        self.world_bases = [_members(w) for w in world_bases]
        self.include_inconsistent_total = include_inconsistent_total
        self.downward_closure = downward_closure
        self.transitive_closure = (
            self.logic.transitive if transitive_closure is None else transitive_closure
        )
        self.reflexive = self.logic.reflexive if reflexive is None else reflexive
        self._n = universe.n_rules
        self._cons = universe.consistent_mask
        self._inc = universe.inconsistent_mask
        self._src = np.array([s for s, _ in self.seeds], dtype=np.int64)
        self._tgt = np.array([t for _, t in self.seeds], dtype=np.int64)
        self._memo: dict[int, np.ndarray] = {}
        if self.reflexive:
            self._setup_reflexive()

    def _setup_reflexive(self) -> None:
        u = self.universe
        maxes = [int(m) for m in u.max_consistent_indices]
        worlds = set(self.world_bases)
        size = u.n_bases
        count = np.zeros(size, dtype=np.int32)
        owner = np.full(size, -1, dtype=np.int64)
        masks = {}
        for m in maxes:
            sub = lattice.subset_mask(size, m)
            masks[m] = sub
            count += sub
            owner[sub] = m
        owner[count != 1] = -1
        # rule 5b: non-world maximal bases see all their subsets
        self._nonworld_max = [(m, masks[m]) for m in maxes if m not in worlds]
        # rule 5c: a world base sees everything it is the unique maximal cover of
        self._unique_below = [
            (w, owner == w) for w in dict.fromkeys(self.world_bases) if w in masks
        ]

    @property
    def size(self) -> int:
        return self.universe.n_bases

    # -- one application of the primitive pairs ----------------------------

    def _pre_p(self, y: np.ndarray) -> np.ndarray:
        out = y.copy() if self.reflexive else np.ones_like(y)
        if self.include_inconsistent_total:
            out[self._inc] &= bool(y[self._inc].all())
        if len(self._src):
            np.logical_and.at(out, self._src, y[self._tgt])
        if self.reflexive:
            for m, sub in self._nonworld_max:
                out[m] &= bool(y[sub].all())
            for w, below in self._unique_below:
                out[w] &= bool(y[below].all())
        return out

    def _ex_p(self, y: np.ndarray) -> np.ndarray:
        out = y.copy() if self.reflexive else np.zeros_like(y)
        if self.include_inconsistent_total:
            out[self._inc] |= bool(y[self._inc].any())
        if len(self._src):
            np.logical_or.at(out, self._src, y[self._tgt])
        if self.reflexive:
            for m, sub in self._nonworld_max:
                out[m] |= bool(y[sub].any())
            for w, below in self._unique_below:
                out[w] |= bool(y[below].any())
        return out

    def _image_p(self, x: np.ndarray) -> np.ndarray:
        out = x.copy() if self.reflexive else np.zeros_like(x)
        if self.include_inconsistent_total and x[self._inc].any():
            out |= self._inc
        if len(self._src):
            out[self._tgt[x[self._src]]] = True
        if self.reflexive:
            for m, sub in self._nonworld_max:
                if x[m]:
                    out |= sub
            for w, below in self._unique_below:
                if x[w]:
                    out |= below
        return out

    # -- with downward copy ---------------------------------------------------

    def _pre_d(self, y: np.ndarray) -> np.ndarray:
        pre = self._pre_p(y)
        if not self.downward_closure:
            return pre
        down = lattice.sup_all(pre | self._inc, self._n)
        return np.where(self._cons, down, pre)

    def _ex_d(self, y: np.ndarray) -> np.ndarray:
        ex = self._ex_p(y)
        if not self.downward_closure:
            return ex
        up = lattice.sup_any(ex & self._cons, self._n)
        return np.where(self._cons, up, ex)

    def _image_d(self, x: np.ndarray) -> np.ndarray:
        if self.downward_closure:
            # a consistent base inherits from every consistent superset
            x = x | (lattice.sub_any(x & self._cons, self._n) & self._cons)
        return self._image_p(x)

    # -- public set operations ------------------------------------------------

    def box_pre(self, y: np.ndarray) -> np.ndarray:
        """Bases all of whose successors lie in ``y`` (greatest fixpoint)."""
        if not self.transitive_closure:
            return self._pre_d(y)
        x = np.ones_like(y)
        while True:
            nxt = self._pre_d(y & x)
            if np.array_equal(nxt, x):
                return x
            x = nxt

    def dia_pre(self, y: np.ndarray) -> np.ndarray:
        """Bases with some successor in ``y`` (least fixpoint)."""
        if not self.transitive_closure:
            return self._ex_d(y)
        x = np.zeros_like(y)
        while True:
            nxt = self._ex_d(y | x)
            if np.array_equal(nxt, x):
                return x
            x = nxt

    def image(self, x: np.ndarray) -> np.ndarray:
        z = self._image_d(x)
        if not self.transitive_closure:
            return z
        while True:
            nxt = z | self._image_d(z)
            if np.array_equal(nxt, z):
                return z
            z = nxt

    def successors(self, x) -> np.ndarray:
        m = _members(x)
        if m not in self._memo:
            one = np.zeros(self.size, dtype=bool)
            one[m] = True
            self._memo[m] = self.image(one)
        return self._memo[m]

    def sources(self, y) -> np.ndarray:
        none = np.ones(self.size, dtype=bool)
        none[_members(y)] = False
        return ~self.box_pre(none)

    def contains(self, x, y) -> bool:
        return bool(self.successors(x)[_members(y)])

    # -- materialisation ------------------------------------------------------

    def as_matrix(self) -> np.ndarray:
        if self.size > EXTENSIONAL_BASE_LIMIT:
            raise SizeBoundError(
                f"cannot materialise a relation over {self.size} bases"
            )
        if getattr(self, "_matrix", None) is not None:
            return self._matrix
        size = self.size
        p = np.zeros((size, size), dtype=bool)
        if self.include_inconsistent_total:
            p[np.ix_(self._inc, self._inc)] = True
        p[self._src, self._tgt] = True
        if self.reflexive:
            p[np.arange(size), np.arange(size)] = True
            for m, sub in self._nonworld_max:
                p[m] |= sub
            for w, below in self._unique_below:
                p[w] |= below
        if self.downward_closure:
            cons = self._cons[:, None]
            down = lattice.sup_any(p & cons, self._n)
            p = np.where(cons, down, p)
        if self.transitive_closure:
            p = _transitive_closure(p)
        self._matrix = p
        return p

    def materialize(self) -> ExtensionalRelation:
        return ExtensionalRelation(self.universe, self.as_matrix())

    def __repr__(self) -> str:
        return (
            f"GeneratedRelation(logic={self.logic.value}, seeds={len(self.seeds)}, "
            f"worlds={len(self.world_bases)}, {self.universe.describe()})"
        )

    def to_json(self) -> dict:
        u = self.universe
        return {
            "universe": u.to_json(),
            "seeds": [[u.base(a).to_json(), u.base(b).to_json()] for a, b in self.seeds],
            "logic": self.logic.value,
            "world_bases": [u.base(w).to_json() for w in self.world_bases],
            "flags": {
                "inconsistent_total": self.include_inconsistent_total,
                "downward": self.downward_closure,
                "transitive": self.transitive_closure,
                "reflexive": self.reflexive,
            },
        }

    @classmethod
    def from_json(cls, data: dict, universe: RuleUniverse | None = None) -> "GeneratedRelation":
        universe = universe or RuleUniverse.from_json(data["universe"])
        seeds = [
            (Base.from_json(universe, a), Base.from_json(universe, b)) for a, b in data["seeds"]
        ]
        worlds = [Base.from_json(universe, w) for w in data.get("world_bases", [])]
        flags = data.get("flags", {})
        return cls(
            universe, seeds, Logic.parse(data.get("logic", "K")), worlds,
            include_inconsistent_total=flags.get("inconsistent_total", True),
            downward_closure=flags.get("downward", True),
            transitive_closure=flags.get("transitive"),
            reflexive=flags.get("reflexive"),
        )


Relation = Union[ExtensionalRelation, GeneratedRelation]


def relation_from_json(data: dict, universe: RuleUniverse | None = None) -> Relation:
    if "seeds" in data:
        return GeneratedRelation.from_json(data, universe)
    return ExtensionalRelation.from_json(data, universe)


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0


def _distinct_rows(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    packed = np.packbits(m, axis=1)
    _, first, inv = np.unique(packed, axis=0, return_index=True, return_inverse=True)
    return m[first], inv.ravel()


def _transitive_closure(m: np.ndarray) -> np.ndarray:
    # relations built from a few seeds have few distinct rows; compose those only
    while True:
        rows, inv = _distinct_rows(m)
        nxt = rows | _bool_matmul(rows, m)
        if np.array_equal(nxt, rows):
            return m
        m = nxt[inv]


# --------------------------------------------------------------------------
# checking

_MAX_WITNESSES = 5


def _pairs(mask: np.ndarray) -> list[tuple[int, ...]]:
    if not mask.any():
        return []
    return [tuple(int(i) for i in p) for p in np.argwhere(mask)[:_MAX_WITNESSES]]


def _singles(mask: np.ndarray) -> list[tuple[int, ...]]:
    return [(int(i),) for i in np.flatnonzero(mask)[:_MAX_WITNESSES]]


def _matrix_of(r: Relation) -> np.ndarray | None:
    if isinstance(r, ExtensionalRelation):
        return r.matrix
    if r.size <= EXTENSIONAL_BASE_LIMIT:
        return r.as_matrix()
    return None


def check_modal(r: Relation, u: RuleUniverse | None = None, *, probe_targets: int = 32, seed: int = 0) -> ConditionReport:
    """Verdicts for conditions (a)-(d) plus the literal reading of (d).

    Matrices (<= 4096 bases) are checked over every pair. Larger generated
    relations get exhaustive set-level checks of (a) and (b) and per-target
    checks of (c) and (d) on a probe of targets.
    """
    if u is not None and u != r.universe:
        raise ValueError("relation and universe do not match")
    m = _matrix_of(r)
    if m is not None:
        return _check_modal_matrix(r.universe, m)
    return _check_modal_probe(r, probe_targets, seed)


def _check_modal_matrix(u: RuleUniverse, m: np.ndarray) -> ConditionReport:
    n = u.n_rules
    inc = u.inconsistent_mask
    cons = ~inc
    maxm = u.max_consistent_mask
    rep = ConditionReport()
    no_succ = inc & ~m.any(axis=1)
    to_cons = m & inc[:, None] & cons[None, :]
    rep.record("a", _singles(no_succ) + _pairs(to_cons))
    rep.record("b", _pairs(m & cons[:, None] & inc[None, :]))
    from_above = lattice.proper_sup_any(m, n)
    rep.record("c", _pairs(m & ~from_above & (cons & ~maxm)[:, None]))
    below = lattice.drop_bit_all(m, n)
    rep.record("d", _pairs(m & ~below & cons[:, None]))
    rep.record("d_literal", _pairs(m & ~below))
    return rep


def _probe_targets(r: GeneratedRelation, k: int, seed: int) -> list[int]:
    u = r.universe
    rng = np.random.default_rng(seed)
    targets = [int(t) for t in u.max_consistent_indices]
    worlds = np.zeros(r.size, dtype=bool)
    worlds[r.world_bases] = True
    reach = np.flatnonzero(r.image(worlds) & ~np.isin(np.arange(r.size), targets))
    if len(reach):
        targets += [int(t) for t in rng.choice(reach, min(k, len(reach)), replace=False)]
    cons = np.flatnonzero(u.consistent_mask)
    targets += [int(t) for t in rng.choice(cons, min(k // 2, len(cons)), replace=False)]
    targets.append(u.full_members)
    return sorted(set(targets))


def _check_modal_probe(r: GeneratedRelation, k: int, seed: int) -> ConditionReport:
    u = r.universe
    n = u.n_rules
    inc = u.inconsistent_mask
    cons = ~inc
    maxm = u.max_consistent_mask
    targets = _probe_targets(r, k, seed)
    rep = ConditionReport(coverage=f"probe: (a)/(b) exhaustive, (c)/(d) on {len(targets)} targets of {r.size} bases")
    a_bad = _singles(inc & ~r.dia_pre(inc))
    img_inc = r.image(inc)
    a_bad += [(-1, int(c)) for c in np.flatnonzero(img_inc & cons)[:_MAX_WITNESSES]]
    rep.record("a", a_bad)
    rep.record("b", [(-1, int(c)) for c in np.flatnonzero(r.image(cons) & inc)[:_MAX_WITNESSES]])
    c_bad, d_bad, dl_bad = [], [], []
    for t in targets:
        src = r.sources(t)
        c_bad += [(int(b), t) for b in np.flatnonzero(src & cons & ~maxm & ~lattice.proper_sup_any(src, n))[:2]]
        below = lattice.drop_bit_all(src, n)
        d_bad += [(int(b), t) for b in np.flatnonzero(src & cons & ~below)[:2]]
        dl_bad += [(int(b), t) for b in np.flatnonzero(src & ~below)[:2]]
    rep.record("c", c_bad[:_MAX_WITNESSES])
    rep.record("d", d_bad[:_MAX_WITNESSES])
    rep.record("d_literal", dl_bad[:_MAX_WITNESSES])
    rep.probe = targets  # type: ignore[attr-defined]
    return rep


def check_frame(
    r: Relation,
    logic: Logic | str | None = None,
    *,
    conditions: Sequence[str] = FRAME_CONDITIONS,
    probe_targets: int = 32,
    seed: int = 0,
) -> ConditionReport:
    """Reflexivity, transitivity and euclideanness verdicts with witnesses.

    By default all three conditions are reported; ``ConditionReport.frame_ok``
    selects the ones a logic requires.
    """
    m = _matrix_of(r)
    rep = ConditionReport()
    if m is not None:
        size = m.shape[0]
        if "reflexive" in conditions:
            rep.record("reflexive", _singles(~m[np.arange(size), np.arange(size)]))
        if "transitive" in conditions or "euclidean" in conditions:
            rows, inv = _distinct_rows(m)
        if "transitive" in conditions:
            two = (_bool_matmul(rows, m) & ~rows)[inv]
            rep.record("transitive", [_via(m, a, c) for a, c in _pairs(two)])
        if "euclidean" in conditions:
            # y and z share a source iff they lie together in some row
            eu = _bool_matmul(rows.T, rows) & ~m
            rep.record("euclidean", [_common_source(m, y, z) for y, z in _pairs(eu)])
        return rep
    targets = _probe_targets(r, probe_targets, seed)
    rep.coverage = f"probe: {len(targets)} targets of {r.size} bases"
    refl, trans, eucl = [], [], []
    for t in targets:
        src = r.sources(t)
        if not src[t]:
            refl.append((t,))
        if "transitive" in conditions:
            extra = r.dia_pre(src) & ~src
            trans += [(int(a), -1, t) for a in np.flatnonzero(extra)[:1]]
        if "euclidean" in conditions:
            extra = r.image(src) & ~src
            eucl += [(-1, int(y), t) for y in np.flatnonzero(extra)[:1]]
    for name, found in (("reflexive", refl), ("transitive", trans), ("euclidean", eucl)):
        if name in conditions:
            rep.record(name, found[:_MAX_WITNESSES])
    return rep


def _via(m: np.ndarray, a: int, c: int) -> tuple[int, int, int]:
    b = int(np.flatnonzero(m[a] & m[:, c])[0])
    return (a, b, c)


def _common_source(m: np.ndarray, y: int, z: int) -> tuple[int, int, int]:
    x = int(np.flatnonzero(m[:, y] & m[:, z])[0])
    return (x, y, z)


def is_gamma_modal(r: Relation, logic: Logic | str) -> bool:
    logic = Logic.parse(logic)
    return check_modal(r).modal_ok and check_frame(r, logic).frame_ok(logic)


# --------------------------------------------------------------------------
# construction


def minimal_modal_relation(u: RuleUniverse) -> ExtensionalRelation:
    """All pairs of inconsistent bases, and nothing else."""
    inc = u.inconsistent_mask
    return ExtensionalRelation(u, inc[:, None] & inc[None, :])


class _RowChecker:
    """Pure-integer condition check for relations on tiny universes.

    Row ``b`` of a relation is a bitmask of its successors. This is kept
    separate from the matrix checker so the two can be compared.
    """

    def __init__(self, u: RuleUniverse):
        size = u.n_bases
        self.size = size
        self.inc = [bool(u.base(b).inconsistent) for b in range(size)]
        inc_bits = sum(1 << b for b in range(size) if self.inc[b])
        self.inc_bits = inc_bits
        self.cons_bits = ((1 << size) - 1) & ~inc_bits
        from .base import is_max_consistent

        self.maximal = [is_max_consistent(u.base(b)) for b in range(size)]
        self.proper_sup = [[d for d in range(size) if d != b and d & b == b] for b in range(size)]
        self.one_below = [[b & ~(1 << i) for i in range(b.bit_length()) if b >> i & 1] for b in range(size)]

    def modal(self, rows: Sequence[int]) -> bool:
        for b, row in enumerate(rows):
            if self.inc[b]:
                if row == 0 or row & self.cons_bits:
                    return False
                continue
            if row & self.inc_bits:
                return False
            for d in self.one_below[b]:
                if row & ~rows[d]:
                    return False
            if not self.maximal[b] and row:
                above = 0
                for d in self.proper_sup[b]:
                    above |= rows[d]
                if row & ~above:
                    return False
        return True

    def frame(self, rows: Sequence[int], logic: Logic) -> bool:
        for b, row in enumerate(rows):
            if logic.reflexive and not row >> b & 1:
                return False
            for c in range(self.size):
                if not row >> c & 1:
                    continue
                if logic.transitive and rows[c] & ~row:
                    return False
                if logic.euclidean and row & ~rows[c]:
                    return False
        return True


def enumerate_modal_relations(u: RuleUniverse, logic: Logic | str = Logic.K) -> Iterator[ExtensionalRelation]:
    """Every relation on the universe passing (a)-(d) and the frame conditions.

    Candidates are visited in increasing order of their flattened bitmask
    (bit ``b * size + c`` is the pair ``(b, c)``).
    """
    logic = Logic.parse(logic)
    size = u.n_bases
    if size > ENUMERATION_BASE_LIMIT:
        raise SizeBoundError(
            f"relation enumeration supports <= {ENUMERATION_BASE_LIMIT} bases, got {size}"
        )
    chk = _RowChecker(u)
    row_mask = (1 << size) - 1
    for code in range(1 << (size * size)):
        rows = [(code >> (b * size)) & row_mask for b in range(size)]
        if chk.modal(rows) and chk.frame(rows, logic):
            m = np.array([[rows[b] >> c & 1 for c in range(size)] for b in range(size)], dtype=bool)
            yield ExtensionalRelation(u, m)


def close_relation(
    seed_pairs: Iterable[tuple],
    u: RuleUniverse,
    logic: Logic | str,
    world_bases: Sequence = (),
) -> GeneratedRelation:
    """Least relation over the seeds closed under the rules ``logic`` enables."""
    return GeneratedRelation(u, seed_pairs, Logic.parse(logic), world_bases)


class SamplingError(RuntimeError):
    pass


def sample_modal_relation(
    u: RuleUniverse, logic: Logic | str, seed: int, *, max_retries: int = 64
) -> GeneratedRelation:
    """Seeded random gamma-modal relation built from a random frame on maximal bases.

    Candidates failing either check are discarded, not repaired.
    """
    logic = Logic.parse(logic)
    if logic.euclidean:
        raise ValueError("sampling supports K, KT, K4 and S4 only")
    rng = np.random.default_rng(seed)
    maxes = [int(m) for m in u.max_consistent_indices]
    for _ in range(max_retries):
        k = int(rng.integers(1, len(maxes) + 1))
        worlds = [maxes[i] for i in sorted(rng.choice(len(maxes), k, replace=False))]
        edge_p = float(rng.uniform(0.2, 0.8))
        edges = {
            (a, b) for a in range(k) for b in range(k) if rng.random() < edge_p
        }
        if logic.reflexive:
            edges |= {(a, a) for a in range(k)}
        if logic.transitive:
            edges = _close_pairs(edges)
        seeds = [(worlds[a], worlds[b]) for a, b in sorted(edges)]
        rel = GeneratedRelation(u, seeds, logic, worlds)
        if not check_frame(rel, logic, conditions=logic.frame_conditions).frame_ok(logic):
            continue
        if check_modal(rel).modal_ok:
            return rel
    raise SamplingError(
        f"no {logic.value}-modal relation accepted after {max_retries} draws "
        f"(seed {seed}, {u.describe()})"
    )


def _close_pairs(edges: set[tuple[int, int]]) -> set[tuple[int, int]]:
    edges = set(edges)
    while True:
        extra = {(a, d) for a, b in edges for c, d in edges if b == c} - edges
        if not extra:
            return edges
        edges |= extra
