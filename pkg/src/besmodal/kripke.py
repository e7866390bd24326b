"""Finite Kripke models, frame conditions and bounded countermodel search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .formula import Atom, Bottom, Box, Diamond, Formula, Implies, atoms_of
from .relations import Logic


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple[str, ...]
    rel: frozenset[tuple[str, str]]
    val: dict[str, frozenset[str]] = field(default_factory=dict, hash=False)
    # world -> fresh atom false exactly there (set by freshening)
    fresh: dict[str, str] = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("duplicate world ids")
        known = set(self.worlds)
        rel = frozenset((a, b) for a, b in self.rel)
        for a, b in rel:
            if a not in known or b not in known:
                raise ValueError(f"edge ({a}, {b}) mentions an unknown world")
        val = {p: frozenset(ws) for p, ws in self.val.items()}
        for p, ws in val.items():
            if not ws <= known:
                raise ValueError(f"valuation of {p} mentions an unknown world")
        object.__setattr__(self, "rel", rel)
        object.__setattr__(self, "val", val)

    def index(self, w: str) -> int:
        try:
            return self.worlds.index(w)
        except ValueError:
            raise KeyError(f"unknown world {w!r}") from None

    def successors(self, w: str) -> list[str]:
        return [v for v in self.worlds if (w, v) in self.rel]

    def true_atoms(self, w: str) -> list[str]:
        return sorted(p for p, ws in self.val.items() if w in ws)

    # bitmask views: bit i is world i
    def _succ_masks(self) -> list[int]:
        pos = {w: i for i, w in enumerate(self.worlds)}
        out = [0] * len(self.worlds)
        for a, b in self.rel:
            out[pos[a]] |= 1 << pos[b]
        return out

    def _atom_mask(self, p: str) -> int:
        return sum(1 << i for i, w in enumerate(self.worlds) if w in self.val.get(p, ()))

    def extension(self, f: Formula) -> int:
        """Bitmask of worlds where ``f`` is true."""
        return _extension(f, len(self.worlds), self._succ_masks(), self._atom_mask, {})

    def eval(self, w: str, f: Formula) -> bool:
        return bool(self.extension(f) >> self.index(w) & 1)

    def to_json(self) -> dict:
        out = {
            "worlds": list(self.worlds),
            "rel": sorted([a, b] for a, b in self.rel),
            "val": {p: sorted(ws, key=self.index) for p, ws in sorted(self.val.items())},
        }
        if self.fresh:
            out["fresh"] = dict(self.fresh)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "KripkeModel":
        return cls(
            tuple(data["worlds"]),
            frozenset((a, b) for a, b in data.get("rel", [])),
            {p: frozenset(ws) for p, ws in data.get("val", {}).items()},
            dict(data.get("fresh", {})),
        )


def _extension(f: Formula, k: int, succ: list[int], atom_mask, memo: dict) -> int:
    if f in memo:
        return memo[f]
    full = (1 << k) - 1
    if isinstance(f, Atom):
        out = atom_mask(f.name)
    elif isinstance(f, Bottom):
        out = 0
    elif isinstance(f, Implies):
        a = _extension(f.left, k, succ, atom_mask, memo)
        b = _extension(f.right, k, succ, atom_mask, memo)
        out = (full & ~a) | b
    elif isinstance(f, Box):
        body = _extension(f.body, k, succ, atom_mask, memo)
        out = sum(1 << i for i in range(k) if succ[i] & ~body == 0)
    elif isinstance(f, Diamond):
        body = _extension(f.body, k, succ, atom_mask, memo)
        out = sum(1 << i for i in range(k) if succ[i] & body)
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def eval(m: KripkeModel, w: str, f: Formula) -> bool:  # noqa: A001
    return m.eval(w, f)


def _frame_ok(succ: list[int], logic: Logic) -> bool:
    k = len(succ)
    for i in range(k):
        if logic.reflexive and not succ[i] >> i & 1:
            return False
        for j in range(k):
            if not succ[i] >> j & 1:
                continue
            if logic.transitive and succ[j] & ~succ[i]:
                return False
            if logic.euclidean and succ[i] & ~succ[j]:
                return False
    return True


def frame_check(m: KripkeModel, logic: Logic | str) -> bool:
    return _frame_ok(m._succ_masks(), Logic.parse(logic))


def _world_names(k: int) -> tuple[str, ...]:
    return tuple(f"w{i}" for i in range(k))


def find_countermodel(
    logic: Logic | str, f: Formula, max_worlds: int = 3
) -> Optional[tuple[KripkeModel, str]]:
    """First model (by world count, edge mask, valuation mask) falsifying ``f``.

    Edge bit ``i * k + j`` is the edge ``w_i -> w_j``; valuation bit
    ``a * k + i`` makes atom ``a`` (sorted) true at ``w_i``.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be >= 1")
    logic = Logic.parse(logic)
    atoms = sorted(atoms_of(f))
    for k in range(1, max_worlds + 1):
        full = (1 << k) - 1
        for edges in range(1 << (k * k)):
            succ = [(edges >> (i * k)) & full for i in range(k)]
            if not _frame_ok(succ, logic):
                continue
            for vals in range(1 << (k * len(atoms))):
                masks = {a: (vals >> (j * k)) & full for j, a in enumerate(atoms)}
                ext = _extension(f, k, succ, lambda p: masks[p], {})
                if ext != full:
                    names = _world_names(k)
                    bad = next(i for i in range(k) if not ext >> i & 1)
                    m = KripkeModel(
                        names,
                        frozenset((names[i], names[j]) for i in range(k) for j in range(k) if succ[i] >> j & 1),
                        {a: frozenset(names[i] for i in range(k) if masks[a] >> i & 1) for a in atoms},
                    )
                    return m, names[bad]
    return None


def models(logic: Logic | str, atoms: Iterable[str], n_worlds: int):
    """Every model with exactly ``n_worlds`` worlds whose frame suits ``logic``."""
    logic = Logic.parse(logic)
    atoms = sorted(atoms)
    k = n_worlds
    names = _world_names(k)
    for succ in itertools.product(range(1 << k), repeat=k):
        if not _frame_ok(list(succ), logic):
            continue
        rel = frozenset((names[i], names[j]) for i in range(k) for j in range(k) if succ[i] >> j & 1)
        for vals in itertools.product(range(1 << k), repeat=len(atoms)):
            yield KripkeModel(names, rel, {
                a: frozenset(names[i] for i in range(k) if v >> i & 1) for a, v in zip(atoms, vals)
            })
