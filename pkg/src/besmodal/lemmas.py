"""Registry of executable lemma checks.

Each check draws ``budget`` cases from a seeded corpus and returns the first
counterexample it meets. Contexts come from two pools:

* every gamma-modal relation on the universe ``({p}, 1)`` (4 bases), and
* 100 sampled gamma-modal relations per logic on ``({p, q}, 2)`` (256 bases).

Formulas are drawn from all formulas of depth <= 2 over the universe's atoms,
sometimes combined one level further.
"""

from __future__ import annotations

import fnmatch
import time
import zlib
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import lattice
from .base import RuleUniverse, build_universe, max_consistent_supersets
from .formula import BOT, Atom, Bottom, Box, Diamond, Formula, Implies, enumerate_formulas, render
from .relations import Logic, Relation
from .semantics import (
    classical_evaluator,
    evaluator,
    sampled_relations,
    valid_exhaustive,
    valid_sampled,
    _enumerated,
)

MODAL_LOGICS = (Logic.K, Logic.KT, Logic.K4, Logic.S4)
SAMPLES_PER_LOGIC = 100
HEAVY_CASE_CAP = 40
P = Atom("p")
_FORMULA_TYPES = (Atom, Bottom, Implies, Box, Diamond)


@lru_cache(maxsize=None)
def tiny_universe() -> RuleUniverse:
    return build_universe(["p"], 1)


@lru_cache(maxsize=None)
def small_universe() -> RuleUniverse:
    return build_universe(["p", "q"], 2)


@lru_cache(maxsize=None)
def formula_pool(atoms: tuple[str, ...], allow_modal: bool = True) -> tuple[Formula, ...]:
    return tuple(enumerate_formulas(atoms, 2, allow_modal))


@dataclass
class Context:
    logic: Logic
    universe: RuleUniverse
    relation: Relation
    atoms: tuple[str, ...]

    def describe(self) -> dict:
        return {
            "logic": self.logic.value,
            "universe": self.universe.to_json(),
            "relation": self.relation.to_json(),
        }


class Corpus:
    def __init__(self, seed: int, check_id: str, relation_seed: int):
        self.rng = np.random.default_rng([seed, zlib.crc32(check_id.encode())])
        self.relation_seed = relation_seed

    def logic(self, logics=MODAL_LOGICS) -> Logic:
        return logics[int(self.rng.integers(len(logics)))]

    def context(self, logics=MODAL_LOGICS, pools=("tiny", "small")) -> Context:
        logic = self.logic(logics)
        pool = pools[int(self.rng.integers(len(pools)))]
        if pool == "tiny":
            u = tiny_universe()
            rels = _enumerated(u, logic)
            atoms = ("p",)
        else:
            u = small_universe()
            rels = sampled_relations(u, logic, SAMPLES_PER_LOGIC, self.relation_seed)
            atoms = ("p", "q")
        return Context(logic, u, rels[int(self.rng.integers(len(rels)))], atoms)

    def formula(self, atoms: tuple[str, ...], allow_modal: bool = True) -> Formula:
        pool = formula_pool(atoms, allow_modal)
        f = pool[int(self.rng.integers(len(pool)))]
        if self.rng.random() < 0.3:
            kinds = 3 if allow_modal else 1
            k = int(self.rng.integers(kinds))
            if k == 0:
                f = Implies(f, pool[int(self.rng.integers(len(pool)))])
            elif k == 1:
                f = Box(f)
            else:
                f = Diamond(f)
        return f

    def formulas(self, atoms, k: int, allow_modal: bool = True) -> list[Formula]:
        return [self.formula(atoms, allow_modal) for _ in range(k)]


@dataclass
class LemmaResult:
    id: str
    passed: bool
    cases: int
    witness: Optional[dict] = None
    seconds: float = 0.0
    note: str = ""

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        out = {"id": self.id, "status": self.status, "cases": self.cases}
        if self.note:
            out["note"] = self.note
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class LemmaCheck:
    id: str
    statement: str
    run: Callable[[Corpus, int], Optional[dict]] = field(repr=False)
    case_cap: Optional[int] = None


REGISTRY: dict[str, LemmaCheck] = {}


def lemma(id: str, statement: str, case_cap: Optional[int] = None):
    def deco(fn):
        REGISTRY[id] = LemmaCheck(id, statement, fn, case_cap)
        return fn

    return deco


def _first(mask: np.ndarray) -> int:
    return int(np.flatnonzero(mask)[0])


def _fail(ctx: Optional[Context], base: Optional[int] = None, **extra) -> dict:
    out = dict(ctx.describe()) if ctx is not None else {}
    if base is not None and ctx is not None:
        out["base"] = ctx.universe.base(base).render()
    for k, v in extra.items():
        if isinstance(v, _FORMULA_TYPES):
            v = render(v)
        elif isinstance(v, list) and v and isinstance(v[0], _FORMULA_TYPES):
            v = [render(g) for g in v]
        out[k] = v
    return out


def _for_contexts(corpus: Corpus, budget: int, body, **ctx_kw) -> Optional[dict]:
    for _ in range(budget):
        ctx = corpus.context(**ctx_kw)
        hit = body(ctx)
        if hit is not None:
            return hit
    return None


# --------------------------------------------------------------------------
# classical lemmas (no relation)


def _classical_case(corpus: Corpus):
    u = small_universe() if corpus.rng.random() < 0.7 else tiny_universe()
    atoms = tuple(u.alphabet)
    return u, atoms, classical_evaluator(u)


@lemma("ClassicalMonotonicity", "support and entailment persist to supersets (no modalities)")
def _classical_monotonicity(corpus, budget):
    for _ in range(budget):
        u, atoms, ev = _classical_case(corpus)
        gamma = corpus.formulas(atoms, int(corpus.rng.integers(0, 3)), False)
        f = corpus.formula(atoms, False)
        e = ev.entailment(gamma, f)
        bad = e & ~lattice.sup_all(e, u.n_rules)
        if bad.any():
            return _fail(None, gamma=gamma, formula=f, base=u.base(_first(bad)).render())
    return None


@lemma("ClassicalBehaviour", "at maximally-consistent bases bot fails and -> is truth-functional")
def _classical_behaviour(corpus, budget):
    for _ in range(budget):
        u, atoms, ev = _classical_case(corpus)
        a, b = corpus.formulas(atoms, 2, False)
        mx = u.max_consistent_mask
        bad = mx & (ev.truth(BOT) | (ev.truth(Implies(a, b)) != (~ev.truth(a) | ev.truth(b))))
        if bad.any():
            return _fail(None, left=a, right=b, base=u.base(_first(bad)).render())
    return None


@lemma("MaxCon", "a base not supporting phi has a maximally-consistent superset not supporting phi")
def _maxcon(corpus, budget):
    for _ in range(budget):
        u, atoms, ev = _classical_case(corpus)
        f = corpus.formula(atoms, False)
        t = ev.truth(f)
        reach = lattice.sup_any(u.max_consistent_mask & ~t, u.n_rules)
        bad = ~t & ~reach
        if bad.any():
            return _fail(None, formula=f, base=u.base(_first(bad)).render())
    return None


def _unique_max_pairs(u: RuleUniverse) -> list[tuple[int, int]]:
    out = []
    for b in range(u.n_bases):
        ms = max_consistent_supersets(u.base(b))
        if len(ms) == 1:
            out.append((b, ms[0].members))
    return out


_unique_max = lru_cache(maxsize=None)(_unique_max_pairs)


@lemma("AlmostMaxCon", "a base with a single maximally-consistent superset agrees with it (no modalities)")
def _almost_maxcon(corpus, budget):
    for _ in range(budget):
        u, atoms, ev = _classical_case(corpus)
        f = corpus.formula(atoms, False)
        t = ev.truth(f)
        pairs = _unique_max(u)
        for b, c in pairs:
            if t[b] != t[c]:
                return _fail(None, formula=f, base=u.base(b).render(), max_base=u.base(c).render())
    return None


# --------------------------------------------------------------------------
# modal lemmas


@lemma("ModalMonotonicity", "entailment persists from a base to its supersets")
def _modal_monotonicity(corpus, budget):
    def body(ctx):
        ev = evaluator(ctx.relation, ctx.logic)
        gamma = corpus.formulas(ctx.atoms, int(corpus.rng.integers(0, 3)))
        f = corpus.formula(ctx.atoms)
        e = ev.entailment(gamma, f)
        bad = e & ~lattice.sup_all(e, ctx.universe.n_rules)
        if bad.any():
            return _fail(ctx, _first(bad), gamma=gamma, formula=f)
    return _for_contexts(corpus, budget, body)


@lemma("EFQ", "every formula is supported at every inconsistent base")
def _efq(corpus, budget):
    def body(ctx):
        f = corpus.formula(ctx.atoms)
        t = evaluator(ctx.relation, ctx.logic).truth(f)
        bad = ctx.universe.inconsistent_mask & ~t
        if bad.any():
            return _fail(ctx, _first(bad), formula=f)
    return _for_contexts(corpus, budget, body)


@lemma("ModalBehaviour.Bottom", "bot is not supported at a maximally-consistent base")
def _mb_bottom(corpus, budget):
    def body(ctx):
        t = evaluator(ctx.relation, ctx.logic).truth(BOT)
        bad = ctx.universe.max_consistent_mask & t
        if bad.any():
            return _fail(ctx, _first(bad))
    return _for_contexts(corpus, budget, body)


@lemma("ModalBehaviour.Implies", "-> is truth-functional at maximally-consistent bases")
def _mb_implies(corpus, budget):
    def body(ctx):
        ev = evaluator(ctx.relation, ctx.logic)
        a, b = corpus.formulas(ctx.atoms, 2)
        lhs = ev.truth(Implies(a, b))
        rhs = ~ev.truth(a) | ev.truth(b)
        bad = ctx.universe.max_consistent_mask & (lhs != rhs)
        if bad.any():
            return _fail(ctx, _first(bad), left=a, right=b)
    return _for_contexts(corpus, budget, body)


@lemma("ModalBehaviour.Box", "[]phi at a maximally-consistent base iff phi at all its successors")
def _mb_box(corpus, budget):
    def body(ctx):
        ev = evaluator(ctx.relation, ctx.logic)
        f = corpus.formula(ctx.atoms)
        body_t = ev.truth(f)
        box_t = ev.truth(Box(f))
        for b in ctx.universe.max_consistent_indices:
            succ = ctx.relation.successors(int(b))
            if bool(box_t[b]) != bool(body_t[succ].all()):
                return _fail(ctx, int(b), formula=f)
    return _for_contexts(corpus, budget, body)


@lemma("BelowMaxCon", "a base with a single maximally-consistent superset agrees with it")
def _below_maxcon(corpus, budget):
    def body(ctx):
        t = evaluator(ctx.relation, ctx.logic).truth(corpus.formula(ctx.atoms))
        for b, c in _unique_max(ctx.universe):
            if t[b] != t[c]:
                return _fail(ctx, b, max_base=ctx.universe.base(c).render())
    return _for_contexts(corpus, budget, body)


def _entails_everywhere(ctx, gamma, f) -> Optional[dict]:
    e = evaluator(ctx.relation, ctx.logic).entailment(gamma, f)
    if not e.all():
        return _fail(ctx, _first(~e), gamma=gamma, formula=f)
    return None


@lemma("MinimalLogic.R", "phi entails phi")
def _ml_r(corpus, budget):
    def body(ctx):
        gamma = corpus.formulas(ctx.atoms, int(corpus.rng.integers(0, 3)))
        f = corpus.formula(ctx.atoms)
        return _entails_everywhere(ctx, gamma + [f], f)
    return _for_contexts(corpus, budget, body)


@lemma("MinimalLogic.S", "adding an assumption preserves entailment")
def _ml_s(corpus, budget):
    def body(ctx):
        ev = evaluator(ctx.relation, ctx.logic)
        gamma = corpus.formulas(ctx.atoms, int(corpus.rng.integers(0, 3)))
        f, extra = corpus.formulas(ctx.atoms, 2)
        bad = ev.entailment(gamma, f) & ~ev.entailment(gamma + [extra], f)
        if bad.any():
            return _fail(ctx, _first(bad), gamma=gamma, formula=f, added=extra)
    return _for_contexts(corpus, budget, body)


@lemma("MinimalLogic.C", "cut: from G |- phi and G, phi |- psi infer G |- psi")
def _ml_c(corpus, budget):
    def body(ctx):
        ev = evaluator(ctx.relation, ctx.logic)
        gamma = corpus.formulas(ctx.atoms, int(corpus.rng.integers(0, 3)))
        f, g = corpus.formulas(ctx.atoms, 2)
        bad = ev.entailment(gamma, f) & ev.entailment(gamma + [f], g) & ~ev.entailment(gamma, g)
        if bad.any():
            return _fail(ctx, _first(bad), gamma=gamma, cut=f, formula=g)
    return _for_contexts(corpus, budget, body)


@lemma("MinimalLogic.ImpE", "phi -> psi and phi entail psi")
def _ml_impe(corpus, budget):
    def body(ctx):
        f, g = corpus.formulas(ctx.atoms, 2)
        return _entails_everywhere(ctx, [Implies(f, g), f], g)
    return _for_contexts(corpus, budget, body)


@lemma("MinimalLogic.ImpI", "G, phi |- psi gives G |- phi -> psi")
def _ml_impi(corpus, budget):
    def body(ctx):
        ev = evaluator(ctx.relation, ctx.logic)
        gamma = corpus.formulas(ctx.atoms, int(corpus.rng.integers(0, 3)))
        f, g = corpus.formulas(ctx.atoms, 2)
        bad = ev.entailment(gamma + [f], g) & ~ev.entailment(gamma, Implies(f, g))
        if bad.any():
            return _fail(ctx, _first(bad), gamma=gamma, left=f, right=g)
    return _for_contexts(corpus, budget, body)


@lemma("DoubleNegation", "(phi -> bot) -> bot entails phi")
def _double_negation(corpus, budget):
    def body(ctx):
        f = corpus.formula(ctx.atoms)
        return _entails_everywhere(ctx, [Implies(Implies(f, BOT), BOT)], f)
    return _for_contexts(corpus, budget, body)


@lemma("K", "[](phi -> psi) entails []phi -> []psi")
def _axiom_k(corpus, budget):
    def body(ctx):
        f, g = corpus.formulas(ctx.atoms, 2)
        return _entails_everywhere(ctx, [Box(Implies(f, g))], Implies(Box(f), Box(g)))
    return _for_contexts(corpus, budget, body)


@lemma("NEC", "if phi is valid then []phi is valid (exhaustive over the 4-base universe)")
def _nec(corpus, budget):
    u = tiny_universe()
    for _ in range(budget):
        logic = corpus.logic()
        f = corpus.formula(("p",))
        if valid_exhaustive(u, logic, f).valid:
            v = valid_exhaustive(u, logic, Box(f))
            if not v.valid:
                return {"logic": logic.value, "formula": render(f), "boxed": v.to_json()}
    return None


@lemma("MP", "phi and phi -> psi supported at a base give psi there")
def _mp(corpus, budget):
    def body(ctx):
        ev = evaluator(ctx.relation, ctx.logic)
        f, g = corpus.formulas(ctx.atoms, 2)
        bad = ev.truth(f) & ev.truth(Implies(f, g)) & ~ev.truth(g)
        if bad.any():
            return _fail(ctx, _first(bad), left=f, right=g)
    return _for_contexts(corpus, budget, body)


def _falsifiable_without(axiom: Formula, frame_logic: Logic) -> Optional[dict]:
    """The axiom must fail under plain K relations somewhere in the corpus."""
    v = valid_exhaustive(tiny_universe(), Logic.K, axiom)
    if v.invalid:
        return None
    v = valid_sampled(small_universe(), Logic.K, axiom, SAMPLES_PER_LOGIC, 0)
    if v.invalid:
        return None
    return {"axiom": render(axiom), "note": f"no K relation falsifies it; {frame_logic.value} condition looks vacuous"}


@lemma("T", "[]phi entails phi under reflexive relations, and fails for some K relation")
def _axiom_t(corpus, budget):
    hit = _falsifiable_without(Implies(Box(P), P), Logic.KT)
    if hit is not None:
        return hit

    def body(ctx):
        f = corpus.formula(ctx.atoms)
        return _entails_everywhere(ctx, [Box(f)], f)
    return _for_contexts(corpus, budget, body, logics=(Logic.KT, Logic.S4))


@lemma("Axiom4", "[]phi entails [][]phi under transitive relations, and fails for some K relation")
def _axiom_4(corpus, budget):
    hit = _falsifiable_without(Implies(Box(P), Box(Box(P))), Logic.K4)
    if hit is not None:
        return hit

    def body(ctx):
        f = corpus.formula(ctx.atoms)
        return _entails_everywhere(ctx, [Box(f)], Box(Box(f)))
    return _for_contexts(corpus, budget, body, logics=(Logic.K4, Logic.S4))


@lemma("Duality.Diamond", "<>phi iff [](phi -> bot) -> bot")
def _dual_dia(corpus, budget):
    def body(ctx):
        ev = evaluator(ctx.relation, ctx.logic)
        f = corpus.formula(ctx.atoms)
        other = Implies(Box(Implies(f, BOT)), BOT)
        bad = ev.truth(Diamond(f)) != ev.truth(other)
        if bad.any():
            return _fail(ctx, _first(bad), formula=f)
    return _for_contexts(corpus, budget, body)


@lemma("Duality.Box", "[]phi iff <>(phi -> bot) -> bot")
def _dual_box(corpus, budget):
    def body(ctx):
        ev = evaluator(ctx.relation, ctx.logic)
        f = corpus.formula(ctx.atoms)
        other = Implies(Diamond(Implies(f, BOT)), BOT)
        bad = ev.truth(Box(f)) != ev.truth(other)
        if bad.any():
            return _fail(ctx, _first(bad), formula=f)
    return _for_contexts(corpus, budget, body)


@lemma("MaxConOr", "at a maximally-consistent base phi or phi -> bot is supported")
def _maxcon_or(corpus, budget):
    def body(ctx):
        ev = evaluator(ctx.relation, ctx.logic)
        f = corpus.formula(ctx.atoms)
        bad = ctx.universe.max_consistent_mask & ~ev.truth(f) & ~ev.truth(Implies(f, BOT))
        if bad.any():
            return _fail(ctx, _first(bad), formula=f)
    return _for_contexts(corpus, budget, body)


@lemma("ModalMaxCon", "a base not supporting phi has a maximally-consistent superset not supporting phi")
def _modal_maxcon(corpus, budget):
    def body(ctx):
        t = evaluator(ctx.relation, ctx.logic).truth(corpus.formula(ctx.atoms))
        u = ctx.universe
        reach = lattice.sup_any(u.max_consistent_mask & ~t, u.n_rules)
        bad = ~t & ~reach
        if bad.any():
            return _fail(ctx, _first(bad))
    return _for_contexts(corpus, budget, body)


def _hilbert_axiom(ax_builder):
    def run(corpus, budget):
        def body(ctx):
            fs = corpus.formulas(ctx.atoms, 3)
            f = ax_builder(*fs)
            t = evaluator(ctx.relation, ctx.logic).truth(f)
            if not t.all():
                return _fail(ctx, _first(~t), formula=f)
        return _for_contexts(corpus, budget, body)
    return run


lemma("HilbertAx1", "phi -> (psi -> phi) is supported everywhere")(
    _hilbert_axiom(lambda a, b, c: Implies(a, Implies(b, a))))
lemma("HilbertAx2", "(phi -> (psi -> chi)) -> ((phi -> psi) -> (phi -> chi)) is supported everywhere")(
    _hilbert_axiom(lambda a, b, c: Implies(Implies(a, Implies(b, c)), Implies(Implies(a, b), Implies(a, c)))))
lemma("HilbertAx3", "((phi -> bot) -> (psi -> bot)) -> (psi -> phi) is supported everywhere")(
    _hilbert_axiom(lambda a, b, c: Implies(Implies(Implies(a, BOT), Implies(b, BOT)), Implies(b, a))))


@lemma("Soundness", "a Kripke countermodel carries over to a countermodel over bases", case_cap=HEAVY_CASE_CAP)
def _soundness(corpus, budget):
    from .bridge import falsify_in_bes

    pool = formula_pool(("p",))
    tried = 0
    for _ in range(budget * 4):
        if tried >= budget:
            break
        logic = corpus.logic()
        f = pool[int(corpus.rng.integers(len(pool)))]
        rep = falsify_in_bes(logic, f, 2)
        if rep is None:
            continue
        tried += 1
        if not rep.success:
            return rep.to_json()
    return None


@lemma("Completeness", "Hilbert theorems have no Kripke countermodel and are valid over the 4-base universe",
       case_cap=HEAVY_CASE_CAP)
def _completeness(corpus, budget):
    from .hilbert import check_proof, proof_corpus
    from .kripke import find_countermodel

    cases = [(lg, pr) for lg in MODAL_LOGICS for pr in proof_corpus(lg, ["p"], 2)]
    order = corpus.rng.permutation(len(cases))[:budget]
    for i in order:
        logic, pr = cases[int(i)]
        if not check_proof(pr):
            return {"logic": logic.value, "proof": pr.to_json(), "note": "corpus proof rejected"}
        f = pr.conclusion
        cm = find_countermodel(logic, f, 3)
        if cm is not None:
            return {"logic": logic.value, "formula": render(f), "countermodel": cm[0].to_json()}
        v = valid_exhaustive(tiny_universe(), logic, f)
        if not v.valid:
            return {"logic": logic.value, "formula": render(f), "verdict": v.to_json()}
    return None


@lemma("Euclidean", "some euclidean modal relation supports <>p but not []<>p at a maximal base", case_cap=1)
def _euclidean(corpus, budget):
    from .bridge import euclidean_demo

    rep = euclidean_demo()
    if not rep.success:
        return rep.to_json()
    return None


# --------------------------------------------------------------------------


def _selected(pattern: str) -> list[LemmaCheck]:
    out = []
    for cid, chk in REGISTRY.items():
        if fnmatch.fnmatchcase(cid, pattern) or cid.startswith(pattern + "."):
            out.append(chk)
    return out


def run_suite(pattern: str = "*", budget: int = 1000, seed: int = 0,
              relation_seed: Optional[int] = None) -> list[LemmaResult]:
    """Run every check whose id matches ``pattern`` (glob, or a dotted prefix)."""
    rseed = seed if relation_seed is None else relation_seed
    results = []
    for chk in _selected(pattern):
        cases = budget if chk.case_cap is None else min(budget, chk.case_cap)
        t0 = time.perf_counter()
        witness = chk.run(Corpus(seed, chk.id, rseed), cases)
        results.append(LemmaResult(chk.id, witness is None, cases, witness, time.perf_counter() - t0))
    return results
