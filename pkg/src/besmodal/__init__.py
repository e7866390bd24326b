"""Base-extension semantics for the normal modal logics K, KT, K4 and S4.

Bases are sets of atomic rules; support of modal formulas is relative to a
relation between bases. The package evaluates support over small rule
universes, checks relation conditions, and cross-checks against Kripke
models and Hilbert proofs.
"""

from .base import (
    Base,
    BaseRule,
    RuleUniverse,
    SizeBoundError,
    build_universe,
    closure,
    extend_max_consistent_avoiding,
    is_inconsistent,
    is_max_consistent,
)
from .bridge import BridgeReport, bridge_model, euclidean_demo, falsify_in_bes
from .formula import (
    BOT,
    Atom,
    Bottom,
    Box,
    Diamond,
    Formula,
    FormulaSyntaxError,
    Implies,
    enumerate_formulas,
    neg,
    parse,
    render,
)
from .hilbert import Axiom, HilbertProof, ProofStep, check_proof
from .kripke import KripkeModel, find_countermodel
from .lemmas import REGISTRY, run_suite
from .relations import (
    ConditionReport,
    ExtensionalRelation,
    GeneratedRelation,
    Logic,
    check_frame,
    check_modal,
    enumerate_modal_relations,
    minimal_modal_relation,
    sample_modal_relation,
)
from .semantics import (
    Evaluator,
    Verdict,
    entails,
    holds,
    holds_classical,
    valid_exhaustive,
    valid_sampled,
)

__all__ = [name for name in dir() if not name.startswith("_")]
