import json

import pytest

from besmodal.formula import BOT, Atom, Box, Implies, parse
from besmodal.hilbert import (
    Axiom,
    HilbertProof,
    ProofStep,
    axioms_of,
    check_proof,
    identity_proof,
    instantiate,
    match_axiom,
    necessitate,
    proof_corpus,
)
from besmodal.kripke import find_countermodel
from besmodal.relations import Logic

P, Q = Atom("p"), Atom("q")


class TestMatch:
    def test_axiom1(self):
        assert match_axiom(parse("p -> (q -> p)"), Axiom.AX1) == {"phi": P, "psi": Q}

    def test_axiom_k(self):
        assert match_axiom(parse("[](p -> q) -> ([]p -> []q)"), "K") == {"phi": P, "psi": Q}

    def test_shape_mismatch(self):
        assert match_axiom(parse("p -> p"), Axiom.AX1) is None

    def test_repeated_metavariable(self):
        assert match_axiom(parse("p -> (q -> q)"), Axiom.AX1) is None

    def test_axiom3_is_sugar_free(self):
        f = parse("(~p -> ~q) -> (q -> p)")
        assert match_axiom(f, Axiom.AX3) == {"phi": P, "psi": Q}

    def test_axiom5(self):
        assert match_axiom(parse("<>p -> []<>p"), "5") == {"phi": P}

    @pytest.mark.parametrize("ax", list(Axiom))
    def test_instantiate_then_match(self, ax):
        sub = {"phi": Box(P), "psi": Implies(Q, BOT), "chi": P}
        f = instantiate(ax, **sub)
        got = match_axiom(f, ax)
        assert got is not None and all(got[k] == sub[k] for k in got)

    def test_parse_names(self):
        assert Axiom.parse("Axiom1") is Axiom.AX1
        assert Axiom.parse("T") is Axiom.T
        with pytest.raises(ValueError):
            Axiom.parse("B")


class TestAxiomsOf:
    def test_sets(self):
        base = (Axiom.AX1, Axiom.AX2, Axiom.AX3, Axiom.K)
        assert axioms_of(Logic.K) == base
        assert axioms_of(Logic.KT) == base + (Axiom.T,)
        assert axioms_of(Logic.K4) == base + (Axiom.FOUR,)
        assert axioms_of(Logic.S4) == base + (Axiom.T, Axiom.FOUR)
        assert axioms_of(Logic.K5) == base + (Axiom.FIVE,)


class TestCheck:
    def test_identity(self):
        pr = identity_proof(Logic.K, P)
        assert len(pr.steps) == 5 and pr.conclusion == parse("p -> p")
        assert check_proof(pr).ok

    def test_axiom_not_in_logic(self):
        pr = HilbertProof(Logic.K, [ProofStep(parse("[]p -> p"), "AXT")])
        res = check_proof(pr)
        assert not res.ok and res.step == 0 and "not in K" in res.reason

    def test_nec_on_any_earlier_step(self):
        pr = necessitate(identity_proof(Logic.K, P))
        assert check_proof(pr).ok and pr.conclusion == parse("[](p -> p)")

    def test_nec_shape(self):
        pr = identity_proof(Logic.K, P)
        pr.steps.append(ProofStep(parse("[]p"), "NEC", (4,)))
        assert check_proof(pr).step == 5

    def test_mp_either_order(self):
        steps = identity_proof(Logic.K, P).steps
        swapped = steps[:4] + [ProofStep(steps[4].formula, "MP", (2, 3))]
        assert check_proof(HilbertProof(Logic.K, swapped)).ok

    def test_bad_mp(self):
        steps = identity_proof(Logic.K, P).steps[:4] + [ProofStep(Q, "MP", (3, 2))]
        res = check_proof(HilbertProof(Logic.K, steps))
        assert not res.ok and res.step == 4

    def test_forward_reference(self):
        pr = HilbertProof(Logic.K, [ProofStep(P, "MP", (0, 1))])
        assert check_proof(pr).step == 0

    def test_not_an_instance(self):
        pr = HilbertProof(Logic.K, [ProofStep(parse("p -> p"), "AX1")])
        assert "not an instance" in check_proof(pr).reason

    def test_empty(self):
        assert not check_proof(HilbertProof(Logic.K, []))

    def test_json_round_trip(self):
        pr = necessitate(identity_proof(Logic.S4, parse("[]p")))
        back = HilbertProof.from_json(json.dumps(pr.to_json()))
        assert back.steps == pr.steps and back.logic is Logic.S4
        assert check_proof(back).ok


class TestCorpus:
    @pytest.mark.parametrize("logic", [Logic.K, Logic.KT, Logic.K4, Logic.S4])
    def test_corpus_checks_and_has_no_kripke_countermodel(self, logic):
        corpus = proof_corpus(logic, ["p"], 2)
        assert corpus
        for pr in corpus:
            assert check_proof(pr).ok
            assert find_countermodel(logic, pr.conclusion, 3) is None

    def test_corpus_contents(self):
        conclusions = {pr.conclusion for pr in proof_corpus(Logic.KT, ["p"], 2)}
        assert parse("[]p -> p") in conclusions
        assert parse("p -> p") in conclusions
        assert parse("[](p -> p)") in conclusions
        assert parse("[]p -> [][]p") not in conclusions
