import json

import pytest

from besmodal.base import SizeBoundError, derives_atom, is_max_consistent
from besmodal.bridge import (
    LITERAL,
    bridge_model,
    bridge_universe,
    build_bridge_relation,
    euclidean_demo,
    falsify_in_bes,
    freshen_model,
    generating_set,
    world_bases,
)
from besmodal.formula import parse
from besmodal.kripke import KripkeModel
from besmodal.relations import Logic, check_modal


def model(worlds, rel, **val):
    return KripkeModel(tuple(worlds), frozenset(rel), {p: frozenset(ws) for p, ws in val.items()})


TWO = model(["w0", "w1"], [("w0", "w1")], p=["w1"])


class TestFreshen:
    def test_two_worlds(self):
        m2 = freshen_model(TWO, parse("[]p"))
        assert m2.fresh == {"w0": "q_w0", "w1": "q_w1"}
        assert m2.val["q_w0"] == {"w1"} and m2.val["q_w1"] == {"w0"}
        assert m2.val["p"] == {"w1"}

    def test_avoids_clashes(self):
        m = model(["w0"], [], q_w0=["w0"])
        m2 = freshen_model(m, parse("q_w0"))
        assert m2.fresh["w0"] == "q_w0_1"
        assert m2.val["q_w0"] == {"w0"}


class TestUniverse:
    def test_alphabet_order(self):
        m2 = freshen_model(TWO, parse("[]p"))
        u = bridge_universe(m2, parse("[]p"))
        assert u.alphabet == ("p", "q_w0", "q_w1")
        assert u.max_premises == 1 and u.n_rules == 12

    def test_explicit_bound(self):
        m2 = freshen_model(TWO, parse("[]p"))
        u = bridge_universe(m2, parse("[]p"), max_premises=2)
        assert u.n_rules == 21

    def test_adaptive_bound_for_two_atoms(self):
        m = model(["w0"], [])
        u = bridge_universe(freshen_model(m, parse("p")), parse("p"))
        assert u.max_premises == 2 and u.n_rules == 8

    def test_too_many_atoms(self):
        m = model(["a", "b", "c"], [])
        f = parse("p -> q")
        with pytest.raises(SizeBoundError):
            bridge_universe(freshen_model(m, f), f)

    def test_too_many_rules(self):
        m = model(["a", "b"], [])
        f = parse("p -> q")
        with pytest.raises(SizeBoundError):
            bridge_universe(freshen_model(m, f), f, max_premises=2)


class TestWorldBases:
    def test_generating_set_and_extension(self):
        f = parse("[]p")
        m2 = freshen_model(TWO, f)
        u = bridge_universe(m2, f)
        s0 = generating_set(m2, "w0", u)
        assert s0 == u.parse_base("p => q_w0; q_w0 => p; => q_w1")
        bases = world_bases(m2, u)
        for w, b in bases.items():
            assert generating_set(m2, w, u) <= b
            assert is_max_consistent(b) and not derives_atom(b, m2.fresh[w])
            for a in u.alphabet:
                assert derives_atom(b, a) == (w in m2.val.get(a, ()))
        assert bases["w0"] != bases["w1"]

    @pytest.mark.parametrize("logic", [Logic.K, Logic.KT, Logic.K4, Logic.S4])
    def test_relation_is_modal_and_contains_seeds(self, logic):
        f = parse("[]p")
        m2 = freshen_model(TWO, f)
        bases = world_bases(m2, bridge_universe(m2, f))
        r = build_bridge_relation(m2, bases, logic)
        assert r.contains(bases["w0"], bases["w1"])
        assert not r.contains(bases["w1"], bases["w0"])
        assert check_modal(r).modal_ok
        if logic.reflexive:
            assert r.contains(bases["w0"], bases["w0"])
            # non-world bases see their subsets
            c = bases["w0"].universe.parse_base("=> p")
            assert r.contains(c, c.universe.base(0))
        else:
            assert not r.contains(bases["w0"], bases["w0"])


class TestPipeline:
    def test_t_under_k(self):
        rep = falsify_in_bes(Logic.K, parse("[]p -> p"))
        assert rep.success and not rep.disagreements
        assert rep.relation_ok() and rep.target_holds is False
        assert rep.notes["world_bases_distinct"]

    @pytest.mark.parametrize("logic,text", [(Logic.KT, "[]p -> p"), (Logic.K, "p -> (q -> p)")])
    def test_theorem_has_no_report(self, logic, text):
        assert falsify_in_bes(logic, parse(text)) is None

    def test_given_model(self):
        rep = bridge_model("K4", parse("<>p -> p"), TWO, "w0")
        assert rep.success
        assert {c.world for c in rep.table} == {"w0", "w1"}

    def test_json(self):
        rep = falsify_in_bes(Logic.K, parse("[]p -> p"))
        js = json.loads(json.dumps(rep.to_json()))
        assert js["verdict"] == "success" and js["disagreements"] == 0
        assert js["world"] == rep.world and js["logic"] == "K"
        assert set(js["world_bases"]) == set(rep.bases)
        assert "success" in rep.render_text()


class TestEuclidean:
    def test_literal_construction(self):
        rep = euclidean_demo()
        assert rep.success and rep.notes["outcome"] == LITERAL
        assert rep.notes["holds(B, <>p)"] and not rep.notes["holds(B, []<>p)"]
        assert rep.modal.modal_ok and rep.frame.passed(["euclidean"])
        assert rep.notes["added_pairs"] == []
        json.dumps(rep.to_json())

    def test_needs_atoms(self):
        from besmodal.base import build_universe

        with pytest.raises(ValueError):
            euclidean_demo(build_universe(["p"], 1))
