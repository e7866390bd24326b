import json
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besmodal.base import SizeBoundError, build_universe, extend_max_consistent_avoiding
from besmodal.relations import (
    ExtensionalRelation,
    GeneratedRelation,
    Logic,
    _RowChecker,
    check_frame,
    check_modal,
    close_relation,
    enumerate_modal_relations,
    is_gamma_modal,
    minimal_modal_relation,
    relation_from_json,
    sample_modal_relation,
)

from .oracle import Oracle

SAMPLED = (Logic.K, Logic.KT, Logic.K4, Logic.S4)


class TestLogic:
    @pytest.mark.parametrize("name,logic", [
        ("K", Logic.K), ("kt", Logic.KT), ("T", Logic.KT), ("K4", Logic.K4),
        ("S4", Logic.S4), ("K-euclidean", Logic.K5), ("K5", Logic.K5),
    ])
    def test_parse(self, name, logic):
        assert Logic.parse(name) is logic

    def test_unknown(self):
        with pytest.raises(ValueError):
            Logic.parse("S5x")

    def test_frame_conditions(self):
        assert Logic.K.frame_conditions == ()
        assert Logic.S4.frame_conditions == ("reflexive", "transitive")
        assert Logic.K5.frame_conditions == ("euclidean",)


class TestCheckModal:
    def test_minimal_passes(self, tiny, small):
        for u in (tiny, small):
            rep = check_modal(minimal_modal_relation(u))
            assert rep.modal_ok

    def test_empty_fails_a(self, small):
        rep = check_modal(ExtensionalRelation(small, np.zeros((256, 256), dtype=bool)))
        assert not rep.verdicts["a"]
        assert rep.verdicts["b"]

    def test_total_fails_b(self, small):
        rep = check_modal(ExtensionalRelation(small, np.ones((256, 256), dtype=bool)))
        assert not rep.verdicts["b"]

    def test_universe_mismatch(self, tiny, small):
        with pytest.raises(ValueError):
            check_modal(minimal_modal_relation(tiny), small)

    def test_literal_d_unsatisfiable_with_inconsistent_bases(self, tiny):
        # (a) gives an inconsistent base a successor; copying that pair down to
        # the empty base would break (b)
        for logic in Logic:
            for r in enumerate_modal_relations(tiny, logic):
                rep = check_modal(r)
                assert rep.modal_ok and not rep.verdicts["d_literal"]
                assert rep.passed()

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, (1 << 16) - 1))
    def test_matches_oracle_on_tiny(self, code):
        u = build_universe(["p"], 1)
        orc = Oracle(u)
        m = np.array([[code >> (b * 4 + c) & 1 for c in range(4)] for b in range(4)], dtype=bool)
        rep = check_modal(ExtensionalRelation(u, m))
        naive = orc.modal_conditions(orc.succ(m))
        assert {k: rep.verdicts[k] for k in "abcd"} == naive

    def test_matches_oracle_on_perturbed_samples(self, small, small_oracle):
        rng = np.random.default_rng(5)
        for logic in SAMPLED:
            m = sample_modal_relation(small, logic, 3).as_matrix().copy()
            for _ in range(3):
                x, y = rng.integers(256, size=2)
                m[x, y] = ~m[x, y]
                rep = check_modal(ExtensionalRelation(small, m))
                assert {k: rep.verdicts[k] for k in "abcd"} == small_oracle.modal_conditions(small_oracle.succ(m))

    def test_row_checker_agrees_with_matrix_checker(self, tiny):
        # all 65,536 relations on the one-atom universe
        chk = _RowChecker(tiny)
        for code in range(1 << 16):
            rows = [(code >> (4 * b)) & 15 for b in range(4)]
            m = np.array([[rows[b] >> c & 1 for c in range(4)] for b in range(4)], dtype=bool)
            rep = check_modal(ExtensionalRelation(tiny, m))
            assert chk.modal(rows) == rep.modal_ok
            fr = check_frame(ExtensionalRelation(tiny, m))
            for logic in Logic:
                assert chk.frame(rows, logic) == fr.frame_ok(logic)


class TestCheckFrame:
    def test_identity(self, tiny):
        rep = check_frame(ExtensionalRelation(tiny, np.eye(4, dtype=bool)))
        assert rep.verdicts == {"reflexive": True, "transitive": True, "euclidean": True}

    def test_single_edge(self, tiny):
        rep = check_frame(ExtensionalRelation.from_pairs(tiny, [(0, 1)]))
        assert not rep.verdicts["reflexive"]
        assert rep.violations["reflexive"][0] == (0,)

    def test_transitive_witness(self, tiny):
        rep = check_frame(ExtensionalRelation.from_pairs(tiny, [(0, 1), (1, 2)]))
        assert rep.violations["transitive"] == [(0, 1, 2)]

    def test_euclidean_witness(self, tiny):
        rep = check_frame(ExtensionalRelation.from_pairs(tiny, [(0, 1), (0, 2)]))
        assert not rep.verdicts["euclidean"]
        assert rep.violations["euclidean"][0][0] == 0

    def test_minimal_not_reflexive(self, tiny):
        rep = check_frame(minimal_modal_relation(tiny), Logic.S4)
        assert not rep.frame_ok(Logic.S4)
        assert rep.verdicts["transitive"]

    def test_conditions_filter(self, tiny):
        rep = check_frame(minimal_modal_relation(tiny), conditions=("euclidean",))
        assert set(rep.verdicts) == {"euclidean"}

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, (1 << 16) - 1))
    def test_matches_oracle(self, code):
        u = build_universe(["p"], 1)
        orc = Oracle(u)
        m = np.array([[code >> (b * 4 + c) & 1 for c in range(4)] for b in range(4)], dtype=bool)
        assert check_frame(ExtensionalRelation(u, m)).verdicts == orc.frame_conditions(orc.succ(m))


class TestMinimal:
    def test_tiny(self, tiny):
        r = minimal_modal_relation(tiny)
        # {=> p} and {=> p, p => p} are the inconsistent bases
        assert sorted(r.pairs()) == [(1, 1), (1, 3), (3, 1), (3, 3)]
        assert r.size == 4


class TestEnumerate:
    # regression values from the exhaustive filter, cross-checked by the oracle below
    COUNTS = {Logic.K: 36, Logic.KT: 4, Logic.K4: 24, Logic.S4: 4, Logic.K5: 16}

    @pytest.mark.parametrize("logic", list(Logic))
    def test_counts(self, tiny, logic):
        rels = list(enumerate_modal_relations(tiny, logic))
        assert len(rels) == self.COUNTS[logic]
        assert all(is_gamma_modal(r, logic) for r in rels)

    def test_counts_match_oracle(self, tiny, tiny_oracle):
        counts = dict.fromkeys(Logic, 0)
        for code in range(1 << 16):
            m = [[bool(code >> (b * 4 + c) & 1) for c in range(4)] for b in range(4)]
            succ = tiny_oracle.succ(m)
            if not all(tiny_oracle.modal_conditions(succ).values()):
                continue
            fr = tiny_oracle.frame_conditions(succ)
            for logic in Logic:
                counts[logic] += all(fr[c] for c in logic.frame_conditions)
        assert counts == self.COUNTS

    def test_contains_minimal(self, tiny):
        assert minimal_modal_relation(tiny) in list(enumerate_modal_relations(tiny, Logic.K))

    def test_deterministic_order(self, tiny):
        a = [r.pairs() for r in enumerate_modal_relations(tiny, Logic.K)]
        b = [r.pairs() for r in enumerate_modal_relations(tiny, Logic.K)]
        assert a == b

    def test_size_bound(self, small):
        with pytest.raises(SizeBoundError):
            next(enumerate_modal_relations(small, Logic.K))


class TestClose:
    def test_no_seeds_is_minimal(self, small):
        r = close_relation([], small, Logic.K)
        assert np.array_equal(r.as_matrix(), minimal_modal_relation(small).matrix)

    def test_downward_copies(self, small):
        bw = extend_max_consistent_avoiding(small.parse_base("=> q"), "p")
        bv = extend_max_consistent_avoiding(small.parse_base("=> p"), "q")
        r = close_relation([(bw, bv)], small, Logic.K, [bw, bv])
        for d in range(small.n_bases):
            if d & bw.members == d:
                assert r.contains(d, bv)
        assert not r.contains(bv, bw)

    def test_s4_diagonal(self, small):
        bw = extend_max_consistent_avoiding(small.base(0), "p")
        r = close_relation([(bw, bw)], small, Logic.S4, [bw])
        m = r.as_matrix()
        assert m.diagonal().all()

    def test_unique_cover_rule(self, small):
        bw = extend_max_consistent_avoiding(small.parse_base("=> q"), "p")
        r = close_relation([(bw, bw)], small, Logic.KT, [bw])
        c = small.parse_base("=> q")
        assert r.contains(bw, c)

    @pytest.mark.parametrize("logic", SAMPLED)
    def test_matches_naive_construction(self, small, small_oracle, logic):
        for seed in range(2):
            rel = sample_modal_relation(small, logic, seed)
            naive = small_oracle.generate(rel.seeds, rel.world_bases,
                                          transitive=logic.transitive, reflexive=logic.reflexive)
            assert small_oracle.succ(rel.as_matrix()) == naive

    def test_monotone_and_idempotent(self, small):
        a = sample_modal_relation(small, Logic.K4, 1)
        b = sample_modal_relation(small, Logic.K4, 2)
        union = close_relation(a.seeds + b.seeds, small, Logic.K4, a.world_bases + b.world_bases)
        ma, mu = a.as_matrix(), union.as_matrix()
        assert not (ma & ~mu).any()
        again = close_relation(ExtensionalRelation(small, mu).pairs(), small, Logic.K4, union.world_bases)
        assert np.array_equal(again.as_matrix(), mu)


class TestSample:
    @pytest.mark.parametrize("logic", SAMPLED)
    def test_deterministic(self, small, logic):
        a = sample_modal_relation(small, logic, 11)
        b = sample_modal_relation(small, logic, 11)
        assert a.seeds == b.seeds and a.world_bases == b.world_bases
        assert np.array_equal(a.as_matrix(), b.as_matrix())

    @pytest.mark.parametrize("logic", SAMPLED)
    def test_samples_are_gamma_modal(self, small, small_oracle, logic):
        for seed in range(4):
            r = sample_modal_relation(small, logic, seed)
            succ = small_oracle.succ(r.as_matrix())
            assert all(small_oracle.modal_conditions(succ).values())
            fr = small_oracle.frame_conditions(succ)
            assert all(fr[c] for c in logic.frame_conditions)

    def test_euclidean_sampling_refused(self, small):
        with pytest.raises(ValueError):
            sample_modal_relation(small, Logic.K5, 0)

    def test_three_atoms(self, pqr1):
        r = sample_modal_relation(pqr1, Logic.S4, 0)
        assert is_gamma_modal(r, Logic.S4)


class TestGeneratedMatchesExtensional:
    @pytest.mark.parametrize("logic", SAMPLED)
    def test_operators(self, small, logic):
        rng = np.random.default_rng(0)
        for seed in range(5):
            g = sample_modal_relation(small, logic, seed)
            e = g.materialize()
            for _ in range(20):
                y = rng.random(256) < rng.uniform(0.05, 0.95)
                assert np.array_equal(g.box_pre(y), e.box_pre(y))
                assert np.array_equal(g.dia_pre(y), e.dia_pre(y))
                assert np.array_equal(g.image(y), e.image(y))
            for x in rng.integers(256, size=10):
                assert np.array_equal(g.successors(int(x)), e.successors(int(x)))
                assert np.array_equal(g.sources(int(x)), e.matrix[:, int(x)])

    def test_contains(self, small):
        g = sample_modal_relation(small, Logic.S4, 4)
        m = g.as_matrix()
        for x, y in np.random.default_rng(1).integers(256, size=(200, 2)):
            assert g.contains(int(x), int(y)) == m[x, y]


class TestJson:
    def test_extensional_round_trip(self, tiny):
        for r in enumerate_modal_relations(tiny, Logic.K):
            assert relation_from_json(json.loads(json.dumps(r.to_json()))) == r

    @pytest.mark.parametrize("logic", SAMPLED)
    def test_generated_round_trip(self, small, logic):
        g = sample_modal_relation(small, logic, 2)
        back = relation_from_json(json.loads(json.dumps(g.to_json())))
        assert isinstance(back, GeneratedRelation)
        assert np.array_equal(back.as_matrix(), g.as_matrix())

    def test_flags_survive(self, small):
        g = GeneratedRelation(small, [], Logic.K5, (), transitive_closure=False, reflexive=False,
                              downward_closure=False)
        back = GeneratedRelation.from_json(g.to_json())
        assert (back.transitive_closure, back.reflexive, back.downward_closure) == (False, False, False)


class TestLargeUniverse:
    def test_probe_checks_on_a_million_bases(self):
        u = build_universe(["p", "q", "r", "s"], 1)
        t0 = time.perf_counter()
        r = sample_modal_relation(u, Logic.K, 0)
        rep = check_modal(r)
        assert rep.modal_ok
        assert rep.coverage.startswith("probe")
        assert time.perf_counter() - t0 < 120
