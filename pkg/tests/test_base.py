import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besmodal import lattice
from besmodal.base import (
    Base,
    RuleUniverse,
    SizeBoundError,
    all_bases,
    build_universe,
    closure_atoms,
    derives_atom,
    extend_max_consistent_avoiding,
    is_inconsistent,
    is_max_consistent,
    max_consistent_supersets,
    supersets,
)

from .oracle import naive_closure, rule_table


class TestUniverse:
    def test_one_atom(self, tiny):
        assert [r.render(tiny.alphabet) for r in tiny.rules] == ["=> p", "p => p"]

    @pytest.mark.parametrize("atoms,mp,count", [
        (["p"], 1, 2), (["p", "q"], 2, 8), (["p", "q", "r"], 1, 12),
        (["p", "q", "r"], 2, 21), (["p", "q", "r", "s"], 1, 20),
    ])
    def test_rule_counts(self, atoms, mp, count):
        u = build_universe(atoms, mp)
        assert u.n_rules == count
        assert len(set(u.rules)) == count
        assert all(r.premises.bit_count() <= mp for r in u.rules)

    @pytest.mark.parametrize("mp", [0, 3])
    def test_premise_bound(self, mp):
        with pytest.raises(ValueError):
            build_universe(["p", "q"], mp)

    def test_json_round_trip(self, small):
        assert RuleUniverse.from_json(json.loads(json.dumps(small.to_json()))) == small

    def test_parse_base(self, small):
        b = small.parse_base("=> p; p => q")
        assert b.render() == "{=> p; p => q}"
        assert Base.from_json(small, b.to_json()) == b
        with pytest.raises(KeyError):
            small.parse_base("p, q, r => p")

    def test_dense_limit(self):
        u = build_universe(["p", "q", "r", "s"], 2)
        assert u.n_rules == 44
        with pytest.raises(SizeBoundError):
            u.require_dense()


class TestClosure:
    def test_examples(self, small):
        assert closure_atoms(small.parse_base("")) == set()
        assert closure_atoms(small.parse_base("=> p; p => q")) == {"p", "q"}
        assert closure_atoms(small.parse_base("p => q")) == set()

    def test_derives(self, small):
        assert derives_atom(small.parse_base("=> p"), "p")
        assert not derives_atom(small.parse_base(""), "p")
        assert derives_atom(small.parse_base("=> p; p => q"), "q")

    def test_table_matches_naive(self, small):
        rules = rule_table(small)
        a = small.alphabet
        for m in range(small.n_bases):
            naive = naive_closure(rules, m)
            dense = {a[i] for i in range(len(a)) if small.closures[m] >> i & 1}
            assert naive == dense
            assert closure_atoms(small.base(m)) == naive

    def test_monotone(self, small):
        c = small.closures
        for m in range(small.n_bases):
            for i in range(small.n_rules):
                assert c[m] & ~c[m | 1 << i] == 0


class TestConsistency:
    def test_inconsistent_examples(self, small, tiny):
        assert is_inconsistent(small.parse_base("=> p; p => q"))
        assert not is_inconsistent(small.parse_base("=> p"))
        assert not is_inconsistent(small.parse_base(""))
        assert is_inconsistent(tiny.base(tiny.full_members))

    def test_max_consistent_examples(self, tiny):
        assert is_max_consistent(tiny.parse_base("p => p"))
        assert not is_max_consistent(tiny.parse_base(""))
        assert not is_max_consistent(tiny.base(tiny.full_members))

    def test_max_consistent_mask_matches_oracle(self, small_oracle, small):
        assert list(small.max_consistent_mask) == small_oracle.maxc
        assert list(small.inconsistent_mask) == small_oracle.inc
        for m in range(small.n_bases):
            assert is_max_consistent(small.base(m)) == small_oracle.maxc[m]

    @pytest.mark.parametrize("atoms,mp", [(["p"], 1), (["p", "q"], 1), (["p", "q"], 2), (["p", "q", "r"], 1)])
    def test_one_max_base_per_proper_atom_set(self, atoms, mp):
        # a maximal base takes every rule whose conclusion lies in its closure
        # or whose premises escape it, so the closure determines the base
        u = build_universe(atoms, mp)
        maxes = u.max_consistent_indices
        assert len(maxes) == 2 ** len(atoms) - 1
        assert len({int(u.closures[m]) for m in maxes}) == len(maxes)


class TestSupersets:
    def test_full(self, small):
        full = small.base(small.full_members)
        assert list(supersets(full)) == [full]

    def test_counts(self, tiny, small):
        assert len(list(supersets(tiny.base(0)))) == 4
        assert len(list(supersets(small.base(0b00111111)))) == 4

    def test_first_is_self(self, small):
        b = small.parse_base("=> q")
        s = list(supersets(b))
        assert s[0] == b and all(b <= c for c in s) and len(s) == 128

    def test_all_bases(self, tiny):
        assert [b.members for b in all_bases(tiny)] == [0, 1, 2, 3]


class TestExtension:
    def test_examples(self, tiny, small):
        assert extend_max_consistent_avoiding(tiny.base(0), "p") == tiny.parse_base("p => p")
        b = tiny.parse_base("p => p")
        assert extend_max_consistent_avoiding(b, "p") == b

    def test_avoiding_p_from_q(self, small):
        b = small.parse_base("=> q")
        out = extend_max_consistent_avoiding(b, "p")
        assert b <= out and not derives_atom(out, "p")
        # maximal among supersets that still avoid p
        for i in range(small.n_rules):
            if not out.members >> i & 1:
                assert derives_atom(small.base(out.members | 1 << i), "p")
        assert is_max_consistent(out)

    def test_rejects_deriving_base(self, small):
        with pytest.raises(ValueError):
            extend_max_consistent_avoiding(small.parse_base("=> p"), "p")

    def test_max_consistent_supersets(self, tiny, small, small_oracle):
        assert max_consistent_supersets(tiny.base(tiny.full_members)) == []
        b = tiny.parse_base("p => p")
        assert max_consistent_supersets(b) == [b]
        assert [c.members for c in max_consistent_supersets(tiny.base(0))] == [2]
        for m in range(0, small.n_bases, 7):
            expected = [c for c in small_oracle.sup[m] if small_oracle.maxc[c]]
            assert [c.members for c in max_consistent_supersets(small.base(m))] == sorted(expected)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.data())
def test_lattice_transforms_match_naive(n, data):
    size = 1 << n
    v = np.array(data.draw(st.lists(st.booleans(), min_size=size, max_size=size)))
    sup = [[c for c in range(size) if c & b == b] for b in range(size)]
    sub = [[c for c in range(size) if c & b == c] for b in range(size)]
    assert list(lattice.sup_all(v, n)) == [all(v[c] for c in sup[b]) for b in range(size)]
    assert list(lattice.sup_any(v, n)) == [any(v[c] for c in sup[b]) for b in range(size)]
    assert list(lattice.sub_all(v, n)) == [all(v[c] for c in sub[b]) for b in range(size)]
    assert list(lattice.sub_any(v, n)) == [any(v[c] for c in sub[b]) for b in range(size)]
    assert list(lattice.proper_sup_any(v, n)) == [any(v[c] for c in sup[b] if c != b) for b in range(size)]
    assert list(lattice.drop_bit_all(v, n)) == [
        all(v[b & ~(1 << i)] for i in range(n) if b >> i & 1) for b in range(size)
    ]
    b = data.draw(st.integers(0, size - 1))
    assert list(np.flatnonzero(lattice.subset_mask(size, b))) == sub[b]
    assert list(np.flatnonzero(lattice.superset_mask(size, b))) == sup[b]
