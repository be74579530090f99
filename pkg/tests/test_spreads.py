from collections import Counter
from itertools import combinations, permutations

import pytest

from mubforge.classes import ClassError, enumerate_all_classes
from mubforge.pauli import compose, independent, power, symplectic_form
from mubforge.spreads import (
    CANDIDATE,
    CERTIFIED,
    COMPLETE,
    BudgetExhausted,
    ClassSet,
    UnextCertificate,
    WorkBudget,
    assemble_unextendible,
    certified,
    build_complete_set,
    certify_unextendible,
    iter_complete_sets,
    meeting_profile,
    new_class_index,
    new_classes_from_subset,
    scan_subsets,
    search_unextendible,
    theorem2_scan,
)

from . import oracles


def names(fixture, classes):
    return sorted(fixture.name_of(c) for c in classes)


class TestWorkBudget:
    def test_spend_until_exhausted(self):
        b = WorkBudget(3)
        for _ in range(3):
            b.spend()
        assert b.exhausted
        with pytest.raises(BudgetExhausted):
            b.spend()
        assert b.used == 3

    def test_positive_limit(self):
        with pytest.raises(ValueError):
            WorkBudget(0)


class TestClassSet:
    def test_overlapping_rejected(self, d9):
        with pytest.raises(ClassError):
            ClassSet(3, (d9.classes["C1"], d9.classes["CI"]))

    def test_complete_needs_all_words(self, d9):
        with pytest.raises(ClassError):
            ClassSet(3, tuple(d9.subset(["C1", "C2"])), COMPLETE)

    def test_certified_needs_certificate(self, d9):
        with pytest.raises(ClassError):
            ClassSet(3, tuple(d9.subset(["C1", "C2"])), CERTIFIED)

    def test_round_trip(self, d9):
        for cs in d9.sets.values():
            back = ClassSet.from_record(cs.to_record())
            assert back == cs
            assert back.kind == cs.kind

    def test_key_ignores_order(self, d9):
        a = ClassSet(3, tuple(d9.subset(["C1", "C2"])))
        b = ClassSet(3, tuple(d9.subset(["C2", "C1"])))
        assert a.key == b.key and a.same_classes(b)


class TestCompleteSets:
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_partition(self, p):
        cs = build_complete_set(p)
        assert cs.kind == COMPLETE
        assert len(cs) == p * p + 1
        words = [w for c in cs.classes for w in c.members]
        assert len(words) == len(set(words)) == p**4 - 1

    def test_matches_d4_partition(self, d4):
        ours = {frozenset(c.members) for c in build_complete_set(2).classes}
        listed = {frozenset(c.members) for c in d4.sets["complete"].classes}
        # both are spreads of the same 15 words; the fixture one must be among those enumerated
        assert any({frozenset(c.members) for c in cs.classes} == listed for cs in iter_complete_sets(2))
        assert len(ours) == 5

    @pytest.mark.parametrize("p, count", [(2, 6), (3, 36)])
    def test_exhaustive_counts(self, p, count):
        sets = list(iter_complete_sets(p))
        assert len(sets) == len({s.key for s in sets}) == count

    def test_fixture_complete_set_is_enumerated(self, d9):
        key = d9.sets["complete"].key
        assert any(cs.key == key for cs in iter_complete_sets(3))

    def test_deterministic(self):
        assert build_complete_set(3, seed=7) == build_complete_set(3, seed=7)

    def test_budget_ends_walk_quietly(self):
        budget = WorkBudget(5)
        assert list(iter_complete_sets(3, budget=budget)) == []
        assert budget.exhausted


class TestNewClasses:
    def test_d9_first_stage(self, d9):
        new = new_classes_from_subset(d9.subset(["C1", "C2", "C5", "C7"]), 3)
        assert names(d9, new) == ["CI", "CII"]

    def test_d9_second_stage(self, d9):
        new = new_classes_from_subset(d9.subset(["CI", "C3", "C4", "C8"]), 3)
        assert names(d9, new) == ["CA"]

    def test_p2_triple_gives_one(self, d4):
        # the d=4 example itself forms its third class from S1, S2, S3
        new = new_classes_from_subset(d4.subset(["S1", "S2", "S3"]), 2)
        assert [frozenset(c.members) for c in new] == [frozenset(d4.classes["C3"].members)]

    def test_wrong_size(self, d9):
        with pytest.raises(ClassError, match="p\\+1"):
            new_classes_from_subset(d9.subset(["C1", "C2", "C5"]), 3)

    def test_overlapping_subset(self, d9):
        with pytest.raises(ClassError):
            new_classes_from_subset(d9.subset(["C1", "CI", "C5", "C7"]), 3)

    @pytest.mark.parametrize("p", [2, 3])
    def test_matches_brute_force(self, p):
        cs = build_complete_set(p)
        lagr = oracles.all_lagrangians(p)
        for idx in combinations(range(len(cs)), p + 1):
            sub = [cs.classes[i] for i in idx]
            union = set().union(*(c.members for c in sub))
            brute = {s for s in lagr if s <= union} - {frozenset(c.members) for c in sub}
            assert {frozenset(c.members) for c in new_classes_from_subset(sub, p)} == brute


class TestMeetingStructure:
    @pytest.mark.parametrize("p", [2, 3])
    def test_outside_classes_meet_p_plus_one(self, p):
        # every outside class draws its p+1 representatives from p+1 distinct classes
        for cs in iter_complete_sets(p):
            for c in enumerate_all_classes(p):
                if c in cs.classes:
                    continue
                owners = [next(i for i, s in enumerate(cs.classes) if r in s) for r in c.representatives]
                assert len(set(owners)) == p + 1
                assert set(meeting_profile(c, cs).values()) == {p - 1}

    def test_meeting_index_p5(self):
        cs = build_complete_set(5)
        groups = new_class_index(cs)
        assert sum(len(v) for v in groups.values()) == 156 - 26
        assert all(len(k) == 6 for k in groups)

    def test_index_agrees_with_scan(self):
        cs = build_complete_set(3)
        groups = new_class_index(cs)
        scan = scan_subsets(cs)
        assert {k: len(v) for k, v in groups.items()} == {k: v for k, v in scan.counts.items() if v}

    def test_new_class_counts_all_p3(self):
        hist = Counter()
        for cs in iter_complete_sets(3):
            hist.update(scan_subsets(cs).histogram)
        assert hist == Counter({0: 7020, 2: 540})

    def test_p2_counts(self):
        hist = Counter()
        for cs in iter_complete_sets(2):
            hist.update(scan_subsets(cs).histogram)
        assert hist == Counter({1: 60})

    def test_p5_group_sizes(self):
        # exhaustive over all 300 complete sets: outside classes always come in pairs
        sizes = Counter()
        sets = 0
        for cs in iter_complete_sets(5):
            sets += 1
            sizes.update(len(v) for v in new_class_index(cs).values())
        assert sets == 300
        assert sizes == Counter({2: 19500})


class TestFourSubsetScan:
    def test_fixture_scan(self, d9):
        scan = theorem2_scan(d9.sets["complete"])
        assert len(scan.counts) == 210
        assert scan.histogram == Counter({0: 195, 2: 15})
        assert scan.never_exactly_one and scan.max_new == 2

    def test_named_subset(self, d9):
        comp = d9.sets["complete"]
        idx = tuple(sorted(comp.index_of(c) for c in d9.subset(["C1", "C2", "C5", "C7"])))
        assert theorem2_scan(comp).counts[idx] == 2

    def test_zero_count_regression(self, d9):
        # first zero-count subset in scan order, frozen from a run of the scan
        comp = d9.sets["complete"]
        idx = tuple(sorted(comp.index_of(c) for c in d9.subset(["C1", "C2", "C3", "C4"])))
        assert theorem2_scan(comp).counts[idx] == 0

    def test_rejects_other_primes(self):
        with pytest.raises(ClassError):
            theorem2_scan(build_complete_set(2))

    def test_product_pair_completion(self, d9):
        # U1 V1 landing in a third class of the subset can be matched by an independent pair
        p = 3
        comp = d9.sets["complete"]
        for idx in combinations(range(10), 4):
            sub = [comp.classes[i] for i in idx]
            for a, b, c in permutations(sub, 3):
                for u1 in a.members:
                    for v1 in b.members:
                        if compose(u1, v1, p) not in c:
                            continue
                        assert any(
                            independent(u1, u2, p) and compose(u2, v2, p) in c
                            for u2 in a.members
                            for v2 in b.members
                        )

    @pytest.mark.parametrize("p", [3, 5])
    def test_power_rescales_commutation_constant(self, p):
        # a power of a generator matches any nonzero commutation constant and stays in its class
        cs = build_complete_set(p)
        a, b = cs.classes[0], cs.classes[1]
        for u in a.representatives:
            for v1 in b.members:
                c1 = symplectic_form(u, v1, p)
                if c1 == 0:
                    continue
                for v2 in b.members:
                    c2 = symplectic_form(u, v2, p)
                    if c2 == 0:
                        continue
                    hits = [j for j in range(1, p) if symplectic_form(u, power(v2, j, p), p) == c1]
                    assert len(hits) == 1 and power(v2, hits[0], p) in b


class TestAssemble:
    def test_d9_eight(self, d9):
        comp = d9.sets["complete"]
        idx = [comp.index_of(c) for c in d9.subset(["C1", "C2", "C5", "C7"])]
        out = assemble_unextendible(comp, idx)
        assert out.kind == CANDIDATE and len(out) == 8
        assert out.same_classes(d9.sets["unextendible_8"])
        assert names(d9, out.classes[:2]) == ["CI", "CII"]

    def test_d9_five(self, d9):
        eight = d9.sets["unextendible_8"]
        idx = [eight.index_of(c) for c in d9.subset(["CI", "C3", "C4", "C8"])]
        out = assemble_unextendible(eight, idx)
        assert len(out) == 5
        assert out.same_classes(d9.sets["unextendible_5"])

    def test_d4_triple(self, d4):
        comp = d4.sets["complete"]
        idx = [comp.index_of(c) for c in d4.subset(["S1", "S2", "S3"])]
        out = assemble_unextendible(comp, idx)
        assert out.same_classes(d4.sets["unextendible_3"])

    def test_no_new_class(self, d9):
        comp = d9.sets["complete"]
        idx = [comp.index_of(c) for c in d9.subset(["C1", "C2", "C3", "C4"])]
        with pytest.raises(ClassError, match="no new class"):
            assemble_unextendible(comp, idx)


class TestCertify:
    @pytest.mark.parametrize("name, residual", [("unextendible_8", 16), ("unextendible_5", 40)])
    def test_d9_sets(self, d9, name, residual):
        cert = certify_unextendible(d9.sets[name])
        assert cert.valid and cert.residual_word_count == residual
        assert cert.lagrangians_checked == 40

    def test_d4_residual(self, d4):
        cs = d4.sets["unextendible_3"]
        assert certify_unextendible(cs).valid
        used = set().union(*(c.members for c in cs.classes))
        assert sorted(w for w in oracles.words(2) if w not in used) == sorted(d4.residual)
        assert len(d4.residual) == 6

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_complete_set_is_trivially_unextendible(self, p):
        cert = certify_unextendible(build_complete_set(p))
        assert cert.valid and cert.residual_word_count == 0

    def test_witness(self, d9):
        cs = ClassSet(3, tuple(d9.subset(["CI", "CII", "C3"])))
        cert = certify_unextendible(cs)
        assert not cert.valid and cert.witness is not None
        assert not cert.witness.mask & (cs.classes[0].mask | cs.classes[1].mask | cs.classes[2].mask)
        with pytest.raises(ClassError):
            certified(cs)

    def test_certificate_round_trip(self, d9):
        cert = certify_unextendible(d9.sets["unextendible_5"])
        assert UnextCertificate.from_record(cert.to_record()) == cert

    @pytest.mark.parametrize("p, seed", [(2, 11), (3, 12)])
    def test_agrees_with_brute_force(self, p, seed):
        outcomes = Counter()
        for cs in oracles.random_disjoint_sets(p, 25, seed):
            ours = certify_unextendible(cs).valid
            assert ours == (not oracles.extends([set(c.members) for c in cs.classes], p))
            outcomes[ours] += 1
        assert outcomes[True] and outcomes[False]


class TestSearch:
    def test_p3_size8(self, d9):
        hits = search_unextendible(3, 8, 100_000)
        assert len(hits) == 135
        assert all(h.kind == CERTIFIED and h.certificate.valid for h in hits)
        assert any(h.key == d9.sets["unextendible_8"].key for h in hits)

    def test_p3_size7_empty(self):
        assert search_unextendible(3, 7, 100_000) == []

    def test_p2_size3(self, d4):
        hits = search_unextendible(2, 3, 100_000)
        assert len(hits) == 20
        assert any(h.key == d4.sets["unextendible_3"].key for h in hits)

    def test_p2_size4_empty(self):
        assert search_unextendible(2, 4, 100_000) == []

    def test_p5_size21_absent_after_exhaustive_walk(self):
        budget = WorkBudget(1_000_000)
        assert search_unextendible(5, 21, budget) == []
        assert not budget.exhausted

    def test_bad_target(self):
        with pytest.raises(ValueError):
            search_unextendible(3, 9, 1000)

    def test_tiny_budget_returns_empty(self):
        assert search_unextendible(3, 8, 3) == []

    def test_sorted_and_seed_stable(self):
        a = search_unextendible(3, 8, 5000, seed=4)
        b = search_unextendible(3, 8, 5000, seed=4)
        assert [h.to_record() for h in a] == [h.to_record() for h in b]
        assert [h.key for h in a] == sorted(h.key for h in a)
