import json
import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppol.difference_sets import (
    DifferenceSetError,
    PerfectDifferenceSet,
    SearchLimitError,
    brute_force_difference_set,
    canonical_difference_set,
    difference_pairs,
    normalize_difference_set,
    pencil_partition,
    shift_line,
    singer_difference_set,
    verify_perfect,
)

from oracles import all_normalized_difference_sets, is_perfect

ORDERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]
EXAMPLE_M3 = PerfectDifferenceSet.from_elements([0, 1, 4, 6])


class TestVerifyPerfect:
    def test_example_m3_set(self):
        assert verify_perfect([0, 1, 4, 6], 13).passed

    def test_fano(self):
        assert verify_perfect([0, 1, 3], 7).passed

    def test_duplicate_difference(self):
        r = verify_perfect([0, 1, 2, 4], 13)
        assert not r.passed
        assert r.duplicates[1] == 2
        assert 5 in r.missing

    def test_report_serializes(self):
        json.dumps(verify_perfect([0, 1, 2, 4], 13).to_dict())


class TestSinger:
    @pytest.mark.parametrize("m", ORDERS)
    def test_perfect_and_normalized(self, m):
        D = singer_difference_set(m)
        assert D.p == m * m + m + 1
        assert len(D) == m + 1
        assert D[0] == 0 and D[1] == 1
        assert list(D.elements) == sorted(D.elements)
        assert is_perfect(D.elements, D.p)

    def test_order_3_is_canonical(self):
        # all normalized (13,4,1) sets share one scale/shift orbit
        assert singer_difference_set(3).elements == (0, 1, 3, 9)
        assert EXAMPLE_M3.elements in all_normalized_difference_sets(3)

    def test_order_2(self):
        assert singer_difference_set(2).elements == (0, 1, 3)

    def test_rejects_non_prime_power(self):
        with pytest.raises(DifferenceSetError):
            singer_difference_set(6)

    def test_deterministic(self):
        assert singer_difference_set(8) == singer_difference_set(8)


class TestBruteForce:
    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_lexicographically_smallest(self, m):
        D = brute_force_difference_set(m)
        assert D.elements == all_normalized_difference_sets(m)[0]
        assert verify_perfect(D.elements, D.p).passed

    def test_order_2(self):
        assert brute_force_difference_set(2).elements == (0, 1, 3)

    def test_order_3(self):
        assert brute_force_difference_set(3).elements == (0, 1, 3, 9)

    def test_order_6_absent(self):
        assert brute_force_difference_set(6) is None

    def test_limit(self):
        with pytest.raises(SearchLimitError):
            brute_force_difference_set(10)

    def test_node_budget(self):
        with pytest.raises(SearchLimitError):
            brute_force_difference_set(6, node_budget=100)

    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_agrees_with_singer_on_validity(self, m):
        assert verify_perfect(singer_difference_set(m).elements, m * m + m + 1).passed
        assert verify_perfect(brute_force_difference_set(m).elements, m * m + m + 1).passed


class TestNormalize:
    def test_already_canonical(self):
        assert normalize_difference_set([0, 1, 3], 7).elements == (0, 1, 3)

    def test_example_m3_to_canonical(self):
        # oracle: minimum over all 12*13 affine images
        oracle = min(tuple(sorted((u * a + s) % 13 for a in (0, 1, 4, 6))) for u in range(1, 13) for s in range(13))
        assert oracle == (0, 1, 3, 9)
        assert normalize_difference_set([0, 1, 4, 6], 13).elements == oracle

    def test_shifted_input(self):
        D = normalize_difference_set([12, 0, 3, 5], 13)
        assert D.elements == (0, 1, 3, 9)

    def test_rejects_non_perfect(self):
        # {12,3,5,6} repeats differences 6 and 7
        with pytest.raises(DifferenceSetError):
            normalize_difference_set([12, 3, 5, 6], 13)

    @pytest.mark.parametrize("m", [2, 3, 4, 5, 7])
    def test_idempotent_and_orbit_canonical(self, m):
        D = singer_difference_set(m)
        p = D.p
        assert normalize_difference_set(D.elements, p) == D
        rng = random.Random(m)
        units = [u for u in range(1, p) if gcd(u, p) == 1]
        for _ in range(20):
            u, s = rng.choice(units), rng.randrange(p)
            image = [(u * a + s) % p for a in D.elements]
            assert normalize_difference_set(image, p) == D

    def test_canonical_orbit_is_affine_invariant_for_fano(self):
        assert canonical_difference_set([0, 1, 5], 7) == (0, 1, 3)


class TestLines:
    def test_shift_12(self):
        assert set(shift_line(EXAMPLE_M3, 12).points) == {12, 0, 3, 5}

    def test_shift_9(self):
        assert set(shift_line(EXAMPLE_M3, 9).points) == {9, 10, 0, 2}

    def test_zero_shift(self):
        assert shift_line(EXAMPLE_M3, 0).points == EXAMPLE_M3.elements

    def test_shift_out_of_range(self):
        with pytest.raises(ValueError):
            shift_line(EXAMPLE_M3, 13)

    def test_pencil_example_m3(self):
        blocks = [set(b.points) for b in pencil_partition(EXAMPLE_M3).blocks]
        assert blocks == [{0, 1, 4, 6}, {12, 3, 5}, {9, 10, 2}, {7, 8, 11}]

    def test_pencil_fano(self):
        D = PerfectDifferenceSet.from_elements([0, 1, 3])
        blocks = [set(b.points) for b in pencil_partition(D).blocks]
        assert blocks == [{0, 1, 3}, {6, 2}, {4, 5}]

    @pytest.mark.parametrize("m", ORDERS)
    def test_pencil_is_partition(self, m):
        D = singer_difference_set(m)
        blocks = pencil_partition(D).blocks
        assert [len(b) for b in blocks] == [m + 1] + [m] * m
        seen = [t for b in blocks for t in b.points]
        assert sorted(seen) == list(range(D.p))


class TestSerialization:
    def test_roundtrip(self):
        D = singer_difference_set(4)
        assert PerfectDifferenceSet.from_json(D.to_json()) == D
        assert json.loads(D.to_json()) == {"m": 4, "p": 21, "elements": list(D.elements)}

    def test_rejects_unnormalized(self):
        with pytest.raises(DifferenceSetError):
            PerfectDifferenceSet(3, 13, (1, 2, 5, 7))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 7, 8, 9]), st.data())
def test_unique_difference_and_shift(m, data):
    D = singer_difference_set(m)
    ell = data.draw(st.integers(1, D.p - 1))
    assert len(difference_pairs(D.elements, ell, D.p)) == 1
    assert verify_perfect(shift_line(D, ell).points, D.p).passed
