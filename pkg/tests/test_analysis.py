import json
import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppol.analysis import (
    EnumerationBudgetError,
    dor_profile,
    failing_pair_prediction,
    ttr,
    verify_corollary1,
    verify_theorem1,
    verify_theorem2,
)
from ppol.construction import build_ppol
from ppol.difference_sets import PerfectDifferenceSet
from ppol.remap import WILDCARD, remapped_ppol

from oracles import naive_rendezvous_channels, naive_ttr

EXAMPLE_M3_D = PerfectDifferenceSet.from_elements([0, 1, 4, 6])
EXAMPLE_M3_KJ = [(1, 0), (3, 2), (2, 1), (2, 0), (3, 1), (3, 0), (0, 3), (1, 3), (0, 2), (1, 2), (2, 3), (0, 1)]
T0 = [1, 6, 4, 4, 6, 6, 0, 1, 0, 1, 4, 0]


@pytest.fixture(scope="module")
def example_m3():
    return build_ppol(3, EXAMPLE_M3_D)


class TestDoRProfile:
    def test_d1(self, example_m3):
        prof = dor_profile(example_m3)
        assert prof.failing_channels[1] == {1}
        assert prof.values[1] == 3

    def test_d3(self, example_m3):
        prof = dor_profile(example_m3)
        assert prof.failing_channels[3] == {1, 2}
        assert prof.values[3] == 2

    def test_at_most_two_failing(self, example_m3):
        prof = dor_profile(example_m3)
        assert all(len(f) <= 2 for f in prof.failing_channels.values())

    def test_failing_lists(self, example_m3):
        prof = dor_profile(example_m3)
        fails = {c: {d for d in range(1, 13) if c in prof.failing_channels[d]} for c in range(4)}
        assert fails == {0: set(), 1: {1, 3, 5, 8, 10, 12}, 2: {2, 3, 4, 9, 10, 11}, 3: {2, 5, 6, 7, 8, 11}}

    @pytest.mark.parametrize("m", [2, 3, 4, 5, 7, 8])
    def test_matches_naive_and_witnesses_replay(self, m):
        seq = build_ppol(m)
        s = seq.slots
        prof = dor_profile(seq)
        for d in range(1, seq.p):
            chans = naive_rendezvous_channels(s, d)
            assert prof.values[d] == len(chans)
            assert prof.values[d] + len(prof.failing_channels[d]) == m + 1
            assert 0 in chans
            for c in chans:
                t = prof.witnesses[(d, c)]
                assert s[t] == s[(t + d) % seq.p] == c

    def test_csv(self, example_m3):
        lines = dor_profile(example_m3).to_csv().splitlines()
        assert lines[0] == "d,DoR,failing_channels"
        assert lines[3] == "3,2,1;2"

    def test_json(self, example_m3):
        data = json.loads(json.dumps(dor_profile(example_m3).to_dict()))
        assert data["min_dor"] == 2


class TestFailingPair:
    def test_example_m3_row(self):
        assert [failing_pair_prediction(EXAMPLE_M3_D, d) for d in range(1, 13)] == EXAMPLE_M3_KJ

    @pytest.mark.parametrize("d, pair", [(2, (3, 2)), (12, (0, 1)), (7, (0, 3))])
    def test_examples(self, d, pair):
        assert failing_pair_prediction(EXAMPLE_M3_D, d) == pair

    def test_drift_range(self):
        with pytest.raises(ValueError):
            failing_pair_prediction(EXAMPLE_M3_D, 0)


def test_red_marks_are_witnesses_for_reverse_drift(example_m3):
    # the printed t0(d) satisfy c(t0) = c(t0 - d) = 0; under c(t) = c(t+d) the witness is t0 - d
    s = example_m3.slots
    for d, t0 in zip(range(1, 13), T0):
        assert s[t0] == s[(t0 - d) % 13] == 0
        w = (t0 - d) % 13
        assert s[w] == s[(w + d) % 13] == 0


class TestTTR:
    def test_zero_drift(self, example_m3):
        out = ttr(example_m3, example_m3, 0)
        assert (out.ttr, out.channel) == (0, 0)

    def test_drift_3(self, example_m3):
        out = ttr(example_m3, example_m3, 3)
        assert (out.ttr, out.channel) == (1, 0)

    def test_all_wildcards(self, example_m3):
        out = ttr([WILDCARD] * 13, example_m3, 0)
        assert out.ttr is None and not out.met

    def test_wildcards_never_match_each_other(self):
        assert ttr([WILDCARD] * 5, [WILDCARD] * 5, 2).ttr is None

    def test_horizon(self, example_m3):
        with pytest.raises(ValueError):
            ttr(example_m3, example_m3, 0, horizon=0)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.integers(-1, 3), min_size=1, max_size=15),
    st.lists(st.integers(-1, 3), min_size=1, max_size=15),
    st.integers(0, 20),
    st.integers(1, 40),
)
def test_ttr_matches_naive(s1, s2, d, horizon):
    out = ttr(s1, s2, d, horizon)
    assert (out.ttr, out.channel) == naive_ttr(s1, s2, d, horizon)
    if out.met:
        assert s1[out.ttr % len(s1)] == s2[(out.ttr + d) % len(s2)] == out.channel


class TestVerifyTheorem1:
    @pytest.mark.parametrize("m", [2, 3, 8])
    def test_passes(self, m):
        r = verify_theorem1(m)
        assert r.passed
        assert r.min_dor >= m - 1

    def test_example_m3_min_dor(self):
        r = verify_theorem1(3, EXAMPLE_M3_D)
        assert r.passed and r.min_dor == 2

    def test_fano_set(self):
        r = verify_theorem1(2, PerfectDifferenceSet.from_elements([0, 1, 3]))
        assert r.passed and r.p == 7


class TestVerifyTheorem2:
    def test_n4(self):
        r = verify_theorem2(4)
        assert r.passed
        assert (r.m, r.p, r.bound) == (5, 31, 31)
        assert r.mttr_slots <= 31
        assert r.bound_applies

    def test_single_overlap_pairs_reported_not_asserted(self):
        r = verify_theorem2(4)
        assert r.single_overlap_pairs > 0
        assert r.passed

    def test_worst_case_replays(self):
        r = verify_theorem2(4)
        w = r.worst_case
        s1 = remapped_ppol(4, w["c1"])
        s2 = remapped_ppol(4, w["c2"])
        out = ttr(s1, s2, w["d"])
        assert out.ttr == r.mttr == w["ttr"]
        assert out.channel == w["channel"]

    def test_against_naive_enumeration_n3(self):
        N = 3
        subsets = [c for k in range(1, N + 1) for c in combinations(range(N), k)]
        seqs = {c: remapped_ppol(N, c).slots for c in subsets}
        p = len(next(iter(seqs.values())))
        worst = -1
        for c1 in subsets:
            for c2 in subsets:
                if len(set(c1) & set(c2)) < 2:
                    continue
                for d in range(p):
                    t, _ = naive_ttr(seqs[c1], seqs[c2], d, p)
                    assert t is not None
                    worst = max(worst, t)
        assert verify_theorem2(N).mttr == worst

    def test_pessimistic_bounds_random_resolutions(self):
        # a real random remap can only meet earlier than the wildcard version
        rng = random.Random(5)
        N = 5
        for _ in range(40):
            c1 = rng.sample(range(N), rng.randint(2, N))
            c2 = rng.sample(range(N), rng.randint(2, N))
            d = rng.randrange(57)
            pess = ttr(remapped_ppol(N, c1), remapped_ppol(N, c2), d)
            real = ttr(remapped_ppol(N, c1, rng.getrandbits(64)), remapped_ppol(N, c2, rng.getrandbits(64)), d)
            if pess.met:
                assert real.met and real.ttr <= pess.ttr

    def test_example_m3_set_injection(self):
        # N = 2 -> m = 3, so the m=3 example set can drive the remapped sequences
        r = verify_theorem2(2, EXAMPLE_M3_D)
        assert r.passed and r.difference_set == (0, 1, 4, 6)

    def test_budget(self):
        with pytest.raises(EnumerationBudgetError):
            verify_theorem2(9)


class TestVerifyCorollary1:
    def test_n4(self):
        r = verify_corollary1(4)
        assert r.passed and r.max_witness < 31

    def test_single_channel_pairs(self):
        N = 4
        for g in range(N):
            s = remapped_ppol(N, [g])
            for d in range(31):
                out = ttr(s, s, d)
                assert out.met and out.channel == g and out.ttr < 31

    def test_zero_drift_all_common_channels(self):
        s1 = remapped_ppol(4, [0, 1, 3])
        s2 = remapped_ppol(4, [1, 3])
        for g in (1, 3):
            assert any(a == b == g for a, b in zip(s1.slots, s2.slots))
