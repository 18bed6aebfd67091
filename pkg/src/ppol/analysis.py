"""Exhaustive rendezvous checks for PPoL and remapped PPoL sequences.

Conventions used throughout:

* user 1 is on ``seq1[t]`` while user 2 is on ``seq2[t + d]`` (indices mod the period);
* a time-to-rendezvous is the first slot index ``t >= 0`` where they coincide, so a
  meeting in the very first slot has TTR 0 and "within p slots" means ``TTR < p``;
* WILDCARD slots (randomly remapped labels, pessimistic semantics) never match.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .construction import ChannelHoppingSequence, build_ppol
from .difference_sets import PerfectDifferenceSet, difference_pairs
from .finite_field import is_prime_power, smallest_prime_power_geq
from .remap import WILDCARD, make_plan, remap_sequence_pessimistic

__all__ = [
    "EnumerationBudgetError",
    "DoRProfile",
    "RendezvousOutcome",
    "Theorem1Report",
    "MTTRReport",
    "Corollary1Report",
    "dor_profile",
    "failing_pair_prediction",
    "ttr",
    "verify_theorem1",
    "verify_theorem2",
    "verify_corollary1",
    "pessimistic_table",
    "MAX_EXHAUSTIVE_N",
]

MAX_EXHAUSTIVE_N = 8


class EnumerationBudgetError(RuntimeError):
    pass


def _as_array(seq) -> np.ndarray:
    if hasattr(seq, "as_array"):
        return seq.as_array()
    return np.asarray(seq, dtype=np.int64)


# -- degree of rendezvous ---------------------------------------------------------


@dataclass(frozen=True)
class DoRProfile:
    p: int
    channel_count: int
    values: dict[int, int]
    failing_channels: dict[int, frozenset[int]]
    witnesses: dict[tuple[int, int], int]

    @property
    def min_dor(self) -> int:
        return min(self.values.values())

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "channel_count": self.channel_count,
            "min_dor": self.min_dor,
            "drifts": [
                {
                    "d": d,
                    "dor": self.values[d],
                    "failing_channels": sorted(self.failing_channels[d]),
                    "witnesses": {
                        str(c): self.witnesses[(d, c)]
                        for c in range(self.channel_count)
                        if (d, c) in self.witnesses
                    },
                }
                for d in sorted(self.values)
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["d", "DoR", "failing_channels"])
        for d in sorted(self.values):
            w.writerow([d, self.values[d], ";".join(map(str, sorted(self.failing_channels[d])))])
        return buf.getvalue()


def dor_profile(seq) -> DoRProfile:
    """Rendezvous channels of ``seq`` against its own d-shift, for every ``d`` in ``[1, p)``."""
    s = _as_array(seq)
    p = len(s)
    count = getattr(seq, "channel_count", int(s.max()) + 1)
    t = np.arange(p)
    values, failing, witnesses = {}, {}, {}
    for d in range(1, p):
        shifted = s[(t + d) % p]
        hits = np.flatnonzero((s == shifted) & (s != WILDCARD))
        seen = set()
        for tt in hits.tolist():
            c = int(s[tt])
            if c not in seen:
                seen.add(c)
                witnesses[(d, c)] = tt
        values[d] = len(seen)
        failing[d] = frozenset(range(count)) - seen
    return DoRProfile(p, count, values, failing, witnesses)


def failing_pair_prediction(D: PerfectDifferenceSet, d: int) -> tuple[int, int]:
    """Indices ``(x, y)`` with ``d == a_x - a_y (mod p)``; only channels x and y may fail at drift d."""
    if not 1 <= d < D.p:
        raise ValueError(f"drift {d} outside [1, {D.p})")
    (pair,) = difference_pairs(D.elements, d, D.p)
    return pair


# -- time to rendezvous ---------------------------------------------------------------


@dataclass(frozen=True)
class RendezvousOutcome:
    d: int
    ttr: Optional[int]
    channel: Optional[int]

    @property
    def met(self) -> bool:
        return self.ttr is not None


def ttr(seq1, seq2, d: int, horizon: Optional[int] = None) -> RendezvousOutcome:
    """First ``t`` in ``[0, horizon)`` with ``seq1[t] == seq2[t + d]`` (both periodic)."""
    a, b = _as_array(seq1), _as_array(seq2)
    if horizon is None:
        horizon = max(len(a), len(b))
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    t = np.arange(horizon)
    x = a[t % len(a)]
    y = b[(t + d) % len(b)]
    hits = np.flatnonzero((x == y) & (x != WILDCARD))
    if hits.size == 0:
        return RendezvousOutcome(d, None, None)
    t0 = int(hits[0])
    return RendezvousOutcome(d, t0, int(x[t0]))


# -- theorem checks -------------------------------------------------------------------


@dataclass(frozen=True)
class Theorem1Report:
    m: int
    p: int
    difference_set: tuple[int, ...]
    min_dor: int
    violations: tuple[dict, ...]
    profile: DoRProfile = field(repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "check": "theorem1",
            "passed": self.passed,
            "m": self.m,
            "p": self.p,
            "difference_set": list(self.difference_set),
            "min_dor": self.min_dor,
            "required_min_dor": self.m - 1,
            "violations": list(self.violations),
        }


def verify_theorem1(m: int, D: Optional[PerfectDifferenceSet] = None) -> Theorem1Report:
    """DoR(d) >= m - 1 for every nonzero drift, with failures confined to the predicted pair."""
    seq = build_ppol(m, D)
    D = seq.difference_set
    prof = dor_profile(seq)
    violations = []
    for d in range(1, D.p):
        predicted = set(failing_pair_prediction(D, d))
        extra = prof.failing_channels[d] - predicted
        if prof.values[d] < m - 1 or extra:
            violations.append({"d": d, "dor": prof.values[d], "unexpected_failures": sorted(extra)})
    return Theorem1Report(m, D.p, D.elements, prof.min_dor, tuple(violations), prof)


def _subsets(N: int) -> list[tuple[int, ...]]:
    out = []
    for size in range(1, N + 1):
        out.extend(combinations(range(N), size))
    return out


def pessimistic_table(N: int, D: Optional[PerfectDifferenceSet] = None):
    """All nonempty subsets of the N channels with their wildcard-remapped PPoL sequences."""
    subsets = _subsets(N)
    m = smallest_prime_power_geq(N + 1)
    base = build_ppol(m, D)
    table = np.stack([remap_sequence_pessimistic(base, make_plan(N, s)).as_array() for s in subsets])
    return subsets, base, table


def _shift_stack(table: np.ndarray) -> np.ndarray:
    # out[j, d, t] = table[j, (t + d) % p]
    p = table.shape[1]
    idx = (np.arange(p)[None, :] + np.arange(p)[:, None]) % p
    return table[:, idx]


def _check_budget(N: int, max_N: int) -> None:
    if N < 2:
        raise ValueError("need at least two channels")
    if N > max_N:
        raise EnumerationBudgetError(f"N={N} exceeds the exhaustive enumeration limit {max_N}")


@dataclass(frozen=True)
class MTTRReport:
    N: int
    m: int
    p: int
    difference_set: tuple[int, ...]
    scope: str
    pairs_checked: int
    mttr: int
    bound: int
    bound_applies: bool
    worst_case: Optional[dict]
    violations: tuple[dict, ...]
    single_overlap_pairs: int
    single_overlap_misses: int

    @property
    def mttr_slots(self) -> int:
        """Slots elapsed up to and including the worst-case meeting slot."""
        return self.mttr + 1

    @property
    def passed(self) -> bool:
        if self.violations:
            return False
        if self.mttr_slots > self.p:
            return False
        return not self.bound_applies or self.mttr_slots <= self.bound

    def to_dict(self) -> dict:
        return {
            "check": "theorem2",
            "passed": self.passed,
            "N": self.N,
            "m": self.m,
            "p": self.p,
            "difference_set": list(self.difference_set),
            "scope": self.scope,
            "pairs_checked": self.pairs_checked,
            "mttr": self.mttr,
            "mttr_slots": self.mttr_slots,
            "bound": self.bound,
            "bound_applies": self.bound_applies,
            "worst_case": self.worst_case,
            "violations": list(self.violations),
            "single_overlap_pairs": self.single_overlap_pairs,
            "single_overlap_misses": self.single_overlap_misses,
        }


def verify_theorem2(
    N: int, D: Optional[PerfectDifferenceSet] = None, max_N: int = MAX_EXHAUSTIVE_N
) -> MTTRReport:
    """Certify rendezvous within one period for all subset pairs sharing >= 2 channels.

    Every ordered pair of nonempty subsets and every drift in ``[0, p)`` is
    checked on wildcard sequences, so the result holds for any outcome of the
    random remapping. Pairs sharing one channel are counted but not asserted.
    """
    _check_budget(N, max_N)
    subsets, base, table = pessimistic_table(N, D)
    p = base.p
    m = base.channel_count - 1
    shifted = _shift_stack(table)
    sets = [frozenset(s) for s in subsets]
    mttr = -1
    worst = None
    violations = []
    checked = 0
    single_pairs = single_miss = 0
    for i, s1 in enumerate(table):
        eq = (shifted == s1[None, None, :]) & (s1 != WILDCARD)[None, None, :]
        met = eq.any(axis=2)
        first = eq.argmax(axis=2)
        for j, c2 in enumerate(sets):
            common = len(sets[i] & c2)
            if common == 1:
                single_pairs += 1
                single_miss += int((~met[j]).sum())
            if common < 2:
                continue
            checked += 1
            if not met[j].all():
                for d in np.flatnonzero(~met[j]).tolist():
                    violations.append({"c1": list(subsets[i]), "c2": list(subsets[j]), "d": d})
                continue
            row = first[j]
            d = int(row.argmax())
            if row[d] > mttr:
                mttr = int(row[d])
                t = mttr
                worst = {"c1": list(subsets[i]), "c2": list(subsets[j]), "d": d, "ttr": t, "channel": int(s1[t])}
    return MTTRReport(
        N=N,
        m=m,
        p=p,
        difference_set=base.difference_set.elements,
        scope=f"all ordered pairs of nonempty subsets of 0..{N - 1} sharing >= 2 channels, all drifts 0..{p - 1}, "
        "wildcard (pessimistic) remapping",
        pairs_checked=checked,
        mttr=mttr,
        bound=N * N + 3 * N + 3,
        bound_applies=is_prime_power(N + 1),
        worst_case=worst,
        violations=tuple(violations),
        single_overlap_pairs=single_pairs,
        single_overlap_misses=single_miss,
    )


@dataclass(frozen=True)
class Corollary1Report:
    N: int
    m: int
    p: int
    difference_set: tuple[int, ...]
    scope: str
    pairs_checked: int
    channel_checks: int
    max_witness: int
    violations: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return not self.violations and self.max_witness < self.p

    def to_dict(self) -> dict:
        return {
            "check": "corollary1",
            "passed": self.passed,
            "N": self.N,
            "m": self.m,
            "p": self.p,
            "difference_set": list(self.difference_set),
            "scope": self.scope,
            "pairs_checked": self.pairs_checked,
            "channel_checks": self.channel_checks,
            "max_witness": self.max_witness,
            "violations": list(self.violations),
        }


def verify_corollary1(
    N: int, D: Optional[PerfectDifferenceSet] = None, max_N: int = MAX_EXHAUSTIVE_N
) -> Corollary1Report:
    """Every common channel is a rendezvous channel when both users have at most (N+2)/2 channels."""
    _check_budget(N, max_N)
    subsets, base, table = pessimistic_table(N, D)
    p = base.p
    small = [k for k, s in enumerate(subsets) if 2 * len(s) <= N + 2]
    table = table[small]
    subsets = [subsets[k] for k in small]
    shifted = _shift_stack(table)
    sets = [frozenset(s) for s in subsets]
    violations = []
    checked = channel_checks = 0
    max_witness = -1
    for i, s1 in enumerate(table):
        eq = shifted == s1[None, None, :]
        per_channel = {}
        for g in sets[i]:
            on_g = eq & (s1 == g)[None, None, :]
            per_channel[g] = (on_g.any(axis=2), on_g.argmax(axis=2))
        for j, c2 in enumerate(sets):
            common = sorted(sets[i] & c2)
            if not common:
                continue
            checked += 1
            for g in common:
                met, first = per_channel[g]
                channel_checks += p
                if not met[j].all():
                    for d in np.flatnonzero(~met[j]).tolist():
                        violations.append({"c1": list(subsets[i]), "c2": list(subsets[j]), "d": d, "channel": g})
                else:
                    max_witness = max(max_witness, int(first[j].max()))
    return Corollary1Report(
        N=N,
        m=base.channel_count - 1,
        p=p,
        difference_set=base.difference_set.elements,
        scope=f"ordered pairs of subsets of 0..{N - 1} with max size <= (N+2)/2 sharing >= 1 channel, "
        f"every common channel, all drifts 0..{p - 1}, wildcard (pessimistic) remapping",
        pairs_checked=checked,
        channel_checks=channel_checks,
        max_witness=max_witness,
        violations=tuple(violations),
    )
