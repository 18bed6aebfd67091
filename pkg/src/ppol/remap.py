"""Remapping a PPoL sequence onto a user's available channels.

Labels outside the available set are replaced. When the user has few
channels (``2n <= N + 2``) the first ``n`` missing labels are paired, in
ascending order, with the ``n`` available channels, so each available channel
owns two lines of the pencil. Every other missing label is replaced by a
channel drawn uniformly per slot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from .construction import ChannelHoppingSequence, build_ppol
from .difference_sets import PerfectDifferenceSet
from .finite_field import smallest_prime_power_geq

__all__ = [
    "WILDCARD",
    "AvailableChannelSet",
    "RemapPlan",
    "RemappedSequence",
    "make_plan",
    "remap_sequence",
    "remap_sequence_pessimistic",
    "remapped_ppol",
    "slot_draws",
]

# marks a randomly remapped slot under pessimistic semantics; never matches anything
WILDCARD = -1

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class AvailableChannelSet:
    N: int
    channels: tuple[int, ...]

    def __post_init__(self):
        chans = tuple(sorted(set(int(c) for c in self.channels)))
        if len(chans) != len(tuple(self.channels)):
            raise ValueError(f"duplicate channels in {list(self.channels)}")
        object.__setattr__(self, "channels", chans)
        if not chans:
            raise ValueError("available channel set is empty")
        if chans[0] < 0 or chans[-1] >= self.N:
            raise ValueError(f"channels {list(chans)} not within 0..{self.N - 1}")

    @property
    def n(self) -> int:
        return len(self.channels)

    def __contains__(self, c: int) -> bool:
        return c in self.channels

    def __iter__(self):
        return iter(self.channels)

    def __len__(self):
        return len(self.channels)


@dataclass(frozen=True)
class RemapPlan:
    N: int
    m: int
    available: AvailableChannelSet
    complement: tuple[int, ...]
    deterministic_map: dict[int, int] = field(default_factory=dict)
    random_labels: tuple[int, ...] = ()
    case: int = 1

    @property
    def p(self) -> int:
        return self.m * self.m + self.m + 1

    @property
    def n(self) -> int:
        return self.available.n

    def label_map(self) -> np.ndarray:
        """Length ``m+1`` array: label -> channel, or WILDCARD for randomized labels."""
        out = np.full(self.m + 1, WILDCARD, dtype=np.int64)
        for c in self.available.channels:
            out[c] = c
        for src, dst in self.deterministic_map.items():
            out[src] = dst
        return out

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "m": self.m,
            "case": self.case,
            "available": list(self.available.channels),
            "complement_size": len(self.complement),
            "deterministic_map": {str(k): v for k, v in sorted(self.deterministic_map.items())},
            "random_labels": list(self.random_labels),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def make_plan(N: int, avail: Union[AvailableChannelSet, Iterable[int]]) -> RemapPlan:
    if N < 2:
        raise ValueError("need at least two channels")
    if not isinstance(avail, AvailableChannelSet):
        avail = AvailableChannelSet(N, tuple(avail))
    elif avail.N != N:
        raise ValueError(f"available set is over {avail.N} channels, plan is over {N}")
    m = smallest_prime_power_geq(N + 1)
    complement = tuple(c for c in range(m + 1) if c not in avail)
    n = avail.n
    if 2 * n <= N + 2:
        det = {complement[j]: avail.channels[j] for j in range(n)}
        return RemapPlan(N, m, avail, complement, det, complement[n:], case=2)
    return RemapPlan(N, m, avail, complement, {}, complement, case=1)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = x + np.uint64(0x9E3779B97F4A7C15)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def slot_draws(seed, t, n) -> np.ndarray:
    """Uniform index in ``[0, n)`` for slot ``t`` under ``seed``; a pure function of ``(seed, t)``.

    Broadcasts over array arguments. The modulo bias is below ``n / 2**64``.
    """
    seed = np.asarray(seed, dtype=np.uint64) if not isinstance(seed, int) else np.uint64(seed & _MASK64)
    t = np.asarray(t, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = _splitmix64(_splitmix64(seed) + t)
    return (h % np.asarray(n, dtype=np.uint64)).astype(np.int64)


@dataclass(frozen=True)
class RemappedSequence:
    base: ChannelHoppingSequence
    plan: RemapPlan
    rng_seed: Optional[int]
    slots: tuple[int, ...]

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def pessimistic(self) -> bool:
        return self.rng_seed is None

    def __getitem__(self, t: int) -> int:
        return self.slots[t % self.p]

    def __len__(self):
        return self.p

    def as_array(self) -> np.ndarray:
        return np.asarray(self.slots, dtype=np.int64)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "m": self.plan.m,
            "seed": self.rng_seed,
            "plan": self.plan.to_dict(),
            "slots": list(self.slots),
        }

    def to_csv(self) -> str:
        return ",".join(map(str, self.slots)) + "\n"


def _check(base: ChannelHoppingSequence, plan: RemapPlan) -> None:
    if base.channel_count != plan.m + 1 or base.p != plan.p:
        raise ValueError(
            f"base sequence (p={base.p}, {base.channel_count} labels) does not match plan (m={plan.m})"
        )


def _deterministic_slots(base: ChannelHoppingSequence, plan: RemapPlan) -> np.ndarray:
    return plan.label_map()[base.as_array()]


def remap_sequence(base: ChannelHoppingSequence, plan: RemapPlan, seed: int) -> RemappedSequence:
    _check(base, plan)
    slots = _deterministic_slots(base, plan)
    rand = slots == WILDCARD
    if rand.any():
        chans = np.asarray(plan.available.channels, dtype=np.int64)
        t = np.flatnonzero(rand)
        slots[t] = chans[slot_draws(int(seed), t, len(chans))]
    return RemappedSequence(base, plan, int(seed) & _MASK64, tuple(slots.tolist()))


def remap_sequence_pessimistic(base: ChannelHoppingSequence, plan: RemapPlan) -> RemappedSequence:
    """Randomized slots are left as WILDCARD so they can never produce a rendezvous."""
    _check(base, plan)
    return RemappedSequence(base, plan, None, tuple(_deterministic_slots(base, plan).tolist()))


def remapped_ppol(
    N: int,
    avail: Union[AvailableChannelSet, Iterable[int]],
    seed: Optional[int] = None,
    D: Optional[PerfectDifferenceSet] = None,
) -> RemappedSequence:
    """Build the base PPoL sequence for ``N`` channels and remap it; ``seed=None`` gives wildcards."""
    plan = make_plan(N, avail)
    base = build_ppol(plan.m, D)
    if seed is None:
        return remap_sequence_pessimistic(base, plan)
    return remap_sequence(base, plan, seed)
