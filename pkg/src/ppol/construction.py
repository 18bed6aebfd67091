"""PPoL channel-hopping sequences: one channel per line of the pencil through 0."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .difference_sets import DifferenceSetError, PerfectDifferenceSet, pencil_partition, singer_difference_set
from .finite_field import factor_prime_power

__all__ = ["ChannelHoppingSequence", "build_ppol", "channel_at", "load_difference_set"]


@dataclass(frozen=True)
class ChannelHoppingSequence:
    """One period of a periodic hopping schedule; ``slots[t]`` is the channel at slot t."""

    p: int
    slots: tuple[int, ...]
    channel_count: int
    difference_set: Optional[PerfectDifferenceSet] = None

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(int(c) for c in self.slots))
        if len(self.slots) != self.p:
            raise ValueError(f"sequence has {len(self.slots)} slots, period is {self.p}")

    @property
    def m(self) -> Optional[int]:
        return self.difference_set.m if self.difference_set is not None else None

    def __len__(self):
        return self.p

    def __getitem__(self, t: int) -> int:
        return self.slots[t % self.p]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.slots, dtype=np.int64)

    def to_dict(self) -> dict:
        out = {"p": self.p, "m": self.m, "slots": list(self.slots)}
        if self.difference_set is not None:
            out["difference_set"] = list(self.difference_set.elements)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        return ",".join(map(str, self.slots)) + "\n"


def channel_at(seq: ChannelHoppingSequence, t: int) -> int:
    return seq.slots[t % seq.p]


def load_difference_set(m: int, elements) -> PerfectDifferenceSet:
    D = PerfectDifferenceSet.from_elements(elements)
    if D.m != m:
        raise DifferenceSetError(f"supplied set has order {D.m}, expected {m}")
    return D


def build_ppol(m: int, D: Optional[PerfectDifferenceSet] = None) -> ChannelHoppingSequence:
    """Channel 0 on the slots of D_0, channel i on D_{p-a_i} with slot 0 removed."""
    if factor_prime_power(m) is None:
        raise ValueError(f"order {m} is not a prime power")
    if D is None:
        D = singer_difference_set(m)
    elif not isinstance(D, PerfectDifferenceSet):
        D = load_difference_set(m, D)
    elif D.m != m:
        raise DifferenceSetError(f"supplied set has order {D.m}, expected {m}")
    owner = pencil_partition(D).block_of()
    if min(owner) < 0:
        raise AssertionError("pencil blocks do not cover Z_p")
    return ChannelHoppingSequence(D.p, tuple(owner), m + 1, D)
