"""Monte-Carlo two-user rendezvous: remapped PPoL against independent uniform hopping.

All randomness for a run is drawn up front from ``numpy.random.default_rng(seed)``
into per-trial arrays (channel sets, drifts, per-user seeds), and every slot draw
is a pure function of (per-user seed, slot), so results do not depend on how
trials are chunked or ordered.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .construction import build_ppol
from .difference_sets import PerfectDifferenceSet
from .finite_field import smallest_prime_power_geq
from .remap import WILDCARD, make_plan, slot_draws

__all__ = [
    "Scenario",
    "TTRStatistics",
    "ComparisonReport",
    "TrialStream",
    "trial_stream",
    "ppol_ttrs",
    "random_ttrs",
    "simulate_ppol",
    "simulate_random_baseline",
    "compare_ettr",
]

TTR_CONVENTION = "ttr counts slots before the meeting slot; a meeting in the first slot has ttr 0"


@dataclass(frozen=True)
class Scenario:
    """Either ``c1``/``c2`` are given explicitly, or sizes ``n1``, ``n2`` with overlap ``g`` are drawn."""

    N: int
    trials: int = 1000
    seed: int = 0
    c1: Optional[tuple[int, ...]] = None
    c2: Optional[tuple[int, ...]] = None
    n1: Optional[int] = None
    n2: Optional[int] = None
    g: Optional[int] = None
    drift: Optional[int] = None
    horizon: Optional[int] = None
    difference_set: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        for name in ("c1", "c2", "difference_set"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(sorted(set(int(c) for c in v))))
        if self.N < 2:
            raise ValueError("need at least two channels")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        explicit = self.c1 is not None or self.c2 is not None
        if explicit:
            if self.c1 is None or self.c2 is None:
                raise ValueError("explicit model needs both c1 and c2")
            if any(n is not None for n in (self.n1, self.n2, self.g)):
                raise ValueError("give either c1/c2 or n1/n2/g, not both")
            for c in (self.c1, self.c2):
                if not c or c[0] < 0 or c[-1] >= self.N:
                    raise ValueError(f"channel set {list(c)} not a nonempty subset of 0..{self.N - 1}")
        else:
            if self.n1 is None or self.n2 is None or self.g is None:
                raise ValueError("random model needs n1, n2 and g")
            if not (1 <= self.n1 <= self.N and 1 <= self.n2 <= self.N):
                raise ValueError("set sizes must lie in 1..N")
            if not 0 <= self.g <= min(self.n1, self.n2):
                raise ValueError(f"overlap g={self.g} exceeds min(n1, n2)")
            if self.n1 + self.n2 - self.g > self.N:
                raise ValueError("n1 + n2 - g exceeds N")
        if self.drift is not None and not 0 <= self.drift < self.p:
            raise ValueError(f"drift must lie in [0, {self.p})")
        if self.horizon is not None and self.horizon < 1:
            raise ValueError("horizon must be positive")

    @property
    def m(self) -> int:
        return smallest_prime_power_geq(self.N + 1)

    @property
    def p(self) -> int:
        return self.m * self.m + self.m + 1

    @property
    def slot_cap(self) -> int:
        return self.horizon if self.horizon is not None else self.p

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown scenario fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TrialStream:
    """Per-trial inputs shared by both simulators."""

    mask1: np.ndarray
    mask2: np.ndarray
    drift: np.ndarray
    seed1: np.ndarray
    seed2: np.ndarray
    base_seed1: np.ndarray
    base_seed2: np.ndarray

    @property
    def overlap(self) -> np.ndarray:
        return _popcount(self.mask1 & self.mask2)


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.array([bin(int(v)).count("1") for v in x], dtype=np.int64)


def _mask(chans) -> int:
    out = 0
    for c in chans:
        out |= 1 << c
    return out


def trial_stream(sc: Scenario) -> TrialStream:
    rng = np.random.default_rng(sc.seed)
    T = sc.trials
    if sc.c1 is not None:
        mask1 = np.full(T, _mask(sc.c1), dtype=np.int64)
        mask2 = np.full(T, _mask(sc.c2), dtype=np.int64)
    else:
        # random permutation of the channels: first g shared, then user 1's, then user 2's
        perm = np.argsort(rng.random((T, sc.N)), axis=1)
        bits = np.int64(1) << perm
        g, a, b = sc.g, sc.n1 - sc.g, sc.n2 - sc.g
        shared = bits[:, :g].sum(axis=1)
        mask1 = shared + bits[:, g : g + a].sum(axis=1)
        mask2 = shared + bits[:, g + a : g + a + b].sum(axis=1)
    if sc.drift is None:
        drift = rng.integers(0, sc.p, size=T)
    else:
        drift = np.full(T, sc.drift, dtype=np.int64)
    seeds = rng.integers(0, 2**63, size=(4, T), dtype=np.int64).astype(np.uint64)
    return TrialStream(mask1, mask2, drift.astype(np.int64), seeds[0], seeds[1], seeds[2], seeds[3])


@lru_cache(maxsize=4096)
def _plan_row(N: int, mask: int):
    chans = tuple(c for c in range(N) if mask >> c & 1)
    plan = make_plan(N, chans)
    return plan.label_map(), np.asarray(chans, dtype=np.int64)


def _user_slots(N: int, base: np.ndarray, masks: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """Remapped sequences (one row per trial), identical to ``remap_sequence`` for each row."""
    p = len(base)
    uniq, inv = np.unique(masks, return_inverse=True)
    rows = [_plan_row(N, int(u)) for u in uniq]
    labels = np.stack([r[0] for r in rows])
    chans = np.full((len(rows), N), WILDCARD, dtype=np.int64)
    sizes = np.empty(len(rows), dtype=np.int64)
    for k, (_, ch) in enumerate(rows):
        chans[k, : len(ch)] = ch
        sizes[k] = len(ch)
    slots = labels[inv][:, base]
    draws = slot_draws(seeds[:, None], np.arange(p, dtype=np.uint64)[None, :], sizes[inv][:, None])
    picked = chans[inv[:, None], draws]
    return np.where(slots == WILDCARD, picked, slots)


def _first_hits(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    eq = x == y
    met = eq.any(axis=1)
    return np.where(met, eq.argmax(axis=1), -1)


def ppol_ttrs(sc: Scenario, stream: Optional[TrialStream] = None, chunk: int = 8192) -> np.ndarray:
    """Per-trial TTR for remapped PPoL users (``-1`` when no meeting within the horizon)."""
    stream = stream if stream is not None else trial_stream(sc)
    D = PerfectDifferenceSet.from_elements(sc.difference_set) if sc.difference_set else None
    base = build_ppol(sc.m, D).as_array()
    p = len(base)
    H = sc.slot_cap
    t = np.arange(H)
    out = np.empty(sc.trials, dtype=np.int64)
    for lo in range(0, sc.trials, chunk):
        hi = min(lo + chunk, sc.trials)
        s1 = _user_slots(sc.N, base, stream.mask1[lo:hi], stream.seed1[lo:hi])
        s2 = _user_slots(sc.N, base, stream.mask2[lo:hi], stream.seed2[lo:hi])
        rows = np.arange(hi - lo)[:, None]
        x = s1[:, t % p]
        y = s2[rows, (t[None, :] + stream.drift[lo:hi, None]) % p]
        out[lo:hi] = _first_hits(x, y)
    return out


def random_ttrs(sc: Scenario, stream: Optional[TrialStream] = None, chunk: int = 8192) -> np.ndarray:
    """Per-trial TTR when each user picks a uniform available channel every slot."""
    stream = stream if stream is not None else trial_stream(sc)
    H = sc.slot_cap
    t = np.arange(H, dtype=np.uint64)
    out = np.empty(sc.trials, dtype=np.int64)
    for lo in range(0, sc.trials, chunk):
        hi = min(lo + chunk, sc.trials)
        x = _uniform_hops(sc.N, stream.mask1[lo:hi], stream.base_seed1[lo:hi], t)
        y = _uniform_hops(sc.N, stream.mask2[lo:hi], stream.base_seed2[lo:hi], t + stream.drift[lo:hi, None].astype(np.uint64))
        out[lo:hi] = _first_hits(x, y)
    return out


def _uniform_hops(N: int, masks: np.ndarray, seeds: np.ndarray, t: np.ndarray) -> np.ndarray:
    uniq, inv = np.unique(masks, return_inverse=True)
    chans = np.full((len(uniq), N), WILDCARD, dtype=np.int64)
    sizes = np.empty(len(uniq), dtype=np.int64)
    for k, u in enumerate(uniq):
        ch = [c for c in range(N) if int(u) >> c & 1]
        chans[k, : len(ch)] = ch
        sizes[k] = len(ch)
    t = np.broadcast_to(t, (len(masks), t.shape[-1]))
    draws = slot_draws(seeds[:, None], t, sizes[inv][:, None])
    return chans[inv[:, None], draws]


@dataclass(frozen=True)
class TTRStatistics:
    algorithm: str
    trials: int
    successes: int
    failures: int
    horizon: int
    mean: Optional[float]
    max: Optional[int]
    p50: Optional[float]
    p90: Optional[float]
    p99: Optional[float]
    qualifying_trials: int
    qualifying_failures: int
    qualifying_max: Optional[int]
    convention: str = TTR_CONVENTION

    @property
    def ettr(self) -> Optional[float]:
        return self.mean

    def to_dict(self) -> dict:
        return asdict(self)


def _statistics(name: str, ttrs: np.ndarray, overlap: np.ndarray, horizon: int) -> TTRStatistics:
    ok = ttrs >= 0
    good = np.sort(ttrs[ok])
    qual = overlap >= 2
    qual_ok = ttrs[qual & ok]

    def q(level):
        return float(np.quantile(good, level, method="inverted_cdf")) if good.size else None

    return TTRStatistics(
        algorithm=name,
        trials=int(ttrs.size),
        successes=int(ok.sum()),
        failures=int((~ok).sum()),
        horizon=horizon,
        mean=float(good.mean()) if good.size else None,
        max=int(good[-1]) if good.size else None,
        p50=q(0.5),
        p90=q(0.9),
        p99=q(0.99),
        qualifying_trials=int(qual.sum()),
        qualifying_failures=int((qual & ~ok).sum()),
        qualifying_max=int(qual_ok.max()) if qual_ok.size else None,
    )


def simulate_ppol(sc: Scenario) -> TTRStatistics:
    stream = trial_stream(sc)
    return _statistics("ppol", ppol_ttrs(sc, stream), stream.overlap, sc.slot_cap)


def simulate_random_baseline(sc: Scenario) -> TTRStatistics:
    stream = trial_stream(sc)
    return _statistics("random", random_ttrs(sc, stream), stream.overlap, sc.slot_cap)


@dataclass(frozen=True)
class ComparisonReport:
    scenario: Scenario
    ppol: TTRStatistics
    random: TTRStatistics

    @property
    def ratio(self) -> Optional[float]:
        if self.ppol.mean is None or not self.random.mean:
            return None
        return self.ppol.mean / self.random.mean

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "m": self.scenario.m,
            "p": self.scenario.p,
            "ppol": self.ppol.to_dict(),
            "random": self.random.to_dict(),
            "ettr_ratio": self.ratio,
        }

    def to_csv(self) -> str:
        return statistics_csv([self.ppol, self.random])


def statistics_csv(stats: list[TTRStatistics]) -> str:
    cols = [f for f in TTRStatistics.__dataclass_fields__ if f != "convention"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for s in stats:
        w.writerow(["" if getattr(s, c) is None else getattr(s, c) for c in cols])
    return buf.getvalue()


def compare_ettr(sc: Scenario) -> ComparisonReport:
    """Both simulators on the same channel sets and drifts."""
    stream = trial_stream(sc)
    overlap = stream.overlap
    ppol = _statistics("ppol", ppol_ttrs(sc, stream), overlap, sc.slot_cap)
    rand = _statistics("random", random_ttrs(sc, stream), overlap, sc.slot_cap)
    return ComparisonReport(sc, ppol, rand)
