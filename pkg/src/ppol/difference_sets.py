"""Planar (m^2+m+1, m+1, 1) perfect difference sets and the pencil of lines through 0."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Optional, Sequence

from .finite_field import Field, factor_prime_power, field_make, find_primitive_polynomial

__all__ = [
    "DifferenceSetError",
    "SearchLimitError",
    "PerfectDifferenceSet",
    "Line",
    "PencilPartition",
    "VerificationReport",
    "verify_perfect",
    "difference_pairs",
    "singer_difference_set",
    "brute_force_difference_set",
    "normalize_difference_set",
    "canonical_difference_set",
    "shift_line",
    "pencil_partition",
    "BRUTE_FORCE_MAX_ORDER",
]

BRUTE_FORCE_MAX_ORDER = 9


class DifferenceSetError(ValueError):
    pass


class SearchLimitError(RuntimeError):
    """The exhaustive search was asked to go beyond its budget."""


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    p: int
    elements: tuple[int, ...]
    duplicates: dict[int, int] = field(default_factory=dict)
    missing: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "p": self.p,
            "elements": list(self.elements),
            "duplicates": {str(k): v for k, v in sorted(self.duplicates.items())},
            "missing": list(self.missing),
        }

    def summary(self) -> str:
        if self.passed:
            return f"perfect difference set in Z_{self.p}: {list(self.elements)}"
        parts = []
        if self.duplicates:
            parts.append("duplicated " + ",".join(f"{r}x{c}" for r, c in sorted(self.duplicates.items())))
        if self.missing:
            parts.append("missing " + ",".join(map(str, self.missing)))
        return "not perfect: " + "; ".join(parts)


def verify_perfect(elements: Iterable[int], p: int) -> VerificationReport:
    """Count all ordered differences and check every nonzero residue appears exactly once."""
    elems = tuple(elements)
    counts = Counter((a - b) % p for i, a in enumerate(elems) for j, b in enumerate(elems) if i != j)
    # repeated members give a zero difference, which no perfect set has
    zero_pairs = counts.pop(0, 0)
    duplicates = {r: c for r, c in counts.items() if c > 1}
    if zero_pairs:
        duplicates[0] = zero_pairs
    missing = tuple(r for r in range(1, p) if counts[r] == 0)
    ok = not duplicates and not missing and all(0 <= a < p for a in elems)
    return VerificationReport(ok, p, elems, duplicates, missing)


@dataclass(frozen=True)
class PerfectDifferenceSet:
    """A normalized planar difference set: ``0 = a_0 < 1 = a_1 < a_2 < ... < a_m < p``."""

    m: int
    p: int
    elements: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(int(a) for a in self.elements))
        a = self.elements
        if self.p != self.m * self.m + self.m + 1:
            raise DifferenceSetError(f"p={self.p} is not m^2+m+1 for m={self.m}")
        if len(a) != self.m + 1:
            raise DifferenceSetError(f"expected {self.m + 1} elements, got {len(a)}")
        if list(a) != sorted(set(a)) or a[0] != 0 or a[1] != 1 or a[-1] >= self.p:
            raise DifferenceSetError(f"{list(a)} is not in normalized form 0 < 1 < ... < {self.p}")
        report = verify_perfect(a, self.p)
        if not report.passed:
            raise DifferenceSetError(report.summary())

    @classmethod
    def from_elements(cls, elements: Iterable[int], p: Optional[int] = None) -> "PerfectDifferenceSet":
        elems = sorted(set(int(a) for a in elements))
        m = len(elems) - 1
        if p is None:
            p = m * m + m + 1
        return cls(m, p, tuple(elems))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> int:
        return self.elements[i]

    def to_dict(self) -> dict:
        return {"m": self.m, "p": self.p, "elements": list(self.elements)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PerfectDifferenceSet":
        return cls(int(data["m"]), int(data["p"]), tuple(data["elements"]))

    @classmethod
    def from_json(cls, text: str) -> "PerfectDifferenceSet":
        return cls.from_dict(json.loads(text))


def difference_pairs(D: Sequence[int], ell: int, p: int) -> list[tuple[int, int]]:
    """All index pairs ``(i, j)`` with ``(D[i] - D[j]) % p == ell % p``, ``i != j``."""
    ell %= p
    return [(i, j) for i, a in enumerate(D) for j, b in enumerate(D) if i != j and (a - b) % p == ell]


# -- constructions --------------------------------------------------------------


def singer_difference_set(m: int) -> PerfectDifferenceSet:
    """Singer difference set of order ``m``, canonically normalized.

    Works in GF(m^3) = GF(m)[x]/(f) with f primitive, so x generates the
    multiplicative group. The exponents i whose power x^i has zero x^2
    coefficient form the nonzero part of a 2-dimensional GF(m)-subspace;
    reduced mod m^2+m+1 they give m+1 residues.
    """
    if factor_prime_power(m) is None:
        raise DifferenceSetError(f"order {m} is not a prime power")
    base = field_make(m)
    ext = Field(base.characteristic, base, find_primitive_polynomial(base, 3), tabulate=False)
    p = m * m + m + 1
    x = ext.x.value
    y = 1
    residues = set()
    for i in range(m**3 - 1):
        if ext.coefficients(y)[2] == 0:
            residues.add(i % p)
        y = ext.mul(y, x)
    if len(residues) != m + 1:
        raise ArithmeticError(f"Singer construction gave {len(residues)} residues, expected {m + 1}")
    return normalize_difference_set(residues, p)


def brute_force_difference_set(m: int, node_budget: Optional[int] = None) -> Optional[PerfectDifferenceSet]:
    """Lexicographically smallest normalized perfect difference set of order ``m``, by backtracking.

    Returns None when an exhaustive search finds nothing. Raises
    :class:`SearchLimitError` for ``m`` above the supported range or when
    ``node_budget`` search nodes are used up.
    """
    if m < 1:
        raise ValueError("order must be positive")
    if m > BRUTE_FORCE_MAX_ORDER:
        raise SearchLimitError(f"order {m} exceeds the exhaustive-search limit {BRUTE_FORCE_MAX_ORDER}")
    p = m * m + m + 1
    k = m + 1
    chosen = [0, 1]
    used = (1 << 1) | (1 << (p - 1))
    nodes = 0

    def extend(used: int) -> bool:
        nonlocal nodes
        if len(chosen) == k:
            return True
        need = k - len(chosen)
        for c in range(chosen[-1] + 1, p - need + 1):
            nodes += 1
            if node_budget is not None and nodes > node_budget:
                raise SearchLimitError(f"search budget of {node_budget} nodes exhausted at order {m}")
            bits = 0
            ok = True
            for a in chosen:
                d = c - a
                for r in (d, p - d):
                    b = 1 << r
                    if used & b or bits & b:
                        ok = False
                        break
                    bits |= b
                if not ok:
                    break
            if not ok:
                continue
            chosen.append(c)
            if extend(used | bits):
                return True
            chosen.pop()
        return False

    if not extend(used):
        return None
    return PerfectDifferenceSet(m, p, tuple(chosen))


def canonical_difference_set(elements: Iterable[int], p: int) -> tuple[int, ...]:
    """Lexicographic minimum of the sorted images ``u*D + s`` over units ``u`` and shifts ``s``."""
    elems = list(elements)
    best = None
    for u in range(1, p):
        if gcd(u, p) != 1:
            continue
        scaled = [u * a % p for a in elems]
        # the minimum contains 0, so only shifts sending a member to 0 matter
        for pivot in scaled:
            img = tuple(sorted((b - pivot) % p for b in scaled))
            if best is None or img < best:
                best = img
    return best


def normalize_difference_set(raw: Iterable[int], p: int) -> PerfectDifferenceSet:
    elems = sorted(set(int(a) % p for a in raw))
    report = verify_perfect(elems, p)
    if not report.passed:
        raise DifferenceSetError(report.summary())
    return PerfectDifferenceSet(len(elems) - 1, p, canonical_difference_set(elems, p))


# -- lines ----------------------------------------------------------------------


@dataclass(frozen=True)
class Line:
    """The translate ``D + shift`` (or that translate with point 0 removed)."""

    shift: int
    points: tuple[int, ...]
    punctured: bool = False

    def __contains__(self, t: int) -> bool:
        return t in self.points

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def shift_line(D: Sequence[int], ell: int, p: Optional[int] = None) -> Line:
    if p is None:
        p = D.p
    if not 0 <= ell < p:
        raise ValueError(f"shift {ell} outside Z_{p}")
    return Line(ell, tuple((a + ell) % p for a in D))


@dataclass(frozen=True)
class PencilPartition:
    """``[D_0, D_{p-a_1} minus 0, ..., D_{p-a_m} minus 0]``; block i is channel i's slot set."""

    base: PerfectDifferenceSet
    blocks: tuple[Line, ...]

    def block_of(self) -> list[int]:
        """Slot-indexed list of owning block numbers."""
        owner = [-1] * self.base.p
        for i, blk in enumerate(self.blocks):
            for t in blk:
                owner[t] = i
        return owner


def pencil_partition(D: PerfectDifferenceSet) -> PencilPartition:
    p = D.p
    blocks = [shift_line(D, 0)]
    for a in D.elements[1:]:
        line = shift_line(D, (p - a) % p)
        blocks.append(Line(line.shift, tuple(t for t in line.points if t != 0), punctured=True))
    return PencilPartition(D, tuple(blocks))
