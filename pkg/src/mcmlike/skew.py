"""Skew-product dynamics on cylinder codes times the circle.

Finite-depth cylinders of the two-symbol code space stand in for infinite
sequences.  One step of the skew product drops the leading symbol: a leading
1 keeps the tail and multiplies the angle by n; a leading 0 flips the tail
and multiplies the angle by -d.  Codes whose forward orbit reaches the
all-ones cylinder are unburied; the rest are buried, split into preperiodic
(a later cylinder refines an earlier one) and undetermined-at-this-depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Set, Tuple

import numpy as np


class DepthExhausted(Exception):
    """A step was requested on a depth-1 code."""


@dataclass(frozen=True)
class CodeWord:
    bits: Tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 1 or any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be a nonempty 0/1 sequence")

    @property
    def depth(self) -> int:
        return len(self.bits)

    @classmethod
    def from_string(cls, s: str) -> "CodeWord":
        return cls(tuple(int(ch) for ch in s))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass
class SkewState:
    code: CodeWord
    angle: float

    def __post_init__(self):
        self.angle = self.angle % 1.0


@dataclass(frozen=True)
class Unburied:
    hit_time: int


@dataclass(frozen=True)
class BuriedPreperiodic:
    preperiod: int
    period: int


@dataclass(frozen=True)
class BuriedWandering:
    """Not unburied and no cylinder repeat within the horizon."""


def code_step(c: CodeWord) -> CodeWord:
    """Base (code-only) map: drop the head; a 0 head flips the tail."""
    if c.depth < 2:
        raise DepthExhausted("cannot step a depth-1 code")
    head, tail = c.bits[0], c.bits[1:]
    if head == 1:
        return CodeWord(tail)
    return CodeWord(tuple(1 - b for b in tail))


def skew_step(s: SkewState, n: int, d: int) -> SkewState:
    """Full skew step: code_step on the code, z**n or z**(-d) on the angle."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    head = s.code.bits[0]
    new_code = code_step(s.code)
    if head == 1:
        return SkewState(new_code, (n * s.angle) % 1.0)
    return SkewState(new_code, (-d * s.angle) % 1.0)


def _to_int(c: CodeWord) -> Tuple[int, int]:
    x = 0
    for b in c.bits:
        x = (x << 1) | b
    return x, c.depth


def _int_step(x: int, length: int) -> Tuple[int, int]:
    mask = (1 << (length - 1)) - 1
    tail = x & mask
    if (x >> (length - 1)) & 1:
        return tail, length - 1
    return tail ^ mask, length - 1


def classify_code(c: CodeWord, horizon: int) -> object:
    """Classify one cylinder by iterating the base map up to horizon steps.

    Unburied(s) at the first s with an all-ones cylinder; otherwise
    BuriedPreperiodic(s1, s2-s1) for the first pair s1 < s2 (ordered by s2,
    then s1) where the step-s2 cylinder equals the step-s1 cylinder
    truncated; otherwise BuriedWandering.
    """
    if horizon < 0 or horizon > c.depth - 1:
        raise ValueError("need 0 <= horizon <= depth - 1")
    x, length = _to_int(c)
    traj = [(x, length)]
    for _ in range(horizon):
        x, length = _int_step(x, length)
        traj.append((x, length))
    for s, (xs, ls) in enumerate(traj):
        if xs == (1 << ls) - 1:
            return Unburied(s)
    for s2 in range(1, horizon + 1):
        x2, l2 = traj[s2]
        for s1 in range(s2):
            x1, l1 = traj[s1]
            if (x1 >> (l1 - l2)) == x2:
                return BuriedPreperiodic(s1, s2 - s1)
    return BuriedWandering()


@dataclass
class SkewCensus:
    depth: int
    horizon: int
    unburied: int
    buried_preperiodic: int
    undetermined: int

    @property
    def total(self) -> int:
        return self.unburied + self.buried_preperiodic + self.undetermined


def census_at_depth(k: int, horizon: int) -> SkewCensus:
    """Exhaustively classify all 2**k depth-k codes (vectorized).

    Mirrors classify_code exactly: unburied takes precedence, then the
    first (s2, s1) truncation repeat.  Counts always sum to 2**k.
    """
    if not (1 <= k <= 20):
        raise ValueError("need 1 <= k <= 20")
    if horizon < 0 or horizon > k - 1:
        raise ValueError("need 0 <= horizon <= k - 1")
    total = 1 << k
    traj: List[np.ndarray] = [np.arange(total, dtype=np.uint32)]
    for s in range(1, horizon + 1):
        prev = traj[-1]
        length = k - s + 1
        mask = np.uint32((1 << (length - 1)) - 1)
        head = (prev >> np.uint32(length - 1)) & np.uint32(1)
        tail = prev & mask
        traj.append(np.where(head == 1, tail, tail ^ mask))

    unburied = np.zeros(total, dtype=bool)
    for s, arr in enumerate(traj):
        target = np.uint32((1 << (k - s)) - 1)
        unburied |= arr == target

    preper = np.zeros(total, dtype=bool)
    open_mask = ~unburied
    for s2 in range(1, horizon + 1):
        for s1 in range(s2):
            trunc = traj[s1] >> np.uint32(s2 - s1)
            hit = open_mask & (traj[s2] == trunc)
            preper |= hit
            open_mask &= ~hit
    n_unburied = int(unburied.sum())
    n_preper = int(preper.sum())
    return SkewCensus(
        depth=k,
        horizon=horizon,
        unburied=n_unburied,
        buried_preperiodic=n_preper,
        undetermined=total - n_unburied - n_preper,
    )


def unburied_oracle(k: int, horizon: int) -> Set[int]:
    """Independent oracle: enumerate preimages of the all-ones cylinder.

    The 1-branch preimage of a cylinder w is 1w; the 0-branch preimage is
    0 flip(w).  Built by recursion on depth, never calling the forward map.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    full = (1 << k) - 1
    out = {full}
    if horizon <= 0 or k == 1:
        return out
    inner = unburied_oracle(k - 1, horizon - 1)
    high = 1 << (k - 1)
    mask = high - 1
    for w in inner:
        out.add(high | w)  # prepend 1
        out.add(w ^ mask)  # prepend 0 to the flipped word
    return out
