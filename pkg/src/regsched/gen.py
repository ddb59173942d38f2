"""Seeded random instances for the two experimental profiles.

Draws come from a SplitMix64 stream in a fixed order so that ``(kind, n, seed)``
always yields the same instance:

* half profile: dues of the certain jobs, then lower bounds of the uncertain
  jobs, then their widths, then all weights;
* high profile: all lower bounds, then all widths, then all weights.

Within each group jobs are visited in id order.  In the half profile the first
``ceil(n/2)`` ids are the certain jobs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import Instance, Job, validate_and_normalize
from .errors import InvalidSize

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``; rejection sampling removes modulo bias."""
        span = hi - lo + 1
        if span <= 0:
            raise ValueError(f"empty range [{lo}, {hi}]")
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + x % span


class Profile(str, enum.Enum):
    HALF = "half"
    HIGH = "high"


@dataclass(frozen=True)
class GenProfile:
    kind: Profile
    n: int
    seed: int
    unit_weights: bool = False


def _draw(profile: GenProfile) -> tuple[list[int], list[int], list[int]]:
    n = profile.n
    if n < 2:
        raise InvalidSize(f"n must be >= 2, got {n}")
    rng = SplitMix64(profile.seed)
    third = max(1, n // 3)
    lo = [0] * n
    hi = [0] * n
    if Profile(profile.kind) is Profile.HALF:
        n_certain = (n + 1) // 2
        for i in range(n_certain):
            lo[i] = hi[i] = rng.randint(1, n)
        for i in range(n_certain, n):
            lo[i] = rng.randint(1, third)
        for i in range(n_certain, n):
            hi[i] = lo[i] + rng.randint(1, third)
    else:
        for i in range(n):
            lo[i] = rng.randint(1, third)
        for i in range(n):
            hi[i] = lo[i] + rng.randint(0, (5 * n) // 6)
    weights = [rng.randint(1, 100) for _ in range(n)]
    return lo, hi, weights


def raw_bounds(profile: GenProfile) -> list[tuple[int, int]]:
    """Pre-normalization ``(d_lo, d_hi)`` pairs, for range checks."""
    lo, hi, _ = _draw(profile)
    return list(zip(lo, hi))


def generate(profile: GenProfile) -> Instance:
    lo, hi, weights = _draw(profile)
    kind = Profile(profile.kind)
    n = profile.n
    meta: dict[str, object] = {"profile": kind.value, "n": n, "seed": profile.seed}
    if profile.unit_weights:
        weights = [1] * n
        meta["unit_weights"] = True
    name = f"{kind.value}_n{n}_s{profile.seed}" + ("_unit" if profile.unit_weights else "")
    jobs = tuple(Job(i + 1, weights[i], lo[i], hi[i]) for i in range(n))
    return validate_and_normalize(Instance(jobs, name, meta))
