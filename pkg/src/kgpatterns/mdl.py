"""Description-length primitives.

All lengths are real-valued bit counts; nothing is ever materialised as an
actual bitstream.  Logarithms are base 2 throughout.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Hashable

#: Pseudocount given to every element of a prequential code.
PREQUENTIAL_EPSILON = 0.5

_LN2 = math.log(2.0)


def log_uniform(n: int) -> float:
    """Bits needed to pick one element uniformly out of ``n``."""
    if n < 1:
        raise ValueError(f"log_uniform needs n >= 1, got {n}")
    return math.log2(n)


def log_binomial(n: int, k: int) -> float:
    """Bits needed to pick a ``k``-subset of an ``n``-set: log2 C(n, k)."""
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"log_binomial needs 0 <= k <= n, got n={n}, k={k}")
    if k == 0 or k == n:
        return 0.0
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) / _LN2


def universal_int(n: int) -> int:
    """Length of the Elias delta code of ``n + 1`` (so that 0 is encodable)."""
    if n < 0:
        raise ValueError(f"universal_int needs n >= 0, got {n}")
    m = n + 1
    nbits = m.bit_length() - 1  # floor(log2 m)
    return nbits + 2 * ((nbits + 1).bit_length() - 1) + 1


@dataclass
class UsageDistribution:
    """Usage counts of the elements of a finite universe."""

    universe_size: int
    counts: dict[Hashable, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.universe_size < 1:
            raise ValueError("universe_size must be positive")
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("counts must be non-negative")
        if sum(1 for c in self.counts.values() if c > 0) > self.universe_size:
            raise ValueError("more used elements than the universe holds")

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def prefix_code(dist: UsageDistribution, x: Hashable) -> float:
    """Optimal prefix-code length of ``x`` under the empirical distribution."""
    count = dist.counts.get(x, 0)
    total = dist.total
    if count <= 0 or total <= 0:
        raise ValueError(f"element {x!r} has no usage; a prefix code cannot encode it")
    return -math.log2(count / total)


def prequential(universe_size: int, counts: Mapping[Hashable, int] | Iterable[int]) -> float:
    """Length of a sequence under the prequential plug-in code.

    Only the usage of each element matters, so ``counts`` is either a mapping
    element -> usage or a plain iterable of usages.  Elements of the universe
    that never occur may be omitted.
    """
    if universe_size < 1:
        raise ValueError(f"prequential needs a non-empty universe, got {universe_size}")
    usages = list(counts.values()) if isinstance(counts, Mapping) else list(counts)
    used = [c for c in usages if c]
    if any(c < 0 for c in used):
        raise ValueError("usages must be non-negative")
    if len(used) > universe_size:
        raise ValueError("more distinct elements than the universe holds")
    eps = PREQUENTIAL_EPSILON
    total = sum(used)
    if total == 0:
        return 0.0
    lg_eps = math.lgamma(eps)
    numerator = sum(math.lgamma(c + eps) - lg_eps for c in used)
    alpha = universe_size * eps
    denominator = math.lgamma(total + alpha) - math.lgamma(alpha)
    return (denominator - numerator) / _LN2

