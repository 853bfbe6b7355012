"""Set-partition machinery for product-density moment expansions.

The normalized n-th product density rho^(n) / prod_k lambda_k of a point
process decomposes over the partition lattice into products of n-point
correlation functions xi_k (with xi_1 = 1; all higher xi_k vanish for a
Poisson process).  This module provides the exact conversion both ways,
plus closed forms for log-Gaussian Cox processes, where the normalized
pair density is exp of the summed pairwise covariances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .covariance import CovarianceModel, covariance_at
from .geometry import SpacetimePoint

__all__ = [
    "SetPartition",
    "enumerate_partitions",
    "bell_number",
    "xi_to_normalized_density",
    "normalized_density_to_xi",
    "lgcp_normalized_density",
    "lgcp_xi",
]

MAX_ORDER = 10  # Bell(10) = 115975; enumeration beyond this is pointless


@dataclass(frozen=True)
class SetPartition:
    """A partition of {0, ..., n-1} into disjoint nonempty blocks."""

    blocks: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __post_init__(self):
        seen: set[int] = set()
        for b in self.blocks:
            if len(b) == 0:
                raise ValueError("blocks must be nonempty")
            seen.update(b)
        if seen != set(range(self.n)):
            raise ValueError("blocks must partition {0, ..., n-1}")


def _restricted_growth_strings(n: int):
    """Yield all restricted-growth strings of length n in lexicographic order."""
    a = [0] * n
    while True:
        yield tuple(a)
        # find rightmost position that can be incremented
        for i in range(n - 1, 0, -1):
            if a[i] <= max(a[:i]):
                a[i] += 1
                for j in range(i + 1, n):
                    a[j] = 0
                break
        else:
            return


def enumerate_partitions(n: int) -> list[SetPartition]:
    """All set partitions of {0, ..., n-1}, canonically ordered.

    Ordering follows lexicographic restricted-growth strings, so the
    one-block partition comes first and the all-singletons partition last.
    """
    if not 1 <= n <= MAX_ORDER:
        raise ValueError(f"partition order must be in [1, {MAX_ORDER}]")
    out = []
    for rgs in _restricted_growth_strings(n):
        k = max(rgs) + 1
        blocks = [[] for _ in range(k)]
        for idx, lbl in enumerate(rgs):
            blocks[lbl].append(idx)
        out.append(SetPartition(tuple(tuple(b) for b in blocks)))
    return out


def bell_number(n: int) -> int:
    return len(enumerate_partitions(n))


def _partitions_of_subset(subset: tuple[int, ...]) -> list[tuple[tuple[int, ...], ...]]:
    base = enumerate_partitions(len(subset))
    return [
        tuple(tuple(subset[i] for i in block) for block in part.blocks)
        for part in base
    ]


def xi_to_normalized_density(
    points: Sequence[SpacetimePoint],
    xi: Callable[[Sequence[SpacetimePoint]], float],
) -> float:
    """Normalized product density from correlation functions.

    Sums, over all partitions of the points, the product of xi over the
    blocks.  Singleton blocks contribute 1 (xi_1 is identically one), so
    `xi` is only consulted on blocks of size >= 2.
    """
    pts = list(points)
    n = len(pts)
    if n == 0:
        return 1.0
    total = 0.0
    for part in enumerate_partitions(n):
        prod = 1.0
        for block in part.blocks:
            if len(block) >= 2:
                prod *= xi([pts[i] for i in block])
        total += prod
    return total


def normalized_density_to_xi(
    points: Sequence[SpacetimePoint],
    rho_norm: Callable[[Sequence[SpacetimePoint]], float],
) -> float:
    """Correlation function xi_n by inversion on the partition lattice.

    Recursively subtracts every non-trivial partition product from the
    normalized density of the full tuple; memoized over index subsets.
    """
    pts = list(points)
    n = len(pts)
    if n == 0:
        return 1.0
    if n > MAX_ORDER:
        raise ValueError(f"order must be <= {MAX_ORDER}")
    memo: dict[tuple[int, ...], float] = {}

    def xi_of(subset: tuple[int, ...]) -> float:
        if len(subset) == 1:
            return 1.0
        if subset in memo:
            return memo[subset]
        val = rho_norm([pts[i] for i in subset])
        for blocks in _partitions_of_subset(subset):
            if len(blocks) == 1:
                continue
            prod = 1.0
            for block in blocks:
                prod *= xi_of(block)
            val -= prod
        memo[subset] = val
        return val

    return xi_of(tuple(range(n)))


def _pairwise_cov_sum(points: Sequence[SpacetimePoint], cov: CovarianceModel) -> float:
    total = 0.0
    pts = list(points)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            lag = pts[i] - pts[j]
            total += covariance_at(cov, lag.space, lag.time)
    return total


def lgcp_normalized_density(
    points: Sequence[SpacetimePoint], cov: CovarianceModel
) -> float:
    """Normalized product density of a log-Gaussian Cox process:
    exp of the sum of pairwise covariances at the point lags."""
    return float(np.exp(_pairwise_cov_sum(points, cov)))


def lgcp_xi(points: Sequence[SpacetimePoint], cov: CovarianceModel) -> float:
    """xi_n of an LGCP, by partition-lattice inversion of the closed-form
    normalized density."""
    return normalized_density_to_xi(
        points, lambda sub: lgcp_normalized_density(sub, cov)
    )
