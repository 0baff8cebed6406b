"""Exact distribution tables by exhaustive enumeration, plus closed-form oracles.

Enumeration splits ``S_n`` into branches by a fixed prefix of leading values.
Inside a branch the remaining ``k`` values are arranged by a cached matrix of
all ``k!`` permutations (lexicographic), and the statistic is evaluated
column-wise with numpy.  Branch count vectors are summed in branch order, so
the result does not depend on the number of worker processes.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

import numpy as np

from .errors import CapacityError, InputError
from .stats import (
    DescentSpec,
    MomentReport,
    as_spec,
    count_statistic,
    max_statistic,
)

__all__ = [
    "DEFAULT_ENUMERATION_LIMIT",
    "DistributionTable",
    "exact_distribution",
    "reference_distribution",
    "oracle_inversions",
    "oracle_eulerian",
    "moments_from_table",
    "unimodality_check",
    "log_concavity_report",
    "all_permutations",
]

DEFAULT_ENUMERATION_LIMIT = 12

# Largest suffix materialised per branch: 9! columns of int8 is ~3 MB.
_MAX_SUFFIX = 9


@dataclass(frozen=True)
class DistributionTable:
    """Counts ``c_k`` of permutations of length ``n`` with statistic ``k``."""

    n: int
    spec: DescentSpec
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        object.__setattr__(self, "spec", as_spec(self.spec))
        if any(c < 0 for c in self.counts):
            raise InputError("counts must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def max_value(self) -> int:
        return len(self.counts) - 1

    def validate(self) -> None:
        """Raise ``AssertionError`` if a structural invariant fails."""
        assert self.total == factorial(self.n), "counts do not sum to n!"
        assert self.max_value == max_statistic(self.n, self.spec), "wrong support"
        assert self.counts[-1] >= 1
        assert self.counts == self.counts[::-1], "table is not symmetric"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "spec": self.spec.to_json(),
            "counts": [str(c) for c in self.counts],
            "total": str(self.total),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DistributionTable":
        try:
            table = cls(int(data["n"]), as_spec(data["spec"]), tuple(int(c) for c in data["counts"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed distribution table: {exc}") from exc
        if int(data.get("total", table.total)) != table.total:
            raise InputError("table total does not match its counts")
        return table


@lru_cache(maxsize=None)
def all_permutations(k: int) -> np.ndarray:
    """All permutations of ``0..k-1`` as a ``(k, k!)`` int8 array, lexicographic by column."""
    if k < 0 or k > 10:
        raise CapacityError(f"refusing to materialise {k}! permutations")
    if k == 0:
        return np.zeros((0, 1), dtype=np.int8)
    perms = np.zeros((1, 1), dtype=np.int8)
    for size in range(2, k + 1):
        prev = perms
        blocks = []
        for first in range(size):
            head = np.full((1, prev.shape[1]), first, dtype=np.int8)
            blocks.append(np.vstack([head, prev + (prev >= first)]))
        perms = np.hstack(blocks)
    perms.setflags(write=False)
    return perms


def _branch_counts(args) -> np.ndarray:
    n, prefix, windows, size = args
    k = n - len(prefix)
    rest = np.array(sorted(set(range(1, n + 1)) - set(prefix)), dtype=np.int16)
    suffix = rest[all_permutations(k)]
    rows: list = [np.int16(v) for v in prefix] + list(suffix)
    stat = np.zeros(suffix.shape[1] if k else 1, dtype=np.int16)
    for i, w in enumerate(windows):
        for j in range(i + 1, i + w + 1):
            stat += rows[i] > rows[j]
    return np.bincount(stat, minlength=size)


def _branches(n: int) -> list[tuple[int, ...]]:
    depth = max(1, n - _MAX_SUFFIX)
    return list(itertools.permutations(range(1, n + 1), depth))


def exact_distribution(
    n: int,
    spec,
    enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT,
    workers: int = 1,
) -> DistributionTable:
    """Count every permutation of ``1..n`` by its statistic value.

    Raises :class:`CapacityError` when ``n > enumeration_limit``.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    if workers < 1:
        raise InputError("workers must be at least 1")
    spec = as_spec(spec)
    windows = spec.windows(n)
    if n > enumeration_limit:
        raise CapacityError(f"n={n} exceeds the enumeration limit {enumeration_limit}")
    size = sum(windows) + 1
    if n == 1:
        return DistributionTable(1, spec, (1,))
    tasks = [(n, prefix, windows, size) for prefix in _branches(n)]
    if workers == 1:
        parts = map(_branch_counts, tasks)
        totals = _merge(parts, size)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            totals = _merge(pool.map(_branch_counts, tasks), size)
    return DistributionTable(n, spec, tuple(totals))


def _merge(parts, size: int) -> list[int]:
    totals = [0] * size
    for part in parts:
        for k, c in enumerate(part.tolist()):
            totals[k] += c
    return totals


def reference_distribution(n: int, spec) -> DistributionTable:
    """Slow reference: ``itertools.permutations`` plus the O(n*d) rescan."""
    spec = as_spec(spec)
    counts = [0] * (max_statistic(n, spec) + 1)
    for p in itertools.permutations(range(1, n + 1)):
        counts[count_statistic(p, spec)] += 1
    return DistributionTable(n, spec, tuple(counts))


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def oracle_inversions(n: int) -> DistributionTable:
    """Coefficients of ``(1 + x)(1 + x + x^2)...(1 + ... + x^{n-1})``."""
    if n < 1:
        raise InputError("n must be positive")
    coeffs = [1]
    for m in range(2, n + 1):
        coeffs = _poly_mul(coeffs, [1] * m)
    return DistributionTable(n, _inversion_spec(n), tuple(coeffs))


def _inversion_spec(n: int) -> DescentSpec:
    return as_spec(max(1, n - 1))


def oracle_eulerian(n: int) -> DistributionTable:
    """Eulerian numbers via ``A(n,k) = (k+1) A(n-1,k) + (n-k) A(n-1,k-1)``."""
    if n < 1:
        raise InputError("n must be positive")
    row = [1]
    for m in range(2, n + 1):
        prev = row + [0]
        row = [
            (k + 1) * prev[k] + (m - k) * (prev[k - 1] if k else 0)
            for k in range(m)
        ]
    return DistributionTable(n, as_spec(1), tuple(row))


def moments_from_table(t: DistributionTable) -> MomentReport:
    total = t.total
    s1 = sum(k * c for k, c in enumerate(t.counts))
    s2 = sum(k * k * c for k, c in enumerate(t.counts))
    mean = Fraction(s1, total)
    return MomentReport(mean, Fraction(s2, total) - mean * mean, "table")


def _counts(t) -> tuple[int, ...]:
    return t.counts if isinstance(t, DistributionTable) else tuple(t)


def unimodality_check(t: DistributionTable | Sequence[int]) -> bool:
    """True iff the sequence weakly increases to a peak and then weakly decreases."""
    c = _counts(t)
    k = 0
    while k + 1 < len(c) and c[k] <= c[k + 1]:
        k += 1
    while k + 1 < len(c) and c[k] >= c[k + 1]:
        k += 1
    return k >= len(c) - 1


def log_concavity_report(t: DistributionTable | Sequence[int]) -> list[int]:
    """Indices ``k`` with ``c_{k-1} c_{k+1} > c_k^2``; empty means log-concave."""
    c = _counts(t)
    return [k for k in range(1, len(c) - 1) if c[k - 1] * c[k + 1] > c[k] * c[k]]
