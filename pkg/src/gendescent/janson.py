"""Dependency graph of the d-descent indicators and Janson's condition quantity.

The indicator of pair ``(i, j)`` depends only on the relative order of
``p_i`` and ``p_j``, so indicators on disjoint position sets are independent
and the graph joining pairs that share a position is a dependency graph.
Janson's criterion then needs ``N * Delta^(m-1) * (A / sigma)^m -> 0`` for some
integer ``m``; this module evaluates that quantity.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .enumeration import all_permutations
from .errors import CapacityError, InputError
from .montecarlo import ScheduleWarning, growth_window
from .stats import (
    PairClass,
    PairIndex,
    classify_pair,
    eligible_pair_count,
    eligible_pairs,
    variance_closed_form,
)

__all__ = [
    "DEFAULT_MAX_VERTICES",
    "DEFAULT_AUDIT_LIMIT",
    "DependencyGraph",
    "JansonCertificate",
    "Fixed",
    "Power",
    "build_dependency_graph",
    "max_degree",
    "janson_bound",
    "auto_m",
    "convergence_table",
    "independence_audit",
]

log = logging.getLogger(__name__)

DEFAULT_MAX_VERTICES = 10**6
DEFAULT_AUDIT_LIMIT = 9


@dataclass
class DependencyGraph:
    n: int
    d: int
    vertices: list[PairIndex]
    adjacency: list[list[int]] = field(repr=False)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self):
        for a, nbrs in enumerate(self.adjacency):
            for b in nbrs:
                if a < b:
                    yield a, b


def _check_nd(n: int, d: int) -> None:
    if n < 2 or d < 1:
        raise InputError(f"need n >= 2 and d >= 1, got n={n}, d={d}")


def build_dependency_graph(n: int, d: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> DependencyGraph:
    """Vertices are the eligible pairs; two are adjacent iff they share a position."""
    _check_nd(n, d)
    if d > n - 1:
        raise InputError(f"d={d} exceeds n - 1 = {n - 1}")
    count = eligible_pair_count(n, d)
    if count > max_vertices:
        raise CapacityError(f"graph would have {count} vertices, guard is {max_vertices}")
    vertices = eligible_pairs(n, d)
    touching: list[list[int]] = [[] for _ in range(n + 1)]
    for k, (i, j) in enumerate(vertices):
        touching[i].append(k)
        touching[j].append(k)
    adjacency = []
    for k, (i, j) in enumerate(vertices):
        nbrs = set(touching[i])
        nbrs.update(touching[j])
        nbrs.discard(k)
        adjacency.append(sorted(nbrs))
    return DependencyGraph(n, d, vertices, adjacency)


def max_degree(g: DependencyGraph) -> int:
    return max((len(a) for a in g.adjacency), default=0)


@dataclass(frozen=True)
class JansonCertificate:
    """Inputs and value of ``N * Delta^(m-1) * (A / sigma)^m``.

    ``simplified_bound`` is the surrogate ``(dn) (4d)^(m-1) (12 / (dn))^(m/2)``,
    which dominates ``bound_value`` when ``Delta = 4d`` because
    ``sigma^2 >= dn / 12``.
    """

    n: int
    d: int
    m: int
    N_n: int
    delta_bound: int
    delta_exact: int | None
    delta_used: int
    delta_source: str
    A_n: int
    sigma_sq: Fraction
    bound_value: float
    simplified_bound: float

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "m": self.m,
            "N_n": self.N_n,
            "delta_bound": self.delta_bound,
            "delta_exact": self.delta_exact,
            "delta_used": self.delta_used,
            "delta_source": self.delta_source,
            "A_n": self.A_n,
            "sigma_sq": str(self.sigma_sq),
            "bound_value": self.bound_value,
            "simplified_bound": self.simplified_bound,
        }

    CSV_FIELDS = ("n", "d", "m", "N_n", "delta_used", "sigma_sq", "bound_value", "simplified_bound")

    def csv_row(self) -> dict:
        data = self.to_json()
        return {k: data[k] for k in self.CSV_FIELDS}


def _power_product(n_terms: float, delta: int, m: int, inv_sigma_sq: float) -> float:
    if n_terms == 0 or (delta == 0 and m > 1):
        return 0.0
    logv = math.log(n_terms) + (m - 1) * math.log(delta) + 0.5 * m * math.log(inv_sigma_sq)
    return math.exp(logv)


def janson_bound(
    n: int,
    d: int,
    m: int,
    use_exact_degree: bool = False,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> JansonCertificate:
    """Evaluate Janson's condition quantity with ``A_n = 1``.

    ``sigma^2`` is the exact variance; it stays a fraction until the final
    logarithm.  With ``use_exact_degree`` the graph is materialised when it fits
    under ``max_vertices``; otherwise ``Delta = 4d`` is used and flagged.
    """
    _check_nd(n, d)
    if m < 1:
        raise InputError("m must be a positive integer")
    sigma_sq = variance_closed_form(n, d)
    big_n = eligible_pair_count(n, d)
    delta_exact = None
    source = "analytic"
    if use_exact_degree:
        if big_n <= max_vertices:
            delta_exact = max_degree(build_dependency_graph(n, d, max_vertices))
            source = "graph"
        else:
            source = "analytic_guarded"
            log.info("graph for n=%d, d=%d exceeds guard; using 4d", n, d)
    delta_used = delta_exact if delta_exact is not None else 4 * d
    bound = _power_product(big_n, delta_used, m, float(1 / sigma_sq))
    simplified = _power_product(d * n, 4 * d, m, 12.0 / (d * n))
    return JansonCertificate(
        n=n,
        d=d,
        m=m,
        N_n=big_n,
        delta_bound=4 * d,
        delta_exact=delta_exact,
        delta_used=delta_used,
        delta_source=source,
        A_n=1,
        sigma_sq=sigma_sq,
        bound_value=bound,
        simplified_bound=simplified,
    )


@dataclass(frozen=True)
class Fixed:
    d: int


@dataclass(frozen=True)
class Power:
    """``d = max(1, floor(n ** (1 - epsilon)))``."""

    epsilon: float

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise InputError(f"epsilon must lie in (0, 1), got {self.epsilon}")


DRule = Union[Fixed, Power]


def auto_m(epsilon: float) -> int:
    """Smallest integer ``m`` with ``(m / 2) * epsilon > 1``."""
    eps = Fraction(epsilon)
    if eps <= 0:
        raise InputError("epsilon must be positive")
    m = 1
    while m * eps <= 2:
        m += 1
    return m


def convergence_table(
    d_rule: DRule,
    n_schedule: Sequence[int],
    m: int | None = None,
    use_exact_degree: bool = False,
) -> list[JansonCertificate]:
    """Certificates in schedule order; entries with ``n < 2d`` are skipped with a warning."""
    if m is None:
        m = auto_m(d_rule.epsilon) if isinstance(d_rule, Power) else 3
    certs = []
    for n in n_schedule:
        d = d_rule.d if isinstance(d_rule, Fixed) else growth_window(n, d_rule.epsilon)
        if n < 2 * d:
            msg = f"skipping n={n}: d={d} violates n >= 2d"
            log.warning(msg)
            warnings.warn(msg, ScheduleWarning, stacklevel=2)
            continue
        certs.append(janson_bound(n, d, m, use_exact_degree))
    return certs


def independence_audit(n: int, d: int, enumeration_limit: int = DEFAULT_AUDIT_LIMIT) -> bool:
    """Check every pair of indicators against its exact joint law over ``S_n``.

    Marginals must be 1/2, indicators on disjoint positions must multiply
    exactly, and overlapping pairs must have ``E[X_a X_b]`` equal to the value
    :func:`classify_pair` assigns.
    """
    _check_nd(n, d)
    if n > enumeration_limit:
        raise CapacityError(f"n={n} exceeds the audit limit {enumeration_limit}")
    pairs = eligible_pairs(n, min(d, n - 1))
    perms = all_permutations(n)
    total = perms.shape[1]
    ind = np.stack([perms[i - 1] > perms[j - 1] for i, j in pairs]).astype(np.int64)
    joint = ind @ ind.T
    for a, pa in enumerate(pairs):
        if Fraction(int(joint[a, a]), total) != Fraction(1, 2):
            return False
        for b in range(a + 1, len(pairs)):
            cls = classify_pair(pa, pairs[b])
            if Fraction(int(joint[a, b]), total) != cls.expectation:
                return False
            if cls is PairClass.INDEPENDENT and set(pa) & set(pairs[b]):
                return False
    return True
