"""Permutation model and closed-form d-descent quantities.

A pair of positions ``(i, j)`` is a *d-descent* of ``p`` when
``i < j <= i + d`` and ``p_i > p_j``.  ``d = 1`` gives ordinary descents and
``d >= n - 1`` gives inversions.  A :class:`Vector` spec lets the window size
depend on the left position.

Positions and values are 1-based throughout the public API.  All closed forms
return :class:`fractions.Fraction` so that comparisons against enumeration are
exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterator, NamedTuple, Sequence, Union

from .errors import InputError, UnsupportedRegimeError

__all__ = [
    "Permutation",
    "Uniform",
    "Vector",
    "DescentSpec",
    "PairIndex",
    "PairClass",
    "PairClassCounts",
    "MomentReport",
    "as_spec",
    "is_descent_pair",
    "count_statistic",
    "eligible_pairs",
    "eligible_pair_count",
    "max_statistic",
    "classify_pair",
    "pair_class_counts",
    "published_pair_class_counts",
    "pair_class_tally",
    "mean_closed_form",
    "variance_closed_form",
    "published_variance",
    "exact_moments",
]


@dataclass(frozen=True)
class Permutation:
    """A permutation of ``1..n`` in one-line notation."""

    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if not values:
            raise InputError("a permutation needs at least one entry")
        if sorted(values) != list(range(1, len(values) + 1)):
            raise InputError(f"{values} is not a permutation of 1..{len(values)}")
        object.__setattr__(self, "values", values)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def reverse(cls, n: int) -> "Permutation":
        return cls(tuple(range(n, 0, -1)))

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def at(self, i: int) -> int:
        """Entry at 1-based position ``i``."""
        if not 1 <= i <= self.n:
            raise InputError(f"position {i} outside 1..{self.n}")
        return self.values[i - 1]

    def complement(self) -> "Permutation":
        """Replace every entry ``v`` by ``n + 1 - v``."""
        return Permutation(tuple(self.n + 1 - v for v in self.values))


@dataclass(frozen=True)
class Uniform:
    """Every pair with ``0 < j - i <= d`` is eligible."""

    d: int

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 1:
            raise InputError(f"window size must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))

    def windows(self, n: int) -> tuple[int, ...]:
        """Effective window ``min(d, n - i)`` for each left position ``i = 1..n-1``."""
        return tuple(min(self.d, n - i) for i in range(1, n))

    def to_json(self) -> dict:
        return {"kind": "uniform", "d": self.d}

    def __str__(self) -> str:
        return f"uniform({self.d})"


@dataclass(frozen=True)
class Vector:
    """Pairs with ``0 < j - i <= ds[i - 1]`` are eligible.

    Entries larger than ``n - i`` are clamped, so ``(n-1, n-2, ..., 1)`` and any
    padded version of it both describe inversions.
    """

    ds: tuple[int, ...]

    def __post_init__(self):
        ds = tuple(self.ds)
        for v in ds:
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise InputError(f"vector entries must be positive integers, got {v!r}")
        object.__setattr__(self, "ds", tuple(int(v) for v in ds))

    def windows(self, n: int) -> tuple[int, ...]:
        if len(self.ds) != n - 1:
            raise InputError(
                f"vector spec has length {len(self.ds)}, expected n - 1 = {n - 1}"
            )
        return tuple(min(d, n - i) for i, d in enumerate(self.ds, start=1))

    def to_json(self) -> dict:
        return {"kind": "vector", "d": list(self.ds)}

    def __str__(self) -> str:
        return "vector(" + ",".join(map(str, self.ds)) + ")"


DescentSpec = Union[Uniform, Vector]


def as_spec(spec) -> DescentSpec:
    """Coerce an int, a sequence, or a JSON dict into a spec."""
    if isinstance(spec, (Uniform, Vector)):
        return spec
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "uniform":
            return Uniform(spec["d"])
        if kind == "vector":
            return Vector(tuple(spec["d"]))
        raise InputError(f"unknown spec kind {kind!r}")
    if isinstance(spec, int) and not isinstance(spec, bool):
        return Uniform(spec)
    if isinstance(spec, Sequence) and not isinstance(spec, str):
        return Vector(tuple(spec))
    raise InputError(f"cannot interpret {spec!r} as a descent spec")


class PairIndex(NamedTuple):
    i: int
    j: int


class PairClass(enum.Enum):
    """Relation between two indicator pairs and ``E[X_a X_b]`` for it."""

    EQUAL = Fraction(1, 2)
    ALIGNED = Fraction(1, 3)  # shared left or shared right endpoint
    CROSSED = Fraction(1, 6)  # right endpoint of one is the left endpoint of the other
    INDEPENDENT = Fraction(1, 4)

    @property
    def expectation(self) -> Fraction:
        return self.value


class PairClassCounts(NamedTuple):
    """Ordered pairs ``(k1, k2)`` of eligible pairs, split by :class:`PairClass`."""

    equal: int
    aligned: int
    crossed: int
    independent: int

    @property
    def total(self) -> int:
        return self.equal + self.aligned + self.crossed + self.independent

    def variance(self) -> Fraction:
        """Sum of ``E[X_a X_b] - 1/4`` over all ordered pairs."""
        second = (
            self.equal * PairClass.EQUAL.expectation
            + self.aligned * PairClass.ALIGNED.expectation
            + self.crossed * PairClass.CROSSED.expectation
            + self.independent * PairClass.INDEPENDENT.expectation
        )
        return second - Fraction(self.total, 4)


@dataclass(frozen=True)
class MomentReport:
    """Mean and variance of the statistic under the uniform measure on S_n.

    ``source`` is one of ``"closed_form"``, ``"table"``, ``"pair_tally"`` or
    ``"empirical"``.
    """

    mean: Fraction
    variance: Fraction
    source: str

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError(f"negative variance {self.variance}")

    def to_json(self) -> dict:
        return {
            "mean": _fraction_str(self.mean),
            "variance": _fraction_str(self.variance),
            "source": self.source,
        }


def _fraction_str(x: Fraction) -> str:
    return str(Fraction(x))


def _check_n(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    return int(n)


def _check_d(d: int) -> int:
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise InputError(f"d must be a positive integer, got {d!r}")
    return int(d)


def is_descent_pair(p: Permutation, pair: PairIndex | tuple[int, int]) -> bool:
    """Raw comparison indicator ``p_i > p_j`` for a position pair ``i < j``."""
    i, j = pair
    if not 1 <= i < j <= p.n:
        raise InputError(f"pair {tuple(pair)} is not 1 <= i < j <= {p.n}")
    return p.values[i - 1] > p.values[j - 1]


def count_statistic(p: Permutation | Sequence[int], spec) -> int:
    """Number of eligible pairs ``(i, j)`` with ``p_i > p_j``.

    This is the plain O(n*d) rescan used as the reference by the faster
    enumeration and sampling kernels.
    """
    if not isinstance(p, Permutation):
        p = Permutation(tuple(p))
    spec = as_spec(spec)
    v = p.values
    total = 0
    for i, w in enumerate(spec.windows(p.n)):
        vi = v[i]
        for j in range(i + 1, i + w + 1):
            if vi > v[j]:
                total += 1
    return total


def eligible_pairs(n: int, spec) -> list[PairIndex]:
    """All eligible pairs in lexicographic order."""
    n = _check_n(n)
    spec = as_spec(spec)
    return [
        PairIndex(i, j)
        for i, w in enumerate(spec.windows(n), start=1)
        for j in range(i + 1, i + w + 1)
    ]


def eligible_pair_count(n: int, d: int) -> int:
    """``N_n = (n - d) d + C(d, 2)``, or ``C(n, 2)`` once ``d >= n - 1``."""
    n, d = _check_n(n), _check_d(d)
    if d >= n - 1:
        return comb(n, 2)
    return (n - d) * d + comb(d, 2)


def max_statistic(n: int, spec) -> int:
    """Largest attainable value; reached by the decreasing permutation."""
    return sum(as_spec(spec).windows(_check_n(n)))


def classify_pair(a: PairIndex | tuple[int, int], b: PairIndex | tuple[int, int]) -> PairClass:
    i, j = a
    r, s = b
    if not (i < j and r < s):
        raise InputError(f"pairs must satisfy i < j, got {tuple(a)} and {tuple(b)}")
    if (i, j) == (r, s):
        return PairClass.EQUAL
    aligned = i == r or j == s
    crossed = i == s or j == r
    assert not (aligned and crossed), (a, b)
    if aligned:
        return PairClass.ALIGNED
    if crossed:
        return PairClass.CROSSED
    return PairClass.INDEPENDENT


def _require_regime(n: int, d: int) -> None:
    if n < 2 * d:
        raise UnsupportedRegimeError(
            f"closed form requires n >= 2d, got n={n}, d={d}; use exact enumeration "
            "or pair_class_tally instead"
        )


def pair_class_counts(n: int, d: int) -> PairClassCounts:
    """Closed-form class counts for ``Uniform(d)`` when ``n >= 2d``.

    The crossed count is ``2 d^2 (n - d - 1)``: a middle position ``m`` is the
    right end of ``min(d, m - 1)`` pairs and the left end of ``min(d, n - m)``
    pairs, and both boundary strips of length ``d`` contribute.
    """
    n, d = _check_n(n), _check_d(d)
    _require_regime(n, d)
    big_n = eligible_pair_count(n, d)
    aligned = 2 * (n - d) * d * (d - 1) + 4 * comb(d, 3)
    crossed = 2 * d * d * (n - d - 1)
    return PairClassCounts(big_n, aligned, crossed, big_n * big_n - big_n - aligned - crossed)


def published_pair_class_counts(n: int, d: int) -> PairClassCounts:
    """Class counts exactly as printed in the source derivation.

    Kept for comparison only: its crossed term ``2(n-2d)d^2 + d^2(d-1)``
    omits one boundary strip and undercounts by ``d^2 (d - 1)``, so it agrees
    with :func:`pair_class_counts` only for ``d = 1``.
    """
    n, d = _check_n(n), _check_d(d)
    _require_regime(n, d)
    big_n = eligible_pair_count(n, d)
    aligned = 2 * (n - d) * d * (d - 1) + 4 * comb(d, 3)
    crossed = 2 * (n - 2 * d) * d * d + d * d * (d - 1)
    return PairClassCounts(big_n, aligned, crossed, big_n * big_n - big_n - aligned - crossed)


def pair_class_tally(n: int, spec) -> PairClassCounts:
    """Exact class counts for any spec and any ``n``, from endpoint multiplicities.

    With ``L_m`` (``R_m``) the number of eligible pairs whose left (right)
    endpoint is ``m``: aligned = sum L(L-1) + sum R(R-1), crossed = 2 sum L R.
    """
    n = _check_n(n)
    windows = as_spec(spec).windows(n)
    left = [0] * (n + 2)
    right = [0] * (n + 2)
    for i, w in enumerate(windows, start=1):
        left[i] = w
        for j in range(i + 1, i + w + 1):
            right[j] += 1
    big_n = sum(windows)
    aligned = sum(x * (x - 1) for x in left) + sum(x * (x - 1) for x in right)
    crossed = 2 * sum(a * b for a, b in zip(left, right))
    return PairClassCounts(big_n, aligned, crossed, big_n * big_n - big_n - aligned - crossed)


def mean_closed_form(n: int, d: int) -> Fraction:
    """Each indicator has expectation 1/2, so the mean is ``N_n / 2``."""
    return Fraction(eligible_pair_count(n, d), 2)


def variance_closed_form(n: int, d: int) -> Fraction:
    """``(6dn + 4d^3 + 3d^2 - d) / 72`` for ``n >= 2d``.

    Equal to ``(n + 1) / 12`` when ``d = 1``.  Verified against exhaustive
    enumeration; see :func:`published_variance` for the printed variant.
    """
    n, d = _check_n(n), _check_d(d)
    _require_regime(n, d)
    return Fraction(6 * d * n + 4 * d**3 + 3 * d**2 - d, 72)


def published_variance(n: int, d: int) -> Fraction:
    """``(6dn + 10d^3 - 3d^2 - d) / 72``, the printed formula.

    Correct for ``d = 1`` only; for ``d >= 2`` it exceeds the true variance by
    ``d^2 (d - 1) / 12``.
    """
    n, d = _check_n(n), _check_d(d)
    _require_regime(n, d)
    return Fraction(6 * d * n + 10 * d**3 - 3 * d**2 - d, 72)


def exact_moments(n: int, spec) -> MomentReport:
    """Mean and variance for any spec and any ``n`` via :func:`pair_class_tally`."""
    counts = pair_class_tally(n, spec)
    return MomentReport(Fraction(counts.equal, 2), counts.variance(), "pair_tally")
