"""Monte Carlo sampling of d-descent counts and normality diagnostics.

Random streams
--------------
Trials are cut into chunks of :data:`CHUNK_SIZE`.  Chunk ``c`` of a run with
seed ``s`` draws from ``PCG64(SeedSequence(s, spawn_key=(c,)))``; the
``SeedSequence`` hash is the fixed mixing function, so every chunk stream is
determined by ``(s, c)`` alone and the merged result is independent of how
many worker processes computed the chunks.

Within a chunk of ``T`` rows, a block of permutations is produced by the
decreasing-index swap shuffle: for ``i = n-1, ..., 1`` one vector of ``T``
integers uniform on ``[0, i]`` is drawn and position ``i`` of each row is
swapped with the drawn position.  That is ``n - 1`` bounded-integer draws per
permutation.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InputError
from .stats import (
    DescentSpec,
    Permutation,
    Uniform,
    as_spec,
    exact_moments,
    max_statistic,
    variance_closed_form,
)

__all__ = [
    "CHUNK_SIZE",
    "ScheduleWarning",
    "SimulationConfig",
    "NormalityReport",
    "GrowthRow",
    "chunk_rng",
    "sample_permutation",
    "sample_permutations",
    "statistic_block",
    "draw_statistics",
    "standardization",
    "simulate",
    "standard_normal_cdf",
    "ks_statistic",
    "ks_statistic_weighted",
    "growth_regime_experiment",
]

log = logging.getLogger(__name__)

CHUNK_SIZE = 1024

_SQRT2 = math.sqrt(2.0)


class ScheduleWarning(UserWarning):
    """A schedule entry was skipped because it falls outside the valid regime."""


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk_index,))))


def sample_permutation(n: int, rng: np.random.Generator) -> Permutation:
    """One uniform permutation by the swap shuffle (``n - 1`` draws)."""
    if n < 1:
        raise InputError("n must be positive")
    values = list(range(1, n + 1))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        values[i], values[j] = values[j], values[i]
    return Permutation(tuple(values))


def sample_permutations(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``(count, n)`` array of independent uniform permutations of ``1..n``."""
    if n < 1 or count < 0:
        raise InputError("need n >= 1 and count >= 0")
    dtype = np.int16 if n < 2**15 else np.int32
    block = np.tile(np.arange(1, n + 1, dtype=dtype), (count, 1))
    rows = np.arange(count)
    for i in range(n - 1, 0, -1):
        j = rng.integers(0, i + 1, size=count)
        held = block[:, i].copy()
        block[:, i] = block[rows, j]
        block[rows, j] = held
    return block


def statistic_block(block: np.ndarray, spec) -> np.ndarray:
    """Statistic of every row of a permutation block, as int64."""
    spec = as_spec(spec)
    count, n = block.shape
    out = np.zeros(count, dtype=np.int64)
    if isinstance(spec, Uniform):
        for k in range(1, min(spec.d, n - 1) + 1):
            out += np.count_nonzero(block[:, :-k] > block[:, k:], axis=1)
        return out
    windows = np.array(spec.windows(n))
    for k in range(1, int(windows.max(initial=0)) + 1):
        cols = np.nonzero(windows >= k)[0]
        out += np.count_nonzero(block[:, cols] > block[:, cols + k], axis=1)
    return out


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    spec: DescentSpec
    trials: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "spec", as_spec(self.spec))
        if self.n < 1:
            raise InputError("n must be positive")
        self.spec.windows(self.n)
        if self.trials < 1:
            raise InputError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise InputError("workers must be at least 1")


def _chunk_statistics(args) -> np.ndarray:
    n, spec, seed, index, size = args
    rng = chunk_rng(seed, index)
    return statistic_block(sample_permutations(n, size, rng), spec)


def draw_statistics(cfg: SimulationConfig) -> np.ndarray:
    """Raw statistic values for all trials, in chunk order."""
    tasks = []
    for index, start in enumerate(range(0, cfg.trials, CHUNK_SIZE)):
        tasks.append((cfg.n, cfg.spec, cfg.seed, index, min(CHUNK_SIZE, cfg.trials - start)))
    if cfg.workers == 1 or len(tasks) == 1:
        parts = [_chunk_statistics(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_chunk_statistics, tasks))
    return np.concatenate(parts)


def standardization(n: int, spec):
    """Exact ``(mean, variance, source)`` used to standardise the statistic.

    Uniform specs with ``n >= 2d`` use the closed form; everything else uses
    the exact pair-class tally, which is valid in every regime.
    """
    spec = as_spec(spec)
    mean = Fraction(max_statistic(n, spec), 2)
    if isinstance(spec, Uniform) and n >= 2 * spec.d:
        return mean, variance_closed_form(n, spec.d), "closed_form"
    return mean, exact_moments(n, spec).variance, "pair_tally"


def standard_normal_cdf(x: float) -> float:
    """Standard normal CDF via ``erfc``.

    ``math.erfc`` is accurate to a few ulps, far inside a 1e-7 absolute error
    budget, and using the complement keeps the lower tail accurate.
    """
    if not math.isfinite(x):
        if math.isnan(x):
            raise InputError("cdf of NaN")
        return 1.0 if x > 0 else 0.0
    return 0.5 * math.erfc(-x / _SQRT2)


def ks_statistic_weighted(values: Sequence[float], weights: Sequence[float]) -> float:
    """Two-sided KS distance between a discrete law and N(0, 1).

    ``values`` are atom locations and ``weights`` their probabilities (or
    counts; they are normalised).  Repeated locations are merged, so lattice
    data is handled exactly: at each distinct atom ``v`` the empirical CDF
    jumps from ``F(v-)`` to ``F(v)`` and both sides are compared with Phi(v).
    """
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if v.size == 0:
        raise InputError("KS statistic of an empty sample")
    if v.shape != w.shape or np.any(w < 0):
        raise InputError("values and nonnegative weights must align")
    order = np.argsort(v, kind="stable")
    v, w = v[order], w[order]
    uniq, starts = np.unique(v, return_index=True)
    mass = np.add.reduceat(w, starts)
    cum = np.cumsum(mass) / mass.sum()
    before = np.concatenate(([0.0], cum[:-1]))
    phi = np.array([standard_normal_cdf(x) for x in uniq])
    d = max(np.max(np.abs(cum - phi)), np.max(np.abs(phi - before)))
    return float(min(1.0, d))


def ks_statistic(samples: Sequence[float]) -> float:
    """Two-sided KS distance between the empirical law of ``samples`` and N(0, 1)."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise InputError("KS statistic of an empty sample")
    return ks_statistic_weighted(x, np.ones_like(x))


@dataclass(frozen=True)
class NormalityReport:
    """Moments of the raw statistic and distance of its standardisation to N(0, 1).

    ``empirical_mean`` and ``empirical_variance`` (unbiased) describe the raw
    counts; KS, skewness and excess kurtosis describe ``(X - mu) / sigma``.
    ``lattice_floor`` is ``1 / (sigma sqrt(2 pi))``, the approximate largest
    atom of the standardised law; KS values near it are resolution-limited.
    """

    n: int
    spec: DescentSpec
    trials: int
    seed: int
    empirical_mean: float
    empirical_variance: float
    ks_statistic: float
    skewness: float
    excess_kurtosis: float
    mu: Fraction
    sigma_sq: Fraction
    sigma: float
    sigma_source: str
    lattice_floor: float

    @property
    def d(self):
        return self.spec.d if isinstance(self.spec, Uniform) else list(self.spec.ds)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "spec": self.spec.to_json(),
            "trials": self.trials,
            "seed": self.seed,
            "empirical_mean": self.empirical_mean,
            "empirical_variance": self.empirical_variance,
            "ks_statistic": self.ks_statistic,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "standardization": {
                "mu": str(self.mu),
                "sigma_sq": str(self.sigma_sq),
                "sigma": self.sigma,
                "source": self.sigma_source,
            },
            "lattice_floor": self.lattice_floor,
        }

    CSV_FIELDS = (
        "n", "d", "seed", "trials", "empirical_mean", "empirical_variance",
        "ks_statistic", "skewness", "excess_kurtosis", "mu", "sigma_sq",
        "sigma", "sigma_source", "lattice_floor",
    )

    def csv_row(self) -> dict:
        d = self.d
        return {
            "n": self.n,
            "d": d if isinstance(d, int) else " ".join(map(str, d)),
            "seed": self.seed,
            "trials": self.trials,
            "empirical_mean": self.empirical_mean,
            "empirical_variance": self.empirical_variance,
            "ks_statistic": self.ks_statistic,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "mu": str(self.mu),
            "sigma_sq": str(self.sigma_sq),
            "sigma": self.sigma,
            "sigma_source": self.sigma_source,
            "lattice_floor": self.lattice_floor,
        }


def _exact_sums(x: np.ndarray) -> tuple[int, int]:
    top = int(x.max(initial=0))
    if top * top * x.size < 2**62:
        return int(x.sum()), int((x * x).sum())
    xs = x.tolist()
    return sum(xs), sum(v * v for v in xs)


def summarize(cfg: SimulationConfig, x: np.ndarray) -> NormalityReport:
    mu, sigma_sq, source = standardization(cfg.n, cfg.spec)
    if sigma_sq == 0:
        raise InputError(f"statistic is degenerate for n={cfg.n}; cannot standardise")
    sigma = math.sqrt(sigma_sq)
    t = x.size
    s1, s2 = _exact_sums(x)
    mean = Fraction(s1, t)
    var = Fraction(t * s2 - s1 * s1, t * (t - 1)) if t > 1 else Fraction(0)

    centred = x.astype(float) - float(mean)
    m2 = float(np.mean(centred**2))
    if m2 > 0:
        skew = float(np.mean(centred**3)) / m2**1.5
        kurt = float(np.mean(centred**4)) / m2**2 - 3.0
    else:
        skew = kurt = 0.0

    values, counts = np.unique(x, return_counts=True)
    z = (values.astype(float) - float(mu)) / sigma
    ks = ks_statistic_weighted(z, counts.astype(float))
    return NormalityReport(
        n=cfg.n,
        spec=cfg.spec,
        trials=cfg.trials,
        seed=cfg.seed,
        empirical_mean=float(mean),
        empirical_variance=float(var),
        ks_statistic=ks,
        skewness=skew,
        excess_kurtosis=kurt,
        mu=mu,
        sigma_sq=sigma_sq,
        sigma=sigma,
        sigma_source=source,
        lattice_floor=1.0 / (sigma * math.sqrt(2 * math.pi)),
    )


def simulate(cfg: SimulationConfig) -> NormalityReport:
    """Draw ``cfg.trials`` permutations and report normality diagnostics."""
    if cfg.n < 2:
        raise InputError(f"statistic is degenerate for n={cfg.n}; cannot standardise")
    return summarize(cfg, draw_statistics(cfg))


@dataclass(frozen=True)
class GrowthRow:
    n: int
    d: int
    report: NormalityReport


def growth_window(n: int, epsilon: float) -> int:
    """``max(1, floor(n ** (1 - epsilon)))``, robust to float round-off at exact powers."""
    return max(1, math.floor(n ** (1.0 - epsilon) + 1e-9))


def growth_regime_experiment(
    epsilon: float,
    n_schedule: Sequence[int],
    trials: int,
    seed: int = 0,
    workers: int = 1,
) -> list[GrowthRow]:
    """Run :func:`simulate` with ``d = floor(n ** (1 - epsilon))`` for each ``n``.

    Entries with ``n < 2d`` are skipped with a :class:`ScheduleWarning`.
    """
    if not 0 < epsilon < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    rows = []
    for n in sorted(n_schedule):
        d = growth_window(n, epsilon)
        if n < 2 * d:
            msg = f"skipping n={n}: d={d} violates n >= 2d"
            log.warning(msg)
            warnings.warn(msg, ScheduleWarning, stacklevel=2)
            continue
        cfg = SimulationConfig(n, Uniform(d), trials, seed, workers)
        rows.append(GrowthRow(n, d, simulate(cfg)))
    return rows
