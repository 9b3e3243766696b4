"""Single-cut-size distributions: construction, discretization, and fitting.

A cut of a stack of n ballots moves the top t ballots to the bottom;
everything here describes the distribution of t over [0, n). Two
continuous model families cover the observed behavior: a truncated
uniform window and an exponential-of-cubic density. The bundled
``data/table1_combined.csv`` holds the 1680-cut observation set used as
the package's default empirical model.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy import optimize

from .errors import DimensionMismatch, EmptyRecords, ModelOutOfRange, UnderdeterminedFit

MASS_ATOL = 1e-12


@dataclass(frozen=True)
class CutSizeDistribution:
    """Probability mass over cut sizes 0..n-1 of a stack of n ballots."""

    n: int
    mass: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("stack size must be positive")
        mass = np.ascontiguousarray(self.mass, dtype=np.float64)
        if mass.shape != (self.n,):
            raise ValueError(f"mass must have length n={self.n}")
        if np.any(mass < 0):
            raise ValueError("mass entries must be nonnegative")
        total = float(mass.sum())
        if abs(total - 1.0) > MASS_ATOL:
            raise ValueError(f"mass must sum to 1 within {MASS_ATOL}, got {total!r}")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    def cdf(self) -> np.ndarray:
        """Running sum of the pmf, for inverse-CDF sampling."""
        return np.cumsum(self.mass)


@dataclass(frozen=True)
class TruncatedUniform:
    """Uniform cut sizes on the window [w, w+b): floor w, span b."""

    w: int
    b: int

    def __post_init__(self):
        if self.w < 0 or self.b < 1:
            raise ValueError("require w >= 0 and b >= 1")


@dataclass(frozen=True)
class ExponentialCubic:
    """Relative-cut-size density exp(c0 + c1*tau + c2*tau^2 + c3*tau^3)."""

    c0: float
    c1: float
    c2: float
    c3: float

    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.c0, self.c1, self.c2, self.c3)


ContinuousCutModel = TruncatedUniform | ExponentialCubic


@dataclass(frozen=True)
class CutRecordSet:
    """Observed cut counts per size for a stack of n ballots."""

    n: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        if counts.shape != (self.n,):
            raise ValueError(f"counts must have length n={self.n}")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def uniform_pmf(n: int) -> CutSizeDistribution:
    """The ideal model: every cut size in [0, n) equally likely."""
    if n < 1:
        raise ValueError("n must be positive")
    return CutSizeDistribution(n, np.full(n, 1.0 / n))


def empirical_pmf(records: CutRecordSet) -> CutSizeDistribution:
    if records.total == 0:
        raise EmptyRecords("cut record set has no observations")
    return CutSizeDistribution(records.n, records.counts / records.total)


def discretize(model: ContinuousCutModel, n: int) -> CutSizeDistribution:
    """Discrete pmf on [0, n) induced by a continuous model.

    Truncated uniform is exact (1/b on the window). The cubic family is
    evaluated at bin midpoints tau = (i + 0.5)/n and renormalized.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if isinstance(model, TruncatedUniform):
        if model.w + model.b > n:
            raise ModelOutOfRange(f"window [{model.w}, {model.w + model.b}) exceeds stack size {n}")
        mass = np.zeros(n)
        mass[model.w : model.w + model.b] = 1.0 / model.b
        return CutSizeDistribution(n, mass)
    tau = (np.arange(n) + 0.5) / n
    c0, c1, c2, c3 = model.coefficients()
    logdens = c0 + tau * (c1 + tau * (c2 + tau * c3))
    dens = np.exp(logdens - logdens.max())  # overflow guard; scale cancels
    return CutSizeDistribution(n, dens / dens.sum())


def eval_cubic_density(model: ExponentialCubic, tau: float) -> float:
    """Relative-cut-size density exp(f(tau)) at a point of (0, 1)."""
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    c0, c1, c2, c3 = model.coefficients()
    return math.exp(c0 + tau * (c1 + tau * (c2 + tau * c3)))


def fit_truncated_uniform(emp: CutSizeDistribution) -> TruncatedUniform:
    """Exhaustive least-squares fit of a uniform window to a pmf.

    Scans every (w, b) with 0 <= w < n and 1 <= b <= n - w, minimizing
    the sum of squared pmf differences. Ties break toward smaller b,
    then smaller w. With prefix sums the SSE at (w, b) reduces to
    sum(emp^2) + 1/b - 2*window_mass/b, so the scan is O(n^2).
    """
    n = emp.n
    prefix = np.concatenate([[0.0], np.cumsum(emp.mass)])
    sq = float((emp.mass**2).sum())
    best: tuple[float, int, int] | None = None
    for w in range(n):
        for b in range(1, n - w + 1):
            window = float(prefix[w + b] - prefix[w])
            sse = sq + 1.0 / b - 2.0 * window / b
            key = (sse, b, w)
            if best is None or key < best:
                best = key
    assert best is not None
    return TruncatedUniform(w=best[2], b=best[1])


def _density_sse(coeffs: np.ndarray, emp: CutSizeDistribution) -> float:
    model = ExponentialCubic(*coeffs)
    m = discretize(model, emp.n).mass
    d = emp.n * (m - emp.mass)
    return float((d**2).sum())


def fit_exponential_cubic(emp: CutSizeDistribution) -> ExponentialCubic:
    """Least-squares fit of the exponential-cubic family to a pmf.

    Starts from a linear fit of the cubic to the log relative densities
    of the nonzero bins, then refines with Nelder-Mead on the squared
    relative-density error (multi-start; best objective wins). The
    constant term only shifts the pre-normalization scale, so agreement
    is judged on densities, not coefficients.
    """
    n = emp.n
    nz = emp.mass > 0
    if int(nz.sum()) < 4:
        raise UnderdeterminedFit("need at least 4 nonzero bins to fit a cubic")
    tau = (np.arange(n) + 0.5) / n
    basis = np.vstack([np.ones(n), tau, tau**2, tau**3]).T
    logdens = np.log(n * emp.mass[nz])
    base, *_ = np.linalg.lstsq(basis[nz], logdens, rcond=None)

    starts = [base, np.zeros(4), base * np.array([0.5, 1.0, 1.0, 1.0])]
    best_x, best_f = None, math.inf
    for x0 in starts:
        res = optimize.minimize(
            _density_sse,
            x0,
            args=(emp,),
            method="Nelder-Mead",
            options={"maxiter": 4000, "xatol": 1e-9, "fatol": 1e-13},
        )
        if res.fun < best_f:
            best_x, best_f = res.x, res.fun
    assert best_x is not None
    return ExponentialCubic(*(float(c) for c in best_x))


def model_error(
    model: ContinuousCutModel | CutSizeDistribution, emp: CutSizeDistribution
) -> tuple[float, float]:
    """(MAE, MSE) between model and empirical relative densities n*mass."""
    if isinstance(model, CutSizeDistribution):
        if model.n != emp.n:
            raise DimensionMismatch("model and empirical stack sizes differ")
        m = model
    else:
        m = discretize(model, emp.n)
    d = emp.n * (m.mass - emp.mass)
    return float(np.abs(d).mean()), float((d**2).mean())


def load_cut_records(text: str, n: int | None = None) -> CutRecordSet:
    """Parse cut-record CSV (header ``cut_size,count``; missing sizes are 0)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["cut_size", "count"]:
        raise ValueError("expected header 'cut_size,count'")
    pairs: dict[int, int] = {}
    for row in reader:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        size, count = int(row[0]), int(row[1])
        if size < 0 or count < 0:
            raise ValueError(f"negative entry in row {row}")
        pairs[size] = pairs.get(size, 0) + count
    if not pairs or sum(pairs.values()) == 0:
        raise EmptyRecords("no cut observations in input")
    size_n = n if n is not None else max(pairs) + 1
    counts = np.zeros(size_n, dtype=np.int64)
    for size, count in pairs.items():
        if size >= size_n:
            raise ValueError(f"cut size {size} outside stack of {size_n}")
        counts[size] = count
    return CutRecordSet(size_n, counts)


def table1_records() -> CutRecordSet:
    """The bundled 1680-cut observation set (n=150)."""
    text = resources.files("kcut").joinpath("data/table1_combined.csv").read_text()
    return load_cut_records(text, n=150)


def table1_pmf() -> CutSizeDistribution:
    return empirical_pmf(table1_records())


#: Reference fits of the bundled observation set (the fitters above
#: reproduce them within tolerance); pinned so the named CLI models
#: resolve without refitting.
TABLE1_TRUNCATED_UNIFORM = TruncatedUniform(w=8, b=114)
TABLE1_EXPONENTIAL_CUBIC = ExponentialCubic(-0.631, 8.587, -18.446, 9.428)
