"""k-fold cyclic convolution of cut distributions and divergence reporting.

The net rotation after k cuts is the sum of the k cut sizes mod n, so
the distribution of the selected ballot is the k-fold cyclic
self-convolution of the single-cut pmf. This module computes those
convolutions, their distance from uniform, and per-ballot worst-case
ratios, and renders the convergence table the rest of the toolkit
(risk adjustment, simulation checks) is calibrated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .distributions import CutSizeDistribution
from .errors import DimensionMismatch

Distribution = CutSizeDistribution | np.ndarray


def _mass(p: Distribution) -> np.ndarray:
    if isinstance(p, np.ndarray):
        return p
    return p.mass


@dataclass(frozen=True)
class RotationDistribution:
    """Distribution of the net rotation after k cuts of an n-ballot stack."""

    n: int
    k: int
    mass: np.ndarray

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        # reuse the pmf validation (length, nonnegativity, sum-to-one)
        CutSizeDistribution(self.n, self.mass)
        mass = np.ascontiguousarray(self.mass, dtype=np.float64)
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)


@dataclass(frozen=True)
class DivergenceReport:
    """Distance of one k-cut distribution from uniform."""

    k: int
    vd: float
    eps: float


@dataclass(frozen=True)
class ConvergenceTable:
    """DivergenceReports for k = 1..k_max, one column set per source model."""

    labels: tuple[str, ...]
    rows: tuple[tuple[DivergenceReport, ...], ...]  # rows[source][k-1]
    vd_monotone: tuple[bool, ...]  # per source: vd nonincreasing in k


def convolve_cyclic_reference(p: Distribution, q: Distribution) -> np.ndarray:
    """Exact O(n^2) cyclic convolution with per-entry fsum accumulation.

    This is the oracle; the kernel-backed fast path and any future
    optimization must match it to 1e-10.
    """
    pm, qm = _mass(p), _mass(q)
    n = len(pm)
    if len(qm) != n:
        raise DimensionMismatch("distributions live on different stack sizes")
    out = np.empty(n)
    for j in range(n):
        out[j] = math.fsum(pm[i] * qm[(j - i) % n] for i in range(n))
    return out


def convolve_cyclic(p: CutSizeDistribution, q: CutSizeDistribution) -> CutSizeDistribution:
    """Distribution of the sum (mod n) of two independent cut sizes."""
    if p.n != q.n:
        raise DimensionMismatch(f"stack sizes differ: {p.n} vs {q.n}")
    return CutSizeDistribution(p.n, kernels.convolve_cyclic(p.mass, q.mass))


def iterate_k(p: CutSizeDistribution, k: int) -> RotationDistribution:
    """k-fold cyclic self-convolution of a single-cut pmf.

    Uses binary exponentiation; tested to agree with sequential
    convolution (and the reference oracle) to 1e-10.
    """
    if k < 1:
        raise ValueError("k must be positive")
    result: np.ndarray | None = None
    square = p.mass
    remaining = k
    while remaining:
        if remaining & 1:
            result = square.copy() if result is None else kernels.convolve_cyclic(result, square)
        remaining >>= 1
        if remaining:
            square = kernels.convolve_cyclic(square, square)
    assert result is not None
    return RotationDistribution(p.n, k, result)


def variation_distance(p: Distribution, q: Distribution) -> float:
    """Max over events of Pr_p[E] - Pr_q[E]; half the L1 distance."""
    pm, qm = _mass(p), _mass(q)
    if len(pm) != len(qm):
        raise DimensionMismatch("distributions live on different stack sizes")
    return float(np.maximum(pm - qm, 0.0).sum())


def epsilon_ratio(p: Distribution) -> float:
    """n * max_i p[i] - 1: worst-case per-ballot inflation over uniform."""
    pm = _mass(p)
    return float(len(pm) * pm.max() - 1.0)


def convergence_table(
    sources: list[CutSizeDistribution],
    k_max: int,
    labels: list[str] | None = None,
) -> ConvergenceTable:
    """Divergence-from-uniform reports for each source at k = 1..k_max."""
    if not sources:
        raise ValueError("need at least one source distribution")
    if k_max < 1:
        raise ValueError("k_max must be positive")
    n = sources[0].n
    if any(s.n != n for s in sources):
        raise DimensionMismatch("all sources must share one stack size")
    if labels is None:
        labels = [f"model-{i}" for i in range(len(sources))]
    uniform = np.full(n, 1.0 / n)
    all_rows = []
    monotone = []
    for src in sources:
        running = src.mass
        reports = []
        for k in range(1, k_max + 1):
            reports.append(
                DivergenceReport(
                    k=k,
                    vd=variation_distance(running, uniform),
                    eps=epsilon_ratio(running),
                )
            )
            if k < k_max:
                running = kernels.convolve_cyclic(running, src.mass)
        all_rows.append(tuple(reports))
        # tolerance absorbs float dust when vd sits at the noise floor
        monotone.append(
            all(a.vd >= b.vd - 1e-12 for a, b in zip(reports, reports[1:]))
        )
    return ConvergenceTable(tuple(labels), tuple(all_rows), tuple(monotone))


#: below this, a variation distance is float residue, not signal
VD_FLOOR = 1e-14


def empirical_rate(table: ConvergenceTable, source_index: int = 0) -> list[float | None]:
    """Successive vd ratios vd_{k+1}/vd_k for one source; None where vd_k = 0."""
    reports = table.rows[source_index]
    if len(reports) < 3:
        raise ValueError("need at least 3 rows to estimate a rate")
    ratios: list[float | None] = []
    for a, b in zip(reports, reports[1:]):
        ratios.append(None if a.vd <= VD_FLOOR else b.vd / a.vd)
    return ratios


def format_csv(table: ConvergenceTable) -> str:
    """CSV rendering, columns k,model,vd,eps; 3 significant figures."""
    lines = ["k,model,vd,eps"]
    for label, reports in zip(table.labels, table.rows):
        for r in reports:
            lines.append(f"{r.k},{label},{r.vd:.3g},{r.eps:.3g}")
    return "\n".join(lines) + "\n"


def format_markdown(table: ConvergenceTable) -> str:
    """Markdown rendering: one row per k, vd and eps column pairs per model."""
    header = ["k"]
    header += [f"vd {lab}" for lab in table.labels]
    header += [f"eps {lab}" for lab in table.labels]
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    k_max = len(table.rows[0])
    for i in range(k_max):
        cells = [str(i + 1)]
        cells += [f"{reports[i].vd:.3g}" for reports in table.rows]
        cells += [f"{reports[i].eps:.3g}" for reports in table.rows]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
