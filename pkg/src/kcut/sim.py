"""Monte Carlo validation of the sampling and adjustment machinery.

Three layers:

* draw-level: sample cut sizes and k-cut positions from a cut model,
  with the modular-sum and explicit-stack-rotation computations cross
  checked against each other;
* distribution-level: simulate many k-cut draws and compare the
  resulting histogram against the exact convolution;
* audit-level: the switched-ballot coupling. Each trial runs one audit
  on a uniform sample and one on the same sample with each draw
  switched with probability delta, so the paired difference estimates
  the acceptance-probability change that the analytic bound caps.

Everything is driven by GeneratorSpec streams (trial i uses stream
base + i), so reports are bit-reproducible and independent of trial
batching or execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .analysis import iterate_k, variation_distance
from .audit import ContestDefinition, accepts_matrix, accepts_sequence
from .distributions import CutSizeDistribution
from .errors import EngineContractViolation
from .risk import DEFAULT_EPS1_TARGET, adjustment_bound_vd, switched_ballot_quantile
from .rng import GeneratorSpec, Stream

DEFAULT_BATCH = 2048


@dataclass(frozen=True)
class SimulationReport:
    """Trial count, point estimate, its standard error, and the analytic
    comparator the estimate is judged against."""

    trials: int
    estimate: float
    std_error: float
    bound: float

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "bound": self.bound,
        }


@dataclass(frozen=True)
class ConvergenceResult:
    """A SimulationReport plus the raw histogram behind it."""

    report: SimulationReport
    histogram: np.ndarray
    noise_floor: float
    consistent: bool


def sample_cut(model: CutSizeDistribution, stream: Stream) -> int:
    """One cut size drawn from the model (inverse CDF)."""
    return stream.sample_pmf(model.cdf())


def kcut_draw(n: int, k: int, model: CutSizeDistribution, stream: Stream) -> int:
    """Position selected by k cuts; both computation routes, cross-checked.

    The modular route sums the k cut sizes mod n; the explicit route
    rotates a concrete stack and reads the top ballot. They must agree
    on every draw.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if model.n != n:
        raise ValueError("model stack size does not match n")
    cuts = [sample_cut(model, stream) for _ in range(k)]
    position = sum(cuts) % n

    stack = list(range(n))
    for t in cuts:
        stack = stack[t:] + stack[:t]
    assert stack[0] == position, "rotation composition diverged from modular sum"
    return position


def simulate_kcut_histogram(
    model: CutSizeDistribution,
    k: int,
    trials: int,
    gen: GeneratorSpec,
    batch: int = DEFAULT_BATCH,
) -> np.ndarray:
    """Counts of selected positions over `trials` independent k-cut draws.

    Trial i draws its k cut sizes from stream gen.stream_id + i, so the
    histogram is identical for any batch size.
    """
    cdf = model.cdf()
    hist = np.zeros(model.n, dtype=np.int64)
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        states = kernels.streams_init(gen.seed, gen.stream_id + done, m)
        pos = kernels.kcut_positions(states, cdf, model.n, k)
        hist += np.bincount(pos, minlength=model.n)
        done += m
    return hist


def vd_convergence_experiment(
    model: CutSizeDistribution,
    k: int,
    trials: int,
    gen: GeneratorSpec,
    batch: int = DEFAULT_BATCH,
) -> ConvergenceResult:
    """Compare simulated k-cut draws against the exact convolution.

    estimate: variation distance of the simulated histogram from
    uniform. bound: the exact distance from [analysis]. The noise floor
    is the expected contribution of multinomial sampling error to the
    estimate; `consistent` flags whether the estimate sits within
    noise_floor + 3 sigma of the bound.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    hist = simulate_kcut_histogram(model, k, trials, gen, batch)
    n = model.n
    phat = hist / trials
    uniform = np.full(n, 1.0 / n)
    estimate = variation_distance(phat, uniform)

    exact = iterate_k(model, k).mass
    bound = variation_distance(exact, uniform)
    per_bin_sd = np.sqrt(exact * (1.0 - exact) / trials)
    noise_floor = float(0.5 * per_bin_sd.sum() * math.sqrt(2.0 / math.pi))
    std_error = float(0.5 * math.sqrt((per_bin_sd**2).sum() * (1.0 - 2.0 / math.pi)))
    consistent = abs(estimate - bound) <= noise_floor + 3.0 * std_error
    report = SimulationReport(
        trials=trials, estimate=estimate, std_error=std_error, bound=bound
    )
    return ConvergenceResult(report, hist, noise_floor, consistent)


# --- switched-ballot coupling ----------------------------------------------

ReplacementRule = Callable[[np.ndarray, np.ndarray, ContestDefinition], np.ndarray]


def replace_with_winner(
    positions: np.ndarray, stack: np.ndarray, contest: ContestDefinition
) -> np.ndarray:
    """Worst-case adversary: every switch lands on a reported-winner ballot."""
    w_idx = contest.candidates.index(contest.reported_winner)
    winners = np.flatnonzero(stack == w_idx)
    if winners.size == 0:
        return positions
    return np.full_like(positions, winners[0])


def replace_identity(
    positions: np.ndarray, stack: np.ndarray, contest: ContestDefinition
) -> np.ndarray:
    """Null adversary: switches change nothing."""
    return positions


REPLACEMENT_RULES: dict[str, ReplacementRule] = {
    "winner": replace_with_winner,
    "identity": replace_identity,
}


@dataclass(frozen=True)
class AdversarialSwitchModel:
    """Per-draw switch probability and the replacement rule applied."""

    delta: float
    replacement: ReplacementRule = replace_with_winner

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")


@dataclass(frozen=True)
class CouplingConfig:
    """Audit scenario for the coupling: contest, true stack, sample size.

    stack holds the actual candidate index per ballot position (-1 for
    invalid); alpha_prime is the audit's acceptance threshold.
    """

    contest: ContestDefinition
    stack: np.ndarray
    draws: int
    alpha_prime: float
    eps1_target: float = DEFAULT_EPS1_TARGET


def stack_from_tallies(contest: ContestDefinition, actual: dict[str, int]) -> np.ndarray:
    """Concrete ballot layout (candidate indices) for given true tallies."""
    if sum(actual.values()) > contest.n_total:
        raise ValueError("actual tallies exceed ballots cast")
    stack = np.full(contest.n_total, -1, dtype=np.int64)
    at = 0
    for cand, count in actual.items():
        idx = contest.candidates.index(cand)
        stack[at : at + count] = idx
        at += count
    return stack


def coupling_experiment(
    config: CouplingConfig,
    switch_model: AdversarialSwitchModel,
    trials: int,
    gen: GeneratorSpec,
    engine: Callable[[np.ndarray], bool] | None = None,
    batch: int = DEFAULT_BATCH,
) -> SimulationReport:
    """Paired estimate of the acceptance-probability change p' - p.

    Both arms of a trial share the same uniform position draws; the
    switched arm redirects each draw with probability delta through the
    replacement rule. estimate is mean(accept_switched - accept_uniform)
    and bound is the distance-only analytic cap
    eps1 + (1 + n*delta)^s' - 1.

    A custom engine must be deterministic; it is called twice on the
    first trial's uniform sample and any disagreement raises
    EngineContractViolation.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    n = len(config.stack)
    s = config.draws
    delta = switch_model.delta

    diffs_sum = 0.0
    diffs_sqsum = 0.0
    engine_checked = False
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        states = kernels.streams_init(gen.seed, gen.stream_id + done, m)
        positions, switch_u = kernels.position_switch_matrix(states, n, s)
        replaced = switch_model.replacement(positions, config.stack, config.contest)
        switched_pos = np.where(switch_u < delta, replaced, positions)

        choices_u = config.stack[positions]
        choices_g = config.stack[switched_pos]
        if engine is None:
            acc_u = accepts_matrix(config.contest, config.alpha_prime, choices_u)
            acc_g = accepts_matrix(config.contest, config.alpha_prime, choices_g)
        else:
            if not engine_checked:
                first = choices_u[0]
                if engine(first) != engine(first):
                    raise EngineContractViolation(
                        "engine returned different outputs for identical input"
                    )
                engine_checked = True
            acc_u = np.array([engine(row) for row in choices_u], dtype=bool)
            acc_g = np.array([engine(row) for row in choices_g], dtype=bool)

        d = acc_g.astype(np.float64) - acc_u.astype(np.float64)
        diffs_sum += float(d.sum())
        diffs_sqsum += float((d**2).sum())
        done += m

    estimate = diffs_sum / trials
    var = max(diffs_sqsum / trials - estimate**2, 0.0)
    std_error = math.sqrt(var / trials)
    s_prime, eps1 = switched_ballot_quantile(s, delta, config.eps1_target)
    bound = adjustment_bound_vd(s_prime, eps1, n, delta)
    return SimulationReport(trials=trials, estimate=estimate, std_error=std_error, bound=bound)


def default_engine(config: CouplingConfig) -> Callable[[np.ndarray], bool]:
    """Sequential-LR engine closure over the coupling scenario."""
    return lambda choices: accepts_sequence(config.contest, config.alpha_prime, choices)
