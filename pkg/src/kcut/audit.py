"""Ballot-polling audit engine under an adjusted risk limit.

The reference engine is a Wald sequential likelihood-ratio test run
pairwise between the reported winner and every loser: a winner ballot
multiplies a pair's LR by 2*share, a loser ballot by 2*(1-share), and
the audit accepts once every pair's LR reaches 1/alpha'. The engine is
deliberately replaceable: anything deterministic that maps a sample
sequence to accept/continue can drive the same session machinery.

States are immutable; updates return new states, and replaying an
interpretation log reproduces statistics bit-for-bit.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InsufficientData, SessionFinalized
from .risk import AuditParameters
from .rng import GeneratorSpec

OTHER = "invalid/other"


class AuditStatus(enum.Enum):
    CONTINUE = "Continue"
    ACCEPT_REPORTED = "AcceptReported"
    ESCALATE = "EscalateToFullCount"


@dataclass(frozen=True)
class ContestDefinition:
    """A plurality contest as reported: candidates, winner, tallies."""

    candidates: tuple[str, ...]
    reported_winner: str
    reported_tallies: dict[str, int]
    n_total: int

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("contest needs at least one candidate")
        if len(set(self.candidates)) != len(self.candidates):
            raise ValueError("duplicate candidate identifiers")
        if self.reported_winner not in self.candidates:
            raise ValueError("reported winner is not a candidate")
        if any(t < 0 for t in self.reported_tallies.values()):
            raise ValueError("tallies must be nonnegative")
        if sum(self.reported_tallies.values()) > self.n_total:
            raise ValueError("tallies exceed ballots cast")
        object.__setattr__(self, "candidates", tuple(self.candidates))

    def pairs(self) -> list[tuple[str, str]]:
        w = self.reported_winner
        return [(w, c) for c in self.candidates if c != w]

    def winner_share(self, loser: str) -> float:
        """Reported share of the winner among (winner, loser) votes."""
        tw = self.reported_tallies.get(self.reported_winner, 0)
        tl = self.reported_tallies.get(loser, 0)
        if tw + tl == 0:
            return 0.5  # no reported signal on this pair
        return tw / (tw + tl)


@dataclass(frozen=True)
class BallotInterpretation:
    draw_index: int
    stack_id: str
    choice: str
    recorded_at: str | None = None


@dataclass(frozen=True)
class AuditState:
    contest: ContestDefinition
    params: AuditParameters
    interpretations: tuple[BallotInterpretation, ...] = ()
    test_statistics: dict[tuple[str, str], float] = field(default_factory=dict)
    status: AuditStatus = AuditStatus.CONTINUE
    escalation_cap: int | None = None  # defaults to contest.n_total

    @property
    def draws(self) -> int:
        return len(self.interpretations)

    def threshold(self) -> float:
        """Log-LR acceptance threshold log(1/alpha')."""
        return -math.log(self.params.adjusted_alpha)


def fresh_state(
    contest: ContestDefinition,
    params: AuditParameters,
    escalation_cap: int | None = None,
) -> AuditState:
    stats = {pair: 0.0 for pair in contest.pairs()}
    return AuditState(
        contest=contest,
        params=params,
        test_statistics=stats,
        escalation_cap=escalation_cap,
    )


def _pair_increments(contest: ContestDefinition) -> dict[tuple[str, str], tuple[float, float]]:
    """Per pair: log-LR increment for a winner ballot and for a loser ballot."""
    out = {}
    for w, loser in contest.pairs():
        share = contest.winner_share(loser)
        inc_w = math.log(2.0 * share) if share > 0 else -math.inf
        inc_l = math.log(2.0 * (1.0 - share)) if share < 1 else -math.inf
        out[(w, loser)] = (inc_w, inc_l)
    return out


def audit_status(state: AuditState) -> AuditStatus:
    """Status implied by the current statistics and draw count."""
    if state.status is not AuditStatus.CONTINUE:
        return state.status
    thr = state.threshold()
    if state.test_statistics and all(v >= thr for v in state.test_statistics.values()):
        return AuditStatus.ACCEPT_REPORTED
    cap = state.escalation_cap if state.escalation_cap is not None else state.contest.n_total
    if state.draws >= cap:
        return AuditStatus.ESCALATE
    return AuditStatus.CONTINUE


def bravo_update(state: AuditState, b: BallotInterpretation) -> AuditState:
    """Fold one interpreted ballot into the sequential test."""
    if state.status is not AuditStatus.CONTINUE:
        raise SessionFinalized(f"session already {state.status.value}")
    if state.interpretations and b.draw_index <= state.interpretations[-1].draw_index:
        raise ValueError("draw_index must be strictly increasing")
    incs = _pair_increments(state.contest)
    stats = dict(state.test_statistics)
    w = state.contest.reported_winner
    for pair, (inc_w, inc_l) in incs.items():
        if b.choice == w:
            stats[pair] += inc_w
        elif b.choice == pair[1]:
            stats[pair] += inc_l
        # any other choice leaves the pair untouched
    nxt = replace(
        state,
        interpretations=state.interpretations + (b,),
        test_statistics=stats,
    )
    return replace(nxt, status=audit_status(nxt))


def replay(
    contest: ContestDefinition,
    params: AuditParameters,
    interpretations: list[BallotInterpretation],
    escalation_cap: int | None = None,
) -> AuditState:
    """Rebuild the state from scratch; the persistence layer's only path."""
    state = fresh_state(contest, params, escalation_cap)
    for b in interpretations:
        state = bravo_update(state, b)
    return state


# --- vectorized fast path -------------------------------------------------

def encode_choices(contest: ContestDefinition, choices: list[str]) -> np.ndarray:
    """Candidate indices; anything not a candidate becomes -1 (no effect)."""
    index = {c: i for i, c in enumerate(contest.candidates)}
    return np.array([index.get(c, -1) for c in choices], dtype=np.int64)


def accepts_matrix(
    contest: ContestDefinition, alpha_prime: float, choices: np.ndarray
) -> np.ndarray:
    """Acceptance flags for a (trials, s) matrix of encoded choices.

    A trial accepts if at any prefix every pair's log LR is at or above
    log(1/alpha'). Matches sequential bravo_update replay exactly in
    exact arithmetic; tests pin the agreement on random sequences.
    """
    thr = -math.log(alpha_prime)
    w_idx = contest.candidates.index(contest.reported_winner)
    ok = None
    for (w, loser), (inc_w, inc_l) in _pair_increments(contest).items():
        l_idx = contest.candidates.index(loser)
        inc = np.where(
            choices == w_idx, inc_w, np.where(choices == l_idx, inc_l, 0.0)
        )
        cum = np.cumsum(inc, axis=-1)
        pair_ok = cum >= thr
        ok = pair_ok if ok is None else (ok & pair_ok)
    if ok is None:  # single-candidate contest: nothing to test
        return np.ones(choices.shape[:-1], dtype=bool)
    return ok.any(axis=-1)


def accepts_sequence(contest: ContestDefinition, alpha_prime: float, choices: np.ndarray) -> bool:
    return bool(accepts_matrix(contest, alpha_prime, choices[None, :])[0])


# --- sample extension estimators -------------------------------------------

@dataclass(frozen=True)
class ExtensionEstimate:
    """90th-percentile additional draws d until the engine accepts."""

    d: int
    capped_fraction: float
    unlikely_to_complete: bool


def estimate_extension(
    state: AuditState,
    method: str,
    trials: int,
    seed: int,
) -> ExtensionEstimate:
    """Monte Carlo estimate of the additional draws needed to accept.

    multinomial: future draws are iid from the observed sample shares.
    polya: future draws follow a Polya urn seeded with the observed
    counts (each draw returns its ballot plus one more of the same
    kind), widening the spread to reflect share uncertainty.

    Each trial extends the current statistics until acceptance or until
    the remaining-ballot cap; d is the 90th percentile (index
    ceil(0.9*trials)-1 of the sorted counts). Deterministic given seed;
    trial i uses stream i.
    """
    if method not in ("multinomial", "polya"):
        raise ValueError(f"unknown extension method {method!r}")
    if trials < 1:
        raise ValueError("trials must be positive")
    if not state.interpretations:
        raise InsufficientData("cannot extend an empty sample")
    if state.status is AuditStatus.ACCEPT_REPORTED:
        return ExtensionEstimate(d=0, capped_fraction=0.0, unlikely_to_complete=False)

    contest = state.contest
    categories = list(contest.candidates) + [OTHER]
    cat_index = {c: i for i, c in enumerate(categories)}
    base_counts = [0] * len(categories)
    for b in state.interpretations:
        base_counts[cat_index.get(b.choice, len(categories) - 1)] += 1

    pairs = contest.pairs()
    incs = _pair_increments(contest)
    # per-category log-LR increment vector over pairs
    cat_inc = np.zeros((len(categories), len(pairs)))
    for pi, pair in enumerate(pairs):
        inc_w, inc_l = incs[pair]
        cat_inc[cat_index[contest.reported_winner], pi] = inc_w
        cat_inc[cat_index[pair[1]], pi] = inc_l
    base_llr = np.array([state.test_statistics[p] for p in pairs])
    thr = state.threshold()
    cap = max(contest.n_total - state.draws, 0)

    results = []
    for trial in range(trials):
        stream = GeneratorSpec(seed, trial).stream()
        urn = list(base_counts)
        total = sum(urn)
        llr = base_llr.copy()
        drawn = 0
        while drawn < cap and (len(pairs) > 0 and llr.min() < thr):
            u = stream.uniform01() * total
            acc = 0.0
            cat = len(categories) - 1
            for ci, c in enumerate(urn):
                acc += c
                if u < acc:
                    cat = ci
                    break
            llr += cat_inc[cat]
            if method == "polya":
                urn[cat] += 1
                total += 1
            drawn += 1
        results.append(drawn)
    results.sort()
    d = results[max(math.ceil(0.9 * trials) - 1, 0)]
    capped = sum(1 for r in results if r >= cap) / trials if cap > 0 else 1.0
    return ExtensionEstimate(
        d=d,
        capped_fraction=capped,
        unlikely_to_complete=(cap == 0 or d >= cap),
    )


def sample_size_cap(s: int, d: int, multiplier: int) -> int:
    """Cap on k-cut draws: current sample plus multiplier * estimated extension."""
    if multiplier not in (2, 3):
        raise ValueError("multiplier must be 2 or 3")
    if s < 0 or d < 0:
        raise ValueError("s and d must be nonnegative")
    return s + multiplier * d


# --- interpretation log (JSON-lines) ---------------------------------------

def interpretation_to_json(b: BallotInterpretation) -> str:
    obj = {"draw_index": b.draw_index, "stack_id": b.stack_id, "choice": b.choice}
    obj["recorded_at"] = b.recorded_at
    return json.dumps(obj)


def interpretation_from_json(line: str) -> BallotInterpretation:
    obj = json.loads(line)
    return BallotInterpretation(
        draw_index=int(obj["draw_index"]),
        stack_id=str(obj["stack_id"]),
        choice=str(obj["choice"]),
        recorded_at=obj.get("recorded_at"),
    )
