"""Ballot manifests and seeded multi-stack sampling plans.

A sampling plan tells auditors how many draws to perform per stack.
Draws up to the cap s_star are executed physically with k cuts, so the
plan only carries per-stack counts for them; any draws beyond s_star
revert to explicit ballot positions generated from the same seed.

Global positions are drawn with replacement (matching the model behind
the risk adjustment) via the package's deterministic generator, so a
(seed, manifest, s) triple reproduces the identical plan anywhere.
"""

from __future__ import annotations

import bisect
import csv
import io
import json
import math
from dataclasses import dataclass

from .errors import MalformedManifest
from .rng import GeneratorSpec


@dataclass(frozen=True)
class BallotManifest:
    """Ordered stacks of ballots: (stack_id, count) pairs."""

    stacks: tuple[tuple[str, int], ...]

    def __post_init__(self):
        ids = [sid for sid, _ in self.stacks]
        if len(set(ids)) != len(ids):
            raise MalformedManifest("duplicate stack_id")
        if not self.stacks:
            raise MalformedManifest("manifest has no stacks")
        if any(count < 1 for _, count in self.stacks):
            raise MalformedManifest("stack counts must be positive")

    @property
    def total(self) -> int:
        return sum(count for _, count in self.stacks)

    def cumulative(self) -> list[int]:
        """Exclusive running totals; stack i covers [cum[i], cum[i+1])."""
        cum = [0]
        for _, count in self.stacks:
            cum.append(cum[-1] + count)
        return cum


@dataclass(frozen=True)
class SamplingPlan:
    """Per-stack draw instructions for one audit sample.

    allocations cover the k-cut portion (draw order up to s_star);
    overflow_positions list explicit 0-based ballot positions for draws
    past s_star. Frozen: mutating k after issuance raises.
    """

    seed: int
    k: int
    s_star: int
    allocations: tuple[tuple[str, int], ...]
    overflow_positions: tuple[tuple[str, int], ...]

    @property
    def total_draws(self) -> int:
        return sum(d for _, d in self.allocations) + len(self.overflow_positions)

    def to_json(self) -> str:
        obj = {
            "seed": self.seed,
            "k": self.k,
            "s_star": self.s_star,
            "allocations": [
                {"stack_id": sid, "draws": d} for sid, d in self.allocations
            ],
            "overflow_positions": [
                {"stack_id": sid, "position": p} for sid, p in self.overflow_positions
            ],
        }
        return json.dumps(obj)

    @classmethod
    def from_json(cls, text: str) -> "SamplingPlan":
        obj = json.loads(text)
        return cls(
            seed=int(obj["seed"]),
            k=int(obj["k"]),
            s_star=int(obj["s_star"]),
            allocations=tuple(
                (str(a["stack_id"]), int(a["draws"])) for a in obj["allocations"]
            ),
            overflow_positions=tuple(
                (str(o["stack_id"]), int(o["position"]))
                for o in obj["overflow_positions"]
            ),
        )


@dataclass(frozen=True)
class EfficiencyEstimate:
    """Time comparison of k-cut vs count-down retrieval for one box."""

    draws_per_stack: int
    stack_size: int
    kcut_seconds: float
    counting_seconds: float
    breakeven_n: int


def parse_manifest(text: str) -> BallotManifest:
    """Parse manifest CSV (header ``stack_id,count``, UTF-8, LF)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["stack_id", "count"]:
        raise MalformedManifest("expected header 'stack_id,count'")
    stacks = []
    for row in reader:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise MalformedManifest(f"bad row: {row!r}")
        sid = row[0].strip()
        try:
            count = int(row[1])
        except ValueError as exc:
            raise MalformedManifest(f"non-integer count in row {row!r}") from exc
        if count < 1:
            raise MalformedManifest(f"non-positive count for stack {sid!r}")
        stacks.append((sid, count))
    return BallotManifest(tuple(stacks))


def serialize_manifest(manifest: BallotManifest) -> str:
    lines = ["stack_id,count"]
    lines += [f"{sid},{count}" for sid, count in manifest.stacks]
    return "\n".join(lines) + "\n"


def draw_positions(manifest: BallotManifest, s: int, seed: int) -> list[int]:
    """s global ballot positions, uniform with replacement over the manifest."""
    if s < 1:
        raise ValueError("sample size must be positive")
    stream = GeneratorSpec(seed, stream_id=0).stream()
    total = manifest.total
    return [stream.randbelow(total) for _ in range(s)]


def allocate_draws(
    manifest: BallotManifest, s: int, seed: int
) -> tuple[tuple[str, int], ...]:
    """Per-stack draw counts induced by the seeded global positions."""
    positions = draw_positions(manifest, s, seed)
    cum = manifest.cumulative()
    counts = [0] * len(manifest.stacks)
    for pos in positions:
        counts[bisect.bisect_right(cum, pos) - 1] += 1
    return tuple(
        (sid, c) for (sid, _), c in zip(manifest.stacks, counts) if c > 0
    )


def build_plan(
    manifest: BallotManifest, s: int, k: int, seed: int, s_star: int | None = None
) -> SamplingPlan:
    """Sampling plan: k-cut counts up to s_star, explicit positions beyond."""
    if k < 1:
        raise ValueError("k must be positive")
    if s_star is None:
        s_star = s
    if s_star < 0:
        raise ValueError("s_star must be nonnegative")
    positions = draw_positions(manifest, s, seed)
    cum = manifest.cumulative()
    counts = [0] * len(manifest.stacks)
    for pos in positions[:s_star]:
        counts[bisect.bisect_right(cum, pos) - 1] += 1
    allocations = tuple(
        (sid, c) for (sid, _), c in zip(manifest.stacks, counts) if c > 0
    )
    overflow = []
    for pos in positions[s_star:]:
        idx = bisect.bisect_right(cum, pos) - 1
        overflow.append((manifest.stacks[idx][0], pos - cum[idx]))
    return SamplingPlan(
        seed=seed,
        k=k,
        s_star=s_star,
        allocations=allocations,
        overflow_positions=tuple(overflow),
    )


def efficiency_breakeven(
    draws_per_stack: int,
    cut_seconds_per_draw: float = 15.0,
    count_rate: float = 2.5,
) -> int:
    """Smallest stack size where k-cut beats counting for t draws per box.

    Counting t sorted positions in one pass costs n*t/(rate*(t+1))
    seconds against cut_seconds_per_draw*t for k-cut, so the threshold
    is n >= rate*cut_seconds*(t+1) (37.5*(t+1) with the defaults).
    """
    if draws_per_stack < 1:
        raise ValueError("draws per stack must be positive")
    if cut_seconds_per_draw <= 0 or count_rate <= 0:
        raise ValueError("timing constants must be positive")
    threshold = count_rate * cut_seconds_per_draw * (draws_per_stack + 1)
    return math.ceil(threshold)


def efficiency_estimate(
    draws_per_stack: int,
    stack_size: int,
    cut_seconds_per_draw: float = 15.0,
    count_rate: float = 2.5,
) -> EfficiencyEstimate:
    t = draws_per_stack
    return EfficiencyEstimate(
        draws_per_stack=t,
        stack_size=stack_size,
        kcut_seconds=cut_seconds_per_draw * t,
        counting_seconds=stack_size * t / (count_rate * (t + 1)),
        breakeven_n=efficiency_breakeven(t, cut_seconds_per_draw, count_rate),
    )
