"""Seeded, cross-platform deterministic random streams.

Every randomized component in this package draws from a small-state
generator so that plans, simulations, and session replays reproduce
bit-for-bit across runs, platforms, and kernel backends (compiled vs
pure NumPy).

Construction, with all constants spelled out:

* Stream state derivation (SplitMix64): the 64-bit state of stream
  ``i`` under seed ``S`` is ``mix64(S + 0x9E3779B97F4A7C15 * (i + 1))``
  where ``mix64`` is the SplitMix64 finalizer with multipliers
  ``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB`` and shifts 30/27/31.
  A zero result is replaced by ``0x9E3779B97F4A7C15`` (the xorshift
  state must be nonzero).
* Output sequence (xorshift64*): state update ``x ^= x >> 12;
  x ^= x << 25; x ^= x >> 27`` followed by output
  ``x * 0x2545F4914F6CDD1D``, all modulo 2**64.
* ``uniform01`` takes the top 53 bits: ``(out >> 11) * 2**-53``.
* ``randbelow(n)`` is ``min(int(uniform01() * n), n - 1)``; the clamp
  guards the single rounding case where the product lands on ``n``.

All arithmetic is exact 64-bit integer or IEEE-754 double math, so the
NumPy and Cython batch kernels reproduce this scalar reference exactly.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

_MASK64 = (1 << 64) - 1

SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX_MUL1 = 0xBF58476D1CE4E5B9
SPLITMIX_MUL2 = 0x94D049BB133111EB
XORSHIFT_MUL = 0x2545F4914F6CDD1D

_INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer; maps a 64-bit value to a well-mixed one."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * SPLITMIX_MUL1) & _MASK64
    z = ((z ^ (z >> 27)) * SPLITMIX_MUL2) & _MASK64
    return z ^ (z >> 31)


def stream_state(seed: int, stream_id: int) -> int:
    """Initial xorshift64* state for (seed, stream_id); never zero."""
    z = (seed + SPLITMIX_GAMMA * (stream_id + 1)) & _MASK64
    s = mix64(z)
    return s if s != 0 else SPLITMIX_GAMMA


@dataclass(frozen=True)
class GeneratorSpec:
    """Identifies one reproducible random stream.

    Identical spec ⇒ identical output sequence, everywhere. Trial-level
    parallelism derives per-trial specs as ``stream_id + trial_index``.
    """

    seed: int
    stream_id: int = 0

    def stream(self) -> "Stream":
        return Stream(stream_state(self.seed, self.stream_id))

    def substream(self, offset: int) -> "GeneratorSpec":
        return GeneratorSpec(self.seed, self.stream_id + offset)


class Stream:
    """Scalar xorshift64* stream; the reference the batch kernels must match."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        if state == 0:
            raise ValueError("xorshift state must be nonzero")
        self.state = state & _MASK64

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * XORSHIFT_MUL) & _MASK64

    def uniform01(self) -> float:
        """Uniform double in [0, 1) from the top 53 output bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        j = int(self.uniform01() * n)
        return n - 1 if j >= n else j

    def sample_pmf(self, cdf) -> int:
        """Inverse-CDF draw; cdf is the running sum of a pmf (last entry ~1)."""
        u = self.uniform01()
        j = bisect.bisect_right(cdf, u)
        n = len(cdf)
        return n - 1 if j >= n else j
