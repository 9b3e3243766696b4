"""Pure NumPy kernels: the fallback backend for kcut.kernels.

Each function here has a compiled twin in ``_kernels.pyx``. The stream
kernels step the xorshift64* states from :mod:`kcut.rng` in the same
draw order and use the same integer/double mappings, so their outputs
are bit-identical across backends and equal to the scalar reference.
``convolve_cyclic`` is only tied to the extended-precision reference in
kcut.analysis (1e-10), since summation order differs between backends.
"""

from __future__ import annotations

import numpy as np

from .rng import SPLITMIX_GAMMA, SPLITMIX_MUL1, SPLITMIX_MUL2, XORSHIFT_MUL

_U64 = np.uint64
_GAMMA = _U64(SPLITMIX_GAMMA)
_MUL1 = _U64(SPLITMIX_MUL1)
_MUL2 = _U64(SPLITMIX_MUL2)
_XMUL = _U64(XORSHIFT_MUL)
_INV_2_53 = 2.0 ** -53


def convolve_cyclic(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Cyclic convolution out[j] = sum_i p[i] * q[(j - i) mod n]."""
    n = p.shape[0]
    jj = np.arange(n)
    table = q[(jj[None, :] - jj[:, None]) % n]  # table[i, j] = q[(j-i) mod n]
    return p @ table


def streams_init(seed: int, stream_lo: int, count: int) -> np.ndarray:
    """Vector of initial states for streams stream_lo .. stream_lo+count-1."""
    ids = np.arange(stream_lo + 1, stream_lo + count + 1, dtype=np.uint64)
    z = _U64(seed & (2**64 - 1)) + _GAMMA * ids
    z = (z ^ (z >> _U64(30))) * _MUL1
    z = (z ^ (z >> _U64(27))) * _MUL2
    z = z ^ (z >> _U64(31))
    z[z == 0] = _GAMMA
    return z


def _step(states: np.ndarray) -> np.ndarray:
    """Advance every stream once; returns the u64 outputs."""
    x = states
    x ^= x >> _U64(12)
    x ^= x << _U64(25)
    x ^= x >> _U64(27)
    states[:] = x
    return x * _XMUL


def uniform01_block(states: np.ndarray) -> np.ndarray:
    return (_step(states) >> _U64(11)).astype(np.float64) * _INV_2_53


def randbelow_block(states: np.ndarray, n: int) -> np.ndarray:
    j = (uniform01_block(states) * n).astype(np.int64)
    return np.minimum(j, n - 1)


def sample_pmf_block(states: np.ndarray, cdf: np.ndarray) -> np.ndarray:
    u = uniform01_block(states)
    j = np.searchsorted(cdf, u, side="right")
    return np.minimum(j, len(cdf) - 1).astype(np.int64)


def kcut_positions(states: np.ndarray, cdf: np.ndarray, n: int, k: int) -> np.ndarray:
    """One k-cut position per stream: sum of k pmf draws, mod n."""
    acc = np.zeros(states.shape[0], dtype=np.int64)
    for _ in range(k):
        acc += sample_pmf_block(states, cdf)
    return acc % n


def position_switch_matrix(
    states: np.ndarray, n: int, s: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per stream, s interleaved (position, switch-uniform) draw pairs.

    Consumption order per stream and draw: one u64 for the uniform
    position, then one u64 for the switch uniform.
    """
    m = states.shape[0]
    positions = np.empty((m, s), dtype=np.int64)
    switch_u = np.empty((m, s), dtype=np.float64)
    for j in range(s):
        positions[:, j] = randbelow_block(states, n)
        switch_u[:, j] = uniform01_block(states)
    return positions, switch_u
