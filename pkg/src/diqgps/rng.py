"""Counter-based random streams.

Every uniform variate used by a session is a pure function of
``(seed, round_index, tag)``.  The block function is Philox4x64-10, the same
bijection numpy ships as :class:`numpy.random.Philox`, evaluated here on whole
arrays of counters at once so that a 10^5-round session costs a few vectorised
passes instead of 10^5 generator constructions.

Reproducing a variate with plain numpy::

    key = np.array([seed, tag], dtype=np.uint64)
    bg = np.random.Philox(key=key, counter=[index - 1, 0, 0, 0])
    u = (bg.random_raw() >> 11) * 2.0**-53

(numpy increments the counter before producing a block, hence ``index - 1``.)
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# Stream tags; part of the reproducibility contract, do not renumber.
TAG_INPUT_R = 1
TAG_INPUT_S = 2
TAG_OUTCOME = 3
TAG_CARRIERS = 4
TAG_EVE = 5

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)


def _mulhilo(a, b):
    """Full 64x64 -> 128 bit product, returned as (hi, lo) uint64 arrays."""
    al, ah = a & _LO32, a >> _S32
    bl, bh = b & _LO32, b >> _S32
    t = al * bl
    u = ah * bl + (t >> _S32)
    w1 = (u & _LO32) + al * bh
    hi = ah * bh + (u >> _S32) + (w1 >> _S32)
    return hi, a * b


def philox4x64(counter, key, rounds: int = 10):
    """Philox4x64 block function.

    ``counter`` has shape (..., 4) and ``key`` shape (..., 2), both uint64 and
    broadcastable.  Returns the (..., 4) output block.
    """
    counter = np.asarray(counter, dtype=np.uint64)
    key = np.asarray(key, dtype=np.uint64)
    c0, c1, c2, c3 = (counter[..., i] for i in range(4))
    k0, k1 = key[..., 0], key[..., 1]
    with np.errstate(over="ignore"):
        for i in range(rounds):
            if i:
                k0 = k0 + _W0
                k1 = k1 + _W1
            hi0, lo0 = _mulhilo(_M0, c0)
            hi1, lo1 = _mulhilo(_M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return np.stack(np.broadcast_arrays(c0, c1, c2, c3), axis=-1)


def raw_words(seed: int, indices, tag: int) -> np.ndarray:
    """Four uint64 words per index for the stream ``(seed, tag)``."""
    idx = np.atleast_1d(np.asarray(indices, dtype=np.uint64))
    counter = np.zeros(idx.shape + (4,), dtype=np.uint64)
    counter[..., 0] = idx
    key = np.array([int(seed) & MASK64, int(tag) & MASK64], dtype=np.uint64)
    return philox4x64(counter, key)


def uniforms(seed: int, indices, tag: int) -> np.ndarray:
    """One double in [0, 1) per round index, 53 bits from the first word."""
    words = raw_words(seed, indices, tag)[..., 0]
    return (words >> np.uint64(11)).astype(np.float64) * 2.0**-53


def uniform(seed: int, index: int, tag: int) -> float:
    return float(uniforms(seed, [index], tag)[0])


def generator(seed: int, tag: int) -> np.random.Generator:
    """A sequential numpy generator for one-off draws (carrier selection, Eve)."""
    key = np.array([int(seed) & MASK64, int(tag) & MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
