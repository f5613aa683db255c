"""Timestamps hidden in S's input choices.

Each timestamp is quantised to ``T = round(t / quantum)`` and written as
``width_bits`` bits, most significant first.  Every bit occupies two
consecutive carrier rounds as an anti-correlated pair: bit 0 -> inputs (0, 1),
bit 1 -> inputs (1, 0).  A pair reading (0, 0) or (1, 1) cannot come from an
honest encoder and is reported as tampering.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, EncodingCapacityError, StructuralError, TamperDetectedError

FIRST_CARRIER_INDEX = 3
PAIR_FOR_BIT = {0: (0, 1), 1: (1, 0)}


@dataclass(frozen=True, eq=False)
class TimestampCodec:
    width_bits: int = 32
    quantum: float = 1e-9
    carrier_indices: tuple = ()

    def __post_init__(self):
        if self.width_bits < 1:
            raise StructuralError("width_bits must be positive")
        if not self.quantum > 0:
            raise StructuralError("quantum must be positive")
        idx = tuple(int(i) for i in self.carrier_indices)
        if len(set(idx)) != len(idx):
            raise StructuralError("carrier indices overlap")
        if idx and min(idx) < FIRST_CARRIER_INDEX:
            raise StructuralError(f"carrier rounds must have index >= {FIRST_CARRIER_INDEX}")
        if len(idx) % (2 * self.width_bits):
            raise StructuralError(
                f"{len(idx)} carriers is not a whole number of {self.width_bits}-bit timestamps")
        object.__setattr__(self, "carrier_indices", idx)

    @property
    def capacity(self):
        return 2**self.width_bits

    @property
    def rounds_per_timestamp(self):
        return 2 * self.width_bits

    @property
    def n_timestamps(self):
        return len(self.carrier_indices) // self.rounds_per_timestamp

    def with_carriers(self, indices):
        return TimestampCodec(self.width_bits, self.quantum, tuple(indices))

    def quantize(self, t):
        return int(round(t / self.quantum))

    def __eq__(self, other):
        if not isinstance(other, TimestampCodec):
            return NotImplemented
        return (self.width_bits, self.quantum, self.carrier_indices) == (
            other.width_bits, other.quantum, other.carrier_indices)


def to_bits(value, width):
    return [(value >> (width - 1 - k)) & 1 for k in range(width)]


def encode_timestamps(times, codec):
    """Map each carrier round index to the input bit it is forced to."""
    times = list(times)
    needed = len(times) * codec.rounds_per_timestamp
    if needed != len(codec.carrier_indices):
        raise StructuralError(
            f"{len(times)} timestamps need {needed} carriers, codec has {len(codec.carrier_indices)}")
    overlay = {}
    it = iter(codec.carrier_indices)
    for t in times:
        T = codec.quantize(t)
        if not 0 <= T < codec.capacity:
            raise EncodingCapacityError(
                f"time {t!r} s quantises to {T}, outside [0, 2^{codec.width_bits})")
        for bit in to_bits(T, codec.width_bits):
            for inp in PAIR_FOR_BIT[bit]:
                overlay[next(it)] = inp
    return overlay


def decode_inputs(inputs, codec):
    """Inverse of :func:`encode_timestamps` on an ordered list of carrier inputs."""
    inputs = np.asarray(inputs, dtype=np.int64)
    if inputs.size != len(codec.carrier_indices):
        raise DataError(f"expected {len(codec.carrier_indices)} carrier inputs, got {inputs.size}")
    pairs = inputs.reshape(-1, 2)
    bad = np.flatnonzero(pairs[:, 0] == pairs[:, 1])
    if bad.size:
        k = int(bad[0])
        raise TamperDetectedError(
            f"carrier pair {k} (rounds {codec.carrier_indices[2 * k]}, "
            f"{codec.carrier_indices[2 * k + 1]}) reads {tuple(pairs[k].tolist())}", pair_index=k)
    bits = pairs[:, 0].reshape(codec.n_timestamps, codec.width_bits)
    return [int("".join(map(str, row.tolist())), 2) * codec.quantum for row in bits]


def decode_timestamps(transcript, codec=None):
    """Read the revealed carriers' inputs back out of a transcript."""
    if codec is None:
        codec = transcript.revealed_carriers
    if codec is None:
        raise DataError("carrier positions have not been revealed")
    cols = transcript.columns
    pos = np.searchsorted(cols["index"], codec.carrier_indices)
    idx = np.asarray(codec.carrier_indices)
    ok = (pos < len(cols["index"])) & (cols["index"][np.minimum(pos, len(cols["index"]) - 1)] == idx)
    if not np.all(ok):
        missing = idx[~ok][0]
        raise DataError(f"carrier round {missing} is missing from the transcript")
    return decode_inputs(cols["y"][pos], codec)
