"""Eve: attacks on the quantum channel and on the reveal-phase data."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as _rng
from .codec import FIRST_CARRIER_INDEX, TimestampCodec, encode_timestamps
from .errors import ConfigError, StructuralError
from .quantum import PAULI_X, PAULI_Y, PAULI_Z, BinaryObservable, TwoQubitState

ATTACK_KINDS = ("none", "intercept_resend", "delay", "forge_reveal")
WINGS = ("R", "S")
FORGE_MODES = ("full", "partial")
NAMED_BASES = {"z": PAULI_Z, "x": PAULI_X, "y": PAULI_Y}

# Fields each kind may set; everything else must stay at its default.
_RELEVANT = {
    "none": set(),
    "intercept_resend": {"basis", "wing"},
    "delay": {"basis", "wing", "delay_seconds", "has_quantum_memory"},
    "forge_reveal": {"forged_times", "forge_mode", "leaked_positions"},
}
_DEFAULTS = {
    "basis": None, "wing": "S", "delay_seconds": None, "has_quantum_memory": False,
    "forged_times": None, "forge_mode": "full", "leaked_positions": False,
}


@dataclass(frozen=True)
class AttackConfig:
    kind: str = "none"
    basis: str = None
    wing: str = "S"
    delay_seconds: float = None
    has_quantum_memory: bool = False
    forged_times: tuple = None
    forge_mode: str = "full"
    leaked_positions: bool = False

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise ConfigError(f"unknown attack kind {self.kind!r}", field="attack.kind")
        for name, default in _DEFAULTS.items():
            if name not in _RELEVANT[self.kind] and getattr(self, name) != default:
                raise ConfigError(f"attack.{name} is not used by kind {self.kind!r}",
                                  field=f"attack.{name}")
        if self.basis is not None and self.basis not in NAMED_BASES:
            raise ConfigError(f"basis must be one of {sorted(NAMED_BASES)}", field="attack.basis")
        if self.wing not in WINGS:
            raise ConfigError("wing must be 'R' or 'S'", field="attack.wing")
        if self.kind == "delay":
            if self.delay_seconds is None or self.delay_seconds < 0:
                raise ConfigError("delay attack needs delay_seconds >= 0", field="attack.delay_seconds")
        if self.forge_mode not in FORGE_MODES:
            raise ConfigError(f"forge_mode must be one of {FORGE_MODES}", field="attack.forge_mode")
        if self.forged_times is not None:
            object.__setattr__(self, "forged_times", tuple(float(t) for t in self.forged_times))
        if self.kind == "forge_reveal" and self.forged_times is None:
            object.__setattr__(self, "forged_times", ())

    def basis_observable(self):
        return BinaryObservable(NAMED_BASES[self.basis or "z"])


@dataclass(frozen=True, eq=False)
class ChannelEvents:
    """What the source hands to the channel: the shared state and the
    moments each wing's photons leave for their detector.  A photon held
    for delta at any point of its path arrives exactly as one emitted delta
    later, so delays are represented by shifting these release times."""

    state: TwoQubitState
    release_R: np.ndarray
    release_S: np.ndarray


def _projectors(basis):
    if isinstance(basis, BinaryObservable):
        return [p for p in basis.effects() if np.any(np.abs(p) > 1e-15)]
    # A list of projectors, e.g. [identity] for the trivial measurement.
    ps = [np.asarray(p, dtype=complex) for p in basis]
    if not np.allclose(sum(ps), np.eye(ps[0].shape[0]), atol=1e-12):
        raise StructuralError("measurement projectors do not sum to identity")
    return ps


def intercept_resend(state, basis, wing="S"):
    """Dephase one wing in ``basis``: sum_k (1 (x) P_k) rho (1 (x) P_k)."""
    d_R, d_S = state.dims
    out = np.zeros_like(state.matrix)
    for p in _projectors(basis):
        if wing == "S":
            if p.shape[0] != d_S:
                raise StructuralError(f"basis of dimension {p.shape[0]} on wing S of dimension {d_S}")
            K = np.kron(np.eye(d_R), p)
        elif wing == "R":
            if p.shape[0] != d_R:
                raise StructuralError(f"basis of dimension {p.shape[0]} on wing R of dimension {d_R}")
            K = np.kron(p, np.eye(d_S))
        else:
            raise StructuralError(f"unknown wing {wing!r}")
        out += K @ state.matrix @ K.conj().T
    return TwoQubitState((out + out.conj().T) / 2, state.dims)


def delay_attack(events, delta, has_quantum_memory, wing="S", basis=None):
    """Hold one wing's photons for ``delta`` seconds.

    Without quantum memory Eve can only hold the classical record of a
    measurement, so the delivered state is the intercept-resend ensemble.
    With memory the qubit arrives intact, only late.
    """
    state = events.state
    if not has_quantum_memory:
        state = intercept_resend(state, basis or BinaryObservable(PAULI_Z), wing)
    release_R, release_S = events.release_R, events.release_S
    if wing == "R":
        release_R = release_R + delta
    else:
        release_S = release_S + delta
    return ChannelEvents(state, release_R, release_S)


def apply_channel_attack(attack, events):
    if attack.kind == "intercept_resend":
        return replace(events, state=intercept_resend(events.state, attack.basis_observable(), attack.wing))
    if attack.kind == "delay":
        return delay_attack(events, attack.delay_seconds, attack.has_quantum_memory,
                            attack.wing, attack.basis_observable())
    return events


def forge_reveal(transcript, forged_times, seed=0, mode="full", positions=None):
    """Rewrite S's reported inputs so they spell ``forged_times``.

    Eve does not know where the true carriers are, so she writes her
    Manchester pairs at positions of her own choosing (random rounds >= 3
    unless ``positions`` is given, e.g. counterfactually leaked true ones).
    In ``full`` mode she replaces the entire reported input sequence with
    fresh uniform bits around her pairs; ``partial`` touches only her pairs.
    Outcomes are never changed.
    """
    forged_times = list(forged_times)
    if mode not in FORGE_MODES:
        raise ConfigError(f"forge_mode must be one of {FORGE_MODES}", field="attack.forge_mode")
    if mode == "partial" and not forged_times:
        return transcript
    cols = {k: v.copy() for k, v in transcript.columns.items()}
    index = cols["index"]
    gen = _rng.generator(seed, _rng.TAG_EVE)
    codec = transcript.revealed_carriers or TimestampCodec()
    m = len(forged_times) * codec.rounds_per_timestamp
    if mode == "full":
        cols["y"] = gen.integers(0, 2, size=index.size).astype(cols["y"].dtype)
    if forged_times:
        if positions is None:
            pool = index[index >= FIRST_CARRIER_INDEX]
            positions = np.sort(gen.choice(pool, size=m, replace=False))
        eve_codec = codec.with_carriers(positions)
        overlay = encode_timestamps(forged_times, eve_codec)
        pos = np.searchsorted(index, np.fromiter(overlay.keys(), dtype=np.int64))
        cols["y"][pos] = np.fromiter(overlay.values(), dtype=cols["y"].dtype)
        # Keep the reported detection times consistent with the forgery.
        head = np.flatnonzero(index <= 2)
        for i, t in zip(head, forged_times[:2]):
            cols["t_detect_S"][i] = t
    return transcript.with_columns(cols)
