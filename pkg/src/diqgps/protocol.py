"""The DIQGPS session: test phase, reveal phase and the receiver's verdict."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from .adversary import ChannelEvents, apply_channel_attack, forge_reveal
from .codec import FIRST_CARRIER_INDEX, TimestampCodec, decode_timestamps, encode_timestamps
from .correlations import BellClass, BellEstimate, bell_from_table, classify, estimate_table
from .errors import DataError, InsufficientDataError
from .kinematics import (DILATION_FORMULAS, SPEED_OF_LIGHT, detection_times_R,
                         detection_times_S, distance_from_timestamps, proper_time_S,
                         separation_s_between)
from .quantum import TwoQubitStrategy, exact_probabilities, outcomes_from_uniforms

COLUMNS = ("index", "x", "y", "r", "s", "t_emit", "t_detect_R", "t_detect_S", "carrier")
_DTYPES = {"index": np.int64, "x": np.int8, "y": np.int8, "r": np.int8, "s": np.int8,
           "t_emit": np.float64, "t_detect_R": np.float64, "t_detect_S": np.float64,
           "carrier": bool}

ASSUMPTIONS = (
    "assumption_1: the adversary has no quantum memory; a memory-equipped delay "
    "leaves the Bell value intact and cannot be detected",
    "assumption_2: the reveal-phase classical channel is authenticated",
)


@dataclass(frozen=True)
class RoundRecord:
    """One round.  ``index`` is 1-based; rounds 1 and 2 carry the timed detections."""

    index: int
    x: int
    y: int
    r: int
    s: int
    t_emit: float
    t_detect_R: float
    t_detect_S: float
    carrier: bool = False


@dataclass(frozen=True, eq=False)
class SessionTranscript:
    """Column-oriented round data plus the reveal-phase disclosure."""

    columns: dict
    revealed_carriers: TimestampCodec = None
    phase_tag: str = "rest"
    scenario_id: str = ""

    def __post_init__(self):
        cols = {k: np.asarray(self.columns[k], dtype=_DTYPES[k]) for k in COLUMNS}
        n = {v.shape for v in cols.values()}
        if len(n) != 1:
            raise DataError("transcript columns have different lengths")
        if np.any(np.diff(cols["index"]) <= 0):
            raise DataError("round indices must be strictly increasing")
        if np.any(cols["carrier"] & (cols["index"] < FIRST_CARRIER_INDEX)):
            raise DataError(f"carrier flag set on a round before index {FIRST_CARRIER_INDEX}")
        for v in cols.values():
            v.setflags(write=False)
        object.__setattr__(self, "columns", cols)

    @classmethod
    def from_records(cls, records, **kw):
        cols = {k: [getattr(rec, k) for rec in records] for k in COLUMNS}
        return cls(cols, **kw)

    def __len__(self):
        return len(self.columns["index"])

    @property
    def rounds(self):
        c = self.columns
        return [RoundRecord(*row) for row in zip(*(c[k].tolist() for k in COLUMNS))]

    def with_columns(self, columns):
        return SessionTranscript(columns, self.revealed_carriers, self.phase_tag, self.scenario_id)

    def record(self, index):
        """The RoundRecord with round index ``index``."""
        pos = np.searchsorted(self.columns["index"], index)
        if pos >= len(self) or self.columns["index"][pos] != index:
            raise DataError(f"round {index} is missing from the transcript")
        return RoundRecord(*(self.columns[k][pos].item() for k in COLUMNS))

    def equals(self, other):
        return (self.revealed_carriers == other.revealed_carriers
                and self.phase_tag == other.phase_tag
                and all(np.array_equal(self.columns[k], other.columns[k]) for k in COLUMNS))


def choose_carriers(seed, n_rounds, n_carriers):
    """S's secret carrier positions: a seeded uniform subset of rounds >= 3, in order."""
    gen = _rng.generator(seed, _rng.TAG_CARRIERS)
    pool = np.arange(FIRST_CARRIER_INDEX, n_rounds + 1)
    return tuple(int(i) for i in np.sort(gen.choice(pool, size=n_carriers, replace=False)))


def _input_bits(seed, indices, tag):
    return (_rng.uniforms(seed, indices, tag) >= 0.5).astype(np.int8)


def _chunks(n, workers):
    bounds = np.linspace(0, n, max(1, workers) + 1).astype(int)
    return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _parallel(fn, n, workers):
    parts = _chunks(n, workers)
    if len(parts) <= 1:
        return [fn(parts[0])] if parts else []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, parts))


def run_session(scenario, seed=None, workers=1):
    """Simulate the test phase and S's reveal for ``scenario``.

    Every random choice is drawn from counter-based streams keyed by the
    master seed and the round index, so ``workers`` (threads used for round
    generation) never changes the transcript.
    """
    seed = scenario.seed if seed is None else int(seed)
    n = scenario.n_rounds
    strategy = scenario.strategy.build()
    kin = scenario.kinematics.config(n, scenario.phase)
    index = np.arange(1, n + 1, dtype=np.int64)
    t_emit = kin.emission_times

    events = apply_channel_attack(scenario.attack, ChannelEvents(strategy.state, t_emit, t_emit))
    t_detect_R = detection_times_R(kin, events.release_R)
    t_detect_S = proper_time_S(kin, detection_times_S(kin, events.release_S))

    def inputs(sl):
        return (_input_bits(seed, index[sl], _rng.TAG_INPUT_R),
                _input_bits(seed, index[sl], _rng.TAG_INPUT_S))

    parts = _parallel(inputs, n, workers)
    x = np.concatenate([p[0] for p in parts])
    y = np.concatenate([p[1] for p in parts])

    # Reveal-phase payload: S's first two detections, and the emission time
    # when the source travels with S.
    codec = TimestampCodec(scenario.codec.width_bits, scenario.codec.quantum)
    payload = [t_detect_S[0], t_detect_S[1]]
    if scenario.policy.t_S0_variant == "colocated":
        payload.append(t_emit[0])
    codec = codec.with_carriers(choose_carriers(seed, n, len(payload) * codec.rounds_per_timestamp))
    overlay = encode_timestamps(payload, codec)
    carrier_pos = np.asarray(codec.carrier_indices, dtype=np.int64) - 1
    y[carrier_pos] = [overlay[i] for i in codec.carrier_indices]
    carrier = np.zeros(n, dtype=bool)
    carrier[carrier_pos] = True

    probs = exact_probabilities(TwoQubitStrategy(events.state, strategy.obs_R, strategy.obs_S))

    def outcomes(sl):
        u = _rng.uniforms(seed, index[sl], _rng.TAG_OUTCOME)
        return outcomes_from_uniforms(probs, x[sl], y[sl], u)

    parts = _parallel(outcomes, n, workers)
    r = np.concatenate([p[0] for p in parts])
    s = np.concatenate([p[1] for p in parts])

    transcript = SessionTranscript(
        {"index": index, "x": x, "y": y, "r": r, "s": s, "t_emit": t_emit,
         "t_detect_R": t_detect_R, "t_detect_S": t_detect_S, "carrier": carrier},
        revealed_carriers=codec, phase_tag=scenario.phase, scenario_id=scenario.scenario_id)

    attack = scenario.attack
    if attack.kind == "forge_reveal":
        positions = codec.carrier_indices[:len(attack.forged_times) * codec.rounds_per_timestamp] \
            if attack.leaked_positions else None
        transcript = forge_reveal(transcript, attack.forged_times, seed=seed,
                                  mode=attack.forge_mode, positions=positions)
    return transcript


def _finite_or_none(v):
    return None if v is None or math.isnan(v) else float(v)


@dataclass(frozen=True)
class VerdictReport:
    bell: BellEstimate
    classification: BellClass
    decoded_t_S: tuple
    decoded_t_S0: float
    clock_offset: float
    separation: float
    dilation_expected: float
    dilation_observed: float
    dilation_formula_used: str
    accept: bool
    status: str = "reject"
    reasons: tuple = ()
    assumptions: tuple = ASSUMPTIONS

    def to_dict(self):
        """JSON-ready mapping; ``classification`` is keyed as ``class``."""
        return {
            "bell": None if self.bell is None else self.bell.to_dict(),
            "class": None if self.classification is None else self.classification.value,
            "decoded_t_S": None if self.decoded_t_S is None else list(self.decoded_t_S),
            "decoded_t_S0": self.decoded_t_S0,
            "clock_offset": _finite_or_none(self.clock_offset),
            "separation": _finite_or_none(self.separation),
            "dilation_expected": _finite_or_none(self.dilation_expected),
            "dilation_observed": _finite_or_none(self.dilation_observed),
            "dilation_formula_used": self.dilation_formula_used,
            "accept": self.accept,
            "status": self.status,
            "reasons": list(self.reasons),
            "assumptions": list(self.assumptions),
        }


def evaluate_verdict(transcript, policy, v=0.0, c=SPEED_OF_LIGHT):
    """R's analysis after the reveal phase.

    ``v`` is the satellite's announced recession speed (used only for the
    moving phase) and ``policy`` supplies k_sigma, the dilation formula, the
    t_S0 variant and the minimum rounds per input setting.
    """
    reasons = []
    codec = transcript.revealed_carriers
    if codec is None:
        raise DataError("reveal phase has not happened: no carrier disclosure")

    decoded = None
    try:
        decoded = decode_timestamps(transcript, codec)
    except DataError as exc:
        reasons.append(f"tamper: {exc}")

    bell = cls = None
    insufficient = False
    try:
        table = estimate_table(transcript, exclude=codec.carrier_indices)
        if table.counts.min() < policy.min_cell_count:
            insufficient = True
            reasons.append(f"inconclusive: fewest rounds in a setting is {table.counts.min()}, "
                           f"need {policy.min_cell_count}")
        bell = bell_from_table(table)
        cls = classify(bell, policy.k_sigma)
    except InsufficientDataError as exc:
        insufficient = True
        reasons.append(f"inconclusive: {exc}")

    r1, r2 = transcript.record(1), transcript.record(2)
    delta_R = r2.t_detect_R - r1.t_detect_R
    formula = DILATION_FORMULAS[policy.dilation_formula]
    expected = formula(delta_R, v if transcript.phase_tag == "moving" else 0.0, c)
    t_S = t_S0 = None
    offset = separation = observed = float("nan")
    if decoded is not None:
        t_S = (decoded[0], decoded[1])
        t_S0 = decoded[2] if len(decoded) > 2 else None
        observed = t_S[1] - t_S[0]
        offset = delta_R - observed
        try:
            if policy.t_S0_variant == "between":
                separation = separation_s_between(r1.t_detect_R, t_S[0], c)
            elif t_S0 is None:
                reasons.append("t_S0 was not encoded; separation unavailable")
            else:
                separation = distance_from_timestamps(r1.t_detect_R, t_S[0], t_S0, 0.0, c)[2]
        except DataError as exc:
            reasons.append(f"distance: {exc}")

    if cls is not None and not insufficient and cls is not BellClass.QUANTUM_MAXIMAL:
        reasons.append(f"bell: {cls.value} (B = {bell.value:.6f} +/- {bell.stderr:.6f})")
    accept = decoded is not None and not insufficient and cls is BellClass.QUANTUM_MAXIMAL
    if accept:
        status = "accept"
    elif decoded is None or not insufficient:
        status = "reject"
    else:
        status = "inconclusive"
    return VerdictReport(bell, cls, t_S, t_S0, offset, separation, expected, observed,
                         policy.dilation_formula, accept, status, tuple(reasons))


@dataclass(frozen=True)
class BaselineResult:
    reported_distance: float
    true_distance: float
    detected: bool = False

    @property
    def error(self):
        return self.reported_distance - self.true_distance


def classical_baseline_session(kinematics, delay=0.0, t_send=0.0):
    """One-satellite classical GPS with Eve delaying the signal by ``delay``.

    S broadcasts its dispatch time; R converts the elapsed time to a
    distance.  Nothing in the exchange can reveal the delay.
    """
    if delay < 0:
        raise ValueError("delay must be nonnegative")
    true = abs(kinematics.z_R - kinematics.z_S)
    t_receive = t_send + true / kinematics.c + delay
    return BaselineResult(kinematics.c * (t_receive - t_send), true)
