"""One-dimensional relativistic timing on the S0-S-R line.

All quantities are in R's rest frame.  The source S0 and the receiver R are
stationary.  The satellite S starts at ``z_S_initial`` at coordinate time 0
and moves with speed ``v`` *away from S0* (negative ``v`` approaches S0);
its clock reads 0 at coordinate time 0 and ticks at sqrt(1 - v^2/c^2).
Photons leave S0 at the emission times, one towards each detector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True, eq=False)
class KinematicsConfig:
    z_S0: float
    z_R: float
    z_S_initial: float
    v: float = 0.0
    c: float = SPEED_OF_LIGHT
    emission_times: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        if not self.c > 0:
            raise ConfigError("speed of light must be positive", field="c")
        if not abs(self.v) < self.c:
            raise ConfigError(f"|v| = {abs(self.v)!r} must be below c = {self.c!r}", field="v")
        if self.z_R == self.z_S0:
            raise ConfigError("receiver cannot sit on the source", field="z_R")
        t = np.array(self.emission_times, dtype=float).ravel()
        if t.size == 0:
            raise ConfigError("at least one emission time is required", field="emission_times")
        if np.any(np.diff(t) <= 0):
            raise ConfigError("emission times must be strictly increasing", field="emission_times")
        t.setflags(write=False)
        object.__setattr__(self, "emission_times", t)
        # S must still be on its own side of S0 when the first photon leaves.
        if self.gap_to_S(t[0]) < 0:
            raise ConfigError("satellite crosses the source before the first emission", field="v")

    @property
    def beta(self):
        return self.v / self.c

    @property
    def direction_S(self):
        """+1 or -1: the side of S0 on which S sits (away from R when co-located)."""
        d = self.z_S_initial - self.z_S0
        if d != 0:
            return 1.0 if d > 0 else -1.0
        return -1.0 if self.z_R > self.z_S0 else 1.0

    @property
    def s_between(self):
        """True when S lies on R's side of the source."""
        return self.direction_S == (1.0 if self.z_R > self.z_S0 else -1.0)

    def gap_to_S(self, t):
        """Distance from S0 to S at coordinate time ``t``."""
        return abs(self.z_S_initial - self.z_S0) + self.v * np.asarray(t, dtype=float)

    def position_S(self, t):
        return self.z_S0 + self.direction_S * self.gap_to_S(t)

    def replace(self, **kw):
        args = dict(z_S0=self.z_S0, z_R=self.z_R, z_S_initial=self.z_S_initial,
                    v=self.v, c=self.c, emission_times=self.emission_times)
        args.update(kw)
        return KinematicsConfig(**args)


@dataclass(frozen=True, eq=False)
class EventTimeline:
    emission_times: np.ndarray
    t_detect_R: np.ndarray
    t_detect_S: np.ndarray
    proper_time_S: np.ndarray


def lorentz_factor_inverse(v, c):
    """sqrt(1 - v^2/c^2)."""
    b = v / c
    return math.sqrt((1 - b) * (1 + b))


def detection_times_R(config, t_emit):
    t_emit = np.asarray(t_emit, dtype=float)
    return t_emit + abs(config.z_R - config.z_S0) / config.c


def detection_times_S(config, t_emit):
    """Coordinate time at which a photon leaving S0 at ``t_emit`` reaches S.

    Intersecting the photon worldline c (t - t_e) with the satellite's
    distance d0 + v t gives t = (d0 + c t_e) / (c - v).
    """
    t_emit = np.asarray(t_emit, dtype=float)
    d0 = abs(config.z_S_initial - config.z_S0)
    if np.any(config.gap_to_S(t_emit) < 0):
        raise DataError("photon emitted after the satellite crossed the source")
    return (d0 + config.c * t_emit) / (config.c - config.v)


def proper_time_S(config, t):
    """Reading of S's clock at coordinate time ``t``."""
    return np.asarray(t, dtype=float) * lorentz_factor_inverse(config.v, config.c)


def simulate_timeline(config):
    t = config.emission_times
    t_S = detection_times_S(config, t)
    return EventTimeline(t, detection_times_R(config, t), t_S, proper_time_S(config, t_S))


def travel_time_moving(x_S, v, c=SPEED_OF_LIGHT):
    """Flight time to a detector at distance ``x_S`` receding at ``v``."""
    return x_S / (c - v)


def coordinate_interval_at_S(delta_R, v, c=SPEED_OF_LIGHT):
    """Coordinate-time gap between two detections at S.

    The second photon needs delta_R * v / (c - v) longer to catch up, on top
    of the emission gap delta_R.
    """
    return delta_R * c / (c - v)


def dilated_interval_paper(delta_R, v, c=SPEED_OF_LIGHT):
    """S-clock gap with the dilation factor dividing: delta_R c / ((c - v) sqrt(1 - v^2/c^2))."""
    return delta_R * c / ((c - v) * lorentz_factor_inverse(v, c))


def dilated_interval_oracle(delta_R, v, c=SPEED_OF_LIGHT):
    """S-clock gap from proper time along S's worldline.

    Equals delta_R * sqrt((c + v) / (c - v)), the relativistic Doppler factor.
    """
    return coordinate_interval_at_S(delta_R, v, c) * lorentz_factor_inverse(v, c)


DILATION_FORMULAS = {
    "eq8_as_printed": dilated_interval_paper,
    "first_principles": dilated_interval_oracle,
}


def distance_from_timestamps(t_R1, t_S1, t_S0, z_S0, c=SPEED_OF_LIGHT):
    """Positions of R and S from first detection times and the emission time.

    R and S are on opposite sides of the source.  Returns
    ``(z_R, z_S, z_R - z_S)``.
    """
    if t_R1 < t_S0 or t_S1 < t_S0:
        raise DataError("detection time precedes the emission time")
    z_R = z_S0 + c * (t_R1 - t_S0)
    z_S = z_S0 - c * (t_S1 - t_S0)
    return z_R, z_S, c * (t_R1 + t_S1 - 2 * t_S0)


def separation_s_between(t_R1, t_S1, c=SPEED_OF_LIGHT):
    """R-S distance when S sits between S0 and R; the emission time drops out."""
    if t_R1 < t_S1:
        raise DataError("S detected its photon after R while sitting closer to the source")
    return c * (t_R1 - t_S1)


def kinematics_compare(v_over_c, delta_R=1.0, c=SPEED_OF_LIGHT):
    """Rows of (v/c, coordinate gap, printed formula, proper-time oracle, ratio)."""
    rows = []
    for b in v_over_c:
        if not abs(b) < 1:
            raise ConfigError(f"|v/c| = {abs(b)!r} must be below 1", field="v")
        v = b * c
        printed = dilated_interval_paper(delta_R, v, c)
        oracle = dilated_interval_oracle(delta_R, v, c)
        rows.append({
            "v_over_c": b,
            "coordinate_interval": coordinate_interval_at_S(delta_R, v, c),
            "eq8_as_printed": printed,
            "first_principles": oracle,
            "ratio": printed / oracle,
        })
    return rows
