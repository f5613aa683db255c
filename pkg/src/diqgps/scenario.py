"""Scenario files.

A scenario is a TOML document with top-level keys ``scenario_id``, ``seed``,
``n_rounds`` and ``phase`` and the tables ``[strategy]``, ``[kinematics]``,
``[codec]``, ``[attack]`` and ``[policy]``.  Parsing is strict: unknown keys
are rejected, and every violation names the offending key.  See
``src/diqgps/scenarios/`` for the bundled examples.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import tomli
import tomli_w

from .adversary import AttackConfig
from .codec import FIRST_CARRIER_INDEX
from .errors import ConfigError, EncodingCapacityError, StructuralError
from .kinematics import DILATION_FORMULAS, SPEED_OF_LIGHT, KinematicsConfig
from .quantum import TwoQubitState, TwoQubitStrategy, canonical_strategy

PHASES = ("rest", "moving")
T_S0_VARIANTS = ("colocated", "between")
UNITS = ("SI", "natural")
BUNDLED = ("honest_rest", "honest_moving", "intercept_resend", "delay_no_memory",
           "delay_memory", "forge_reveal")
OBSERVABLE_KEYS = ("R0", "R1", "S0", "S1")


def _complex(re, im):
    m = np.array(re, dtype=float).astype(complex)
    if im is not None:
        m += 1j * np.array(im, dtype=float)
    return m


def _freeze(m):
    return None if m is None else tuple(tuple(float(v) for v in row) for row in m)


def _unfreeze(m):
    return [list(row) for row in m]


@dataclass(frozen=True)
class StrategySpec:
    kind: str = "canonical"
    # Custom strategies: real and imaginary parts, nested lists.
    state_real: tuple = None
    state_imag: tuple = None
    observables: dict = None

    def build(self):
        if self.kind == "canonical":
            return canonical_strategy()
        obs = {k: _complex(*self.observables[k]) for k in OBSERVABLE_KEYS}
        return TwoQubitStrategy(
            TwoQubitState(_complex(self.state_real, self.state_imag)),
            (obs["R0"], obs["R1"]), (obs["S0"], obs["S1"]))


@dataclass(frozen=True)
class KinematicsSpec:
    z_S0: float
    z_R: float
    z_S: float
    v: float = 0.0
    c: float = SPEED_OF_LIGHT
    units: str = "SI"
    emission_start: float = 1e-3
    emission_period: float = 1e-3

    def emission_times(self, n_rounds):
        return self.emission_start + self.emission_period * np.arange(n_rounds)

    def config(self, n_rounds, phase):
        v = self.v if phase == "moving" else 0.0
        return KinematicsConfig(self.z_S0, self.z_R, self.z_S, v, self.c,
                                self.emission_times(n_rounds))


@dataclass(frozen=True)
class CodecSpec:
    width_bits: int = 32
    quantum: float = 1e-9


@dataclass(frozen=True)
class Policy:
    k_sigma: float = 3.0
    dilation_formula: str = "first_principles"
    t_S0_variant: str = "colocated"
    min_cell_count: int = 100

    @property
    def n_timestamps(self):
        """t_S^1, t_S^2, plus t_S0 when the source sits with S."""
        return 3 if self.t_S0_variant == "colocated" else 2


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    seed: int
    n_rounds: int
    kinematics: KinematicsSpec
    phase: str = "rest"
    strategy: StrategySpec = field(default_factory=StrategySpec)
    codec: CodecSpec = field(default_factory=CodecSpec)
    attack: AttackConfig = field(default_factory=AttackConfig)
    policy: Policy = field(default_factory=Policy)

    def __post_init__(self):
        validate(self)

    @property
    def n_carriers(self):
        return self.policy.n_timestamps * 2 * self.codec.width_bits

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)


def validate(sc):
    if not 0 <= sc.seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer", field="seed")
    if sc.n_rounds < 1:
        raise ConfigError("n_rounds must be positive", field="n_rounds")
    if sc.phase not in PHASES:
        raise ConfigError(f"phase must be one of {PHASES}", field="phase")
    k = sc.kinematics
    if k.units not in UNITS:
        raise ConfigError(f"units must be one of {UNITS}", field="kinematics.units")
    if not k.emission_period > 0:
        raise ConfigError("emission_period must be positive", field="kinematics.emission_period")
    kin = KinematicsConfig(k.z_S0, k.z_R, k.z_S, k.v, k.c, [k.emission_start])
    if sc.phase == "rest" and k.v != 0:
        raise ConfigError("a rest-phase scenario must have v = 0", field="v")
    p = sc.policy
    if p.dilation_formula not in DILATION_FORMULAS:
        raise ConfigError(f"dilation_formula must be one of {sorted(DILATION_FORMULAS)}",
                          field="policy.dilation_formula")
    if p.t_S0_variant not in T_S0_VARIANTS:
        raise ConfigError(f"t_S0_variant must be one of {T_S0_VARIANTS}", field="policy.t_S0_variant")
    if p.k_sigma < 0:
        raise ConfigError("k_sigma must be nonnegative", field="policy.k_sigma")
    if p.t_S0_variant == "between":
        inside = abs(k.z_S - k.z_S0) < abs(k.z_R - k.z_S0)
        if not (kin.s_between and inside):
            raise ConfigError("t_S0_variant 'between' needs S strictly between S0 and R", field="z_S")
    elif kin.s_between:
        raise ConfigError("t_S0_variant 'colocated' needs S on the far side of S0 from R", field="z_S")
    if sc.codec.width_bits < 1 or sc.codec.width_bits > 62:
        raise ConfigError("width_bits must be in [1, 62]", field="codec.width_bits")
    if not sc.codec.quantum > 0:
        raise ConfigError("quantum must be positive", field="codec.quantum")
    available = sc.n_rounds - (FIRST_CARRIER_INDEX - 1)
    if sc.n_carriers > available:
        raise EncodingCapacityError(
            f"{sc.policy.n_timestamps} timestamps x 2 x {sc.codec.width_bits} bits = "
            f"{sc.n_carriers} carrier rounds, only {max(available, 0)} available",
            field="codec.width_bits")
    if sc.strategy.kind not in ("canonical", "custom"):
        raise ConfigError("strategy.kind must be 'canonical' or 'custom'", field="strategy.kind")
    if sc.strategy.kind == "custom":
        try:
            sc.strategy.build()
        except (StructuralError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid custom strategy: {exc}", field="strategy") from None


# --- TOML mapping -----------------------------------------------------------

_TOP = {"scenario_id": str, "seed": int, "n_rounds": int, "phase": str}
_KIN = {"z_S0": float, "z_R": float, "z_S": float, "v": float, "c": float, "units": str,
        "emission_start": float, "emission_period": float}
_CODEC = {"width_bits": int, "quantum": float}
_POLICY = {"k_sigma": float, "dilation_formula": str, "t_S0_variant": str, "min_cell_count": int}
_ATTACK = {"kind": str, "basis": str, "wing": str, "delay_seconds": float,
           "has_quantum_memory": bool, "forged_times": list, "forge_mode": str,
           "leaked_positions": bool}
_SECTIONS = ("strategy", "kinematics", "codec", "attack", "policy")


def _typed(table, schema, prefix, required=()):
    out = {}
    for key, value in table.items():
        name = f"{prefix}{key}"
        if key not in schema:
            raise ConfigError(f"unknown key {name!r}", field=name)
        want = schema[key]
        if want is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if want is int and isinstance(value, bool) or not isinstance(value, want):
            raise ConfigError(f"{name} must be of type {want.__name__}", field=name)
        out[key] = value
    for key in required:
        if key not in out:
            raise ConfigError(f"missing required key {prefix}{key!r}", field=f"{prefix}{key}")
    return out


def _strategy_from(table):
    t = dict(table)
    kind = t.pop("kind", "canonical")
    if kind == "canonical":
        if t:
            raise ConfigError(f"unknown key 'strategy.{next(iter(t))}' for a canonical strategy",
                              field=f"strategy.{next(iter(t))}")
        return StrategySpec()
    state = (t.pop("state_real", None), t.pop("state_imag", None))
    obs = {k: (t.pop(f"{k}_real", None), t.pop(f"{k}_imag", None)) for k in OBSERVABLE_KEYS}
    if t:
        key = next(iter(t))
        raise ConfigError(f"unknown key 'strategy.{key}'", field=f"strategy.{key}")
    if state[0] is None or any(o[0] is None for o in obs.values()):
        raise ConfigError("custom strategy needs state_real and R0/R1/S0/S1 _real matrices",
                          field="strategy")
    return StrategySpec(kind, _freeze(state[0]), _freeze(state[1]),
                        {k: (_freeze(a), _freeze(b)) for k, (a, b) in obs.items()})


def scenario_from_dict(doc):
    doc = dict(doc)
    sections = {s: doc.pop(s, {}) for s in _SECTIONS}
    top = _typed(doc, _TOP, "", required=("scenario_id", "seed", "n_rounds"))
    for name, sec in sections.items():
        if not isinstance(sec, dict):
            raise ConfigError(f"[{name}] must be a table", field=name)
    kin = _typed(sections["kinematics"], _KIN, "kinematics.", required=("z_S0", "z_R", "z_S"))
    if kin.get("units") == "natural" and "c" not in kin:
        kin["c"] = 1.0
    attack = _typed(sections["attack"], _ATTACK, "attack.")
    if "forged_times" in attack:
        attack["forged_times"] = tuple(float(t) for t in attack["forged_times"])
    return Scenario(
        kinematics=KinematicsSpec(**kin),
        strategy=_strategy_from(sections["strategy"]),
        codec=CodecSpec(**_typed(sections["codec"], _CODEC, "codec.")),
        attack=AttackConfig(**attack),
        policy=Policy(**_typed(sections["policy"], _POLICY, "policy.")),
        **top,
    )


def scenario_to_dict(sc):
    strategy = {"kind": sc.strategy.kind}
    if sc.strategy.kind == "custom":
        strategy["state_real"] = _unfreeze(sc.strategy.state_real)
        if sc.strategy.state_imag is not None:
            strategy["state_imag"] = _unfreeze(sc.strategy.state_imag)
        for k in OBSERVABLE_KEYS:
            re, im = sc.strategy.observables[k]
            strategy[f"{k}_real"] = _unfreeze(re)
            if im is not None:
                strategy[f"{k}_imag"] = _unfreeze(im)
    attack = {k: v for k, v in dataclasses.asdict(sc.attack).items() if v is not None}
    if "forged_times" in attack:
        attack["forged_times"] = list(attack["forged_times"])
    return {
        "scenario_id": sc.scenario_id,
        "seed": sc.seed,
        "n_rounds": sc.n_rounds,
        "phase": sc.phase,
        "strategy": strategy,
        "kinematics": dataclasses.asdict(sc.kinematics),
        "codec": dataclasses.asdict(sc.codec),
        "attack": attack,
        "policy": dataclasses.asdict(sc.policy),
    }


def parse_scenario_text(text):
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        # tomli reports "(at line N, column M)".
        raise ConfigError(f"scenario parse error: {exc}") from None
    return scenario_from_dict(doc)


def parse_scenario(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"scenario file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from None
    try:
        return parse_scenario_text(text)
    except ConfigError as exc:
        raise type(exc)(f"{path}: {exc}", field=exc.field) from None


def emit_scenario(sc):
    return tomli_w.dumps(scenario_to_dict(sc))


def bundled_path(name):
    return resources.files("diqgps") / "scenarios" / f"{name}.toml"


def load_bundled(name):
    if name not in BUNDLED:
        raise ConfigError(f"no bundled scenario named {name!r}; choose from {BUNDLED}")
    return parse_scenario_text(bundled_path(name).read_text(encoding="utf-8"))
