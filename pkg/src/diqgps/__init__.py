"""Device-independent quantum GPS: CHSH-certified clock synchronisation,
attack simulation and relativistic timing checks."""

from .correlations import (CLASSICAL_BOUND, TSIRELSON_BOUND, BellClass, BellEstimate,
                           CorrelationTable, bell_estimate, chsh_value, classify, correlators,
                           deterministic_chsh_values, estimate_table, expectation,
                           local_bound_bruteforce)
from .codec import TimestampCodec, decode_timestamps, encode_timestamps
from .kinematics import (KinematicsConfig, coordinate_interval_at_S, dilated_interval_oracle,
                         dilated_interval_paper, distance_from_timestamps, kinematics_compare,
                         simulate_timeline, travel_time_moving)
from .quantum import (BinaryObservable, GaugeTransform, TwoQubitState, TwoQubitStrategy,
                      apply_gauge, born_probability, canonical_strategy, exact_correlation_table,
                      random_gauge, sample_round)
from .adversary import AttackConfig, delay_attack, forge_reveal, intercept_resend
from .protocol import (RoundRecord, SessionTranscript, VerdictReport, classical_baseline_session,
                       evaluate_verdict, run_session)
from .scenario import Scenario, emit_scenario, load_bundled, parse_scenario

__version__ = "0.1.0"
