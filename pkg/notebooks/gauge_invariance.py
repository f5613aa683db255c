"""
Gauge freedom
=============

Local unitaries and auxiliary systems change the state and measurements
but not a single entry of the correlation table.
"""

import numpy as np

import diqgps

strategy = diqgps.canonical_strategy()
ref = diqgps.exact_correlation_table(strategy).probs

gen = np.random.default_rng(0)
for dims in [(1, 1), (2, 1), (1, 3), (2, 2)]:
    g = diqgps.random_gauge(gen, ancilla_dims=dims)
    moved = diqgps.apply_gauge(strategy, g)
    dev = np.abs(diqgps.exact_correlation_table(moved).probs - ref).max()
    print(f"ancilla dims {dims}: state is {moved.state.dims}, max table change {dev:.1e}")
