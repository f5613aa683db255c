"""
Local and quantum CHSH bounds
=============================

Enumerate every deterministic local strategy, then evaluate the canonical
two-qubit strategy exactly and from sampled rounds.
"""

import numpy as np

import diqgps

# every deterministic (a0, a1, b0, b1) assignment gives CHSH = +-2
vals = diqgps.deterministic_chsh_values()
print("deterministic CHSH values:", sorted({float(v) for v in vals}))
print("local bound:", diqgps.local_bound_bruteforce())

# the maximally entangled state with the canonical measurements
strategy = diqgps.canonical_strategy()
table = diqgps.exact_correlation_table(strategy)
print("exact CHSH:", diqgps.chsh_value(table), "vs 2*sqrt(2) =", 2 * np.sqrt(2))
print("correlators E_xy:\n", np.round(diqgps.correlators(table), 6))

# finite statistics: estimates fluctuate around the exact value
sc = diqgps.load_bundled("honest_rest")
for n in (1000, 10000, 100000):
    tr = diqgps.run_session(sc.replace(n_rounds=max(n, sc.n_carriers + 2 + 400)))
    est = diqgps.bell_estimate(tr, exclude=tr.revealed_carriers.carrier_indices)
    print(f"N={n:>6}: B = {est.value:.4f} +/- {est.stderr:.4f} -> {diqgps.classify(est).value}")
