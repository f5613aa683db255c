"""
Attacks on the channel and on the reveal
========================================

Intercept-resend and delays without quantum memory break the Bell value.
A delay with quantum memory does not: it shifts the distance unnoticed, as
it would in classical GPS.
"""

import diqgps
from diqgps.cli import attack_demo

for name in ("intercept_resend", "delay_no_memory", "delay_memory", "forge_reveal"):
    sc = diqgps.load_bundled(name)
    rep = diqgps.evaluate_verdict(diqgps.run_session(sc), sc.policy)
    bell = "n/a" if rep.bell is None else "%.3f" % rep.bell.value
    print(f"{name:<17} {rep.status:<8} B = {bell}  {'; '.join(rep.reasons)[:70]}")

demo = attack_demo(diqgps.load_bundled("delay_memory"), 1e-6)
for k, row in demo["results"].items():
    print(k, "error (m):", row["separation_error"])
