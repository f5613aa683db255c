"""
An honest positioning session
=============================

Simulate the test phase, reveal the carriers and let R evaluate: Bell value,
decoded timestamps, clock offset and the R-S separation.
"""

import diqgps

sc = diqgps.load_bundled("honest_rest")
transcript = diqgps.run_session(sc)
report = diqgps.evaluate_verdict(transcript, sc.policy)

print("status:", report.status)
print("CHSH: %.4f +/- %.4f" % (report.bell.value, report.bell.stderr))
print("decoded t_S:", report.decoded_t_S, "t_S0:", report.decoded_t_S0)
print("clock offset (s):", report.clock_offset)
print("separation (m):", report.separation, "configured:", sc.kinematics.z_R - sc.kinematics.z_S)

# the same session with S receding at c/2: R predicts S's proper interval
moving = diqgps.load_bundled("honest_moving")
rep = diqgps.evaluate_verdict(diqgps.run_session(moving), moving.policy, v=moving.kinematics.v)
print("moving: expected %.9f s, observed %.9f s" % (rep.dilation_expected, rep.dilation_observed))
