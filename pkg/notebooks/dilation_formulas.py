"""
Two dilation formulas
=====================

The R-side interval between two emissions maps to S's clock either through
the printed expression (divide by the Lorentz factor) or from S's worldline
(multiply by it).  They differ by 1/(1 - v^2/c^2).
"""

import diqgps

rows = diqgps.kinematics_compare([0.0, 0.1, 0.5, 0.8, 0.9], 1.0)
print("v/c   coordinate  printed    proper     ratio")
for r in rows:
    print("%.1f   %-10.6f  %-9.6f  %-9.6f  %.6f" % (r["v_over_c"], r["coordinate_interval"],
                                               r["eq8_as_printed"], r["first_principles"], r["ratio"]))

# the proper interval equals the relativistic Doppler factor times delta
beta = 0.5
print("Doppler:", ((1 + beta) / (1 - beta)) ** 0.5)
