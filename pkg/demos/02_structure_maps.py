"""
Structure maps: two derivations, one drift, and a product-rule defect
=====================================================================

The noise-coefficient maps of a stochastic evolution come as a triple:
raising and lowering derivations plus a drift. The derivations satisfy
the exact product rule; the drift picks up a defect that must be a fixed
two-constant combination of derivation products. Those constants are
calibrated numerically, so a wrong declared table is caught immediately.
"""

import warnings

import numpy as np

from qmflow import ItoTable, build_evans_hudson, leibnitz_residual

rng = np.random.default_rng(7)

# 1. a qubit model driven by the lowering operator, decay weight 1
f = np.array([[0.0, 1.0], [0.0, 0.0]])
sm = build_evans_hudson(np.zeros((2, 2)), f, w_minus=1.0, w_plus=0.0)
print("dim:", sm.dim)
print("calibrated constants: c_mp = %s, c_pm = %s" % (sm.ito.c_mp, sm.ito.c_pm))

# 2. the product rule holds exactly for the derivations and up to the
#    calibrated correction for the drift
x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
res = leibnitz_residual(sm, x, y)
for alpha in (-1, 0, 1):
    print(f"product-rule residual at alpha={alpha:+d}: {res[alpha]:.2e}")

# 3. declaring the wrong constants triggers a calibration warning and the
#    calibrated values are stored instead
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    sm2 = build_evans_hudson(np.zeros((2, 2)), f, 1.0, 0.0,
                             ito=ItoTable(c_mp=1.0, c_pm=0.0))
print("\ndeclared (1, 0):", str(caught[0].message)[:60], "...")
print("stored constants:", sm2.ito.c_mp, sm2.ito.c_pm)

# 4. scaling the noise weights scales the constants: c_mp = 2 w_minus
for w in (0.5, 1.0, 1.7):
    smw = build_evans_hudson(np.zeros((2, 2)), f, w, 0.0)
    print(f"w_minus = {w}: c_mp = {smw.ito.c_mp.real}")
