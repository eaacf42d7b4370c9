"""
RF-to-coherence response and 3-dB bandwidth
===========================================

Load the bundled parameter set, look at the poles of the dressed 5-6 pair,
and compare the weak-probe product formula with the full master equation
for both the six-level receiver and the four-level baseline.
"""

import numpy as np

from rydswm import load_config
from rydswm.eit import eit_model
from rydswm.metrics import bandwidth_closed_form, bandwidth_numeric, pole_analysis
from rydswm.response import LinearizedModel, transfer_function
from rydswm.units import TWO_PI

cfg = load_config()
swm = cfg.system("swm6")
eit = cfg.system("eit4")

# the auxiliary field couples the two fast coherences; with these rates the
# pole pair is complex, so the product-form bandwidth is only indicative
poles = pole_analysis(swm.gamma(5), swm.gamma(6), swm.rabi("A"))
print("regime:", poles.regime)
print("gamma+/2pi = %.4f MHz, Im(lambda)/2pi = %.4f MHz"
      % (poles.gamma_plus / TWO_PI / 1e6, abs(poles.lam_plus.imag) / TWO_PI / 1e6))
cf = bandwidth_closed_form(poles)
print("product-form f3dB: %.3f MHz (valid: %s)" % (cf.f3db / 1e6, cf.valid))

# numeric bandwidths: the product formula response and the full
# Liouvillian linearized around the RF-free steady state
for name, h in [("closed form", transfer_function(swm, "closed-form")),
                ("master equation", LinearizedModel(swm)),
                ("EIT baseline", eit_model(eit))]:
    bw = bandwidth_numeric(h)
    print("%-16s f3dB = %.4f MHz  |H(0)| = %.3e  resonant=%s"
          % (name, bw.f3db / 1e6, abs(h(0.0)), bw.resonant))

# Normalized response on a few frequencies
f = np.array([0.0, 0.5, 1.0, 2.0, 5.0, 10.0])
h = LinearizedModel(swm)(TWO_PI * 1e6 * f)
for fi, hi in zip(f, np.abs(h) / abs(h[0])):
    print("f = %5.1f MHz   |H|/|H(0)| = %.4f" % (fi, hi))
