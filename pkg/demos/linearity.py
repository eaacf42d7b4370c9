"""
Compression and intermodulation
===============================

Fit the odd cubic model to the quasi-static first harmonic of the 6-1
coherence and turn H1, H3 into P1dB, IIP3 and an IMD3 curve. The two-tone
slopes are read straight from the nonlinear steady state.
"""

import numpy as np

from rydswm import load_config
from rydswm.metrics import extract_h1_h3, linearity_report, tone_slopes
from rydswm.units import TWO_PI

cfg = load_config()

for scheme in ("swm6", "eit4"):
    system = cfg.system(scheme)
    fit = extract_h1_h3(system)
    rep = linearity_report(system, fit=fit)
    print(scheme)
    print("  fit range up to %.3f MHz, cubic term %.1f%% of H1, residual %.1e"
          % (fit.amplitudes.max() / TWO_PI / 1e6, 100 * fit.cubic_fraction, fit.residual))
    print("  P1dB/2pi = %.3f MHz   IIP3/2pi = %.3f MHz"
          % (rep.p1db_over_2pi_mhz, rep.iip3_over_2pi_mhz))
    for a, d in zip(rep.imd3_amplitudes[::4], rep.imd3_dbc[::4]):
        print("  IMD3 at %.3f MHz: %6.1f dBc" % (a / TWO_PI / 1e6, d))

    top = fit.amplitudes.max()
    ts = tone_slopes(system, np.geomspace(top / 30, top / 3, 6))
    print("  log-log slopes: fundamental %.3f, IMD3 %.3f" % (ts.slope_fundamental, ts.slope_imd3))
