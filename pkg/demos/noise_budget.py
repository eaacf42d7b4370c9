"""
From coherence to volts, and the noise-equivalent field
=======================================================

Build the detection chain from the cloud and beam geometry, push a weak RF
field through to the receiver output, then list the NEF contributions at
DC and across the baseband.
"""

import numpy as np

from rydswm import load_config
from rydswm.metrics import bandwidth_numeric, nef_budget, nef_spectrum, resolve_noise_params
from rydswm.response import LinearizedModel
from rydswm.transduction import baseband_output, effective_length, field_amplitude, g_opt
from rydswm.units import TWO_PI

cfg = load_config()
system = cfg.system()
cloud = cfg.cloud()
chain = cfg.chain()

print("L_eff = %.3f mm (Gaussian cloud, focused beams)" % (effective_length(cloud) * 1e3))
print("A_eff = %.3e m^2, kappa = %.3e W m^2/V^2" % (chain.a_eff, chain.kappa))
print("E_P = %.2f V/m, E_RF = %.3e V/m" % (abs(field_amplitude(system, "P")), abs(field_amplitude(system, "RF"))))

e_rf = 1e-3  # V/m
print("|G_opt(0)| = %.3e" % abs(g_opt(system, chain, 0.0)))
print("|y(0)| for 1 mV/m = %.3e V" % abs(baseband_output(system, chain, 0.0, e_rf)))

bw = bandwidth_numeric(LinearizedModel(system)).f3db
params = resolve_noise_params(cfg.noise(), system, chain, cloud, bw)
b = nef_budget(params, system, chain)
for name, value in b.as_dict().items():
    print("NEF_%-5s = %.3e V/m/rtHz" % (name, value))

# readout-referred terms follow 1/|G_opt(w)|, so the total degrades
# once the atomic response rolls off
f = np.geomspace(0.01, 30, 7)
for fi, bi in zip(f, nef_spectrum(params, system, chain, TWO_PI * 1e6 * f)):
    print("f = %7.3f MHz  NEF_tot = %.3e" % (fi, bi.total))
