"""
A controlled-Z gate from cavity reflection
==========================================

A photon resonant with an empty cavity is reflected with a pi phase. When the
atom sits in the coupled level the vacuum Rabi splitting moves the cavity
out of resonance and the photon comes back unchanged. The second photon bin,
detuned by 1.77 GHz, is reflected without a phase in both cases.
"""

import numpy as np

from fbin_sim import cavity as cv
from fbin_sim import states

from _plotting import plt, save

mhz = 2 * np.pi * 1e6
bins = states.two_bins(states.FIG2_DETUNING)
w1 = bins[0].omega

p = cv.resonant_params(w1, g=20 * mhz, kappa=2 * mhz, gamma=1 * mhz)
for b in bins:
    ru = cv.reflection_coefficient(b.omega, False, p)
    rc = cv.reflection_coefficient(b.omega, True, p)
    print(f"{b.label}: uncoupled r = {ru:.4f}, coupled r = {rc:.4f}")

# %%
# Gate error against the ideal controlled-Z as the coupling grows.
g_values = np.linspace(0, 50 * mhz, 11)
for q in cv.g_scan(w1, g_values):
    print(f"g/2pi = {q.g / mhz:5.1f} MHz  gate error {cv.gate_error(q, bins):.3e}")
print("lossless strong coupling:", f"{cv.gate_error(cv.ideal_limit_params(w1), bins):.2e}")

if plt is not None:
    span = 60 * mhz
    w = np.linspace(w1 - span, w1 + span, 1001)
    fig, (a1, a2) = plt.subplots(2, 1, figsize=(6, 4), sharex=True)
    for coupled, style in ((False, "-"), (True, "--")):
        r = cv.reflection_coefficient(w, coupled, p)
        a1.plot((w - w1) / mhz, np.abs(r), style, label="g2" if coupled else "g1")
        a2.plot((w - w1) / mhz, np.angle(r), style)
    a1.set_ylabel("|r|")
    a1.legend(title="atom level")
    a2.set_ylabel("arg r")
    a2.set_xlabel(r"$(\omega - \omega_1)/2\pi$ (MHz)")
    save(fig, "cavity_reflection.png")
