"""
Imperfections: loss, leakage and dephasing
==========================================

Loss of a photon and leakage of the atom out of the qubit levels are
heralded, so they cost rate but not fidelity. Dephasing of the atom is not
heralded and washes out the fringe and the witness signal.
"""

import numpy as np

from fbin_sim import hilbert as hb
from fbin_sim import noise as nz
from fbin_sim import protocol as pr
from fbin_sim import states
from fbin_sim import witness as wt

dw = states.FIG2_DETUNING
t_r = 0.1 * 2 * np.pi / dw
ideal = pr.run_single_atom_protocol(states.photon_pair(dw), t_r)

for spec in (nz.NoiseSpec(photon_loss_prob=0.3),
             nz.NoiseSpec(leakage_prob=0.2),
             nz.NoiseSpec(dephasing_prob=0.05),
             nz.NoiseSpec(photon_loss_prob=0.3, dephasing_prob=0.05, leakage_prob=0.2)):
    success, rho = nz.run_noisy_single_atom_protocol(states.photon_pair(dw), t_r, spec)
    print(f"{spec.to_dict()}: success {success:.3f}, fidelity {hb.fidelity(rho, ideal):.4f}")

# %%
# Fringe contrast of the two-atom protocol against dephasing per pulse.
initial = states.two_atom_initial(dw)
for p in (0.0, 0.05, 0.1, 0.25, 0.5):
    _, rho = nz.run_noisy_two_atom_protocol(initial, 0.0, 0.0, nz.NoiseSpec(dephasing_prob=p))
    hi = pr.fringe_probability(rho, 0.0)
    lo = pr.fringe_probability(rho, np.pi)
    print(f"dephasing {p:.2f}: visibility {(hi - lo) / (hi + lo):.4f}")

# %%
# Completely dephasing the transcribed state leaves a classical mixture, and
# the conditional analyser probability becomes independent of the click time.
grid = wt.MeasurementGrid.for_detuning(dw)
for p in (0.0, 0.25, 0.5):
    rho = nz.apply_dephasing(states.eq1_state(dw), "atom:R", p)
    report = wt.fourier_witness(rho, grid)
    print(f"dephasing {p:.2f}: F_c variation {report.fc_tL_variation:.3f}, "
          f"max |F[K_LR]| {report.max_abs_fourier_klr:.3f} -> {report.verdict.value}")
