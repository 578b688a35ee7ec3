"""Cavity-reflection model of the atom-photon controlled-Z gate.

A single-sided cavity with linewidth ``kappa`` holds an atom whose
``g2 <-> e`` transition couples to the cavity mode with strength ``g``
(Jaynes-Cummings, ``H = hbar g (|e><g2| a + h.c.)``). A narrow-band photon of
frequency ``omega_in`` is reflected with the steady-state amplitude obtained
from the input-output relation ``a_out = a_in + sqrt(kappa) a_c``::

    r = 1 - kappa / (i d_c + kappa/2 + g^2 / (i d_a + gamma/2))

with ``d_c = omega_cavity - omega_in`` and ``d_a = omega_atom - omega_in``.
An atom in ``g1`` does not couple, which drops the ``g^2`` term.

Sign convention: the resonant empty cavity gives ``r = -1`` and the blocked or
far-detuned cavity ``r -> +1``, so the physical gate puts its pi phase on
``(w1, g1)``. This equals :func:`fbin_sim.protocol.ideal_cz` with
``target_level="g1"``, and differs from the ``(w1, g2)`` form by a pi phase on
the resonant photon bin alone.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError, SingularityError
from .hilbert import FrequencyBin

LEVELS = ("g1", "g2")


@dataclass(frozen=True)
class CavityParams:
    """Parameters of the cavity gate, all angular frequencies in rad/s.

    ``g`` is half the single-photon Rabi frequency, ``gamma`` the atomic dipole
    decay rate (0 reproduces the lossless Hamiltonian).
    """

    g: float
    kappa: float
    gamma: float
    omega_cavity: float
    omega_atom: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ParameterError(f"kappa must be > 0, got {self.kappa}")
        if self.g < 0 or self.gamma < 0:
            raise ParameterError("g and gamma must be >= 0")
        for name in ("g", "kappa", "gamma", "omega_cavity", "omega_atom"):
            if not np.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")

    def replace(self, **changes) -> "CavityParams":
        return replace(self, **changes)


def reflection_coefficient(omega_in, atom_coupled: bool, p: CavityParams):
    """Steady-state reflection amplitude of the cavity.

    Evaluated in the pole-free form
    ``r = 1 - kappa (i d_a + gamma/2) / ((i d_c + kappa/2)(i d_a + gamma/2) + g^2)``,
    which is finite at ``gamma = d_a = 0`` for ``g > 0`` (it gives ``r = 1``,
evaluated exactly so that a vanishing ``g^2`` cannot underflow the result).
    ``g = 0`` is the bare cavity whatever the atomic level.

    Parameters
    ----------
    omega_in : float or ndarray
        Incident angular frequency.
    atom_coupled : bool
        Whether the atom sits in the coupled level ``g2``.
    p : CavityParams

    Raises
    ------
    SingularityError
        If the combined denominator vanishes. With ``kappa > 0`` this can only
        happen through floating-point underflow of ``g^2``.
    """
    omega_in = np.asarray(omega_in, dtype=float)
    cav = 1j * (p.omega_cavity - omega_in) + p.kappa / 2
    if not atom_coupled or p.g == 0:
        r = 1 - p.kappa / cav
        return complex(r) if np.ndim(r) == 0 else r
    dip = 1j * (p.omega_atom - omega_in) + p.gamma / 2
    blocked = dip == 0
    den = np.where(blocked, 1.0, cav * dip + p.g**2)
    if np.any(den == 0):
        raise SingularityError("reflection denominator vanishes")
    r = np.where(blocked, 1.0 + 0j, 1 - p.kappa * dip / den)
    return complex(r) if np.ndim(r) == 0 else r


def effective_gate(photon_bins, p: CavityParams) -> np.ndarray:
    """Diagonal reflection operator over ``(bin, level)`` with levels ``(g1, g2)``.

    Ordering is bin-major, matching a ``(photon, atom)`` register pair. Entries
    have modulus one when ``gamma = 0`` and are sub-unitary otherwise.
    """
    omegas = np.array([b.omega if isinstance(b, FrequencyBin) else float(b) for b in photon_bins])
    diag = np.empty(2 * omegas.size, dtype=complex)
    diag[0::2] = reflection_coefficient(omegas, False, p)
    diag[1::2] = reflection_coefficient(omegas, True, p)
    return np.diag(diag)


def reference_gate(n_bins: int, resonant_index: int = 0) -> np.ndarray:
    """Ideal controlled-Z in the cavity sign convention: -1 on ``(resonant, g1)``."""
    diag = np.ones(2 * n_bins, dtype=complex)
    diag[2 * resonant_index] = -1.0
    return np.diag(diag)


def gate_error(p: CavityParams, bins, resonant_index: int = 0) -> float:
    """Infidelity of the cavity gate against the ideal controlled-Z.

    The uniform superposition over all ``(bin, level)`` states is sent through
    the reflection operator, the photon-survival branch is renormalized, and
    the overlap with the ideal output is taken. For diagonal gates this equals
    the entanglement fidelity ``|Tr(U^dag D)|^2 / (d Tr(D^dag D))``.
    """
    d = np.diag(effective_gate(bins, p))
    u = np.diag(reference_gate(len(bins), resonant_index))
    fid = abs(np.vdot(u, d)) ** 2 / (d.size * np.vdot(d, d).real)
    return float(min(max(1.0 - fid, 0.0), 1.0))


def resonant_params(omega_resonant: float, g: float, kappa: float, gamma: float = 0.0) -> CavityParams:
    """Cavity and atom both tuned to the resonant photon bin."""
    return CavityParams(g=g, kappa=kappa, gamma=gamma, omega_cavity=omega_resonant,
                        omega_atom=omega_resonant)


def ideal_limit_params(omega_resonant: float) -> CavityParams:
    """Lossless strong-coupling set used to validate the ideal gate.

    With ``kappa = 2pi x 1 MHz`` and ``g = 2pi x 20 MHz`` the off-resonant bin
    at a GHz-scale detuning picks up a phase of order ``kappa / detuning``.
    """
    return resonant_params(omega_resonant, g=2 * np.pi * 20e6, kappa=2 * np.pi * 1e6, gamma=0.0)


def g_scan(omega_resonant: float, g_values, kappa: float = 2 * np.pi * 2e6,
           gamma: float = 2 * np.pi * 1e6):
    """Parameter sets along a coupling scan at fixed ``kappa`` and ``gamma``."""
    return [resonant_params(omega_resonant, float(g), kappa, gamma) for g in g_values]
