"""Gate sequences for frequency-bin atom-photon entanglement.

The building blocks are a local pi/2 rotation on the ``g1 <-> g2`` transition,
an atom-photon controlled-Z, and time-resolved photon detection (heralding).
Two complete sequences are provided: transcribing photon-photon frequency-bin
entanglement onto one atom, and entangling two remote atoms through a shared
frequency-bin entangled photon pair.

Conventions
-----------
* A photon detected at time ``t`` is projected with ``<t|w_m> = f(t) exp(-i w_m t)``.
  The envelope ``f`` is common to all bins of a register and is factored out;
  with a window ``T`` it is taken uniform, ``|f|^2 = 1/T``.
* Atomic kets live in the rotating frame of the local drive; nothing evolves
  between pulses.
* Protocol outputs are only defined up to a global phase. Compare them with
  :func:`fbin_sim.hilbert.fidelity`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import hilbert as hb
from .errors import HeraldFailure, ParameterError, RegisterError
from .hilbert import AtomRegister, HybridState, PhotonRegister, State

SQRT1_2 = 1.0 / np.sqrt(2.0)


def rotation_matrix(phi: float = 0.0) -> np.ndarray:
    """2x2 pi/2 rotation about the axis at phase ``phi`` in the (g1, g2) basis."""
    return SQRT1_2 * np.array(
        [[1.0, -1j * np.exp(-1j * phi)], [-1j * np.exp(1j * phi), 1.0]], dtype=complex
    )


@dataclass(frozen=True)
class PulseConvention:
    """Local pi/2 pulse.

    At ``axis_phase = 0`` the pulse maps ``|g1> -> (|g1> - i|g2>)/sqrt(2)``.
    """

    axis_phase: float = 0.0
    convention: str = "R(phi) = [[1, -i e^{-i phi}], [-i e^{i phi}, 1]] / sqrt(2)"

    def matrix(self) -> np.ndarray:
        return rotation_matrix(self.axis_phase)


@dataclass(frozen=True)
class HeraldRecord:
    """A detector click.

    ``success_probability_density`` is in 1/s when the window ``T`` is known,
    otherwise it is the bare projection weight for a unit-modulus envelope.
    """

    side: str
    t: float
    success_probability_density: float
    window: float | None = None

    def __post_init__(self):
        if self.window is not None and not (0.0 <= self.t <= self.window):
            raise ParameterError(f"click time {self.t} outside window [0, {self.window}]")


def _atom(obj: State, ref) -> AtomRegister:
    reg = obj.register(ref)
    if not isinstance(reg, AtomRegister):
        raise RegisterError(f"{reg.key} is not an atom register")
    return reg


def _photon(obj: State, ref) -> PhotonRegister:
    reg = obj.register(ref)
    if not isinstance(reg, PhotonRegister):
        raise RegisterError(f"{reg.key} is not a photon register")
    return reg


def level_operator(atom: AtomRegister, block: np.ndarray, levels=("g1", "g2")) -> np.ndarray:
    """Embed a 2x2 ``block`` acting on ``levels`` into the full atom space."""
    i, j = atom.index(levels[0]), atom.index(levels[1])
    op = np.eye(atom.dim, dtype=complex)
    op[np.ix_([i, j], [i, j])] = block
    return op


def pi_half_pulse(state: State, atom_register, phi: float = 0.0) -> State:
    """Apply the local pi/2 pulse to the ``g1 <-> g2`` transition of one atom."""
    atom = _atom(state, atom_register)
    return hb.apply_operator(state, atom, level_operator(atom, rotation_matrix(phi)))


def cz_operator(photon: PhotonRegister, atom: AtomRegister, resonant_bin: str,
                target_level: str) -> np.ndarray:
    diag = np.ones(photon.dim * atom.dim, dtype=complex)
    diag[photon.index(resonant_bin) * atom.dim + atom.index(target_level)] = -1.0
    return np.diag(diag)


def ideal_cz(state: State, photon_register, atom_register, resonant_bin: str = "w1",
             target_level: str = "g2") -> State:
    """Controlled-Z: a pi phase on every basis element holding ``(resonant_bin, target_level)``."""
    photon = _photon(state, photon_register)
    atom = _atom(state, atom_register)
    return hb.apply_operator(state, [photon, atom],
                             cz_operator(photon, atom, resonant_bin, target_level))


def time_bra(photon: PhotonRegister, t: float) -> np.ndarray:
    """Bra coefficients of ``<t|`` over the bins, envelope factored out."""
    return np.exp(-1j * photon.omegas * t)


def herald_time(state: State, photon_register, t: float, window: float | None = None):
    """Detect the photon of ``photon_register`` at time ``t``.

    Returns ``(HeraldRecord, post_state)``; the photon register is removed from
    the post-state, which is renormalized.

    Raises
    ------
    HeraldFailure
        If the click has vanishing probability density.
    """
    photon = _photon(state, photon_register)
    if window is not None and not (0.0 <= t <= window):
        raise ParameterError(f"click time {t} outside window [0, {window}]")
    weight, remaining, data = hb.contract(state, photon, time_bra(photon, t))
    post = hb.renormalize(state, remaining, weight, data)
    density = weight / window if window is not None else weight
    return HeraldRecord(photon.side, float(t), float(density), window), post


Hook = Callable[[State, str], State]


def _noop(obj: State, step: str) -> State:
    return obj


def single_atom_sequence(photon_pair: State, t_R: float, *, atom: AtomRegister | None = None,
                         resonant_bin: str = "w1", cz_level: str = "g1", phi: float = 0.0,
                         window: float | None = None, hook: Hook = _noop):
    """Run the transcription sequence and return ``(herald, state)``.

    ``hook(obj, step)`` is called after the steps ``"pulse1"``, ``"cz"``,
    ``"herald"`` and ``"pulse2"`` and may replace the state (noise insertion).
    Works on pure states and density operators alike.
    """
    atom = atom if atom is not None else AtomRegister("R", ("g1", "g2"))
    atom_init = hb.basis_state([atom], "g1")
    if isinstance(photon_pair, hb.DensityOperator):
        atom_init = hb.to_density(atom_init)
    photon_r = _photon(photon_pair, "photon:" + atom.side)
    obj = hb.tensor(photon_pair, atom_init)
    obj = hook(pi_half_pulse(obj, atom, phi), "pulse1")
    obj = hook(ideal_cz(obj, photon_r, atom, resonant_bin, cz_level), "cz")
    record, obj = herald_time(obj, photon_r, t_R, window)
    obj = hook(obj, "herald")
    obj = hook(pi_half_pulse(obj, atom, phi), "pulse2")
    return record, obj


def run_single_atom_protocol(photon_pair: State, t_R: float, **kwargs) -> State:
    """Transcribe frequency-bin entanglement from a photon pair onto one atom.

    The right-hand photon meets an atom prepared in ``|g1>``. Sequence:
    pi/2 pulse, controlled-Z with the resonant bin, detection of the right
    photon at ``t_R``, second pi/2 pulse in phase with the first. The result
    lives on ``(photon:L, atom:R)``.

    ``cz_level`` picks the atomic level whose combination with the resonant bin
    acquires the pi phase. The default ``"g1"`` is the sign delivered by the
    cavity reflection gate (resonant empty cavity, ``r = -1``), which yields
    ``(-i e^{-i w2 t_R}|w4 g2> - e^{-i w1 t_R}|w3 g1>)/sqrt(2)``. With
    ``"g2"`` the relative sign of the two terms flips.
    """
    return single_atom_sequence(photon_pair, t_R, **kwargs)[1]


def two_atom_sequence(initial: State, t_L: float, t_R: float, *, resonant_bin: str = "w1",
                      cz_level: str = "g1", phi: float = 0.0, window: float | None = None,
                      hook: Hook = _noop):
    """Two-atom networking sequence returning ``(heralds, state)``.

    ``initial`` spans ``atom:L, atom:R, photon:L, photon:R`` in any order.
    Hook steps are ``"pulse1"``, ``"cz"``, ``"herald"``, ``"pulse2"``.
    """
    atoms = [_atom(initial, "atom:L"), _atom(initial, "atom:R")]
    photons = [_photon(initial, "photon:L"), _photon(initial, "photon:R")]
    if not np.array_equal(photons[0].omegas, photons[1].omegas) or \
            photons[0].labels != photons[1].labels:
        raise RegisterError("both photon registers must carry the same bins (w4 = w1, w3 = w2)")
    obj = initial
    for a in atoms:
        obj = pi_half_pulse(obj, a, phi)
    obj = hook(obj, "pulse1")
    for p, a in zip(photons, atoms):
        obj = ideal_cz(obj, p, a, resonant_bin, cz_level)
    obj = hook(obj, "cz")
    heralds = []
    for p, t in zip(photons, (t_L, t_R)):
        record, obj = herald_time(obj, p, t, window)
        heralds.append(record)
    obj = hook(obj, "herald")
    for a in atoms:
        obj = pi_half_pulse(obj, a, phi)
    obj = hook(obj, "pulse2")
    return heralds, hb.reorder(obj, ["atom:L", "atom:R"])


def run_two_atom_protocol(initial: State, t_L: float, t_R: float, **kwargs) -> State:
    """Entangle two remote atoms with a frequency-bin entangled photon pair.

    Both atoms start in ``|g1>`` and each meets one photon of
    ``(|w1>_L|w2>_R + |w2>_L|w1>_R)/sqrt(2)``. Steps: pi/2 on both atoms,
    controlled-Z on both sides, detection at ``t_L`` and ``t_R``, second pi/2
    on both. Up to a global phase the output on ``(atom:L, atom:R)`` is
    ``(e^{-i w1 t_L - i w2 t_R}|g1 g2> + e^{-i w2 t_L - i w1 t_R}|g2 g1>)/sqrt(2)``
    for either choice of ``cz_level``.
    """
    return two_atom_sequence(initial, t_L, t_R, **kwargs)[1]


def fringe_bra(theta_R: float) -> np.ndarray:
    """Coefficients of ``(<g1| + i<g2|)_L (<g1| + i e^{i theta_R}<g2|)_R / 2``."""
    left = np.array([1.0, 1j])
    right = np.array([1.0, 1j * np.exp(1j * theta_R)])
    return 0.5 * np.kron(left, right)


def fringe_probability(state: State, theta_R: float) -> float:
    """Probability of the separable two-atom outcome used in the Bell-type fringe.

    Unnormalized: for the ideal two-atom output it equals
    ``(1 + cos(dw (t_R - t_L) + theta_R)) / 4`` with ``dw = w1 - w2``;
    callers normalize by the maximum over the scan.
    """
    a_l, a_r = _atom(state, "atom:L"), _atom(state, "atom:R")
    for a in (a_l, a_r):
        if a.levels[:2] != ("g1", "g2") or a.dim != 2:
            raise RegisterError("fringe projection expects two-level atoms ordered (g1, g2)")
    return hb.probability(state, ["atom:L", "atom:R"], fringe_bra(theta_R))


__all__ = [
    "HeraldFailure",
    "HeraldRecord",
    "PulseConvention",
    "cz_operator",
    "fringe_bra",
    "fringe_probability",
    "herald_time",
    "ideal_cz",
    "level_operator",
    "pi_half_pulse",
    "rotation_matrix",
    "run_single_atom_protocol",
    "run_two_atom_protocol",
    "single_atom_sequence",
    "time_bra",
    "two_atom_sequence",
]
