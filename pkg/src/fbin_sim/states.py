"""Catalog of the named states used throughout the package.

Frequencies are given in a detector frame: only bin differences enter any
normalized quantity, so a common optical carrier is dropped and the lowest bin
sits at one detuning above zero.
"""

from __future__ import annotations

import numpy as np

from . import hilbert as hb
from .hilbert import AtomRegister, FrequencyBin, PhotonRegister

FIG2_DETUNING = 2 * np.pi * 1.77e9
FIG3_DETUNING = 2 * np.pi * 20e6


def two_bins(detuning: float, labels=("w1", "w2"), floor: float | None = None):
    """Bins ``(w1, w2)`` with ``w1 - w2 = detuning``; ``w2`` defaults to ``detuning``."""
    w2 = detuning if floor is None else floor
    return (FrequencyBin(labels[0], w2 + detuning), FrequencyBin(labels[1], w2))


def atom(side: str = "R", levels=("g1", "g2")) -> AtomRegister:
    return AtomRegister(side, tuple(levels))


def photon_pair(detuning: float = FIG2_DETUNING) -> hb.HybridState:
    """``(|w4>_L|w2>_R + |w3>_L|w1>_R)/sqrt(2)`` with ``w4 + w2 = w3 + w1``.

    The right photon carries ``(w1, w2)``, the left one ``(w4, w3)``; the left
    pair sits two detunings above the right one.
    """
    w1, w2 = two_bins(detuning)
    w3 = FrequencyBin("w3", w2.omega + 2 * detuning)
    w4 = FrequencyBin("w4", w3.omega + detuning)
    left = PhotonRegister("L", (w4, w3))
    right = PhotonRegister("R", (w1, w2))
    return hb.from_terms((left, right), {("w4", "w2"): 1, ("w3", "w1"): 1})


def eq1_state(detuning: float = FIG2_DETUNING) -> hb.HybridState:
    """Target hybrid state ``(|w4>_L|g2>_R + |w3>_L|g1>_R)/sqrt(2)``."""
    left = photon_pair(detuning).register("photon:L")
    return hb.from_terms((left, atom("R")), {("w4", "g2"): 1, ("w3", "g1"): 1})


def two_atom_initial(detuning: float = FIG2_DETUNING, entangled: bool = True) -> hb.HybridState:
    """``|g1>_L|g1>_R (x) (|w1>_L|w2>_R + |w2>_L|w1>_R)/sqrt(2)``.

    With ``entangled=False`` the photon pair is the product ``|w1>_L|w2>_R``.
    """
    bins = two_bins(detuning)
    regs = (atom("L"), atom("R"), PhotonRegister("L", bins), PhotonRegister("R", bins))
    if entangled:
        terms = {("g1", "g1", "w1", "w2"): 1, ("g1", "g1", "w2", "w1"): 1}
    else:
        terms = {("g1", "g1", "w1", "w2"): 1}
    return hb.from_terms(regs, terms)


def _photon_atom(detuning: float):
    return PhotonRegister("L", two_bins(detuning)), atom("R")


def fig3a(detuning: float = FIG3_DETUNING) -> hb.DensityOperator:
    """Equal mixture of ``(|w1 g1> + |w2 g2>)/sqrt(2)`` and ``(|w1 g1> + i|w2 g2>)/sqrt(2)``."""
    regs = _photon_atom(detuning)
    a = hb.from_terms(regs, {("w1", "g1"): 1, ("w2", "g2"): 1})
    b = hb.from_terms(regs, {("w1", "g1"): 1, ("w2", "g2"): 1j})
    return hb.mix([(0.5, a), (0.5, b)])


def fig3b(detuning: float = FIG3_DETUNING) -> hb.DensityOperator:
    """Equal mixture of ``|w1>(|g1> + |g2>)/sqrt(2)`` and ``|w2>(|g1> + i|g2>)/sqrt(2)``."""
    regs = _photon_atom(detuning)
    a = hb.from_terms(regs, {("w1", "g1"): 1, ("w1", "g2"): 1})
    b = hb.from_terms(regs, {("w2", "g1"): 1, ("w2", "g2"): 1j})
    return hb.mix([(0.5, a), (0.5, b)])


def bell_like(detuning: float = FIG3_DETUNING) -> hb.HybridState:
    """Pure frequency-bin entangled state ``(|w1 g1> + |w2 g2>)/sqrt(2)``."""
    return hb.from_terms(_photon_atom(detuning), {("w1", "g1"): 1, ("w2", "g2"): 1})


def product(detuning: float = FIG3_DETUNING) -> hb.HybridState:
    """``(|w1> + |w2>)/sqrt(2) (x) |g1>``.

    Its analyser marginal has no ``theta`` harmonic, so it lies inside the set
    of product states the Fourier witness is built to accept.
    """
    photon, at = _photon_atom(detuning)
    return hb.tensor(hb.make_pure([photon], [1, 1]), hb.basis_state([at], "g1"))
