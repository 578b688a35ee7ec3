"""Decoherence channels for the transcription and networking protocols.

Three imperfections are modeled: loss of a photon, leakage of atomic
population into the excited level, and dephasing between ``g1`` and ``g2``.
Loss and leakage are heralded: the run is discarded when they happen, so they
only lower the success probability and leave the kept state untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hilbert as hb
from . import protocol as pr
from .errors import ParameterError
from .hilbert import AtomRegister, DensityOperator, State

DEFAULT_DEPHASING_STEPS = ("pulse1", "pulse2")


def _check_prob(p: float, name: str = "p") -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0) or not np.isfinite(p):
        raise ParameterError(f"{name} must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class NoiseSpec:
    """Per-step error probabilities; all default to zero."""

    photon_loss_prob: float = 0.0
    dephasing_prob: float = 0.0
    leakage_prob: float = 0.0

    def __post_init__(self):
        for name in ("photon_loss_prob", "dephasing_prob", "leakage_prob"):
            _check_prob(getattr(self, name), name)

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseSpec":
        return cls(**{k: float(v) for k, v in d.items()})

    def to_dict(self) -> dict:
        return {"photon_loss_prob": self.photon_loss_prob,
                "dephasing_prob": self.dephasing_prob,
                "leakage_prob": self.leakage_prob}


def dephasing_kraus(atom: AtomRegister, p: float) -> list[np.ndarray]:
    """Kraus operators ``sqrt(1-p) I`` and ``sqrt(p) Z`` with Z = diag(1, -1) on (g1, g2)."""
    z = pr.level_operator(atom, np.diag([1.0, -1.0]))
    return [np.sqrt(1 - p) * np.eye(atom.dim), np.sqrt(p) * z]


def apply_dephasing(rho: State, atom_register, p: float) -> DensityOperator:
    """Phase-flip channel on the ``g1 <-> g2`` coherence.

    Coherences between ``g1`` and ``g2`` are multiplied by ``1 - 2p``.
    """
    p = _check_prob(p)
    rho = hb.to_density(rho)
    atom = pr._atom(rho, atom_register)
    out = sum(hb.sandwich(rho, atom, k) for k in dephasing_kraus(atom, p))
    return DensityOperator(rho.registers, 0.5 * (out + out.conj().T))


def _heralded(rho: State, p: float):
    p = _check_prob(p)
    if p == 1.0:
        return 0.0, None
    return 1.0 - p, rho


def apply_loss(rho: State, photon_register, p: float):
    """Heralded photon loss: ``(1 - p, rho)``, or ``(0, None)`` when ``p = 1``."""
    pr._photon(rho, photon_register)
    return _heralded(rho, p)


def apply_leakage(rho: State, atom_register, p: float):
    """Leakage into ``e``, treated as heralded loss from the qubit subspace."""
    pr._atom(rho, atom_register)
    return _heralded(rho, p)


def _dephasing_hook(atoms, p: float, steps):
    def hook(obj, step):
        if p == 0 or step not in steps:
            return obj
        for a in atoms:
            if a.key in obj.keys:
                obj = apply_dephasing(obj, a, p)
        return obj

    return hook


def run_noisy_single_atom_protocol(photon_pair: State, t_R: float, noise: NoiseSpec,
                                   dephasing_steps=DEFAULT_DEPHASING_STEPS, **kwargs):
    """Transcription protocol under ``noise``.

    Returns ``(success_probability, rho)`` where the success probability
    accounts for loss of the heralding photon and atomic leakage, and ``rho``
    is the kept state on ``(photon:L, atom:R)``; ``rho`` is ``None`` if the run
    can never succeed.
    """
    atom = kwargs.get("atom") or AtomRegister("R", ("g1", "g2"))
    kwargs["atom"] = atom
    rho = hb.to_density(photon_pair)
    success, rho = apply_loss(rho, "photon:R", noise.photon_loss_prob)
    if rho is None:
        return 0.0, None
    hook = _dephasing_hook([atom], noise.dephasing_prob, dephasing_steps)
    _, rho = pr.single_atom_sequence(rho, t_R, hook=hook, **kwargs)
    kept, rho = apply_leakage(rho, atom, noise.leakage_prob)
    if rho is None:
        return 0.0, None
    return success * kept, rho


def run_noisy_two_atom_protocol(initial: State, t_L: float, t_R: float, noise: NoiseSpec,
                                dephasing_steps=DEFAULT_DEPHASING_STEPS, **kwargs):
    """Two-atom networking protocol under ``noise``; returns ``(success, rho)``.

    Both photons must arrive and neither atom may leak.
    """
    rho = hb.to_density(initial)
    success = 1.0
    for side in ("L", "R"):
        kept, rho = apply_loss(rho, f"photon:{side}", noise.photon_loss_prob)
        if rho is None:
            return 0.0, None
        success *= kept
    atoms = [rho.register("atom:L"), rho.register("atom:R")]
    hook = _dephasing_hook(atoms, noise.dephasing_prob, dephasing_steps)
    _, rho = pr.two_atom_sequence(rho, t_L, t_R, hook=hook, **kwargs)
    for a in atoms:
        kept, rho = apply_leakage(rho, a, noise.leakage_prob)
        if rho is None:
            return 0.0, None
        success *= kept
    return success, rho
