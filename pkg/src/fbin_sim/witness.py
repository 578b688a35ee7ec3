"""Entanglement witnesses for photon-frequency / atomic-level states.

Two tests are implemented for a state on ``(photon:L, atom:R)``:

* The conditional functional ``F_c(t_L, theta)``: the probability of finding
  the atom in ``(|A1> + e^{i theta}|A2>)/sqrt(2)`` given a photon click at
  ``t_L``. Mixtures of product states sharing one photon waveform give an
  ``F_c`` that does not depend on ``t_L``.
* The Fourier witness built from the joint and marginal click statistics
  ``K_LR(t, theta)``, ``K_L(t)`` and ``K_R(theta)``. Product states factorize,
  ``K_LR = K_L K_R``, and so do their Fourier coefficients. A joint Fourier
  coefficient larger than the bounds met by every product component in the
  mixture certifies entanglement.

Time normalization
------------------
The click basis uses ``<t|w_m> = exp(-i w_m t)`` with a unit-modulus
envelope, so ``K_L`` has window average 1 for any normalized state whose bin
spacings are commensurate with ``2 pi / T``. The time integral in ``K_R`` is
taken over the normalized window ``dt / T``. With this choice every
functional and every Fourier coefficient is dimensionless, ``|F[K_L]| <= 1``
and ``|F[K_R]| <= 1``, and the factorization carries no extra constant.

Quadrature is the trapezoid rule on ``t in [0, T]`` (``n_time`` points,
endpoints included) and the periodic rectangle rule on ``theta in [0, 2 pi)``.
Both are exact for the trigonometric polynomials involved once the grid
resolves the harmonics, which :func:`check_grid` enforces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import hilbert as hb
from .errors import GridError, HeraldFailure, ParameterError, RegisterError
from .hilbert import AtomRegister, DensityOperator, PhotonRegister, State

DEFAULT_EPS = 0.05
DEFAULT_FC_TOL = 1e-9


class Verdict(str, Enum):
    ENTANGLED_WITNESSED = "ENTANGLED_WITNESSED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class MeasurementGrid:
    """Sampling of click times and analyser phases.

    ``omega_s_indices`` are the integers ``m`` of ``omega_s = 2 pi m / T``.
    """

    T: float
    n_time: int = 201
    n_theta: int = 64
    omega_s_indices: tuple[int, ...] = (1, 2, 3, 4)
    n_R_values: tuple[int, ...] = (-1, 1)

    def __post_init__(self):
        object.__setattr__(self, "omega_s_indices", tuple(int(m) for m in self.omega_s_indices))
        object.__setattr__(self, "n_R_values", tuple(int(n) for n in self.n_R_values))
        if not (np.isfinite(self.T) and self.T > 0):
            raise GridError(f"window T must be > 0, got {self.T}")
        if self.n_time < 4 or self.n_theta < 4:
            raise GridError("n_time and n_theta must be >= 4")
        if any(m < 0 for m in self.omega_s_indices):
            raise GridError("omega_s indices must be non-negative integers")
        if not self.omega_s_indices or not self.n_R_values:
            raise GridError("empty Fourier range")

    @classmethod
    def for_detuning(cls, detuning: float, periods: int = 2, **kwargs) -> "MeasurementGrid":
        """Window spanning ``periods`` beat periods of ``detuning``."""
        return cls(T=periods * 2 * np.pi / detuning, **kwargs)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n_time)

    @property
    def thetas(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def omega_s_values(self) -> np.ndarray:
        return 2 * np.pi * np.array(self.omega_s_indices, dtype=float) / self.T

    @property
    def time_weights(self) -> np.ndarray:
        w = np.full(self.n_time, self.T / (self.n_time - 1))
        w[[0, -1]] *= 0.5
        return w

    @property
    def theta_weights(self) -> np.ndarray:
        return np.full(self.n_theta, 2 * np.pi / self.n_theta)

    def to_dict(self) -> dict:
        return {"T": self.T, "n_time": self.n_time, "n_theta": self.n_theta,
                "omega_s_indices": list(self.omega_s_indices),
                "n_R_values": list(self.n_R_values)}


@dataclass(frozen=True)
class AtomPair:
    """The two atomic levels the analyser superposes."""

    first_level: str = "g1"
    second_level: str = "g2"

    def __post_init__(self):
        if self.first_level == self.second_level:
            raise RegisterError("atom pair levels must differ")

    def indices(self, atom: AtomRegister) -> tuple[int, int]:
        return atom.index(self.first_level), atom.index(self.second_level)


def split(rho: State):
    """Return ``(photon, atom, tensor)`` with the tensor indexed ``[m, a, n, b]``."""
    rho = hb.to_density(rho)
    if len(rho.registers) != 2:
        raise RegisterError("witness states must span exactly one photon and one atom register")
    kinds = {type(r) for r in rho.registers}
    if kinds != {PhotonRegister, AtomRegister}:
        raise RegisterError("witness states need one photon and one atom register")
    photon = next(r for r in rho.registers if isinstance(r, PhotonRegister))
    atom = next(r for r in rho.registers if isinstance(r, AtomRegister))
    rho = hb.reorder(rho, [photon, atom])
    return photon, atom, rho.matrix.reshape(photon.dim, atom.dim, photon.dim, atom.dim)


def conditional_atom_matrices(rho: State, times) -> np.ndarray:
    """Unnormalized atomic operators ``<t| rho |t>``, shape ``(n_t, N_A, N_A)``."""
    photon, _, t = split(rho)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    b = np.exp(-1j * np.outer(times, photon.omegas))
    return np.einsum("tm,manb,tn->tab", b, t, b.conj())


def analyser_bras(atom: AtomRegister, pair: AtomPair, thetas) -> np.ndarray:
    """Rows ``(<A1| + e^{-i theta}<A2|)/sqrt(2)`` over the atom basis."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    i, j = pair.indices(atom)
    v = np.zeros((thetas.size, atom.dim), dtype=complex)
    v[:, i] = 1.0
    v[:, j] = np.exp(-1j * thetas)
    return v / np.sqrt(2.0)


def _klr_from_sigma(sigma: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("ka,tab,kb->tk", v, sigma, v.conj()).real


def k_l(rho: State, t) -> np.ndarray | float:
    """Photon click statistics ``Tr_atom <t| rho |t>``."""
    sigma = conditional_atom_matrices(rho, t)
    out = np.einsum("taa->t", sigma).real
    return float(out[0]) if np.ndim(t) == 0 else out


def k_lr(rho: State, t, theta, pair: AtomPair = AtomPair()) -> np.ndarray | float:
    """Joint click-and-analyser statistics, shape ``(n_t, n_theta)`` for arrays."""
    _, atom, _ = split(rho)
    out = _klr_from_sigma(conditional_atom_matrices(rho, t), analyser_bras(atom, pair, theta))
    if np.ndim(t) == 0 and np.ndim(theta) == 0:
        return float(out[0, 0])
    return out


def k_r(rho: State, theta, pair: AtomPair, grid: MeasurementGrid) -> np.ndarray | float:
    """Window average of ``k_lr`` over the click time (trapezoid on ``grid.times``)."""
    klr = np.atleast_2d(k_lr(rho, grid.times, np.atleast_1d(theta), pair))
    out = grid.time_weights @ klr / grid.T
    return float(out[0]) if np.ndim(theta) == 0 else out


def f_c(rho: State, t_L, theta, pair: AtomPair = AtomPair()) -> np.ndarray | float:
    """Conditional analyser probability given a photon click at ``t_L``.

    Raises
    ------
    HeraldFailure
        Where the click probability at ``t_L`` is below 1e-14.
    """
    _, atom, _ = split(rho)
    sigma = conditional_atom_matrices(rho, t_L)
    kl = np.einsum("taa->t", sigma).real
    if np.any(kl < hb.HERALD_THRESHOLD):
        raise HeraldFailure("no photon click probability at the requested time")
    out = _klr_from_sigma(sigma, analyser_bras(atom, pair, theta)) / kl[:, None]
    if np.ndim(t_L) == 0 and np.ndim(theta) == 0:
        return float(out[0, 0])
    return out


def fc_grid(rho: State, grid: MeasurementGrid, pair: AtomPair = AtomPair()) -> np.ndarray:
    """``F_c`` on the ``(t, theta)`` grid; NaN where the click probability vanishes."""
    _, atom, _ = split(rho)
    sigma = conditional_atom_matrices(rho, grid.times)
    kl = np.einsum("taa->t", sigma).real
    klr = _klr_from_sigma(sigma, analyser_bras(atom, pair, grid.thetas))
    out = np.full_like(klr, np.nan)
    ok = kl >= hb.HERALD_THRESHOLD
    out[ok] = klr[ok] / kl[ok, None]
    if not ok.any():
        raise HeraldFailure("photon click probability vanishes on the whole grid")
    return out


def fc_independence_test(rho: State, grid: MeasurementGrid, pair: AtomPair = AtomPair(),
                         tol: float = DEFAULT_FC_TOL):
    """Largest spread of ``F_c`` over ``t_L`` at fixed ``theta``.

    Returns ``(variation, consistent_with_separable)``; a variation above
    ``tol`` flags entanglement.
    """
    fc = fc_grid(rho, grid, pair)
    variation = float(np.nanmax(np.nanmax(fc, axis=0) - np.nanmin(fc, axis=0)))
    return variation, variation <= tol


def check_grid(photon: PhotonRegister, grid: MeasurementGrid) -> None:
    """Reject grids whose quadrature would alias the click-time harmonics.

    Raises
    ------
    GridError
        If ``n_time`` is not above twice the largest bin separation in units of
        ``2 pi / T``, if an ``omega_s`` harmonic aliases, or if ``n_theta``
        cannot resolve the requested ``n_R``.
    """
    w = photon.omegas
    k_max = (w.max() - w.min()) * grid.T / (2 * np.pi)
    intervals = grid.n_time - 1
    if not grid.n_time > 2 * k_max:
        raise GridError(f"n_time={grid.n_time} does not resolve bin separation {k_max:.3g} x 2pi/T")
    if k_max + max(grid.omega_s_indices) >= intervals:
        raise GridError("omega_s range aliases on the time grid")
    if max(abs(n) for n in grid.n_R_values) + 1 >= grid.n_theta:
        raise GridError("n_theta too small for the requested n_R range")


def fourier_kl(kl: np.ndarray, grid: MeasurementGrid) -> np.ndarray:
    """``(1/T) int K_L(t) e^{-i omega_s t} dt`` for each ``omega_s``."""
    ph = np.exp(-1j * np.outer(grid.omega_s_values, grid.times))
    return ph @ (grid.time_weights * kl) / grid.T


def fourier_kr(kr: np.ndarray, grid: MeasurementGrid) -> np.ndarray:
    """``(1/2pi) int K_R(theta) e^{-i n theta} d theta`` for each ``n_R``."""
    ph = np.exp(-1j * np.outer(grid.n_R_values, grid.thetas))
    return ph @ (grid.theta_weights * kr) / (2 * np.pi)


def fourier_klr(klr: np.ndarray, grid: MeasurementGrid) -> np.ndarray:
    """``(1/(2 pi T)) iint K_LR e^{-i n theta} e^{-i omega_s t}``, shape ``(n_omega_s, n_R)``."""
    pt = np.exp(-1j * np.outer(grid.omega_s_values, grid.times)) * grid.time_weights
    pa = np.exp(-1j * np.outer(grid.n_R_values, grid.thetas)) * grid.theta_weights
    return pt @ klr @ pa.T / (2 * np.pi * grid.T)


@dataclass
class Functionals:
    """The K-functionals of one state sampled on a grid, and their transforms."""

    klr: np.ndarray
    kl: np.ndarray
    kr: np.ndarray
    fourier_klr: np.ndarray
    fourier_kl: np.ndarray
    fourier_kr: np.ndarray


def functionals(rho: State, grid: MeasurementGrid, pair: AtomPair = AtomPair()) -> Functionals:
    photon, atom, _ = split(rho)
    check_grid(photon, grid)
    sigma = conditional_atom_matrices(rho, grid.times)
    kl = np.einsum("taa->t", sigma).real
    klr = _klr_from_sigma(sigma, analyser_bras(atom, pair, grid.thetas))
    kr = grid.time_weights @ klr / grid.T
    return Functionals(klr, kl, kr, fourier_klr(klr, grid), fourier_kl(kl, grid),
                       fourier_kr(kr, grid))


@dataclass
class WitnessReport:
    """Outcome of both witness tests on one state."""

    grid: MeasurementGrid
    pair: AtomPair
    fc_grid: np.ndarray
    fc_tL_variation: float
    fc_tol: float
    klr_grid: np.ndarray
    kl_series: np.ndarray
    kr_series: np.ndarray
    fourier_klr: np.ndarray
    fourier_kl: np.ndarray
    fourier_kr: np.ndarray
    epsilon_L: float
    epsilon_R: float
    fc_flag: bool = field(init=False)
    eq14a_violated: bool = field(init=False)
    eq14b_violated: bool = field(init=False)
    verdict: Verdict = field(init=False)

    def __post_init__(self):
        self.fc_flag = bool(self.fc_tL_variation > self.fc_tol)
        peak = float(np.max(np.abs(self.fourier_klr)))
        self.eq14a_violated = peak > self.epsilon_L
        self.eq14b_violated = peak > self.epsilon_R
        witnessed = self.fc_flag or self.eq14a_violated or self.eq14b_violated
        self.verdict = Verdict.ENTANGLED_WITNESSED if witnessed else Verdict.INCONCLUSIVE

    @property
    def fourier_flag(self) -> bool:
        return self.eq14a_violated or self.eq14b_violated

    @property
    def max_abs_fourier_klr(self) -> float:
        return float(np.max(np.abs(self.fourier_klr)))

    def to_dict(self, include_grids: bool = True) -> dict:
        def cplx(a):
            a = np.asarray(a)
            return {"re": a.real.tolist(), "im": a.imag.tolist()}

        out = {
            "verdict": self.verdict.value,
            "criteria": {
                "fc_t_independence": {"variation": self.fc_tL_variation, "tol": self.fc_tol,
                                      "flagged": self.fc_flag},
                "fourier_eq_a": {"max_abs_F_KLR": self.max_abs_fourier_klr,
                                 "epsilon_L": self.epsilon_L, "violated": self.eq14a_violated},
                "fourier_eq_b": {"max_abs_F_KLR": self.max_abs_fourier_klr,
                                 "epsilon_R": self.epsilon_R, "violated": self.eq14b_violated},
            },
            "pair": [self.pair.first_level, self.pair.second_level],
            "grid": self.grid.to_dict(),
            "omega_s_values": self.grid.omega_s_values.tolist(),
            "fourier_klr": cplx(self.fourier_klr),
            "fourier_kl": cplx(self.fourier_kl),
            "fourier_kr": cplx(self.fourier_kr),
        }
        if include_grids:
            out.update({
                "times": self.grid.times.tolist(),
                "thetas": self.grid.thetas.tolist(),
                "fc_grid": np.where(np.isnan(self.fc_grid), None, self.fc_grid).tolist(),
                "klr_grid": self.klr_grid.tolist(),
                "kl_series": self.kl_series.tolist(),
                "kr_series": self.kr_series.tolist(),
            })
        return out


def fourier_witness(rho: State, grid: MeasurementGrid, pair: AtomPair = AtomPair(),
                    eps_L: float = DEFAULT_EPS, eps_R: float = DEFAULT_EPS,
                    fc_tol: float = DEFAULT_FC_TOL) -> WitnessReport:
    """Run both witness tests and collect the result.

    The Fourier test is violated when ``|F[K_LR](omega_s, n_R)|`` exceeds
    ``eps_L`` (first inequality) or ``eps_R`` (second) anywhere in the grid's
    ``(omega_s, n_R)`` range; one violation suffices. The bound is sound for
    mixtures of product states meeting ``|F[K_L]| <= eps_L`` or
    ``|F[K_R]| <= eps_R`` when ``eps_L == eps_R``; with unequal values only
    ``max(eps_L, eps_R)`` is guaranteed.

    Raises
    ------
    GridError
        If the grid under-resolves the state's bin separations.
    """
    for e in (eps_L, eps_R):
        if not 0.0 <= e <= 1.0:
            raise ParameterError(f"epsilon must lie in [0, 1], got {e}")
    fun = functionals(rho, grid, pair)
    fc = fc_grid(rho, grid, pair)
    variation = float(np.nanmax(np.nanmax(fc, axis=0) - np.nanmin(fc, axis=0)))
    return WitnessReport(grid=grid, pair=pair, fc_grid=fc, fc_tL_variation=variation,
                         fc_tol=fc_tol, klr_grid=fun.klr, kl_series=fun.kl, kr_series=fun.kr,
                         fourier_klr=fun.fourier_klr, fourier_kl=fun.fourier_kl,
                         fourier_kr=fun.fourier_kr, epsilon_L=eps_L, epsilon_R=eps_R)


def is_compliant(state: State, grid: MeasurementGrid, pair: AtomPair = AtomPair(),
                 eps_L: float = DEFAULT_EPS, eps_R: float = DEFAULT_EPS) -> bool:
    """Whether a product state meets ``|F[K_L]| <= eps_L or |F[K_R]| <= eps_R`` on the range."""
    fun = functionals(state, grid, pair)
    left = np.abs(fun.fourier_kl)[:, None] <= eps_L
    right = np.abs(fun.fourier_kr)[None, :] <= eps_R
    return bool(np.all(left | right))


def _haar_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_product_state(rng: np.random.Generator, photon: PhotonRegister,
                         atom: AtomRegister) -> hb.HybridState:
    """Haar-random ``(sum b_m |w_m>) (x) (sum c_n |A_n>)``."""
    return hb.make_pure((photon, atom), np.kron(_haar_vector(rng, photon.dim),
                                                _haar_vector(rng, atom.dim)))


def random_separable_state(rng: np.random.Generator, photon: PhotonRegister, atom: AtomRegister,
                           grid: MeasurementGrid, pair: AtomPair = AtomPair(),
                           eps_L: float = DEFAULT_EPS, eps_R: float = DEFAULT_EPS,
                           n_components: int | None = None, max_tries: int = 1000) -> DensityOperator:
    """Random convex mixture of compliant product states with one photon waveform.

    Two families alternate at random. Either every component carries its
    photon in a single random bin (flat waveform), or all components share one
    random photon superposition and their atoms are drawn with a small
    analyser coherence so that ``|F[K_R]| <= eps_R``. Components are rejected
    until :func:`is_compliant` holds.
    """
    n = n_components if n_components is not None else int(rng.integers(2, 5))
    shared = bool(rng.integers(0, 2)) and photon.dim > 1
    if shared:
        while True:
            b0 = _haar_vector(rng, photon.dim)
            wave = np.abs(np.exp(-1j * np.outer(grid.times, photon.omegas)) @ b0) ** 2
            if wave.min() > 1e-2:
                break
    i, j = pair.indices(atom)
    comps = []
    for _ in range(n):
        for _ in range(max_tries):
            c = _haar_vector(rng, atom.dim)
            if shared:
                b = b0
                scale = 2 * eps_R * rng.uniform(0.05, 0.95) / max(abs(c[i] * c[j]), 1e-300)
                if scale < 1:
                    c[j] *= scale
                    c /= np.linalg.norm(c)
            else:
                b = np.zeros(photon.dim, dtype=complex)
                b[rng.integers(photon.dim)] = np.exp(2j * np.pi * rng.uniform())
            s = hb.make_pure((photon, atom), np.kron(b, c))
            if is_compliant(s, grid, pair, eps_L, eps_R):
                comps.append(s)
                break
        else:
            raise ParameterError("could not draw a compliant product state")
    weights = rng.dirichlet(np.ones(n))
    weights /= weights.sum()
    return hb.mix(list(zip(weights, comps)))
