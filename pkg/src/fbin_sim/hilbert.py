"""Dense state-vector and density-operator algebra over labeled registers.

A joint Hilbert space is an ordered tuple of registers. Photon registers hold
discrete frequency bins, atom registers hold internal levels. Amplitudes and
matrices are flattened row-major over the registers in declaration order, so
for registers ``(photon_L, atom_R)`` with bins ``(w4, w3)`` and levels
``(g1, g2)`` the basis is ``(w4 g1, w4 g2, w3 g1, w3 g2)``.

Every object here is immutable; operations return new objects.

Bra convention
--------------
Whenever a function takes a ``bra`` it is the coefficient vector ``b`` of
``<b| = sum_i b_i <i|``. Projecting ``|psi>`` gives ``sum_i b_i psi_i``; no
conjugation is applied to ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar, Iterable, Sequence, Union

import numpy as np

from .errors import (
    DimensionError,
    HeraldFailure,
    NormalizationError,
    RegisterError,
    WeightError,
)

SIDES = ("L", "R")

MAX_DIM = 4096
ALGEBRA_TOL = 1e-12
PSD_TOL = 1e-10
HERALD_THRESHOLD = 1e-14


@dataclass(frozen=True)
class FrequencyBin:
    """A discrete optical frequency component.

    Parameters
    ----------
    label : str
        Identifier, unique within its register.
    omega : float
        Angular frequency in rad/s, strictly positive.
    """

    label: str
    omega: float

    def __post_init__(self):
        if not np.isfinite(self.omega) or self.omega <= 0:
            raise RegisterError(f"bin {self.label!r}: omega must be > 0, got {self.omega}")


@dataclass(frozen=True)
class PhotonRegister:
    """Frequency-binned single-photon mode travelling to one side."""

    side: str
    bins: tuple[FrequencyBin, ...]

    kind: ClassVar[str] = "photon"

    def __post_init__(self):
        object.__setattr__(self, "bins", tuple(self.bins))
        if self.side not in SIDES:
            raise RegisterError(f"side must be one of {SIDES}, got {self.side!r}")
        if len(self.bins) < 1:
            raise RegisterError("a photon register needs at least one bin")
        labels = [b.label for b in self.bins]
        if len(set(labels)) != len(labels):
            raise RegisterError(f"duplicate bin labels in {labels}")
        omegas = [b.omega for b in self.bins]
        if len(set(omegas)) != len(omegas):
            raise RegisterError("bin frequencies must be distinct")

    @property
    def key(self) -> str:
        return f"photon:{self.side}"

    @property
    def dim(self) -> int:
        return len(self.bins)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(b.label for b in self.bins)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([b.omega for b in self.bins], dtype=float)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise RegisterError(f"{self.key} has no bin {label!r}") from None


@dataclass(frozen=True)
class AtomRegister:
    """Internal levels of one atom.

    ``level_energies`` (rad/s) are carried as labels only: atomic kets are kept
    in the rotating frame of the local drive, so no free evolution is applied.
    """

    side: str
    levels: tuple[str, ...]
    level_energies: tuple[float, ...] | None = None

    kind: ClassVar[str] = "atom"

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if self.level_energies is None:
            object.__setattr__(self, "level_energies", (0.0,) * len(self.levels))
        else:
            object.__setattr__(self, "level_energies", tuple(float(e) for e in self.level_energies))
        if self.side not in SIDES:
            raise RegisterError(f"side must be one of {SIDES}, got {self.side!r}")
        if len(self.levels) < 2:
            raise RegisterError("an atom register needs at least two levels")
        if len(set(self.levels)) != len(self.levels):
            raise RegisterError(f"duplicate level labels in {self.levels}")
        if len(self.level_energies) != len(self.levels):
            raise RegisterError("one energy per level is required")

    @property
    def key(self) -> str:
        return f"atom:{self.side}"

    @property
    def dim(self) -> int:
        return len(self.levels)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.levels

    def index(self, label: str) -> int:
        try:
            return self.levels.index(label)
        except ValueError:
            raise RegisterError(f"{self.key} has no level {label!r}") from None


Register = Union[PhotonRegister, AtomRegister]
RegisterRef = Union[Register, str]


def _check_registers(registers: Sequence[Register]) -> tuple[Register, ...]:
    registers = tuple(registers)
    if not registers:
        raise RegisterError("at least one register is required")
    for r in registers:
        if not isinstance(r, (PhotonRegister, AtomRegister)):
            raise RegisterError(f"not a register: {r!r}")
    keys = [r.key for r in registers]
    if len(set(keys)) != len(keys):
        raise RegisterError(f"colliding registers {keys}")
    dim = int(np.prod([r.dim for r in registers]))
    if dim > MAX_DIM:
        raise DimensionError(f"joint dimension {dim} exceeds the cap of {MAX_DIM}")
    return registers


def _locate(registers: Sequence[Register], ref: RegisterRef) -> int:
    key = ref if isinstance(ref, str) else ref.key
    for i, r in enumerate(registers):
        if r.key == key:
            if not isinstance(ref, str) and r != ref:
                raise RegisterError(f"register {key} present with a different layout")
            return i
    raise RegisterError(f"register {key} not present in {[r.key for r in registers]}")


def _basis_index(registers: Sequence[Register], labels: Sequence[str]) -> int:
    if len(labels) != len(registers):
        raise DimensionError("one label per register is required")
    idx = [r.index(lab) for r, lab in zip(registers, labels)]
    return int(np.ravel_multi_index(idx, [r.dim for r in registers]))


class _Joint:
    registers: tuple[Register, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.dim for r in self.registers)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(r.key for r in self.registers)

    def index(self, ref: RegisterRef) -> int:
        return _locate(self.registers, ref)

    def register(self, ref: RegisterRef) -> Register:
        return self.registers[self.index(ref)]

    def basis_labels(self) -> list[tuple[str, ...]]:
        """Joint basis labels in storage order."""
        grids = np.indices(self.dims).reshape(len(self.dims), -1).T
        return [tuple(r.labels[i] for r, i in zip(self.registers, row)) for row in grids]

    def basis_index(self, labels: Sequence[str]) -> int:
        return _basis_index(self.registers, labels)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HybridState(_Joint):
    """Normalized pure state over an ordered tuple of registers."""

    registers: tuple[Register, ...]
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        regs = _check_registers(self.registers)
        object.__setattr__(self, "registers", regs)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.dim:
            raise DimensionError(f"{amps.size} amplitudes for joint dimension {self.dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ALGEBRA_TOL:
            raise NormalizationError(f"state norm is {norm}, use make_pure to normalize")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def amplitude(self, *labels: str) -> complex:
        return complex(self.amplitudes[self.basis_index(labels)])


@dataclass(frozen=True, eq=False)
class DensityOperator(_Joint):
    """Hermitian, unit-trace, positive semidefinite operator."""

    registers: tuple[Register, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        regs = _check_registers(self.registers)
        object.__setattr__(self, "registers", regs)
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise DimensionError(f"matrix shape {m.shape} for joint dimension {self.dim}")
        if np.max(np.abs(m - m.conj().T)) > ALGEBRA_TOL:
            raise NormalizationError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > ALGEBRA_TOL:
            raise NormalizationError(f"density matrix trace is {tr}")
        if np.linalg.eigvalsh(m)[0] < -PSD_TOL:
            raise NormalizationError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", _frozen(m))

    def as_tensor(self) -> np.ndarray:
        return self.matrix.reshape(self.dims + self.dims)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


State = Union[HybridState, DensityOperator]


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def make_pure(registers: Sequence[Register], amplitudes: Iterable[complex]) -> HybridState:
    """Build a normalized pure state from (possibly unnormalized) amplitudes.

    Raises
    ------
    DimensionError
        If the number of amplitudes differs from the joint dimension.
    NormalizationError
        If all amplitudes vanish.
    """
    registers = _check_registers(registers)
    amps = np.asarray(list(amplitudes), dtype=complex).reshape(-1)
    dim = int(np.prod([r.dim for r in registers]))
    if amps.size != dim:
        raise DimensionError(f"{amps.size} amplitudes for joint dimension {dim}")
    norm = np.linalg.norm(amps)
    if not np.isfinite(norm) or norm == 0:
        raise NormalizationError("cannot normalize a zero vector")
    return HybridState(registers, amps / norm)


def basis_state(registers: Sequence[Register], *labels: str) -> HybridState:
    """The product basis ket labelled by one bin/level per register."""
    registers = _check_registers(registers)
    amps = np.zeros(int(np.prod([r.dim for r in registers])), dtype=complex)
    amps[_basis_index(registers, labels)] = 1.0
    return HybridState(registers, amps)


def tensor(a: State, b: State) -> State:
    """Joint state of two independent subsystems, registers concatenated."""
    registers = _check_registers(a.registers + b.registers)
    if isinstance(a, HybridState) and isinstance(b, HybridState):
        return HybridState(registers, np.kron(a.amplitudes, b.amplitudes))
    ra, rb = to_density(a), to_density(b)
    return DensityOperator(registers, np.kron(ra.matrix, rb.matrix))


def to_density(s: State) -> DensityOperator:
    if isinstance(s, DensityOperator):
        return s
    psi = s.amplitudes
    return DensityOperator(s.registers, np.outer(psi, psi.conj()))


def mix(components: Sequence[tuple[float, State]]) -> DensityOperator:
    """Convex combination ``sum_i w_i rho_i``.

    Weights must be positive and sum to one within 1e-12; every component must
    live on the same register tuple.
    """
    components = list(components)
    if not components:
        raise WeightError("empty mixture")
    weights = np.array([w for w, _ in components], dtype=float)
    if np.any(weights <= 0):
        raise WeightError("mixture weights must be positive")
    if abs(weights.sum() - 1.0) > ALGEBRA_TOL:
        raise WeightError(f"mixture weights sum to {weights.sum()}")
    registers = components[0][1].registers
    out = np.zeros((components[0][1].dim,) * 2, dtype=complex)
    for w, c in components:
        if c.registers != registers:
            raise RegisterError("all mixture components must share one register layout")
        out += w * to_density(c).matrix
    return DensityOperator(registers, _hermitize(out))


def _matmul_axes(t: np.ndarray, m: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Contract ``m`` (d_out, d_in) with the merged ``axes`` of tensor ``t``.

    The merged output axis replaces the first of ``axes``; when ``d_out == 1``
    the axis is dropped.
    """
    axes = list(axes)
    shape = t.shape
    d_in = int(np.prod([shape[a] for a in axes]))
    moved = np.moveaxis(t, axes, range(len(axes)))
    rest = moved.shape[len(axes):]
    flat = moved.reshape(d_in, -1)
    out = (m @ flat).reshape((m.shape[0],) + rest)
    if m.shape[0] == 1:
        return out[0]
    sub = tuple(shape[a] for a in axes)
    out = out.reshape(sub + rest)
    return np.moveaxis(out, range(len(axes)), axes)


def _resolve_subset(obj: State, refs) -> list[int]:
    if isinstance(refs, (str, PhotonRegister, AtomRegister)):
        refs = [refs]
    idx = [obj.index(r) for r in refs]
    if len(set(idx)) != len(idx):
        raise RegisterError("register listed twice")
    return idx


def apply_operator(obj: State, registers, op: np.ndarray) -> State:
    """Apply ``op`` to the joint space of ``registers`` (in the given order).

    Pure states map to ``op @ psi``; density operators to ``op rho op^dagger``.
    The result is validated, so ``op`` must be unitary (or the result must be
    renormalized by the caller through :func:`contract`).
    """
    idx = _resolve_subset(obj, registers)
    d_sub = int(np.prod([obj.dims[i] for i in idx]))
    op = np.asarray(op, dtype=complex)
    if op.shape != (d_sub, d_sub):
        raise DimensionError(f"operator shape {op.shape} for subspace dimension {d_sub}")
    if isinstance(obj, HybridState):
        psi = _matmul_axes(obj.as_tensor(), op, idx)
        return HybridState(obj.registers, psi.reshape(-1))
    return DensityOperator(obj.registers, _hermitize(sandwich(obj, idx, op)))


def sandwich(rho: DensityOperator, registers, op: np.ndarray) -> np.ndarray:
    """Raw matrix ``op rho op^dagger`` with ``op`` on ``registers``; not validated.

    Used for Kraus terms, whose individual contributions are sub-normalized.
    """
    idx = _resolve_subset(rho, registers) if not _is_index_list(registers) else list(registers)
    n = len(rho.dims)
    t = _matmul_axes(rho.as_tensor(), op, idx)
    t = _matmul_axes(t, op.conj(), [n + i for i in idx])
    return t.reshape(rho.dim, rho.dim)


def _is_index_list(x) -> bool:
    return isinstance(x, list) and all(isinstance(i, int) for i in x)


def contract(obj: State, registers, bra: np.ndarray):
    """Unnormalized projection of ``registers`` onto ``bra``.

    Returns
    -------
    weight : float
        Squared norm (pure) or trace (mixed) of the projected object.
    remaining : tuple of registers
    data : ndarray
        Projected amplitude vector or matrix over ``remaining``, unnormalized.
    """
    idx = _resolve_subset(obj, registers)
    d_sub = int(np.prod([obj.dims[i] for i in idx]))
    bra = np.asarray(bra, dtype=complex).reshape(-1)
    if bra.size != d_sub:
        raise DimensionError(f"bra of length {bra.size} for subspace dimension {d_sub}")
    remaining = tuple(r for i, r in enumerate(obj.registers) if i not in idx)
    m = bra[np.newaxis, :]
    d_rem = int(np.prod([r.dim for r in remaining])) if remaining else 1
    if isinstance(obj, HybridState):
        vec = _matmul_axes(obj.as_tensor(), m, idx).reshape(d_rem)
        return float(np.vdot(vec, vec).real), remaining, vec
    n = len(obj.dims)
    rho = _matmul_axes(obj.as_tensor(), m, idx)
    # row axes of the projected register are gone; column axes shift left by len(idx)
    rem_n = n - len(idx)
    col_axes = [rem_n + i for i in idx]
    rho = _matmul_axes(rho, m.conj(), col_axes).reshape(d_rem, d_rem)
    return float(np.trace(rho).real), remaining, rho


def project(obj: State, registers, bra: np.ndarray):
    """Condition on a projection of ``registers`` onto a normalized ``bra``.

    Returns ``(probability, post_state)`` where the post-state lives on the
    remaining registers and has the same kind (pure or mixed) as ``obj``.

    Raises
    ------
    NormalizationError
        If ``bra`` is not normalized.
    HeraldFailure
        If the outcome probability is below 1e-14.
    """
    bra = np.asarray(bra, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(bra) - 1.0) > ALGEBRA_TOL:
        raise NormalizationError("projection bra must be normalized")
    prob, remaining, data = contract(obj, registers, bra)
    if not remaining:
        raise RegisterError("projection must leave at least one register; use probability()")
    return prob, renormalize(obj, remaining, prob, data)


def renormalize(obj: State, remaining, weight: float, data: np.ndarray) -> State:
    if weight < HERALD_THRESHOLD:
        raise HeraldFailure(f"conditioning probability {weight:.3e} below {HERALD_THRESHOLD}")
    if isinstance(obj, HybridState):
        return HybridState(remaining, data / np.sqrt(weight))
    return DensityOperator(remaining, _hermitize(data / weight))


def probability(obj: State, registers, bra: np.ndarray) -> float:
    """Weight ``<b|rho|b>`` of a (not necessarily normalized) bra, no post-state."""
    return contract(obj, registers, bra)[0]


def partial_trace(rho: State, registers) -> DensityOperator:
    """Trace out one register or a sequence of registers."""
    rho = to_density(rho)
    idx = _resolve_subset(rho, registers)
    keep = [i for i in range(len(rho.dims)) if i not in idx]
    if not keep:
        raise RegisterError("cannot trace out every register")
    n = len(rho.dims)
    t = rho.as_tensor()
    t = np.moveaxis(t, keep + idx + [n + i for i in keep] + [n + i for i in idx], range(2 * n))
    d_keep = int(np.prod([rho.dims[i] for i in keep]))
    d_tr = int(np.prod([rho.dims[i] for i in idx]))
    t = t.reshape(d_keep, d_tr, d_keep, d_tr)
    red = np.einsum("aibi->ab", t)
    return DensityOperator(tuple(rho.registers[i] for i in keep), _hermitize(red))


def reorder(obj: State, order: Sequence[RegisterRef]) -> State:
    """Permute registers into ``order`` (every register exactly once)."""
    idx = [obj.index(r) for r in order]
    if sorted(idx) != list(range(len(obj.registers))):
        raise RegisterError("reorder needs every register exactly once")
    regs = tuple(obj.registers[i] for i in idx)
    if isinstance(obj, HybridState):
        return HybridState(regs, np.transpose(obj.as_tensor(), idx).reshape(-1))
    n = len(idx)
    t = np.transpose(obj.as_tensor(), idx + [n + i for i in idx])
    return DensityOperator(regs, t.reshape(obj.dim, obj.dim))


def fidelity(a: State, b: State) -> float:
    """Fidelity between two states on the same registers.

    Pure-pure gives ``|<a|b>|^2``; pure-mixed gives ``<a|rho|a>``. Mixed-mixed
    uses the Uhlmann form via matrix square roots.
    """
    if a.registers != b.registers:
        raise RegisterError("fidelity needs identical register layouts")
    if isinstance(a, HybridState) and isinstance(b, HybridState):
        return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
    if isinstance(a, HybridState):
        a, b = b, a
    if isinstance(b, HybridState):
        psi = b.amplitudes
        return float(np.real(np.vdot(psi, a.matrix @ psi)))
    from scipy.linalg import sqrtm

    s = sqrtm(a.matrix)
    return float(np.real(np.trace(sqrtm(s @ b.matrix @ s))) ** 2)


def schmidt_coefficients(state: HybridState, registers) -> np.ndarray:
    """Schmidt coefficients across the cut ``registers | rest``."""
    idx = _resolve_subset(state, registers)
    rest = [i for i in range(len(state.dims)) if i not in idx]
    t = np.transpose(state.as_tensor(), idx + rest)
    d_a = int(np.prod([state.dims[i] for i in idx]))
    return np.linalg.svd(t.reshape(d_a, -1), compute_uv=False)


def schmidt_rank(state: HybridState, registers, tol: float = 1e-10) -> int:
    return int(np.sum(schmidt_coefficients(state, registers) > tol))


def from_terms(registers: Sequence[Register], terms: dict) -> HybridState:
    """Build a normalized pure state from ``{(label, ...): amplitude}``.

    >>> from_terms((photon, atom), {("w4", "g2"): 1, ("w3", "g1"): 1})  # doctest: +SKIP
    """
    registers = _check_registers(registers)
    amps = np.zeros(int(np.prod([r.dim for r in registers])), dtype=complex)
    for labels, a in terms.items():
        amps[_basis_index(registers, labels)] += a
    return make_pure(registers, amps)
