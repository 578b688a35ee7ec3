import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbin_sim import hilbert as hb
from fbin_sim.errors import (
    DimensionError,
    HeraldFailure,
    NormalizationError,
    RegisterError,
    WeightError,
)

from .conftest import random_ket, random_rho

S2 = 1 / np.sqrt(2)


def test_registers_validate():
    with pytest.raises(RegisterError):
        hb.FrequencyBin("w", 0.0)
    with pytest.raises(RegisterError):
        hb.PhotonRegister("L", ())
    with pytest.raises(RegisterError):
        hb.PhotonRegister("L", (hb.FrequencyBin("a", 1.0), hb.FrequencyBin("a", 2.0)))
    with pytest.raises(RegisterError):
        hb.PhotonRegister("L", (hb.FrequencyBin("a", 1.0), hb.FrequencyBin("b", 1.0)))
    with pytest.raises(RegisterError):
        hb.AtomRegister("R", ("g1",))
    with pytest.raises(RegisterError):
        hb.AtomRegister("X", ("g1", "g2"))


def test_make_pure_eq1_ordering(eq1):
    assert eq1.basis_labels() == [("w4", "g1"), ("w4", "g2"), ("w3", "g1"), ("w3", "g2")]
    assert eq1.amplitude("w4", "g2") == pytest.approx(S2)
    assert eq1.amplitude("w3", "g1") == pytest.approx(S2)
    assert eq1.amplitude("w4", "g1") == 0


def test_make_pure_basis_and_scaling(qubit, photon_43):
    s = hb.make_pure([qubit], [1, 0])
    np.testing.assert_array_equal(s.amplitudes, [1, 0])
    s = hb.make_pure((photon_43, qubit), [2, 0, 0, 0])
    np.testing.assert_allclose(s.amplitudes, [1, 0, 0, 0])


def test_make_pure_errors(qubit):
    with pytest.raises(NormalizationError):
        hb.make_pure([qubit], [0, 0])
    with pytest.raises(DimensionError):
        hb.make_pure([qubit], [1, 0, 0])


def test_states_are_immutable(eq1):
    with pytest.raises(ValueError):
        eq1.amplitudes[0] = 1


def test_dimension_cap():
    big = hb.PhotonRegister("L", tuple(hb.FrequencyBin(f"w{i}", i + 1.0) for i in range(65)))
    atom = hb.AtomRegister("R", tuple(f"l{i}" for i in range(64)))
    with pytest.raises(DimensionError):
        hb.make_pure((big, atom), np.ones(65 * 64))


def test_tensor_photon_pair_with_atom(photon_pair):
    atom = hb.AtomRegister("R", ("g1", "g2"))
    joint = hb.tensor(photon_pair, hb.basis_state([atom], "g1"))
    assert joint.keys == ("photon:L", "photon:R", "atom:R")
    assert joint.amplitude("w4", "w2", "g1") == pytest.approx(S2)
    assert joint.amplitude("w3", "w1", "g1") == pytest.approx(S2)
    assert np.linalg.norm(joint.amplitudes) == pytest.approx(1.0, abs=1e-12)


def test_tensor_two_atoms_and_collision(qubit):
    other = hb.AtomRegister("L", ("g1", "g2"))
    s = hb.tensor(hb.basis_state([other], "g1"), hb.basis_state([qubit], "g1"))
    np.testing.assert_array_equal(s.amplitudes, [1, 0, 0, 0])
    with pytest.raises(RegisterError):
        hb.tensor(hb.basis_state([qubit], "g1"), hb.basis_state([qubit], "g2"))


def test_to_density(qubit, eq1):
    np.testing.assert_array_equal(hb.to_density(hb.basis_state([qubit], "g1")).matrix,
                                  np.diag([1, 0]))
    rho = hb.to_density(eq1).matrix
    # hand-written outer product: entries (1,1), (1,2), (2,1), (2,2) equal 1/2
    expected = np.zeros((4, 4))
    expected[np.ix_([1, 2], [1, 2])] = 0.5
    np.testing.assert_allclose(rho, expected, atol=1e-15)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)


def test_mix_examples(rng):
    from fbin_sim import states

    a = states.fig3a()
    assert a.eigenvalues()[0] >= -1e-10
    assert a.purity() < 1
    r = hb.to_density(states.bell_like())
    np.testing.assert_allclose(hb.mix([(1.0, r)]).matrix, r.matrix, atol=1e-15)


def test_mix_errors(qubit, photon_43, eq1):
    r = hb.to_density(hb.basis_state([qubit], "g1"))
    with pytest.raises(WeightError):
        hb.mix([(0.5, r), (0.4, r)])
    with pytest.raises(WeightError):
        hb.mix([(1.5, r), (-0.5, r)])
    with pytest.raises(RegisterError):
        hb.mix([(0.5, r), (0.5, eq1)])


def test_project_eq1_onto_w4(eq1):
    prob, post = hb.project(eq1, "photon:L", [1, 0])
    assert prob == pytest.approx(0.5, abs=1e-12)
    assert post.keys == ("atom:R",)
    assert hb.fidelity(post, hb.make_pure(post.registers, [0, 1])) == pytest.approx(1.0)
    prob_m, post_m = hb.project(hb.to_density(eq1), "photon:L", [1, 0])
    assert prob_m == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(post_m.matrix, np.diag([0, 1]), atol=1e-15)


def test_project_orthogonal_fails(qubit):
    with pytest.raises(HeraldFailure):
        hb.project(hb.to_density(hb.basis_state([qubit, hb.AtomRegister("L", ("g1", "g2"))],
                                                "g1", "g1")), "atom:R", [0, 1])


def test_project_requires_normalized_bra(eq1):
    with pytest.raises(NormalizationError):
        hb.project(eq1, "photon:L", [1, 1])


def test_project_completeness(rng):
    regs = (hb.PhotonRegister("L", (hb.FrequencyBin("a", 1.0), hb.FrequencyBin("b", 2.0),
                                    hb.FrequencyBin("c", 3.0))),
            hb.AtomRegister("R", ("g1", "g2")))
    rho = hb.DensityOperator(regs, random_rho(rng, 6))
    u, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    total = sum(hb.project(rho, "photon:L", u[k])[0] for k in range(3))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_partial_trace_eq1(eq1):
    red = hb.partial_trace(hb.to_density(eq1), "photon:L")
    np.testing.assert_allclose(red.matrix, np.diag([0.5, 0.5]), atol=1e-15)


def test_partial_trace_product(rng, qubit, photon_43):
    ra = random_rho(rng, 2)
    rb = random_rho(rng, 2)
    joint = hb.DensityOperator((photon_43, qubit), np.kron(ra, rb))
    np.testing.assert_allclose(hb.partial_trace(joint, qubit).matrix, ra, atol=1e-14)
    np.testing.assert_allclose(hb.partial_trace(joint, photon_43).matrix, rb, atol=1e-14)
    with pytest.raises(RegisterError):
        hb.partial_trace(joint, "atom:L")


def test_partial_trace_preserves_trace(rng):
    regs = (hb.AtomRegister("L", ("a", "b", "c")), hb.AtomRegister("R", ("g1", "g2")),
            hb.PhotonRegister("R", (hb.FrequencyBin("x", 1.0), hb.FrequencyBin("y", 2.0))))
    rho = hb.DensityOperator(regs, random_rho(rng, 12))
    for r in regs:
        assert np.trace(hb.partial_trace(rho, r).matrix).real == pytest.approx(1.0, abs=1e-12)
    # brute force reference for the middle register
    t = rho.matrix.reshape(3, 2, 2, 3, 2, 2)
    ref = np.einsum("aibcid->abcd", t).reshape(6, 6)
    np.testing.assert_allclose(hb.partial_trace(rho, "atom:R").matrix, ref, atol=1e-14)


def test_apply_operator_matches_kron(rng):
    regs = (hb.AtomRegister("L", ("g1", "g2")), hb.AtomRegister("R", ("g1", "g2", "e")))
    psi = hb.make_pure(regs, random_ket(rng, 6))
    u, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    out = hb.apply_operator(psi, "atom:R", u)
    np.testing.assert_allclose(out.amplitudes, np.kron(np.eye(2), u) @ psi.amplitudes, atol=1e-14)
    rho = hb.apply_operator(hb.to_density(psi), "atom:R", u)
    np.testing.assert_allclose(rho.matrix, np.outer(out.amplitudes, out.amplitudes.conj()),
                               atol=1e-14)


def test_reorder_roundtrip(rng):
    regs = (hb.AtomRegister("L", ("g1", "g2")), hb.AtomRegister("R", ("g1", "g2", "e")))
    psi = hb.make_pure(regs, random_ket(rng, 6))
    swapped = hb.reorder(psi, ["atom:R", "atom:L"])
    assert swapped.amplitude("e", "g2") == psi.amplitude("g2", "e")
    back = hb.reorder(hb.reorder(hb.to_density(psi), ["atom:R", "atom:L"]), ["atom:L", "atom:R"])
    np.testing.assert_allclose(back.matrix, hb.to_density(psi).matrix, atol=1e-15)


def test_schmidt_rank(eq1, qubit, photon_43):
    assert hb.schmidt_rank(eq1, "photon:L") == 2
    prod = hb.tensor(hb.make_pure([photon_43], [1, 1j]), hb.make_pure([qubit], [1, 2]))
    assert hb.schmidt_rank(prod, "photon:L") == 1


# -- invariants ----------------------------------------------------------------

phases = st.floats(min_value=-10, max_value=10, allow_nan=False)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=50, deadline=None)
@given(phi=phases, seed=seeds)
def test_global_phase_invariance(phi, seed):
    rng = np.random.default_rng(seed)
    regs = (hb.PhotonRegister("L", (hb.FrequencyBin("a", 1.0), hb.FrequencyBin("b", 2.0))),
            hb.AtomRegister("R", ("g1", "g2")))
    psi = random_ket(rng, 4)
    s1 = hb.make_pure(regs, psi)
    s2 = hb.make_pure(regs, np.exp(1j * phi) * psi)
    bra = random_ket(rng, 2)
    assert hb.project(s1, "photon:L", bra)[0] == pytest.approx(hb.project(s2, "photon:L", bra)[0],
                                                               abs=1e-12)
    p1, _ = hb.project(hb.to_density(s1), "atom:R", bra)
    p2, _ = hb.project(hb.to_density(s2), "atom:R", bra)
    assert p1 == pytest.approx(p2, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, n_bins=st.integers(1, 4), n_levels=st.integers(2, 4))
def test_pure_density_invariants(seed, n_bins, n_levels):
    rng = np.random.default_rng(seed)
    regs = (hb.PhotonRegister("L", tuple(hb.FrequencyBin(f"w{i}", i + 1.0) for i in range(n_bins))),
            hb.AtomRegister("R", tuple(f"l{i}" for i in range(n_levels))))
    rho = hb.to_density(hb.make_pure(regs, random_ket(rng, n_bins * n_levels)))
    m = rho.matrix
    assert np.max(np.abs(m - m.conj().T)) <= 1e-12
    assert abs(np.trace(m).real - 1) <= 1e-12
    assert np.linalg.eigvalsh(m)[0] >= -1e-10


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_project_and_partial_trace_commute(seed):
    rng = np.random.default_rng(seed)
    regs = (hb.AtomRegister("L", ("g1", "g2")), hb.AtomRegister("R", ("g1", "g2", "e")),
            hb.PhotonRegister("R", (hb.FrequencyBin("x", 1.0), hb.FrequencyBin("y", 2.0))))
    rho = hb.DensityOperator(regs, random_rho(rng, 12))
    bra = random_ket(rng, 2)
    p1, a = hb.project(rho, "photon:R", bra)
    a = hb.partial_trace(a, "atom:L")
    p2, b = hb.project(hb.partial_trace(rho, "atom:L"), "photon:R", bra)
    assert p1 == pytest.approx(p2, abs=1e-12)
    np.testing.assert_allclose(a.matrix, b.matrix, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_mix_flattening(seed):
    rng = np.random.default_rng(seed)
    regs = (hb.AtomRegister("R", ("g1", "g2", "e")),)
    rhos = [hb.DensityOperator(regs, random_rho(rng, 3)) for _ in range(3)]
    w = rng.dirichlet(np.ones(3))
    w = w / w.sum()
    inner = hb.mix([(w[0] / (w[0] + w[1]), rhos[0]), (w[1] / (w[0] + w[1]), rhos[1])])
    nested = hb.mix([(w[0] + w[1], inner), (w[2], rhos[2])])
    flat = hb.mix(list(zip(w, rhos)))
    np.testing.assert_allclose(nested.matrix, flat.matrix, atol=1e-12)
    assert flat.eigenvalues()[0] >= -1e-10


def test_fidelity_mixed_states(rng, qubit):
    a = hb.DensityOperator([qubit], np.diag([1.0, 0.0]))
    b = hb.DensityOperator([qubit], np.eye(2) / 2)
    assert hb.fidelity(a, b) == pytest.approx(0.5, abs=1e-12)
    # diagonal states: (sum sqrt(p q))^2
    c = hb.DensityOperator([qubit], np.diag([0.3, 0.7]))
    d = hb.DensityOperator([qubit], np.diag([0.6, 0.4]))
    ref = (np.sqrt(0.18) + np.sqrt(0.28)) ** 2
    assert hb.fidelity(c, d) == pytest.approx(ref, abs=1e-10)
    r = hb.DensityOperator([qubit], random_rho(rng, 2))
    assert hb.fidelity(r, r) == pytest.approx(1.0, abs=1e-10)
