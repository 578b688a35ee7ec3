import numpy as np
import pytest

from fbin_sim import hilbert as hb
from fbin_sim import states


@pytest.fixture
def qubit():
    return hb.AtomRegister("R", ("g1", "g2"))


@pytest.fixture
def photon_43():
    return hb.PhotonRegister("L", (hb.FrequencyBin("w4", 4.0), hb.FrequencyBin("w3", 3.0)))


@pytest.fixture
def eq1(photon_43, qubit):
    s2 = 1 / np.sqrt(2)
    return hb.make_pure((photon_43, qubit), [0, s2, s2, 0])


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def photon_pair():
    return states.photon_pair()


def random_ket(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_rho(rng, n, rank=None):
    rank = rank or n
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    m = a @ a.conj().T
    return m / np.trace(m).real


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    lines = test_acceptance.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
