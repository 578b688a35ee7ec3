"""Simulation and witnessing of frequency-bin atom-photon entanglement."""

from . import cavity, hilbert, noise, protocol, states, witness
from .errors import (
    DimensionError,
    FbinError,
    GridError,
    HeraldFailure,
    NormalizationError,
    ParameterError,
    ParseError,
    RegisterError,
    SingularityError,
    WeightError,
)
from .hilbert import (
    AtomRegister,
    DensityOperator,
    FrequencyBin,
    HybridState,
    PhotonRegister,
    make_pure,
    mix,
    partial_trace,
    project,
    tensor,
    to_density,
)

__version__ = "0.1.0"
