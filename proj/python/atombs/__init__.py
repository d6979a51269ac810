"""Two photons scattering on a two-level atom in a waveguide."""

from ._atombs import (
    NumericalError,
    Pulse,
    PulseKind,
    ScatterParams,
    __version__,
    amplitude,
    linear,
    moments,
    oracles,
    run_config,
)

__all__ = [
    "NumericalError",
    "Pulse",
    "PulseKind",
    "ScatterParams",
    "__version__",
    "amplitude",
    "linear",
    "moments",
    "oracles",
    "run_config",
]
