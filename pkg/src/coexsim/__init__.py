"""Simulator for spectrum sharing between a MIMO radar and a MIMO base station.

Modules
-------
geometry      array configurations, spatial signatures, steering vectors
waveform      orthogonal waveforms, coherence matrices, projection
channel       radar-to-BS interference channel
nulling       eigen and spatial null projectors, MVDR weights
beampattern   composite transmit-receive pattern
detection     GLRT statistics, analytic and simulated P_d
scenario      scenario model, presets and TOML files
harness       experiment drivers and CSV/report output
"""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .errors import CoexsimError, InvalidInputError, NumericError  # noqa: E402

__all__ = ["BACKEND", "CoexsimError", "InvalidInputError", "NumericError", "__version__"]
