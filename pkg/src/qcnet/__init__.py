"""Quantum complex networks of harmonic oscillators on a multimode optical platform.

Submodules:
    netgraph: network generators, edge-list loading, coupling matrices.
    dynamics: normal modes, symplectic propagators, Gaussian states.
    blochmessiah: decomposition of propagators into interferometers and squeezers.
    optics: down-conversion supermodes, pump shaping, LO spectra.
    probing: spectral density and entropy probing protocols.
    cli: the ``qcnet`` command.
"""
from .blochmessiah import BlochMessiah, bloch_messiah, effective_evolution
from .dynamics import GaussianState, build_modes, evolve, ground_state, propagator, thermal_state
from .export import VERSION as __version__
from .netgraph import OscillatorNetwork, TopologySpec, generate, load_edge_list
from .optics import CrystalModel, FrequencyGrid, OptimizerConfig, optimize_pump
from .probing import ExperimentalMode, ProbeSpec, probe_spectral_density, reference_spectral_density

__all__ = [
    "__version__",
    "OscillatorNetwork",
    "TopologySpec",
    "generate",
    "load_edge_list",
    "build_modes",
    "propagator",
    "GaussianState",
    "evolve",
    "ground_state",
    "thermal_state",
    "BlochMessiah",
    "bloch_messiah",
    "effective_evolution",
    "CrystalModel",
    "FrequencyGrid",
    "OptimizerConfig",
    "optimize_pump",
    "ExperimentalMode",
    "ProbeSpec",
    "probe_spectral_density",
    "reference_spectral_density",
]
