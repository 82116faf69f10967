"""Rigid-sphere microphone array encoding to ACN/N3D higher-order ambisonics."""

__version__ = "0.1.0"

from .encoder import (
    AmbisonicBlock,
    ArrayGeometry,
    MicBlock,
    ShMatrix,
    acn_index,
    acn_inverse,
    build_sh_matrix,
    encode_frequency_domain,
    encode_time_domain,
)
from .errors import ConditioningError, ConfigError, DomainError, GeometryError, HoaError, WavFormatError
from .estimators import AmbisonicEncoder, BinauralRenderer, RigidSpherePlaneWave
from .radial import RadialConfig, RadialFilterBank, design_fir_bank, inverse_radial_regularized
from .renderer import BinauralOutput, HrtfShSet, constant_hrtf, render, truncate_order
from .simulator import PlaneWaveSource, surface_pressure

__all__ = [
    "AmbisonicBlock", "AmbisonicEncoder", "ArrayGeometry", "BinauralOutput", "BinauralRenderer",
    "ConditioningError", "ConfigError", "DomainError", "GeometryError", "HoaError", "HrtfShSet", "MicBlock",
    "PlaneWaveSource", "RadialConfig", "RadialFilterBank", "RigidSpherePlaneWave", "ShMatrix", "WavFormatError",
    "acn_index", "acn_inverse", "build_sh_matrix", "constant_hrtf", "design_fir_bank", "encode_frequency_domain",
    "encode_time_domain", "inverse_radial_regularized", "render", "surface_pressure", "truncate_order",
]
