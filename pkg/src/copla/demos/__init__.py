"""Desk-scale demo models, workflows and the UQ pipeline."""

from .formulas import buckling_load, micro_homogenize, ply_modulus, thermal_elongation
from .models import (
    LOCAL_FACTORIES,
    MODEL_FACTORIES,
    BucklingModel,
    MechanicalModel,
    MicroModel,
    PlyModel,
    RelaxationModel,
    ThermalModel,
    create_model,
)
from .uq import (
    DEMO_CONSTANTS,
    DEMO_UNCERTAIN,
    InputGroup,
    SobolIndices,
    Surrogate,
    UncertainInput,
    UqStudy,
    fit_surrogate,
    lhs_sample,
    sobol_indices,
    total_degree_exponents,
)
from .workflows import build_buckling_chain, build_thermo_mech, build_uq
from .catalog import USECASE_ID, register_demo_catalog

__all__ = [
    "LOCAL_FACTORIES",
    "MODEL_FACTORIES",
    "BucklingModel",
    "MechanicalModel",
    "MicroModel",
    "PlyModel",
    "RelaxationModel",
    "ThermalModel",
    "create_model",
    "DEMO_CONSTANTS",
    "DEMO_UNCERTAIN",
    "InputGroup",
    "SobolIndices",
    "Surrogate",
    "UncertainInput",
    "UqStudy",
    "fit_surrogate",
    "lhs_sample",
    "sobol_indices",
    "total_degree_exponents",
    "buckling_load",
    "micro_homogenize",
    "ply_modulus",
    "thermal_elongation",
    "build_buckling_chain",
    "build_thermo_mech",
    "build_uq",
    "USECASE_ID",
    "register_demo_catalog",
]
