"""Builders for the three demo workflows.

Members default to fresh local models but any steering-interface handle
(including remote proxies) can be passed in instead.
"""

from __future__ import annotations

from ..workflow import Route, Template, Workflow
from .models import BucklingModel, MechanicalModel, MicroModel, PlyModel, ThermalModel
from .uq import UqStudy


def build_thermo_mech(members: dict | None = None) -> Workflow:
    """Sequential thermal -> mechanical chain exchanging the temperature field."""
    if members is None:
        members = {"thermal": ThermalModel(), "mechanical": MechanicalModel()}
    return Workflow(
        name="W_thermo_mech",
        members=members,
        routes=(Route("thermal", "FID_Temperature", "mechanical", "FID_Temperature"),),
        inputs={
            "PID_T0": ("thermal", "PID_T0"),
            "PID_T1": ("thermal", "PID_T1"),
            "PID_Length": ("thermal", "PID_Length"),
            "PID_Alpha": ("mechanical", "PID_Alpha"),
        },
        outputs={
            "PID_Elongation": ("mechanical", "PID_Elongation"),
            "FID_Temperature": ("thermal", "FID_Temperature"),
        },
        template=Template.SEQUENTIAL,
    )


def build_buckling_chain(members: dict | None = None) -> Workflow:
    """Sequential micro -> ply -> buckling chain (composites stack)."""
    if members is None:
        members = {"micro": MicroModel(), "ply": PlyModel(), "buckling": BucklingModel()}
    return Workflow(
        name="W_buckling_chain",
        members=members,
        routes=(
            Route("micro", "PID_LongitudinalModulus", "ply", "PID_LongitudinalModulus"),
            Route("micro", "PID_TransverseModulus", "ply", "PID_TransverseModulus"),
            Route("ply", "PID_EffectiveModulus", "buckling", "PID_EffectiveModulus"),
        ),
        inputs={
            "PID_VolumeFraction": ("micro", "PID_VolumeFraction"),
            "PID_FiberModulus": ("micro", "PID_FiberModulus"),
            "PID_MatrixModulus": ("micro", "PID_MatrixModulus"),
            "PID_LayerAngle": ("ply", "PID_LayerAngle"),
            "PID_LayerThickness": ("buckling", "PID_LayerThickness"),
            "PID_LayerCount": ("buckling", "PID_LayerCount"),
            "PID_MatrixPoisson": ("buckling", "PID_MatrixPoisson"),
            "PID_PanelLength": ("buckling", "PID_PanelLength"),
            "PID_PanelWidth": ("buckling", "PID_PanelWidth"),
        },
        outputs={"PID_BucklingLoad": ("buckling", "PID_BucklingLoad")},
        template=Template.SEQUENTIAL,
    )


def build_uq(members: dict | None = None, **kwargs) -> UqStudy:
    """The LHS/surrogate/sensitivity study over the composites chain."""
    return UqStudy(members=members, **kwargs)
