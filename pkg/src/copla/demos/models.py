"""Desk-scale demo models implementing the steering interface.

The thermal/mechanical pair exercises field exchange in a sequential chain;
the micro/ply/buckling trio forms the composites chain; the relaxation model
is a tunable fixed-point fixture for loosely coupled runs.
"""

from __future__ import annotations

import json
import os

from ..data import Field, Property, TimeStep
from ..errors import DomainError
from ..mesh import uniform_interval_mesh
from ..model import Model
from ..units import unit
from .formulas import buckling_load, micro_homogenize, ply_modulus, thermal_elongation


def _prop(pid: str, value: float, symbol: str, time: float) -> Property:
    return Property(value=value, unit=unit(symbol), property_id=pid, time=time)


class ThermalModel(Model):
    """Steady 1D conduction on a bar with fixed end temperatures.

    The exact solution is linear, so the nodal values are the closed form
    T(x) = T0 + (T1 - T0) * x / L on a uniform mesh.
    """

    BASE_METADATA = {
        "Name": "ThermalBar",
        "ID": "demo.thermal",
        "Inputs": [
            {"id": "PID_T0", "kind": "Property", "unit": "K", "required": True},
            {"id": "PID_T1", "kind": "Property", "unit": "K", "required": True},
            {"id": "PID_Length", "kind": "Property", "unit": "m", "required": True},
        ],
        "Outputs": [{"id": "FID_Temperature", "kind": "Field", "unit": "K"}],
        "Solver": {"Name": "closed-form conduction", "CriticalTimeStep": 0.5},
    }

    def __init__(self, n_vertices: int = 11):
        super().__init__()
        self.n_vertices = int(n_vertices)

    def _solve(self, ts: TimeStep) -> dict:
        t0 = self._input_scalar("PID_T0")
        t1 = self._input_scalar("PID_T1")
        length = self._input_scalar("PID_Length")
        if length <= 0:
            raise DomainError(f"bar length must be positive, got {length}")
        mesh = uniform_interval_mesh(length, self.n_vertices)
        values = tuple((t0 + (t1 - t0) * v[0] / length,) for v in mesh.vertices)
        field = Field(
            mesh=mesh,
            field_id="FID_Temperature",
            unit=unit("K"),
            values=values,
            value_dim=1,
            time=ts.time,
        )
        if self.workdir:
            with open(os.path.join(self.workdir, "solution.json"), "w") as fh:
                json.dump({"t": ts.time, "T0": t0, "T1": t1, "L": length}, fh)
        return {"FID_Temperature": field}


class MechanicalModel(Model):
    """Thermal elongation of a bar: alpha times the integrated temperature."""

    BASE_METADATA = {
        "Name": "MechanicalBar",
        "ID": "demo.mechanical",
        "Inputs": [
            {"id": "FID_Temperature", "kind": "Field", "unit": "K", "required": True},
            {"id": "PID_Alpha", "kind": "Property", "unit": "1/K", "required": True},
        ],
        "Outputs": [{"id": "PID_Elongation", "kind": "Property", "unit": "m"}],
        "Solver": {"Name": "exact trapezoid", "CriticalTimeStep": 0.2},
    }

    def _solve(self, ts: TimeStep) -> dict:
        temperature = self._input_field("FID_Temperature")
        alpha = self._input_scalar("PID_Alpha")
        elongation = thermal_elongation(temperature, alpha)
        return {"PID_Elongation": _prop("PID_Elongation", elongation, "m", ts.time)}


class MicroModel(Model):
    """Fiber/matrix homogenization producing longitudinal/transverse moduli."""

    BASE_METADATA = {
        "Name": "MicroHomogenizer",
        "ID": "demo.micro",
        "Inputs": [
            {"id": "PID_VolumeFraction", "kind": "Property", "unit": "1", "required": True},
            {"id": "PID_FiberModulus", "kind": "Property", "unit": "Pa", "required": True},
            {"id": "PID_MatrixModulus", "kind": "Property", "unit": "Pa", "required": True},
        ],
        "Outputs": [
            {"id": "PID_LongitudinalModulus", "kind": "Property", "unit": "Pa"},
            {"id": "PID_TransverseModulus", "kind": "Property", "unit": "Pa"},
        ],
        "Solver": {"Name": "rule of mixtures", "CriticalTimeStep": 1.0},
    }

    def _solve(self, ts: TimeStep) -> dict:
        e_long, e_trans = micro_homogenize(
            self._input_scalar("PID_VolumeFraction"),
            self._input_scalar("PID_FiberModulus"),
            self._input_scalar("PID_MatrixModulus"),
        )
        return {
            "PID_LongitudinalModulus": _prop(
                "PID_LongitudinalModulus", e_long, "Pa", ts.time
            ),
            "PID_TransverseModulus": _prop(
                "PID_TransverseModulus", e_trans, "Pa", ts.time
            ),
        }


class PlyModel(Model):
    """Effective modulus of one ply at a given orientation angle."""

    BASE_METADATA = {
        "Name": "PlyRotator",
        "ID": "demo.ply",
        "Inputs": [
            {"id": "PID_LongitudinalModulus", "kind": "Property", "unit": "Pa", "required": True},
            {"id": "PID_TransverseModulus", "kind": "Property", "unit": "Pa", "required": True},
            {"id": "PID_LayerAngle", "kind": "Property", "unit": "rad", "required": True},
        ],
        "Outputs": [{"id": "PID_EffectiveModulus", "kind": "Property", "unit": "Pa"}],
        "Solver": {"Name": "quartic trig", "CriticalTimeStep": 1.0},
    }

    def _solve(self, ts: TimeStep) -> dict:
        effective = ply_modulus(
            self._input_scalar("PID_LongitudinalModulus"),
            self._input_scalar("PID_TransverseModulus"),
            self._input_scalar("PID_LayerAngle"),
        )
        return {
            "PID_EffectiveModulus": _prop("PID_EffectiveModulus", effective, "Pa", ts.time)
        }


class BucklingModel(Model):
    """Euler buckling load of a symmetric uniform layup strip."""

    BASE_METADATA = {
        "Name": "BucklingPanel",
        "ID": "demo.buckling",
        "Inputs": [
            {"id": "PID_EffectiveModulus", "kind": "Property", "unit": "Pa", "required": True},
            {"id": "PID_LayerThickness", "kind": "Property", "unit": "m", "required": True},
            {"id": "PID_LayerCount", "kind": "Property", "unit": "1", "required": True},
            {"id": "PID_MatrixPoisson", "kind": "Property", "unit": "1", "required": True},
            {"id": "PID_PanelLength", "kind": "Property", "unit": "m", "required": True},
            {"id": "PID_PanelWidth", "kind": "Property", "unit": "m", "required": True},
        ],
        "Outputs": [{"id": "PID_BucklingLoad", "kind": "Property", "unit": "N"}],
        "Solver": {"Name": "classical lamination", "CriticalTimeStep": 1.0},
    }

    def _solve(self, ts: TimeStep) -> dict:
        modulus = self._input_scalar("PID_EffectiveModulus")
        thickness = self._input_scalar("PID_LayerThickness")
        count = self._input_scalar("PID_LayerCount")
        poisson = self._input_scalar("PID_MatrixPoisson")
        length = self._input_scalar("PID_PanelLength")
        width = self._input_scalar("PID_PanelWidth")
        n = int(round(count))
        if n < 1 or abs(count - n) > 1e-9:
            raise DomainError(f"layer count must be a positive integer, got {count}")
        if not -1.0 < poisson < 1.0:
            raise DomainError(f"Poisson ratio must lie in (-1, 1), got {poisson}")
        layup = [(modulus, thickness, 0.0)] * n
        load = buckling_load(layup, length, width) / (1.0 - poisson**2)
        return {"PID_BucklingLoad": _prop("PID_BucklingLoad", load, "N", ts.time)}


class RelaxationModel(Model):
    """Fixed-point fixture: output = gain * drive + offset.

    The drive input is optional and defaults to zero, so the first sweep of a
    loosely coupled loop can run before any partner data arrives.
    """

    BASE_METADATA = {
        "Name": "Relaxation",
        "ID": "demo.relaxation",
        "Inputs": [
            {"id": "PID_Drive", "kind": "Property", "unit": "1", "required": False},
        ],
        "Outputs": [{"id": "PID_State", "kind": "Property", "unit": "1"}],
        "Solver": {"Name": "affine map", "CriticalTimeStep": 1.0},
    }

    def __init__(self, gain: float = 0.5, offset: float = 0.5):
        super().__init__()
        self.gain = float(gain)
        self.offset = float(offset)

    def _solve(self, ts: TimeStep) -> dict:
        drive = self._input_scalar("PID_Drive", default=0.0)
        state = self.gain * drive + self.offset
        return {"PID_State": _prop("PID_State", state, "1", ts.time)}


def make_thermal() -> ThermalModel:
    return ThermalModel()


def make_mechanical() -> MechanicalModel:
    return MechanicalModel()


def make_micro() -> MicroModel:
    return MicroModel()


def make_ply() -> PlyModel:
    return PlyModel()


def make_buckling() -> BucklingModel:
    return BucklingModel()


#: Factory specs ("module:callable") resolvable in a freshly spawned process.
MODEL_FACTORIES: dict[str, str] = {
    "thermal": "copla.demos.models:make_thermal",
    "mechanical": "copla.demos.models:make_mechanical",
    "micro": "copla.demos.models:make_micro",
    "ply": "copla.demos.models:make_ply",
    "buckling": "copla.demos.models:make_buckling",
}

#: The same catalog as in-process callables, for schedulers without job managers.
LOCAL_FACTORIES = {
    "thermal": make_thermal,
    "mechanical": make_mechanical,
    "micro": make_micro,
    "ply": make_ply,
    "buckling": make_buckling,
}


def create_model(name: str) -> Model:
    """Instantiate a demo model by short name, for in-process use."""
    try:
        factory = LOCAL_FACTORIES[name]
    except KeyError:
        raise KeyError(f"unknown demo model {name!r}") from None
    return factory()
