"""Contract conformance for every steering-interface implementer.

The same :class:`~tests.contract.ModelContract` assertions run over the two
demo models, the three demo workflows, and a remote proxy of each — ten cases,
one pass matrix.
"""

import math

import pytest

from copla.data import Field, Property
from copla.demos.models import MechanicalModel, ThermalModel
from copla.demos.workflows import build_buckling_chain, build_thermo_mech, build_uq
from copla.mesh import uniform_interval_mesh
from copla.rpc import ObjectServer, proxy
from copla.units import unit

from contract import ContractCase, ModelContract


def prop(pid, value, symbol):
    return Property(value=value, unit=unit(symbol), property_id=pid)


def linear_temperature_field(t0=0.0, t1=10.0, length=1.0, n=11):
    mesh = uniform_interval_mesh(length, n)
    values = tuple((t0 + (t1 - t0) * v[0] / length,) for v in mesh.vertices)
    return Field(mesh, "FID_Temperature", unit("K"), values)


def thermal_inputs():
    return [prop("PID_T0", 0.0, "K"), prop("PID_T1", 10.0, "K"), prop("PID_Length", 1.0, "m")]


def mechanical_inputs():
    return [linear_temperature_field(), prop("PID_Alpha", 1.0e-5, "1/K")]


def thermo_mech_inputs():
    return thermal_inputs() + [prop("PID_Alpha", 1.0e-5, "1/K")]


def buckling_inputs():
    return [
        prop("PID_VolumeFraction", 0.5, "1"),
        prop("PID_FiberModulus", 10.0, "Pa"),
        prop("PID_MatrixModulus", 2.0, "Pa"),
        prop("PID_LayerAngle", 0.0, "rad"),
        prop("PID_LayerThickness", 1.0, "m"),
        prop("PID_LayerCount", 1.0, "1"),
        prop("PID_MatrixPoisson", 0.0, "1"),
        prop("PID_PanelLength", math.pi, "m"),
        prop("PID_PanelWidth", 1.0, "m"),
    ]


def uq_inputs():
    return [prop("PID_SampleCount", 60.0, "1"), prop("PID_Seed", 7.0, "1")]


def check_thermal(outs):
    field = outs["FID_Temperature"]
    n = len(field.values)
    for i, row in enumerate(field.values):
        assert abs(row[0] - 10.0 * i / (n - 1)) <= 1e-12


def check_mechanical(outs):
    assert abs(outs["PID_Elongation"].value - 5.0e-5) <= 1e-15 * 5.0e-5


def check_thermo_mech(outs):
    check_mechanical(outs)


def check_buckling(outs):
    # single layer E_L=6, t=1, b=1, L=pi: P_cr = pi^2*(6/12)/pi^2 = 0.5
    assert abs(outs["PID_BucklingLoad"].value - 0.5) <= 1e-12


def check_uq(outs):
    assert outs["PID_TrainR2"].value >= 0.99
    assert outs["PID_Degenerate"].value == 0.0
    assert outs["PID_Std"].value > 0.0


UQ_OUTPUTS = (
    "PID_Mean",
    "PID_Std",
    "PID_TrainR2",
    "PID_Sobol",
    "PID_HistogramEdges",
    "PID_HistogramCounts",
    "PID_Degenerate",
)

_LOCAL = {
    "thermal": dict(
        make=lambda: (ThermalModel(), None),
        inputs=thermal_inputs,
        output_ids=("FID_Temperature",),
        critical_dt=0.5,
        required_names=("PID_T0", "PID_T1", "PID_Length"),
        check_outputs=check_thermal,
    ),
    "mechanical": dict(
        make=lambda: (MechanicalModel(), None),
        inputs=mechanical_inputs,
        output_ids=("PID_Elongation",),
        critical_dt=0.2,
        required_names=("FID_Temperature", "PID_Alpha"),
        check_outputs=check_mechanical,
    ),
    "thermo_mech": dict(
        make=lambda: (build_thermo_mech(), None),
        inputs=thermo_mech_inputs,
        output_ids=("PID_Elongation", "FID_Temperature"),
        critical_dt=0.2,
        required_names=("PID_T0", "PID_T1", "PID_Length", "PID_Alpha"),
        check_outputs=check_thermo_mech,
    ),
    "buckling_chain": dict(
        make=lambda: (build_buckling_chain(), None),
        inputs=buckling_inputs,
        output_ids=("PID_BucklingLoad",),
        critical_dt=1.0,
        required_names=("PID_VolumeFraction", "PID_PanelLength"),
        check_outputs=check_buckling,
    ),
    "uq_study": dict(
        make=lambda: (build_uq(), None),
        inputs=uq_inputs,
        output_ids=UQ_OUTPUTS,
        critical_dt=1.0,
        required_names=("PID_SampleCount", "PID_Seed"),
        check_outputs=check_uq,
    ),
}


def _remote_make(local_make):
    def make():
        obj, _ = local_make()
        server = ObjectServer()
        ref = server.serve(obj, "model")
        p = proxy(ref)

        def cleanup():
            p.close()
            server.close()

        return p, cleanup

    return make


def _cases():
    cases = {}
    for name, spec in _LOCAL.items():
        cases[name] = ContractCase(name=name, **spec)
        remote_spec = dict(spec, make=_remote_make(spec["make"]))
        cases[f"{name}@remote"] = ContractCase(name=f"{name}@remote", **remote_spec)
    return cases


CASES = _cases()


class TestModelContract(ModelContract):
    @pytest.fixture(params=sorted(CASES))
    def case(self, request):
        return CASES[request.param]
