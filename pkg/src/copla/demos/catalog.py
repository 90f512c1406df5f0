"""Demo catalog: database records and runnable implementations.

``register_demo_catalog`` upserts the use case and its three workflows into a
store; the module also registers the matching implementations with the
scheduler, so a freshly scheduled demo execution is runnable as-is.
"""

from __future__ import annotations

from ..data import Property, TimeStep
from ..execdb import (
    PROPERTY,
    SCALAR,
    ExecDB,
    InputSlot,
    OutputSlot,
    UseCaseRecord,
    WorkflowRecord,
)
from ..scheduler import register_implementation
from ..store import DocumentStore
from .workflows import build_buckling_chain, build_thermo_mech, build_uq

USECASE_ID = "Airframe-toy"

THERMO_MECH_ID = "W_thermo_mech"
BUCKLING_CHAIN_ID = "W_buckling_chain"
UQ_ID = "W_uq"


def _req(name: str, unit: str) -> InputSlot:
    return InputSlot(name, PROPERTY, unit, required=True)


_WORKFLOWS = (
    WorkflowRecord(
        id=THERMO_MECH_ID,
        usecase_id=USECASE_ID,
        name="Thermo-mechanical bar",
        version=1,
        input_card_template=(
            _req("PID_T0", "K"),
            _req("PID_T1", "K"),
            _req("PID_Length", "m"),
            _req("PID_Alpha", "1/K"),
        ),
        output_card_template=(
            OutputSlot("PID_Elongation", PROPERTY, "m"),
            OutputSlot("FID_Temperature", "Field-ref", "K"),
        ),
        implementation_key="demo.thermo_mech",
    ),
    WorkflowRecord(
        id=BUCKLING_CHAIN_ID,
        usecase_id=USECASE_ID,
        name="Composite buckling chain",
        version=1,
        input_card_template=(
            _req("PID_VolumeFraction", "1"),
            _req("PID_FiberModulus", "Pa"),
            _req("PID_MatrixModulus", "Pa"),
            _req("PID_LayerAngle", "rad"),
            _req("PID_LayerThickness", "m"),
            _req("PID_LayerCount", "1"),
            _req("PID_MatrixPoisson", "1"),
            _req("PID_PanelLength", "m"),
            _req("PID_PanelWidth", "m"),
        ),
        output_card_template=(OutputSlot("PID_BucklingLoad", PROPERTY, "N"),),
        implementation_key="demo.buckling_chain",
    ),
    WorkflowRecord(
        id=UQ_ID,
        usecase_id=USECASE_ID,
        name="Buckling uncertainty study",
        version=1,
        input_card_template=(
            InputSlot("PID_SampleCount", SCALAR, "1", required=True, default="200"),
            InputSlot("PID_Seed", SCALAR, "1", required=True, default="42"),
            InputSlot("PID_Vf_Lo", PROPERTY, "1"),
            InputSlot("PID_Vf_Hi", PROPERTY, "1"),
            InputSlot("PID_MatrixModulus_Lo", PROPERTY, "Pa"),
            InputSlot("PID_MatrixModulus_Hi", PROPERTY, "Pa"),
            InputSlot("PID_MatrixPoisson_Lo", PROPERTY, "1"),
            InputSlot("PID_MatrixPoisson_Hi", PROPERTY, "1"),
            InputSlot("PID_LayerThickness_Lo", PROPERTY, "m"),
            InputSlot("PID_LayerThickness_Hi", PROPERTY, "m"),
            InputSlot("PID_LayerAngle_Lo", PROPERTY, "rad"),
            InputSlot("PID_LayerAngle_Hi", PROPERTY, "rad"),
        ),
        output_card_template=(
            OutputSlot("PID_Mean", PROPERTY, "N"),
            OutputSlot("PID_Std", PROPERTY, "N"),
            OutputSlot("PID_TrainR2", PROPERTY, "1"),
            OutputSlot("PID_Sobol", PROPERTY, "1"),
            OutputSlot("PID_HistogramEdges", PROPERTY, "N"),
            OutputSlot("PID_HistogramCounts", PROPERTY, "1"),
            OutputSlot("PID_Degenerate", PROPERTY, "1"),
        ),
        implementation_key="demo.uq",
    ),
)


def register_demo_catalog(store) -> None:
    """Upsert the demo use case and workflows; safe to call repeatedly."""
    db = store if isinstance(store, ExecDB) else ExecDB(DocumentStore(store) if isinstance(store, str) else store)
    db.put_usecase(
        UseCaseRecord(
            id=USECASE_ID,
            name="Airframe-toy",
            description="Desk-scale composite airframe design chains",
        )
    )
    for record in _WORKFLOWS:
        db.put_workflow(record)


# -- implementations -----------------------------------------------------------

def _run_chain(builder, needs: dict[str, str], inputs: dict, ctx, target_time=1.0):
    """Allocate members, build the workflow, push inputs, run, pull outputs."""
    members = {key: ctx.allocate(name) for key, name in needs.items()}
    w = builder(members)
    w.initialize()
    for name, value in inputs.items():
        if isinstance(value, (int, float)):
            slot = w.advertised_inputs()[name]
            value = Property(value=float(value), unit=slot.unit, property_id=name)
        w.set_data_component(value)
    ts = TimeStep(target_time, target_time, target_time, 1)
    w.solve_step(ts)
    w.finish_step(ts)
    return {
        name: w.get_data_component(name, target_time)
        for name in w.advertised_outputs()
    }


def run_thermo_mech(inputs: dict, ctx):
    return _run_chain(
        build_thermo_mech,
        {"thermal": "thermal", "mechanical": "mechanical"},
        inputs,
        ctx,
    )


def run_buckling_chain(inputs: dict, ctx):
    return _run_chain(
        build_buckling_chain,
        {"micro": "micro", "ply": "ply", "buckling": "buckling"},
        inputs,
        ctx,
    )


def run_uq(inputs: dict, ctx):
    return _run_chain(
        build_uq,
        {"micro": "micro", "ply": "ply", "buckling": "buckling"},
        inputs,
        ctx,
    )


register_implementation("demo.thermo_mech", run_thermo_mech)
register_implementation("demo.buckling_chain", run_buckling_chain)
register_implementation("demo.uq", run_uq)
