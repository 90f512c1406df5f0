"""Workflows: models composed of models, with two coupling drivers.

A workflow owns an ordered set of member handles (local models, proxies or
nested workflows), a routing table moving components between them, and
exposed input/output names.  It implements the full steering interface, so
workflows nest inside workflows without special cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .data import TimeStep
from .errors import InvalidState, NoConvergence, UnknownComponentId
from .model import Model, ModelStatus, component_id, with_identity


class Template(Enum):
    SEQUENTIAL = "Sequential"
    LOOSELY_COUPLED = "LooselyCoupled"


@dataclass(frozen=True)
class Route:
    """Move one component from a member's output to another member's input."""

    source: str
    source_id: str
    target: str
    target_id: str


def closing_step(t: float, target: float) -> float:
    """Largest-final-step dt with float(t + dt) == target, when one exists."""
    d = target - t
    for _ in range(8):
        s = t + d
        if s == target or d <= 0.0:
            break
        d = math.nextafter(d, -math.inf if s > target else math.inf)
    return d


class Workflow(Model):
    """Sequential or loosely coupled composition of steering-interface members."""

    def __init__(
        self,
        name: str,
        members: dict[str, object],
        routes: tuple[Route, ...] | list[Route] = (),
        inputs: dict[str, tuple[str, str]] | None = None,
        outputs: dict[str, tuple[str, str]] | None = None,
        template: Template = Template.SEQUENTIAL,
        monitored: tuple[tuple[str, str], ...] = (),
        max_sweeps: int = 50,
        sweep_tol: float = 1e-8,
    ):
        super().__init__()
        if not members:
            raise ValueError("a workflow needs at least one member")
        self.members = dict(members)
        self.routes = tuple(routes)
        self.exposed_inputs = dict(inputs or {})
        self.exposed_outputs = dict(outputs or {})
        self.template = template
        self.monitored = tuple(monitored)
        self.max_sweeps = int(max_sweeps)
        self.sweep_tol = float(sweep_tol)
        for route in self.routes:
            if route.source not in self.members or route.target not in self.members:
                raise ValueError(f"route {route} references unknown members")
        for mapping in (self.exposed_inputs, self.exposed_outputs):
            for ext, (member, _) in mapping.items():
                if member not in self.members:
                    raise ValueError(f"exposed name {ext!r} targets unknown member")
        if template is Template.LOOSELY_COUPLED and not self.monitored:
            raise ValueError("loosely coupled workflows need monitored components")
        for member, _ in self.monitored:
            if member not in self.members:
                raise ValueError("monitored component references unknown member")
        self._metadata = self._build_metadata(name)
        self._wf_time = 0.0
        self._wf_step_number = 1
        self._executed_dts: list[float] = []
        self._route_cache: dict[tuple[str, str], object] = {}
        self._sweep_residuals: list[float] = []

    def _build_metadata(self, name: str):
        from .metadata import Metadata

        inputs, outputs = [], []
        for ext, (member, cid) in self.exposed_inputs.items():
            slot = self._member_slot(member, cid, "Inputs")
            inputs.append(
                {
                    "id": ext,
                    "kind": slot.get("kind", "Property"),
                    "unit": slot.get("unit", "1"),
                    "required": bool(slot.get("required", False)),
                }
            )
        for ext, (member, cid) in self.exposed_outputs.items():
            slot = self._member_slot(member, cid, "Outputs")
            outputs.append(
                {
                    "id": ext,
                    "kind": slot.get("kind", "Property"),
                    "unit": slot.get("unit", "1"),
                }
            )
        return Metadata(
            {
                "Name": name,
                "ID": name,
                "Inputs": inputs,
                "Outputs": outputs,
                "Solver": {"CriticalTimeStep": 1.0},
                "Template": self.template.value,
            }
        )

    def _member_slot(self, member: str, cid: str, section: str) -> dict:
        for entry in self.members[member].get_metadata().get(section, []):
            if entry.get("id") == cid:
                return entry
        raise ValueError(
            f"member {member!r} does not advertise {cid!r} in {section}"
        )

    # -- steering interface ---------------------------------------------------

    def initialize(self, workdir=None, input_file=None, metadata=None):
        super().initialize(workdir, input_file, metadata)
        for member in self.members.values():
            if member.get_status() is None:
                member.initialize()

    def get_critical_time_step(self) -> float:
        return min(m.get_critical_time_step() for m in self.members.values())

    def set_data_component(self, c):
        self._require_initialized()
        cid = component_id(c)
        target = self.exposed_inputs.get(cid)
        if target is None:
            raise UnknownComponentId(f"{cid!r} is not an exposed input")
        member, member_id = target
        self.members[member].set_data_component(with_identity(c, member_id, c.time))
        with self._lock:
            self._inputs[cid] = c  # marks the slot set for the required check

    def get_data_component(self, cid: str, time: float):
        self._require_initialized()
        if self._status is ModelStatus.RUNNING:
            raise InvalidState("cannot fetch outputs while the workflow is running")
        target = self.exposed_outputs.get(cid)
        if target is None:
            raise UnknownComponentId(f"{cid!r} is not an exposed output")
        member, member_id = target
        inner = self.members[member].get_data_component(member_id, time)
        return with_identity(inner, cid, float(time))

    # -- driver ----------------------------------------------------------------

    def _solve(self, ts: TimeStep) -> dict:
        target = ts.target_time
        if target < self._wf_time - 1e-12:
            raise InvalidState(
                f"workflow already at t={self._wf_time}, cannot go back to {target}"
            )
        while self._wf_time < target:
            crit = self.get_critical_time_step()
            remaining = target - self._wf_time
            if crit >= remaining:
                dt = closing_step(self._wf_time, target)
                if dt <= 0.0:
                    self._wf_time = target
                    break
                step_time = target
            else:
                dt = crit
                step_time = self._wf_time + dt
            sub = TimeStep(step_time, dt, target, self._wf_step_number)
            if self.template is Template.SEQUENTIAL:
                self._sweep(sub, finish_each=True)
            else:
                self._iterate(sub)
                for member in self.members.values():
                    member.finish_step(sub)
            self._executed_dts.append(dt)
            self._wf_time = step_time
            self._wf_step_number += 1
        outputs = {}
        for ext, (member, member_id) in self.exposed_outputs.items():
            inner = self.members[member].get_data_component(member_id, self._wf_time)
            outputs[ext] = with_identity(inner, ext, self._wf_time)
        return outputs

    def _sweep(self, ts: TimeStep, finish_each: bool):
        """One in-order pass: push routes, solve, pull fresh outputs."""
        for name, member in self.members.items():
            for route in self.routes:
                if route.target != name:
                    continue
                cached = self._route_cache.get((route.source, route.source_id))
                if cached is not None:
                    member.set_data_component(
                        with_identity(cached, route.target_id, ts.time)
                    )
            member.solve_step(ts)
            for route in self.routes:
                if route.source == name:
                    self._route_cache[(name, route.source_id)] = (
                        member.get_data_component(route.source_id, ts.time)
                    )
            if finish_each:
                member.finish_step(ts)

    def _iterate(self, ts: TimeStep):
        """Fixed-point sweeps until monitored components stop moving."""
        self._sweep_residuals = []
        previous: dict | None = None
        for _ in range(self.max_sweeps):
            self._sweep(ts, finish_each=False)
            current = {
                (member, cid): self.members[member]
                .get_data_component(cid, ts.time)
                .scalar()
                for member, cid in self.monitored
            }
            if previous is None:
                residual = math.inf
            else:
                residual = max(
                    abs(current[key] - previous[key])
                    / max(abs(current[key]), abs(previous[key]), 1e-300)
                    for key in current
                )
            self._sweep_residuals.append(residual)
            if residual <= self.sweep_tol:
                return
            previous = current
        raise NoConvergence(
            f"monitored components still moving after {self.max_sweeps} sweeps"
        )

    # -- introspection for drivers and tests -----------------------------------

    def executed_steps(self) -> tuple[float, ...]:
        return tuple(self._executed_dts)

    def sweep_residuals(self) -> tuple[float, ...]:
        return tuple(self._sweep_residuals)

    @property
    def current_time(self) -> float:
        return self._wf_time


def run_sequential(w: Workflow, target_time: float):
    """Drive a sequential workflow from its current time to ``target_time``."""
    if w.template is not Template.SEQUENTIAL:
        raise InvalidState("workflow template is not Sequential")
    _drive(w, target_time)


def run_loosely_coupled(
    w: Workflow, target_time: float, max_iters: int | None = None, tol: float | None = None
):
    """Drive a loosely coupled workflow, iterating each step to convergence."""
    if w.template is not Template.LOOSELY_COUPLED:
        raise InvalidState("workflow template is not LooselyCoupled")
    if max_iters is not None:
        w.max_sweeps = int(max_iters)
    if tol is not None:
        w.sweep_tol = float(tol)
    _drive(w, target_time)


def _drive(w: Workflow, target_time: float):
    target_time = float(target_time)
    if not target_time > w.current_time:
        raise InvalidState(f"target_time must exceed current time {w.current_time}")
    span = target_time - w.current_time
    ts = TimeStep(target_time, span, target_time, w._wf_step_number)
    w.solve_step(ts)
    w.finish_step(ts)
