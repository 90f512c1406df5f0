"""LHS sampling, polynomial surrogate and first-order sensitivity pipeline.

The study runs the micro/ply/buckling chain once per Latin hypercube sample,
fits a degree-3 polynomial surrogate to the buckling load and estimates
first-order Sobol indices on that surrogate with a pick-freeze scheme.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from math import comb

import numpy as np

from ..data import Property, TimeStep, ValueType
from ..errors import DomainError, RankDeficient
from ..metadata import Metadata
from ..model import Model
from ..units import unit
from .models import BucklingModel, MicroModel, PlyModel


class InputGroup(Enum):
    MICRO_MATERIAL = "MicroMaterial"
    LAYER_THICKNESS = "LayerThickness"
    LAYER_ANGLE = "LayerAngle"


@dataclass(frozen=True)
class UncertainInput:
    """Uniformly distributed study input. lo == hi collapses it to a point."""

    name: str
    lo: float
    hi: float
    group: InputGroup
    unit_symbol: str = "1"

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise DomainError(f"{self.name}: lo={self.lo} exceeds hi={self.hi}")

    def sample(self, u):
        """Map uniform [0,1) draws onto [lo, hi)."""
        return self.lo + (self.hi - self.lo) * np.asarray(u, dtype=float)


def lhs_sample(d: int, n: int, seed: int) -> np.ndarray:
    """N x d Latin hypercube in [0,1): one sample per stratum per column."""
    if d < 1 or n < 1:
        raise DomainError(f"need d, N >= 1, got d={d}, N={n}")
    rng = np.random.default_rng(seed)
    cols = [(rng.permutation(n) + rng.random(n)) / n for _ in range(d)]
    return np.column_stack(cols)


def total_degree_exponents(d: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All monomial exponent tuples with total degree <= degree, intercept first."""
    exps = [
        e
        for e in itertools.product(range(degree + 1), repeat=d)
        if sum(e) <= degree
    ]
    exps.sort(key=lambda e: (sum(e), e))
    return tuple(exps)


@dataclass(frozen=True)
class Surrogate:
    """Dense total-degree polynomial over inputs scaled to [-1,1] per column."""

    degree: int
    exponents: tuple[tuple[int, ...], ...]
    coefficients: tuple[float, ...]
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    r2: float

    def _scaled(self, X: np.ndarray) -> np.ndarray:
        lo = np.asarray(self.lo)
        span = np.asarray(self.hi) - lo
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, 2.0 * (X - lo) / safe - 1.0, 0.0)

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        A = _design_matrix(self._scaled(X), self.exponents)
        return A @ np.asarray(self.coefficients)


def _design_matrix(Xs: np.ndarray, exponents) -> np.ndarray:
    A = np.empty((Xs.shape[0], len(exponents)))
    for j, exps in enumerate(exponents):
        col = np.ones(Xs.shape[0])
        for k, e in enumerate(exps):
            if e:
                col = col * Xs[:, k] ** e
        A[:, j] = col
    return A


def fit_surrogate(X, y, degree: int = 3) -> Surrogate:
    """Least-squares polynomial fit with honest training R^2."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    p = comb(d + degree, degree)
    if n < p:
        raise RankDeficient(
            f"degree {degree} in {d} dims needs {p} samples, got {n}"
        )
    lo, hi = X.min(axis=0), X.max(axis=0)
    exponents = total_degree_exponents(d, degree)
    proto = Surrogate(degree, exponents, (0.0,) * p, tuple(lo), tuple(hi), 0.0)
    A = _design_matrix(proto._scaled(X), exponents)
    coeffs, _, rank, _ = np.linalg.lstsq(A, y, rcond=1e-10)
    if rank < p:
        raise RankDeficient(
            f"design matrix rank {rank} < {p} coefficients; "
            "inputs are collinear or a column is constant"
        )
    resid = y - A @ coeffs
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-20 * n * max(1.0, y.mean() ** 2) else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return Surrogate(degree, exponents, tuple(float(c) for c in coeffs),
                     tuple(lo), tuple(hi), r2)


@dataclass(frozen=True)
class SobolIndices:
    """First-order indices per input, with the estimator's variance."""

    values: tuple[float, ...]
    variance: float
    degenerate: bool

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def sobol_indices(s: Surrogate, dists, m: int, seed: int = 0) -> SobolIndices:
    """Pick-freeze first-order Sobol estimates of ``s`` under ``dists``."""
    dists = tuple(dists)
    if m < 2:
        raise DomainError(f"need at least 2 samples, got {m}")
    rng = np.random.default_rng(seed)
    A = np.column_stack([inp.sample(rng.random(m)) for inp in dists])
    B = np.column_stack([inp.sample(rng.random(m)) for inp in dists])
    f_a, f_b = s.predict(A), s.predict(B)
    pooled = np.concatenate([f_a, f_b])
    variance = float(pooled.var())
    # zero output variance leaves the indices undefined; report zeros, flagged
    if variance <= 1e-14 * max(1.0, float(pooled.mean()) ** 2):
        return SobolIndices((0.0,) * len(dists), variance, True)
    values = []
    for i in range(len(dists)):
        ab_i = A.copy()
        ab_i[:, i] = B[:, i]
        values.append(float(np.mean(f_b * (s.predict(ab_i) - f_a)) / variance))
    return SobolIndices(tuple(values), variance, False)


#: Demo study configuration: five live inputs feeding the toy chain.
DEMO_UNCERTAIN = (
    UncertainInput("Vf", 0.45, 0.65, InputGroup.MICRO_MATERIAL, "1"),
    UncertainInput("MatrixModulus", 2.0e9, 5.0e9, InputGroup.MICRO_MATERIAL, "Pa"),
    UncertainInput("MatrixPoisson", 0.25, 0.45, InputGroup.MICRO_MATERIAL, "1"),
    UncertainInput("LayerThickness", 1.2e-4, 1.3e-4, InputGroup.LAYER_THICKNESS, "m"),
    UncertainInput("LayerAngle", -0.05, 0.05, InputGroup.LAYER_ANGLE, "rad"),
)

DEMO_CONSTANTS = {
    "fiber_modulus": 40e9,
    "layer_count": 8,
    "panel_length": 0.5,
    "panel_width": 0.05,
}


class UqStudy(Model):
    """Study driver: sample the chain, fit the surrogate, rank sensitivities.

    Members hold the three chain models; they may be local instances or
    remote proxies, the driver only talks through the steering interface.
    """

    def __init__(
        self,
        members: dict | None = None,
        uncertain: tuple[UncertainInput, ...] = DEMO_UNCERTAIN,
        constants: dict | None = None,
        name: str = "W_uq",
        sobol_samples: int = 100_000,
        bins: int = 20,
    ):
        super().__init__()
        if members is None:
            members = {"micro": MicroModel(), "ply": PlyModel(), "buckling": BucklingModel()}
        missing = {"micro", "ply", "buckling"} - set(members)
        if missing:
            raise ValueError(f"study needs members {sorted(missing)}")
        self.members = dict(members)
        self.uncertain = tuple(uncertain)
        self.constants = dict(DEMO_CONSTANTS, **(constants or {}))
        self.sobol_samples = int(sobol_samples)
        self.bins = int(bins)
        self._bounds = {inp.name: (inp.lo, inp.hi) for inp in self.uncertain}
        self._surrogate: Surrogate | None = None
        self._metadata = Metadata(self._card(name))

    def _card(self, name: str) -> dict:
        inputs = [
            {"id": "PID_SampleCount", "kind": "Property", "unit": "1", "required": True},
            {"id": "PID_Seed", "kind": "Property", "unit": "1", "required": True},
        ]
        for inp in self.uncertain:
            for side in ("Lo", "Hi"):
                inputs.append(
                    {
                        "id": f"PID_{inp.name}_{side}",
                        "kind": "Property",
                        "unit": inp.unit_symbol,
                        "required": False,
                    }
                )
        outputs = [
            {"id": "PID_Mean", "kind": "Property", "unit": "N"},
            {"id": "PID_Std", "kind": "Property", "unit": "N"},
            {"id": "PID_TrainR2", "kind": "Property", "unit": "1"},
            {"id": "PID_Sobol", "kind": "Property", "unit": "1"},
            {"id": "PID_HistogramEdges", "kind": "Property", "unit": "N"},
            {"id": "PID_HistogramCounts", "kind": "Property", "unit": "1"},
            {"id": "PID_Degenerate", "kind": "Property", "unit": "1"},
        ]
        return {
            "Name": name,
            "ID": name,
            "Inputs": inputs,
            "Outputs": outputs,
            "Solver": {"Name": "LHS/surrogate study", "CriticalTimeStep": 1.0},
        }

    def initialize(self, workdir=None, input_file=None, metadata=None):
        super().initialize(workdir, input_file, metadata)
        for member in self.members.values():
            if member.get_status() is None:
                member.initialize()

    def _effective_inputs(self) -> tuple[UncertainInput, ...]:
        """Configured distributions with any bound overrides applied."""
        out = []
        for inp in self.uncertain:
            lo, hi = self._bounds[inp.name]
            lo = self._input_scalar(f"PID_{inp.name}_Lo", default=lo)
            hi = self._input_scalar(f"PID_{inp.name}_Hi", default=hi)
            out.append(UncertainInput(inp.name, lo, hi, inp.group, inp.unit_symbol))
        return tuple(out)

    def _chain_eval(self, k: int, x) -> float:
        """Run one sample through micro -> ply -> buckling via the interface."""
        vf, e_matrix, poisson, thickness, angle = (float(v) for v in x)
        t = float(k)
        ts = TimeStep(time=t, dt=1.0, target_time=t, number=k)
        micro, ply, buck = (self.members[n] for n in ("micro", "ply", "buckling"))

        def prop(pid, value, symbol):
            return Property(value=value, unit=unit(symbol), property_id=pid, time=t)

        micro.set_data_component(prop("PID_VolumeFraction", vf, "1"))
        micro.set_data_component(prop("PID_FiberModulus", self.constants["fiber_modulus"], "Pa"))
        micro.set_data_component(prop("PID_MatrixModulus", e_matrix, "Pa"))
        micro.solve_step(ts)
        e_long = micro.get_data_component("PID_LongitudinalModulus", t)
        e_trans = micro.get_data_component("PID_TransverseModulus", t)
        micro.finish_step(ts)

        ply.set_data_component(e_long)
        ply.set_data_component(e_trans)
        ply.set_data_component(prop("PID_LayerAngle", angle, "rad"))
        ply.solve_step(ts)
        effective = ply.get_data_component("PID_EffectiveModulus", t)
        ply.finish_step(ts)

        buck.set_data_component(effective)
        buck.set_data_component(prop("PID_LayerThickness", thickness, "m"))
        buck.set_data_component(prop("PID_LayerCount", self.constants["layer_count"], "1"))
        buck.set_data_component(prop("PID_MatrixPoisson", poisson, "1"))
        buck.set_data_component(prop("PID_PanelLength", self.constants["panel_length"], "m"))
        buck.set_data_component(prop("PID_PanelWidth", self.constants["panel_width"], "m"))
        buck.solve_step(ts)
        load = buck.get_data_component("PID_BucklingLoad", t).scalar()
        buck.finish_step(ts)
        return load

    def _solve(self, ts: TimeStep) -> dict:
        n = int(round(self._input_scalar("PID_SampleCount")))
        seed = int(round(self._input_scalar("PID_Seed")))
        if n < 1:
            raise DomainError(f"sample count must be >= 1, got {n}")
        dists = self._effective_inputs()
        u = lhs_sample(len(dists), n, seed)
        X = np.column_stack([inp.sample(u[:, i]) for i, inp in enumerate(dists)])
        y = np.array([self._chain_eval(k + 1, X[k]) for k in range(n)])

        counts, edges = np.histogram(y, bins=self.bins)
        collapsed = np.ptp(y) == 0.0
        if collapsed:
            # identical samples: the spread is exactly zero, don't let the
            # mean-subtraction in np.std manufacture ULP noise
            train_r2, sob = 1.0, SobolIndices((0.0,) * len(dists), 0.0, True)
            self._surrogate = None
        else:
            self._surrogate = fit_surrogate(X, y, degree=3)
            train_r2 = self._surrogate.r2
            sob = sobol_indices(self._surrogate, dists, self.sobol_samples, seed=seed)

        t = ts.time

        def scalar(pid, value, symbol="1"):
            return Property(value=float(value), unit=unit(symbol), property_id=pid, time=t)

        def vector(pid, values, symbol="1"):
            return Property(
                value=tuple(float(v) for v in values),
                unit=unit(symbol),
                property_id=pid,
                value_type=ValueType.VECTOR,
                time=t,
            )

        return {
            "PID_Mean": scalar("PID_Mean", y[0] if collapsed else y.mean(), "N"),
            "PID_Std": scalar("PID_Std", 0.0 if collapsed else y.std(), "N"),
            "PID_TrainR2": scalar("PID_TrainR2", train_r2),
            "PID_Sobol": vector("PID_Sobol", sob.values),
            "PID_HistogramEdges": vector("PID_HistogramEdges", edges, "N"),
            "PID_HistogramCounts": vector("PID_HistogramCounts", counts),
            "PID_Degenerate": scalar("PID_Degenerate", 1.0 if sob.degenerate else 0.0),
        }

    def surrogate(self) -> Surrogate | None:
        """Surrogate fitted by the last solve, if any."""
        return self._surrogate
