"""Sampling, surrogate and sensitivity pipeline."""

import math

import numpy as np
import pytest

from copla.data import Property, TimeStep, ValueType
from copla.demos.formulas import buckling_load, micro_homogenize, ply_modulus
from copla.demos.uq import (
    DEMO_CONSTANTS,
    DEMO_UNCERTAIN,
    InputGroup,
    Surrogate,
    UncertainInput,
    UqStudy,
    fit_surrogate,
    lhs_sample,
    sobol_indices,
    total_degree_exponents,
)
from copla.errors import DomainError, RankDeficient, SolverFailure
from copla.units import unit

STEP = TimeStep(time=1.0, dt=1.0, target_time=1.0, number=1)


def uin(name, lo, hi):
    return UncertainInput(name, lo, hi, InputGroup.MICRO_MATERIAL)


def run_study(n, seed, overrides=(), **study_kwargs):
    study = UqStudy(**study_kwargs)
    study.initialize()
    study.set_data_component(
        Property(float(n), unit("1"), "PID_SampleCount")
    )
    study.set_data_component(Property(float(seed), unit("1"), "PID_Seed"))
    for pid, value, symbol in overrides:
        study.set_data_component(Property(float(value), unit(symbol), pid))
    study.solve_step(STEP)
    study.finish_step(STEP)
    outputs = {
        pid: study.get_data_component(pid, 1.0) for pid in study.advertised_outputs()
    }
    return study, outputs


def true_chain(x):
    """The toy chain re-stated from its closed forms, no model objects."""
    vf, e_matrix, poisson, thickness, angle = x
    e_long, e_trans = micro_homogenize(vf, DEMO_CONSTANTS["fiber_modulus"], e_matrix)
    e_eff = ply_modulus(e_long, e_trans, angle)
    layup = [(e_eff, thickness, 0.0)] * DEMO_CONSTANTS["layer_count"]
    load = buckling_load(
        layup, DEMO_CONSTANTS["panel_length"], DEMO_CONSTANTS["panel_width"]
    )
    return load / (1.0 - poisson**2)


# -- Latin hypercube ---------------------------------------------------------------


def test_lhs_shape_and_range():
    u = lhs_sample(32, 200, seed=42)
    assert u.shape == (200, 32)
    assert np.all(u >= 0.0) and np.all(u < 1.0)


def test_lhs_stratification_per_column():
    n = 200
    u = lhs_sample(5, n, seed=42)
    for j in range(u.shape[1]):
        strata = np.sort(np.floor(u[:, j] * n).astype(int))
        assert np.array_equal(strata, np.arange(n))  # one draw per stratum


def test_lhs_determinism():
    assert np.array_equal(lhs_sample(4, 50, seed=7), lhs_sample(4, 50, seed=7))
    assert not np.array_equal(lhs_sample(4, 50, seed=7), lhs_sample(4, 50, seed=8))


def test_lhs_rejects_empty():
    with pytest.raises(DomainError):
        lhs_sample(0, 10, seed=1)
    with pytest.raises(DomainError):
        lhs_sample(3, 0, seed=1)


# -- uncertain inputs ---------------------------------------------------------------


def test_uncertain_input_sampling():
    inp = uin("x", 2.0, 6.0)
    assert inp.sample(0.0) == 2.0
    assert inp.sample(0.5) == 4.0
    assert float(inp.sample(1.0 - 1e-12)) == pytest.approx(6.0)


def test_uncertain_input_point_mass():
    point = uin("x", 3.0, 3.0)
    assert np.all(point.sample(np.linspace(0, 1, 11)) == 3.0)


def test_uncertain_input_rejects_inverted_bounds():
    with pytest.raises(DomainError):
        uin("x", 2.0, 1.0)


# -- polynomial basis ---------------------------------------------------------------


def test_exponent_basis_counts():
    for d, degree in ((1, 3), (2, 3), (5, 3), (3, 2)):
        exps = total_degree_exponents(d, degree)
        assert len(exps) == math.comb(d + degree, degree)
        assert exps[0] == (0,) * d  # intercept first
        assert len(set(exps)) == len(exps)
        assert all(sum(e) <= degree for e in exps)


# -- surrogate fit ------------------------------------------------------------------


def cubic_truth(X):
    x0, x1 = X[:, 0], X[:, 1]
    return 2.0 + x0 - 3.0 * x1 + 0.5 * x0 * x1 - 0.25 * x0**3 + x1**2


def test_fit_recovers_exact_cubic():
    rng = np.random.default_rng(11)
    X = rng.uniform(-2.0, 3.0, size=(60, 2))
    y = cubic_truth(X)
    s = fit_surrogate(X, y, degree=3)
    assert s.r2 == pytest.approx(1.0, abs=1e-10)
    assert len(s.coefficients) == math.comb(2 + 3, 3)

    fresh = rng.uniform(-2.0, 3.0, size=(40, 2))
    assert np.max(np.abs(s.predict(fresh) - cubic_truth(fresh))) < 1e-10


def test_fit_constant_targets():
    rng = np.random.default_rng(12)
    X = rng.uniform(0.0, 1.0, size=(30, 2))
    y = np.full(30, 7.25)
    s = fit_surrogate(X, y, degree=3)
    assert s.r2 == 1.0
    assert np.max(np.abs(s.predict(X) - 7.25)) < 1e-10


def test_fit_needs_enough_samples():
    d, degree = 5, 3
    p = math.comb(d + degree, degree)  # 56
    rng = np.random.default_rng(13)
    X = rng.uniform(size=(p - 1, d))
    with pytest.raises(RankDeficient):
        fit_surrogate(X, np.zeros(p - 1), degree=degree)


def test_fit_rejects_constant_column():
    rng = np.random.default_rng(14)
    X = rng.uniform(size=(40, 2))
    X[:, 1] = 0.7  # no spread: the scaled column vanishes
    with pytest.raises(RankDeficient):
        fit_surrogate(X, X[:, 0] ** 2, degree=3)


def test_surrogate_is_affine_invariant():
    # the same data in shifted/stretched coordinates predicts identically
    rng = np.random.default_rng(15)
    X = rng.uniform(-1.0, 1.0, size=(50, 2))
    y = cubic_truth(X)
    shifted = 100.0 + 5.0 * X
    s_plain = fit_surrogate(X, y, degree=3)
    s_shift = fit_surrogate(shifted, y, degree=3)
    probe = rng.uniform(-1.0, 1.0, size=(25, 2))
    assert np.allclose(
        s_plain.predict(probe), s_shift.predict(100.0 + 5.0 * probe), atol=1e-9
    )


# -- Sobol indices ------------------------------------------------------------------


def surrogate_for(fn, d, rng_seed=20, n=80):
    rng = np.random.default_rng(rng_seed)
    X = rng.uniform(0.0, 1.0, size=(n, d))
    return fit_surrogate(X, fn(X), degree=3)


def test_sobol_additive_splits_evenly():
    s = surrogate_for(lambda X: X[:, 0] + X[:, 1], d=2)
    dists = (uin("a", 0.0, 1.0), uin("b", 0.0, 1.0))
    sob = sobol_indices(s, dists, m=20_000, seed=3)
    assert not sob.degenerate
    assert sob[0] == pytest.approx(0.5, abs=0.05)
    assert sob[1] == pytest.approx(0.5, abs=0.05)


def test_sobol_dummy_input_is_zero():
    s = surrogate_for(lambda X: 3.0 * X[:, 0] + 1.0, d=2)
    dists = (uin("live", 0.0, 1.0), uin("dummy", 0.0, 1.0))
    sob = sobol_indices(s, dists, m=20_000, seed=4)
    assert sob[0] == pytest.approx(1.0, abs=0.05)
    assert sob[1] == pytest.approx(0.0, abs=0.05)


def test_sobol_single_input_is_one():
    s = surrogate_for(lambda X: X[:, 0] ** 2 - X[:, 0], d=1)
    sob = sobol_indices(s, (uin("only", 0.0, 1.0),), m=20_000, seed=5)
    assert sob[0] == pytest.approx(1.0, abs=0.05)
    assert len(sob) == 1 and list(sob) == [sob[0]]


def test_sobol_collapsed_distributions_flagged():
    s = surrogate_for(lambda X: X[:, 0] + X[:, 1], d=2)
    dists = (uin("a", 0.4, 0.4), uin("b", 0.6, 0.6))  # point masses
    sob = sobol_indices(s, dists, m=5_000, seed=6)
    assert sob.degenerate
    assert sob.values == (0.0, 0.0)
    assert sob.variance == 0.0


def test_sobol_needs_two_samples():
    s = surrogate_for(lambda X: X[:, 0], d=1)
    with pytest.raises(DomainError):
        sobol_indices(s, (uin("a", 0.0, 1.0),), m=1)


# -- the study end to end -------------------------------------------------------------


def test_study_outputs_and_sensibility():
    study, out = run_study(n=200, seed=42)

    mean = out["PID_Mean"].value
    std = out["PID_Std"].value
    assert out["PID_Mean"].unit.symbol == "N"
    assert 0.0 < std < mean  # the toy chain stays well away from zero load

    assert out["PID_TrainR2"].value >= 0.99
    assert out["PID_Degenerate"].value == 0.0

    sobol = out["PID_Sobol"].value
    assert out["PID_Sobol"].value_type is ValueType.VECTOR
    assert len(sobol) == 5
    names = [inp.name for inp in DEMO_UNCERTAIN]
    assert names[int(np.argmax(sobol))] == "Vf"  # fiber fraction dominates
    assert names[int(np.argmin(np.abs(sobol)))] == "LayerAngle"  # angle is inert

    edges = out["PID_HistogramEdges"].value
    counts = out["PID_HistogramCounts"].value
    assert len(edges) == len(counts) + 1
    assert sum(counts) == 200
    assert all(a <= b for a, b in zip(edges, edges[1:]))

    # the surrogate generalizes to fresh draws of the true chain
    s = study.surrogate()
    rng = np.random.default_rng(9)
    fresh = np.column_stack(
        [inp.sample(rng.random(100)) for inp in DEMO_UNCERTAIN]
    )
    truth = np.array([true_chain(x) for x in fresh])
    resid = truth - s.predict(fresh)
    holdout_r2 = 1.0 - float(resid @ resid) / float(np.sum((truth - truth.mean()) ** 2))
    assert holdout_r2 >= 0.95


def test_study_is_deterministic():
    _, first = run_study(n=80, seed=4242)
    _, second = run_study(n=80, seed=4242)
    assert first["PID_Mean"].value == second["PID_Mean"].value
    assert first["PID_Std"].value == second["PID_Std"].value
    assert first["PID_Sobol"].value == second["PID_Sobol"].value
    assert first["PID_HistogramCounts"].value == second["PID_HistogramCounts"].value

    _, other_seed = run_study(n=80, seed=4243)
    assert other_seed["PID_Mean"].value != first["PID_Mean"].value


def test_study_collapsed_bounds_degenerate():
    point = (
        ("PID_Vf_Lo", 0.5, "1"), ("PID_Vf_Hi", 0.5, "1"),
        ("PID_MatrixModulus_Lo", 3.0e9, "Pa"), ("PID_MatrixModulus_Hi", 3.0e9, "Pa"),
        ("PID_MatrixPoisson_Lo", 0.3, "1"), ("PID_MatrixPoisson_Hi", 0.3, "1"),
        ("PID_LayerThickness_Lo", 1.25e-4, "m"), ("PID_LayerThickness_Hi", 1.25e-4, "m"),
        ("PID_LayerAngle_Lo", 0.0, "rad"), ("PID_LayerAngle_Hi", 0.0, "rad"),
    )
    _, out = run_study(n=60, seed=1, overrides=point)
    assert out["PID_Std"].value == 0.0
    assert out["PID_Degenerate"].value == 1.0
    assert out["PID_TrainR2"].value == 1.0
    assert tuple(out["PID_Sobol"].value) == (0.0,) * 5
    # every sample of a point-mass study lands on the very same load
    assert out["PID_Mean"].value == pytest.approx(
        true_chain([0.5, 3.0e9, 0.3, 1.25e-4, 0.0]), rel=1e-12
    )


def test_study_input_card_advertises_bounds():
    study = UqStudy()
    study.initialize()
    inputs = study.advertised_inputs()
    assert len(inputs) == 2 + 2 * len(DEMO_UNCERTAIN)
    assert "PID_Vf_Lo" in inputs and "PID_LayerAngle_Hi" in inputs
    assert study.surrogate() is None  # nothing fitted yet


def test_study_requires_all_members():
    with pytest.raises(ValueError, match="buckling"):
        UqStudy(members={"micro": None, "ply": None})


def test_study_rejects_nonpositive_sample_count():
    study = UqStudy()
    study.initialize()
    study.set_data_component(Property(0.0, unit("1"), "PID_SampleCount"))
    study.set_data_component(Property(1.0, unit("1"), "PID_Seed"))
    # foreground solves surface failures as SolverFailure with the cause inside
    with pytest.raises(SolverFailure, match="DomainError"):
        study.solve_step(STEP)
