import math

import numpy as np
import pytest

import diagnostics
import model
import scenarios
import solver
from grid_field import Grid, Field, mass, lq_norm
from model import AdvectionSpec, DiffusionSpec, ProblemSpec
from scenarios import InitialDatum
from solver import SchemeConfig, Integrator, SolverState
from utils import BlowUpError, ConfigurationError, DomainError


def make_problem(advection=None, alpha=1.0, dim=2):
    return ProblemSpec(advection or AdvectionSpec(), DiffusionSpec(alpha), InitialDatum(), dim)


def test_scheme_config_validation():
    with pytest.raises(ConfigurationError):
        SchemeConfig(cfl_adv=0.0)
    with pytest.raises(ConfigurationError):
        SchemeConfig(cfl_diff=1.5)
    with pytest.raises(ConfigurationError):
        SchemeConfig(boundary="periodic")
    assert SchemeConfig(integrator="heun").integrator is Integrator.HEUN


def test_diffusion_rhs_by_hand(line_grid):
    field = Field(line_grid, [0.0, 2.0, 0.0, 0.0])
    # Phi = u|u|/2 = [0, 2, 0, 0]; interior face fluxes 2, -2, 0; boundary faces 0
    np.testing.assert_allclose(solver.diffusion_rhs(field, 1.0, 1.0), [2.0, -4.0, 2.0, 0.0])
    np.testing.assert_allclose(solver.diffusion_rhs(field, 1.0, 0.5), [1.0, -2.0, 1.0, 0.0])


def test_diffusion_rhs_rejects_nonpositive_mu(line_grid):
    with pytest.raises(DomainError):
        solver.diffusion_rhs(Field.zeros(line_grid), 1.0, 0.0)


def test_diffusion_rhs_matches_five_point_loop(square_grid, rng):
    values = rng.uniform(0.0, 1.0, size=square_grid.cells)
    alpha = 2.0
    transformed = np.abs(values) ** alpha * values / (alpha + 1)
    expected = np.zeros_like(values)
    n = 16
    for i in range(n):
        for j in range(n):
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                if 0 <= i + di < n and 0 <= j + dj < n:
                    expected[i, j] += (transformed[i + di, j + dj] - transformed[i, j]) / 0.25
    np.testing.assert_allclose(solver.diffusion_rhs(Field(square_grid, values), alpha, 1.0), expected,
                               rtol=1e-12, atol=1e-12)


def test_llf_flux_by_hand(line_grid):
    spec = AdvectionSpec.power_law("constant:2", 1.0)
    field = Field(line_grid, [0.0, 1.0, 0.0, 0.0])
    # face 0|1: 0.5*2*(0+1) - 0.5*4*(1-0) = -1; face 1|2: 1 - 0.5*4*(0-1) = 3
    np.testing.assert_allclose(solver.advection_rhs(field, spec, 0.0), [-1.0, 4.0, -3.0, 0.0])


def test_g_flux_uses_the_same_llf(line_grid):
    spec = AdvectionSpec.g_only((2.0,), 1.0)
    field = Field(line_grid, [0.0, 1.0, 0.0, 0.0])
    np.testing.assert_allclose(solver.advection_rhs(field, spec, 0.0), [-1.0, 4.0, -3.0, 0.0])


def test_constant_field_is_a_fixed_point_without_advection(square_grid):
    problem = make_problem()
    field = Field(square_grid, np.full(square_grid.cells, 0.7))
    state = solver.step(SolverState(field, 0.0), problem, SchemeConfig(), 1e-3)
    np.testing.assert_array_equal(state.field.values, field.values)


@pytest.mark.parametrize("integrator", [Integrator.EULER, Integrator.HEUN])
def test_step_conserves_mass(square_grid, rng, integrator):
    values = np.zeros(square_grid.cells)
    values[4:12, 4:12] = rng.uniform(0.1, 1.0, size=(8, 8))
    problem = make_problem(AdvectionSpec.power_law("fig1_eps:1e-4", 1.0))
    config = SchemeConfig(integrator=integrator)
    state = SolverState(Field(square_grid, values), 0.0)
    for _ in range(5):
        state = solver.step(state, problem, config, solver.stable_dt(state, problem, config))
    before = mass(Field(square_grid, values))
    assert abs(mass(state.field) - before) <= 1e-12 * (1.0 + before)
    assert state.step_count == 5


def test_stable_dt_pure_diffusion_example():
    grid = Grid.square(-0.4, 0.4, 8, dim=2)
    values = np.zeros(grid.cells)
    values[3:5, 3:5] = 1.0
    state = SolverState(Field(grid, values), 0.0)
    dt = solver.stable_dt(state, make_problem(), SchemeConfig())
    assert dt == pytest.approx(0.4 * 0.1 ** 2 / (2 * 2 * 1.0 * 1.0))


def test_stable_dt_of_zero_field_is_the_cap(square_grid):
    state = SolverState(Field.zeros(square_grid), 0.0)
    problem = make_problem(AdvectionSpec.power_law("fig1_eps:1e-4", 1.0))
    assert solver.stable_dt(state, problem, SchemeConfig(), cap=0.25) == 0.25


def test_stable_dt_advective_limit(line_grid):
    problem = make_problem(AdvectionSpec.power_law("constant:2", 1.0), alpha=1.0, dim=1)
    state = SolverState(Field(line_grid, [0.0, 0.01, 0.0, 0.0]), 0.0)
    # lambda = 2 * 2 * 0.01 = 0.04 on the faces next to the bump; diffusion limit 0.4 / (2 * 0.01) = 20
    assert solver.max_wave_speed(state.field, problem.advection, 0.0) == pytest.approx(0.04)
    assert solver.stable_dt(state, problem, SchemeConfig()) == pytest.approx(0.4 * 1.0 / 0.04)


def test_stable_dt_on_fig1_matches_both_cfl_terms():
    scenario = scenarios.build("fig1")
    grid, problem = scenario.grid, scenario.problem
    state = solver.initial_state(problem, grid)
    u = state.field.values

    # kappa = 1: lambda = |b . e_axis| (kappa + 1) max(|u_L|, |u_R|) at every interior face
    lambda_max = 0.0
    for axis in range(grid.dim):
        faces = np.stack(grid.face_mesh(axis), axis=-1)
        b = model.eval_b(problem.advection.b_name, faces, 0.0)[..., axis]
        n = grid.cells[axis]
        a_max = np.maximum(np.abs(np.take(u, np.arange(n - 1), axis=axis)),
                           np.abs(np.take(u, np.arange(1, n), axis=axis)))
        lambda_max = max(lambda_max, float(np.max(np.abs(b) * 2.0 * a_max)))

    h = grid.h_min
    dt_adv = 0.4 * h / lambda_max
    dt_diff = 0.4 * h * h / (2 * 2 * 1.0 * np.max(np.abs(u)))
    assert dt_adv == pytest.approx(8.380975e-4, rel=1e-2)
    assert dt_diff == pytest.approx(3.925128e-4, rel=1e-5)
    assert solver.max_wave_speed(state.field, problem.advection, 0.0) == pytest.approx(lambda_max, rel=1e-12)
    assert solver.stable_dt(state, problem, SchemeConfig()) == pytest.approx(min(dt_adv, dt_diff), rel=1e-12)


def test_blow_up_is_reported(line_grid):
    state = SolverState(Field(line_grid, [0.0, 1e99, 0.0, 0.0]), 0.0)
    with pytest.raises(BlowUpError) as error:
        solver.step(state, make_problem(dim=1), SchemeConfig(), 1.0)
    assert error.value.t == 1.0
    assert error.value.cell_index is not None


def test_step_rejects_nonpositive_dt(line_grid):
    state = SolverState(Field.zeros(line_grid), 0.0)
    with pytest.raises(DomainError):
        solver.step(state, make_problem(dim=1), SchemeConfig(), 0.0)


def test_support_margin(square_grid):
    field = InitialDatum().field(square_grid)
    # Support covers the centres +-0.25 and +-0.75: cells 6..9 of 16
    assert solver.support_margin(field) == 5
    assert solver.support_margin(Field.zeros(square_grid)) == 16


def test_guard_hit(square_grid):
    values = np.zeros(square_grid.cells)
    values[8, 8] = 1.0
    assert not solver.guard_hit(Field(square_grid, values), 1e-8)
    values[0, 5] = 1e-6
    assert solver.guard_hit(Field(square_grid, values), 1e-8)


def test_run_with_zero_horizon_returns_the_initial_state(square_grid):
    problem = make_problem()
    report = solver.run(problem, square_grid, SchemeConfig(), 0.0, 0.1, name="zero")
    assert report.times == [0.0]
    assert report.steps == 0
    np.testing.assert_array_equal(report.final_field.values, report.initial_field.values)
    assert not report.flags


def test_run_lands_on_output_times(square_grid):
    seen = []
    report = solver.run(make_problem(), square_grid, SchemeConfig(), 0.1, 0.025,
                        observer=lambda state, rep: seen.append(state.t))
    np.testing.assert_allclose(report.times, [0.0, 0.025, 0.05, 0.075, 0.1], rtol=0, atol=1e-15)
    assert seen == report.times


def test_run_flags_support_near_the_ring():
    scenario = scenarios.build("pure_diffusion_2d", {"cells": 8, "horizon": 0.02})
    report = solver.run(scenario.problem, scenario.grid, SchemeConfig(), scenario.horizon, scenario.output_interval)
    assert diagnostics.RunFlag.BOUNDARY_CONTAMINATED in report.flags


@pytest.mark.parametrize("name", ["rotation_smoke", "g_flux_2d"])
def test_maximum_principle_on_short_runs(name):
    scenario = scenarios.build(name, {"cells": 32, "horizon": 0.1})
    report = solver.run(scenario.problem, scenario.grid, SchemeConfig(), scenario.horizon, scenario.output_interval)
    assert not report.flags
    assert diagnostics.check_linf_decay(report).passed
    assert diagnostics.check_l1_decay(report).passed
    error, tolerance = diagnostics.conservation_error(report)
    assert error <= tolerance


def test_concentrating_drift_grows_the_peak():
    scenario = scenarios.build("fig1", {"cells": 32, "horizon": 0.2})
    report = solver.run(scenario.problem, scenario.grid, SchemeConfig(), scenario.horizon, scenario.output_interval)
    assert not report.flags
    assert max(report.norms[math.inf]) > report.norms[math.inf][0]
    assert diagnostics.check_l1_decay(report).passed


def test_deeper_well_gives_a_larger_peak():
    peaks = {}
    for name in ("fig1", "fig1_deep"):
        scenario = scenarios.build(name, {"cells": 32, "horizon": 0.05, "output_interval": 0.01})
        report = solver.run(scenario.problem, scenario.grid, SchemeConfig(), scenario.horizon,
                            scenario.output_interval)
        assert not report.flags
        peaks[name] = max(report.norms[math.inf])
    assert peaks["fig1_deep"] > peaks["fig1"]


def test_run_report_norms_match_final_field(square_grid):
    problem = make_problem()
    report = solver.run(problem, square_grid, SchemeConfig(), 0.05, 0.05, p=3.0)
    assert report.norms[3.0][-1] == pytest.approx(lq_norm(report.final_field, 3.0))
    assert report.energy_cum[-1] > 0.0


def test_one_step_follows_the_barenblatt_solution():
    scenario = scenarios.build("barenblatt1d")
    problem, grid = scenario.problem, scenario.grid
    state = solver.initial_state(problem, grid)
    dt = solver.stable_dt(state, problem, SchemeConfig())
    stepped = solver.step(state, problem, SchemeConfig(), dt)

    initial = problem.initial
    exact = scenarios.exact_barenblatt(grid.centers(0), initial.t0 + dt, initial.alpha, initial.mass_C, 1)
    change = float(np.sum(np.abs(exact - state.field.values)) * grid.cell_volume)
    error = scenarios.barenblatt_l1_error(scenario, stepped.field)
    assert stepped.t == dt
    assert change > 0.0
    assert error < 0.5 * change


@pytest.mark.slow
def test_deeper_well_peaks_higher_at_the_registered_resolution():
    deep = scenarios.build("fig1_deep")
    shallow = scenarios.companion_scenario(deep)
    assert shallow.name == "fig1"
    assert shallow.grid.cells == deep.grid.cells == (128, 128)
    reports = [solver.run(s.problem, s.grid, SchemeConfig(), s.horizon, s.output_interval) for s in (deep, shallow)]
    assert not reports[0].flags and not reports[1].flags
    assert reports[0].Minf > reports[1].Minf
    results = scenarios.evaluate_expectations(deep, reports[0], reports[1])
    assert all(result.passed for result in results), results
