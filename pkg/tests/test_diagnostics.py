import math

import numpy as np
import pytest

import diagnostics
import scenarios
import solver
from diagnostics import AdmissiblePair, RunFlag
from grid_field import Field
from solver import SchemeConfig
from utils import ConfigurationError, DomainError


def admissible_oracle(p, sigma, kappa, alpha, n):
    bounds = [2.0 / p]
    if 2.0 * kappa < alpha:
        bounds.append(1.0 + (alpha - 2.0 * kappa) / p)
    else:
        bounds.append(1.0)
    return p >= 1 and sigma > 1 and p - n * (kappa - alpha) > 0 and all(sigma >= b for b in bounds)


@pytest.mark.parametrize("p, sigma, kappa, alpha, n, expected", [
    (1.0, 1.5, 1.0, 1.0, 2, False),
    (2.0, 1.01, 1.0, 1.0, 2, True),
    (4.0, 1.01, 1.0, 1.0, 2, True),
    (2.0, 1.01, 0.0, 1.0, 2, False),
    (2.0, 1.5, 0.0, 1.0, 2, True),
    (0.5, 4.0, 1.0, 1.0, 2, False),
    (2.0, 1.0, 1.0, 1.0, 2, False),
    (1.0, 2.0, 2.0, 1.0, 1, False),
    (2.0, 1.5, 2.0, 1.0, 2, False),
    (2.0, 3.0, 2.0, 1.0, 2, False),
    (1.0, 2.0, 0.0, 1.0, 1, True),
    (1.0, 1.5, 0.0, 1.0, 1, False),
])
def test_admissible_worked_cases(p, sigma, kappa, alpha, n, expected):
    assert diagnostics.admissible(p, sigma, kappa, alpha, n) is expected


def test_admissible_agrees_with_oracle_on_random_tuples():
    rng = np.random.default_rng(42)
    for _ in range(100):
        p = float(rng.uniform(0.5, 6.0))
        sigma = float(rng.uniform(0.9, 3.0))
        kappa = float(rng.uniform(0.0, 3.0))
        alpha = float(rng.uniform(0.1, 3.0))
        n = int(rng.integers(1, 3))
        assert diagnostics.admissible(p, sigma, kappa, alpha, n) == admissible_oracle(p, sigma, kappa, alpha, n)



def test_admissible_is_monotone_in_sigma():
    rng = np.random.default_rng(7)
    for _ in range(200):
        p = float(rng.uniform(1.0, 6.0))
        sigma = float(rng.uniform(1.0, 3.0))
        kappa = float(rng.uniform(0.0, 3.0))
        alpha = float(rng.uniform(0.1, 3.0))
        n = int(rng.integers(1, 4))
        if diagnostics.admissible(p, sigma, kappa, alpha, n):
            for larger in (sigma + 1e-6, sigma + 0.5, 10.0):
                assert diagnostics.admissible(p, larger, kappa, alpha, n)

def test_admissible_pair_rejects_and_exposes_a():
    with pytest.raises(DomainError):
        AdmissiblePair(1.0, 1.5, 1.0, 1.0, 2)
    pair = AdmissiblePair(2.0, 1.5, 0.0, 1.0, 2)
    assert pair.a == -2.0


def test_new_report_orders_are_deduplicated():
    report = diagnostics.new_report("x", 2, p=2.0, extra_orders=(1, 3.0, math.inf))
    assert report.orders == (1.0, 2.0, 3.0, math.inf)
    with pytest.raises(DomainError):
        diagnostics.new_report("x", 2, p=0.5)
    with pytest.raises(ConfigurationError):
        report.series(5.0)


def test_update_diagnostics_keeps_running_values(line_grid):
    report = diagnostics.new_report("x", 1, p=2.0)
    diagnostics.update_diagnostics(report, Field(line_grid, [0.0, 2.0, 0.0, 0.0]), 0.0, 3.0, 1.0, 1.0)
    diagnostics.update_diagnostics(report, Field(line_grid, [0.0, 1.0, 1.0, 0.0], 0.5), 0.5, 1.0, 2.0, 1.0)

    assert report.times == [0.0, 0.5]
    assert report.norms[math.inf] == [2.0, 1.0]
    assert report.U[math.inf] == [2.0, 2.0]
    assert report.U[2.0] == [2.0, 2.0]
    assert report.norms[2.0][1] == pytest.approx(math.sqrt(2.0))
    assert report.mass_series == [2.0, 2.0]
    assert report.Fmu == [3.0, 3.0]
    # Phi = [0, 0.5, 0.5, 0]: squared face slopes sum to 0.5, over dt = 0.5
    assert report.energy_cum == [0.0, pytest.approx(0.25)]
    assert report.M1 == 2.0
    assert report.Minf == 2.0
    assert report.u0_inf == 2.0


def test_update_diagnostics_rejects_bad_input(line_grid):
    report = diagnostics.new_report("x", 1)
    field = Field.zeros(line_grid)
    with pytest.raises(DomainError):
        diagnostics.update_diagnostics(report, field, 0.0, 0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        diagnostics.update_diagnostics(report, field, -1.0, 0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        diagnostics.update_diagnostics(report, Field(line_grid, [np.nan, 0, 0, 0]), 0.0, 0.0, 1.0, 1.0)


def single_record_report(grid, values, F_t, p=2.0):
    report = diagnostics.new_report("x", grid.dim, p=p)
    diagnostics.update_diagnostics(report, Field(grid, values), 0.0, F_t, 1.0, 1.0)
    return report


def test_ratio_without_flux_is_one(line_grid):
    report = single_record_report(line_grid, [0.0, 3.0, 1.0, 0.0], 0.0)
    ratio = diagnostics.theorem2_ratio(report, AdmissiblePair(2.0, 1.01, 1.0, 1.0, 1), report.u0_inf)
    assert ratio.empirical_K == pytest.approx(1.0)
    assert ratio.t_of_sup == 0.0


def test_ratio_with_flux_by_hand(line_grid):
    # a = 0: denominator = max(1, 4^(1/2) * U_2) = 2
    report = single_record_report(line_grid, [1.0, 0.0, 0.0, 0.0], 4.0)
    ratio = diagnostics.theorem2_ratio(report, AdmissiblePair(2.0, 1.01, 1.0, 1.0, 1), report.u0_inf)
    assert ratio.values == (pytest.approx(0.5),)
    assert ratio.empirical_K == pytest.approx(0.5)


def test_ratio_of_zero_field_is_absent(line_grid):
    report = single_record_report(line_grid, [0.0, 0.0, 0.0, 0.0], 4.0)
    ratio = diagnostics.theorem2_ratio(report, AdmissiblePair(2.0, 1.01, 1.0, 1.0, 1), report.u0_inf)
    assert ratio.values == (None,)
    assert ratio.empirical_K is None


def test_ratio_needs_a_tracked_order(line_grid):
    report = single_record_report(line_grid, [1.0, 0.0, 0.0, 0.0], 0.0, p=2.0)
    with pytest.raises(ConfigurationError):
        diagnostics.theorem2_ratio(report, AdmissiblePair(3.0, 1.01, 1.0, 1.0, 1), 1.0)
    with pytest.raises(DomainError):
        diagnostics.theorem2_ratio(report, (2.0, 1.01), 1.0)


def test_ratio_takes_the_first_maximum(line_grid):
    report = diagnostics.new_report("x", 1, p=2.0)
    for k, values in enumerate(([1.0, 0, 0, 0], [1.0, 0, 0, 0], [0.5, 0, 0, 0])):
        diagnostics.update_diagnostics(report, Field(line_grid, values, float(k)), 1.0 if k else 0.0, 0.0, 1.0, 1.0)
    ratio = diagnostics.theorem2_ratio(report, AdmissiblePair(2.0, 1.01, 1.0, 1.0, 1), 1.0)
    assert ratio.values == (1.0, 1.0, 1.0)
    assert ratio.t_of_sup == 0.0


def report_with_series(l1, linf, mass_series=None):
    report = diagnostics.new_report("x", 1)
    report.norms[1.0] = list(l1)
    report.norms[math.inf] = list(linf)
    report.mass_series = list(mass_series if mass_series is not None else l1)
    return report


def test_decay_checks():
    report = report_with_series([1.0, 1.0, 0.9], [2.0, 1.5, 1.5 + 1e-9])
    assert diagnostics.check_l1_decay(report).passed
    assert diagnostics.check_linf_decay(report).passed

    report = report_with_series([1.0, 1.1, 1.0], [2.0, 2.5, 1.0])
    l1 = diagnostics.check_l1_decay(report)
    linf = diagnostics.check_linf_decay(report)
    assert not l1.passed and l1.worst_index == 1
    assert not linf.passed and linf.worst_increment == pytest.approx(0.5)


def test_single_time_checks_pass():
    report = report_with_series([1.0], [1.0])
    assert diagnostics.check_linf_decay(report) == diagnostics.DecayCheck(True, 0.0, None)
    assert diagnostics.conservation_error(report) == (0.0, pytest.approx(2e-10))
    assert diagnostics.growth_factor(report) == 1.0


def test_conservation_and_growth():
    report = report_with_series([2.0, 2.0], [1.0, 3.0], mass_series=[2.0, 2.0 + 1e-9])
    error, tolerance = diagnostics.conservation_error(report)
    assert error == pytest.approx(1e-9)
    assert tolerance == pytest.approx(3e-10)
    assert diagnostics.growth_factor(report) == 3.0


def test_run_flag_values():
    assert {flag.value for flag in RunFlag} == {"blow_up", "boundary_contaminated"}


@pytest.mark.parametrize("kappa", [1.0, 2.0])
@pytest.mark.parametrize("c", [2.0, 10.0])
def test_ratio_is_invariant_under_amplitude_scaling(line_grid, kappa, c):
    # u -> c u with F -> c^(-a/n) F leaves the ratio unchanged
    pair = AdmissiblePair(2.0, 1.01, kappa, 1.0, 1)
    fields = ([0.0, 2.0, 1.0, 0.0], [0.5, 1.5, 1.5, 0.5], [1.0, 1.0, 3.0, 1.0])
    fluxes = (0.0, 0.05, 0.1)

    def ratio_for(scale):
        report = diagnostics.new_report("x", 1, p=2.0)
        for k, (values, F_t) in enumerate(zip(fields, fluxes)):
            field = Field(line_grid, scale * np.array(values), float(k))
            diagnostics.update_diagnostics(report, field, 1.0 if k else 0.0, F_t * scale ** (-pair.a), 1.0, 1.0)
        return diagnostics.theorem2_ratio(report, pair, report.u0_inf)

    base, scaled = ratio_for(1.0), ratio_for(c)
    assert scaled.values == pytest.approx(base.values, rel=1e-6)
    assert scaled.empirical_K == pytest.approx(base.empirical_K, rel=1e-6)
    assert base.empirical_K == pytest.approx(1.5)


def test_cumulative_energy_is_stable_under_refinement():
    energies = []
    for refine in (1, 2):
        scenario = scenarios.build("barenblatt1d", {"horizon": 0.2}, refine=refine)
        report = solver.run(scenario.problem, scenario.grid, SchemeConfig(), scenario.horizon,
                            scenario.output_interval)
        assert not report.flags
        energies.append(report.energy_cum[-1])
    assert energies[0] > 0.0
    assert energies[1] == pytest.approx(energies[0], rel=0.1)
