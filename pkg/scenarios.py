#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# Copyright (C) 2024  PorousFlow developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""
Named benchmark scenarios and their initial data.

A scenario bundles a ProblemSpec, a Grid, a horizon, an output interval and the
expectations its run is judged on. Scenarios are registered as templates and built
with optional overrides (cells, horizon, output_interval, eps, amplitude, box,
initial_csv).

Initial data:
- canonical_bump: A prod_i cos^2(pi x_i / 2) on |x_i| <= 1, zero elsewhere.
- barenblatt: the exact self-similar solution of u_t = div(|u|^alpha grad u) at t0.
- custom_csv: a snapshot file in the write_snapshot layout.
"""
__author__ = "PorousFlow developers"
__date__ = "2026-10-18"  # Last update


# scenarios.py


import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

import diagnostics
from grid_field import Grid, Field, read_snapshot
from model import AdvectionSpec, DiffusionSpec, ProblemSpec
from utils import DomainError, ConfigurationError


class InitialKind(Enum):
    CANONICAL_BUMP = "canonical_bump"
    BARENBLATT = "barenblatt"
    CUSTOM_CSV = "custom_csv"


def barenblatt_constants(alpha, mass_C, n):
    """
    (k, q, gamma, C) of v(x, s) = s^-k (C - q |x|^2 s^(-2k/n))_+^gamma, the solution of
    v_s = Laplacian(v^m) with m = alpha + 1 and total mass mass_C.
    """
    if not alpha > 0 or not mass_C > 0:
        raise DomainError(f"Barenblatt needs alpha > 0 and mass > 0 (got {alpha}, {mass_C})")
    m = alpha + 1.0
    k = n / (n * (m - 1.0) + 2.0)
    q = k * (m - 1.0) / (2.0 * m * n)
    gamma = 1.0 / alpha
    # mass = C^(gamma + n/2) q^(-n/2) pi^(n/2) Gamma(gamma+1) / Gamma(gamma+1+n/2)
    shape_integral = math.pi ** (n / 2.0) * math.gamma(gamma + 1.0) / math.gamma(gamma + 1.0 + n / 2.0)
    C = (mass_C * q ** (n / 2.0) / shape_integral) ** (1.0 / (gamma + n / 2.0))
    return k, q, gamma, C


def exact_barenblatt(x, t, alpha, mass_C, n):
    """
    Exact solution of u_t = div(|u|^alpha grad u) = Laplacian(u^m)/m with mass mass_C,
    u(x, t) = v(x, t/m). x has shape (n,) or (..., n); a scalar is accepted for n = 1.
    """
    if not t > 0:
        logging.error(f"exact_barenblatt called with t={t}")
        raise DomainError(f"The Barenblatt solution needs t > 0, got {t}")
    k, q, gamma, C = barenblatt_constants(alpha, mass_C, n)
    points = np.asarray(x, dtype=float)
    if n == 1 and (points.ndim == 0 or points.shape[-1] != 1):
        points = points[..., None]
    r2 = np.sum(points * points, axis=-1)

    s = t / (alpha + 1.0)
    profile = np.maximum(C - q * r2 * s ** (-2.0 * k / n), 0.0)
    result = s ** (-k) * profile ** gamma
    return float(result) if np.ndim(result) == 0 else result


def barenblatt_radius(t, alpha, mass_C, n):
    k, q, _, C = barenblatt_constants(alpha, mass_C, n)
    s = t / (alpha + 1.0)
    return math.sqrt(C / q) * s ** (k / n)


@dataclass(frozen=True)
class InitialDatum:
    kind: InitialKind = InitialKind.CANONICAL_BUMP
    amplitude: float = 1.0
    alpha: float = 1.0
    mass_C: float = 1.0
    t0: float = 0.1
    csv_path: str | None = None

    def __post_init__(self):
        if self.kind is InitialKind.CUSTOM_CSV and not self.csv_path:
            raise ConfigurationError("custom_csv initial data needs a csv_path")
        if self.kind is InitialKind.BARENBLATT and not self.t0 > 0:
            raise DomainError(f"Barenblatt initial data needs t0 > 0, got {self.t0}")

    def support_radius(self, dim):
        """Half-width of a box containing the support, or None when unknown."""
        if self.kind is InitialKind.CANONICAL_BUMP:
            return 1.0
        if self.kind is InitialKind.BARENBLATT:
            return barenblatt_radius(self.t0, self.alpha, self.mass_C, dim)
        return None

    def field(self, grid):
        if self.kind is InitialKind.CANONICAL_BUMP:
            def bump(*coords):
                values = np.full(coords[0].shape, float(self.amplitude))
                for x in coords:
                    values = values * np.where(np.abs(x) <= 1.0, np.cos(math.pi * x / 2.0) ** 2, 0.0)
                return values
            return Field.from_function(grid, bump)
        if self.kind is InitialKind.BARENBLATT:
            centres = np.stack(grid.mesh(), axis=-1)
            return Field(grid, exact_barenblatt(centres, self.t0, self.alpha, self.mass_C, grid.dim))
        return read_snapshot(Path(self.csv_path), grid)


@dataclass(frozen=True)
class Expectation:
    name: str
    threshold: float | None = None


@dataclass(frozen=True)
class ExpectationResult:
    name: str
    passed: bool
    value: float | None
    threshold: float | None
    detail: str = ""


@dataclass(frozen=True)
class ScenarioTemplate:
    """
    Registry entry. Without an f flux, kappa only enters the admissibility of audit
    pairs; flux-free scenarios register kappa = alpha. A companion is the scenario a
    peak_above_companion expectation is compared with, run on the same grid and horizon.
    """
    name: str
    description: str
    dim: int
    alpha: float
    kappa: float = 0.0
    velocity: str | None = None
    eps: float | None = None
    g_coeff: tuple | None = None
    g_kappa: float = 0.0
    initial: InitialKind = InitialKind.CANONICAL_BUMP
    amplitude: float = 1.0
    box: float = 4.0
    cells: int = 128
    horizon: float = 1.0
    output_interval: float = 0.02
    expectations: tuple = ()
    t0: float = 0.1
    mass_C: float = 1.0
    csv_path: str | None = None
    companion: str | None = None

    @property
    def b_name(self):
        if self.velocity is None:
            return None
        return self.velocity if self.eps is None else f"{self.velocity}:{self.eps:g}"


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    grid: Grid
    problem: ProblemSpec
    horizon: float
    output_interval: float
    expectations: tuple
    template: ScenarioTemplate

    @property
    def has_exact_solution(self):
        return self.problem.initial.kind is InitialKind.BARENBLATT


_CORE_CHECKS = (Expectation("no_blow_up"), Expectation("l1_decay"), Expectation("conservation"))
_MAXIMUM_PRINCIPLE = _CORE_CHECKS + (Expectation("linf_decay"),)


@dataclass(frozen=True)
class GrowthReference:
    """Peak growth max ||u||_inf / ||u0||_inf and its time, measured once on a reference run."""
    factor: float
    peak_time: float
    cells: int

    @property
    def threshold(self):
        return (1.0 - GROWTH_TOLERANCE) * self.factor


# Allowed shortfall of a registered run against its frozen reference factor
GROWTH_TOLERANCE = 0.2

FIG1_REFERENCE = GrowthReference(factor=4.7004, peak_time=1.35, cells=128)
FIG2_REFERENCE = GrowthReference(factor=1.5083, peak_time=0.02, cells=128)

# barenblatt_l1_error bound is this coefficient times h
BARENBLATT_ERROR_COEFFICIENT = 0.5

REGISTRY = {
    template.name: template for template in (
        ScenarioTemplate(
            "fig1", "Radial inward drift b = -|x|^2 x / (eps + |x|^4/4), eps = 1e-4; L^inf grows",
            dim=2, alpha=1.0, kappa=1.0, velocity="fig1_eps", eps=1e-4, horizon=FIG1_REFERENCE.peak_time,
            expectations=_CORE_CHECKS + (Expectation("linf_growth_factor", FIG1_REFERENCE.threshold),)),
        ScenarioTemplate(
            "fig1_deep", "Same drift with eps = 1e-10: a larger peak than fig1 at equal resolution",
            dim=2, alpha=1.0, kappa=1.0, velocity="fig1_eps", eps=1e-10,
            horizon=0.05, output_interval=0.001, companion="fig1",
            expectations=_CORE_CHECKS + (Expectation("peak_above_companion", 1.0),)),
        ScenarioTemplate(
            "fig2", "Anisotropic drift b = grad W concentrating on the x1 axis, eps = 1e-4",
            dim=2, alpha=2.0, kappa=1.0, velocity="fig2_eps", eps=1e-4,
            horizon=FIG2_REFERENCE.peak_time, output_interval=0.002,
            expectations=_CORE_CHECKS + (Expectation("linf_growth_factor", FIG2_REFERENCE.threshold),)),
        ScenarioTemplate(
            "barenblatt1d", "Pure diffusion from the Barenblatt profile at t0 = 0.1; exact solution known",
            dim=1, alpha=1.0, kappa=1.0, initial=InitialKind.BARENBLATT, cells=100, horizon=0.9,
            output_interval=0.01,
            expectations=_MAXIMUM_PRINCIPLE + (Expectation("barenblatt_l1_error", BARENBLATT_ERROR_COEFFICIENT),)),
        ScenarioTemplate(
            "pure_diffusion_2d", "Porous medium diffusion of the bump, no advection",
            dim=2, alpha=1.0, kappa=1.0, cells=64, expectations=_MAXIMUM_PRINCIPLE),
        ScenarioTemplate(
            "rotation_smoke", "Divergence-free rotation b = (-x2, x1), kappa = 1",
            dim=2, alpha=1.0, kappa=1.0, velocity="rotation", cells=64, horizon=0.5,
            output_interval=0.01, expectations=_MAXIMUM_PRINCIPLE),
        ScenarioTemplate(
            "expanding_drift", "Outward drift b = x, beta = -n < 0: the condition holds and L^inf decays",
            dim=2, alpha=1.0, kappa=1.0, velocity="expanding", cells=64, horizon=0.25,
            output_interval=0.01, expectations=_MAXIMUM_PRINCIPLE),
        ScenarioTemplate(
            "g_flux_2d", "Space-independent flux g = (1, 0.5)|u|u with porous medium diffusion",
            dim=2, alpha=1.0, kappa=1.0, g_coeff=(1.0, 0.5), g_kappa=1.0, cells=64, horizon=0.5,
            output_interval=0.01, expectations=_MAXIMUM_PRINCIPLE),
    )
}

OVERRIDE_KEYS = {
    "cells": int,
    "horizon": float,
    "output_interval": float,
    "eps": float,
    "amplitude": float,
    "box": float,
    "initial_csv": str,
}


def list_scenarios():
    return [(template.name, template.description) for template in REGISTRY.values()]


def _apply_overrides(template, overrides):
    changes = {}
    for key, raw in (overrides or {}).items():
        if key not in OVERRIDE_KEYS:
            logging.error(f"Unknown override '{key}' for scenario '{template.name}'")
            raise ConfigurationError(f"Unknown override '{key}' (allowed: {', '.join(sorted(OVERRIDE_KEYS))})")
        try:
            changes[key] = OVERRIDE_KEYS[key](raw)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Malformed override {key}={raw!r}: {e}") from e

    if "eps" in changes and template.eps is None:
        raise ConfigurationError(f"Scenario '{template.name}' has no eps parameter")
    if "eps" in changes and not changes["eps"] > 0:
        raise ConfigurationError(f"eps must be positive, got {changes['eps']}")
    if "amplitude" in changes and template.initial is not InitialKind.CANONICAL_BUMP:
        raise ConfigurationError(f"Scenario '{template.name}' has no amplitude parameter")
    if "horizon" in changes and changes["horizon"] < 0:
        raise ConfigurationError(f"horizon must be >= 0, got {changes['horizon']}")
    if "output_interval" in changes and not changes["output_interval"] > 0:
        raise ConfigurationError(f"output_interval must be positive, got {changes['output_interval']}")
    if "box" in changes and not changes["box"] > 0:
        raise ConfigurationError(f"box must be positive, got {changes['box']}")
    if "initial_csv" in changes:
        if not changes["initial_csv"].strip():
            raise ConfigurationError("initial_csv needs a file path")
        changes["csv_path"] = changes.pop("initial_csv").strip()
        changes["initial"] = InitialKind.CUSTOM_CSV
    return replace(template, **changes)


def build(name, overrides=None, refine=1):
    """
    Build a registered scenario, applying overrides and an integer refinement factor.
    A custom_csv initial datum is read here, so an unreadable file is a configuration error.
    """
    template = REGISTRY.get(name)
    if template is None:
        logging.error(f"Unknown scenario '{name}'")
        raise ConfigurationError(f"Unknown scenario '{name}' (known: {', '.join(REGISTRY)})")
    template = _apply_overrides(template, overrides)
    if int(refine) < 1:
        raise ConfigurationError(f"refine must be a positive integer, got {refine}")

    grid = Grid.square(-template.box, template.box, template.cells, template.dim).refined(refine)

    if template.velocity is not None:
        advection = AdvectionSpec.power_law(template.b_name, template.kappa, template.g_coeff, template.g_kappa)
    elif template.g_coeff is not None:
        advection = AdvectionSpec.g_only(template.g_coeff, template.g_kappa)
    else:
        advection = AdvectionSpec()

    initial = InitialDatum(template.initial, template.amplitude, template.alpha, template.mass_C, template.t0,
                           template.csv_path)
    problem = ProblemSpec(advection, DiffusionSpec(template.alpha), initial, template.dim)

    if initial.kind is InitialKind.CUSTOM_CSV:
        initial.field(grid)
    radius = initial.support_radius(template.dim)
    if radius is not None and radius >= template.box - grid.h_min:
        logging.warning(f"Scenario '{name}': initial support (radius {radius:g}) reaches the boundary ring")

    scenario = Scenario(template.name, template.description, grid, problem, template.horizon,
                        template.output_interval, template.expectations, template)
    logging.debug(f"Scenario '{name}' built: {grid.describe()}, {advection.describe()}")
    return scenario


def companion_scenario(scenario):
    """The companion of a scenario on the same grid, horizon and output times, or None."""
    template = scenario.template
    if template.companion is None:
        return None
    overrides = {"cells": scenario.grid.cells[0], "horizon": scenario.horizon,
                 "output_interval": scenario.output_interval, "box": template.box}
    if REGISTRY[template.companion].initial is InitialKind.CANONICAL_BUMP:
        overrides["amplitude"] = template.amplitude
    return build(template.companion, overrides)


def barenblatt_l1_error(scenario, field):
    """sum |u_i - u_exact(x_i, t0 + t)| h^n against the exact solution."""
    if not scenario.has_exact_solution:
        raise ConfigurationError(f"Scenario '{scenario.name}' has no exact solution")
    initial = scenario.problem.initial
    grid = field.grid
    centres = np.stack(grid.mesh(), axis=-1)
    exact = exact_barenblatt(centres, initial.t0 + field.time, initial.alpha, initial.mass_C, grid.dim)
    return float(np.sum(np.abs(field.values - exact)) * grid.cell_volume)


def evaluate_expectations(scenario, report, companion_report=None):
    """
    Judge a finished run against the scenario's expectations. peak_above_companion needs
    the report of the companion run.
    """
    results = []
    evolved = len(report.times) > 1
    for expectation in scenario.expectations:
        name = expectation.name
        if name == "no_blow_up":
            blown = diagnostics.RunFlag.BLOW_UP in report.flags
            results.append(ExpectationResult(name, not blown, report.blow_up_time, None,
                                             "blow-up detected" if blown else ""))
        elif name == "l1_decay":
            check = diagnostics.check_l1_decay(report)
            results.append(ExpectationResult(name, check.passed, check.worst_increment, None,
                                             f"worst at output {check.worst_index}" if not check.passed else ""))
        elif name == "linf_decay":
            check = diagnostics.check_linf_decay(report)
            results.append(ExpectationResult(name, check.passed, check.worst_increment, None,
                                             f"worst at output {check.worst_index}" if not check.passed else ""))
        elif name == "conservation":
            error, tolerance = diagnostics.conservation_error(report)
            results.append(ExpectationResult(name, error <= tolerance, error, tolerance))
        elif name == "linf_growth_factor":
            factor = diagnostics.growth_factor(report)
            if not evolved:
                results.append(ExpectationResult(name, True, factor, expectation.threshold, "skipped: no evolution"))
            else:
                results.append(ExpectationResult(name, factor >= expectation.threshold, factor,
                                                 expectation.threshold))
        elif name == "barenblatt_l1_error":
            if not scenario.has_exact_solution:
                results.append(ExpectationResult(name, True, None, expectation.threshold,
                                                 "skipped: initial datum has no exact solution"))
                continue
            error = barenblatt_l1_error(scenario, report.final_field)
            bound = expectation.threshold * scenario.grid.h_min
            results.append(ExpectationResult(name, error <= bound, error, bound))
        elif name == "peak_above_companion":
            if not evolved:
                results.append(ExpectationResult(name, True, 1.0, expectation.threshold, "skipped: no evolution"))
                continue
            if companion_report is None:
                raise ConfigurationError(f"Scenario '{scenario.name}' needs its companion run "
                                         f"'{scenario.template.companion}'")
            companion_peak = companion_report.Minf
            ratio = report.Minf / companion_peak if companion_peak > 0 else math.inf
            results.append(ExpectationResult(name, ratio > expectation.threshold, ratio, expectation.threshold,
                                             f"companion {scenario.template.companion} peak {companion_peak:.6g}"))
        else:
            raise ConfigurationError(f"Unknown expectation '{name}'")
    return results
