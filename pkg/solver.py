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
Explicit conservative finite-volume solver.

The semi-discretization is

    du_i/dt = mu(t) (Laplacian_h Phi(u))_i - (div_h H)_i

with Phi(u) = |u|^alpha u / (alpha + 1) on a 3-point (1D) or 5-point (2D) stencil and
H the local Lax-Friedrichs flux of f + g evaluated at face midpoints. Every boundary
face carries zero flux, so the discrete mass is conserved up to roundoff.

Key functionalities include:
- Right-hand sides for the diffusion and advection parts.
- A combined CFL step size and forward Euler or Heun (SSP-RK2) steps.
- Blow-up detection (non-finite value or |u| > 1e100) and a boundary-ring guard.
- The time loop, with diagnostics collected at every output time.
"""
__author__ = "PorousFlow developers"
__date__ = "2026-10-18"  # Last update


# solver.py


import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np

import diagnostics
import model
from grid_field import Field, phi, lq_norm
from utils import DomainError, ConfigurationError, BlowUpError, OVERFLOW_LIMIT

__all__ = [
    "Integrator", "SchemeConfig", "SolverState", "phi", "diffusion_rhs", "advection_rhs",
    "max_wave_speed", "stable_dt", "step", "run", "initial_state", "support_margin",
]


class Integrator(Enum):
    EULER = "euler"
    HEUN = "heun"


@dataclass(frozen=True)
class SchemeConfig:
    cfl_adv: float = 0.4
    cfl_diff: float = 0.4
    integrator: Integrator = Integrator.EULER
    boundary_guard: float = 1e-8
    boundary: str = "no_flux"

    def __post_init__(self):
        if not 0 < self.cfl_adv <= 1 or not 0 < self.cfl_diff <= 1:
            raise ConfigurationError(f"CFL numbers must lie in (0, 1], got {self.cfl_adv}, {self.cfl_diff}")
        if self.boundary_guard < 0:
            raise ConfigurationError(f"boundary_guard must be >= 0, got {self.boundary_guard}")
        if self.boundary != "no_flux":
            raise ConfigurationError(f"Only no-flux boundaries are supported, got '{self.boundary}'")
        if not isinstance(self.integrator, Integrator):
            object.__setattr__(self, "integrator", Integrator(self.integrator))


@dataclass(frozen=True)
class SolverState:
    field: Field
    t: float
    step_count: int = 0
    dt_last: float = 0.0
    guard_violations: int = 0

    def __post_init__(self):
        if self.t < 0:
            raise DomainError(f"Solver time must be nonnegative, got {self.t}")
        if self.field.time != self.t:
            raise DomainError(f"Field time {self.field.time} differs from solver time {self.t}")


def _abs_power(a, exponent):
    """a ** exponent for a >= 0, with the common integer exponents done by multiplication."""
    if exponent == 0:
        return np.ones_like(a)
    if exponent == 1:
        return a
    if exponent == 2:
        return a * a
    return a ** exponent


def _signed_power(u, exponent):
    """|u|^exponent u."""
    return _abs_power(np.abs(u), exponent) * u


def _transform(u, alpha):
    return _signed_power(u, alpha) / (alpha + 1.0)


def _pad_faces(face_values, axis):
    """Append the zero boundary fluxes on both ends of `axis`."""
    pad = [(0, 0)] * face_values.ndim
    pad[axis] = (1, 1)
    return np.pad(face_values, pad)


def diffusion_rhs(field, alpha, mu_t):
    """mu(t) times the 3/5-point Laplacian of Phi(u) with no-flux faces."""
    if not mu_t > 0:
        logging.error(f"diffusion_rhs called with mu_t={mu_t}")
        raise DomainError(f"mu(t) must be positive, got {mu_t}")

    grid = field.grid
    transformed = _transform(field.values, alpha)
    increment = np.zeros(grid.cells)
    for axis in range(grid.dim):
        face_flux = np.diff(transformed, axis=axis) / grid.h[axis]
        increment += np.diff(_pad_faces(face_flux, axis), axis=axis) / grid.h[axis]
    return mu_t * increment


@lru_cache(maxsize=64)
def _steady_face_velocity(grid, b_name, axis):
    coords = grid.face_mesh(axis)
    velocity = model.velocity_field(b_name).components(coords, 0.0)[axis]
    velocity = np.array(velocity, dtype=float)
    velocity.flags.writeable = False
    return velocity


def face_velocity(grid, b_name, axis, t):
    """Normal velocity component b . e_axis at the interior faces normal to `axis`."""
    field = model.velocity_field(b_name)
    if grid.dim not in field.dims:
        raise ConfigurationError(f"Velocity '{b_name}' is not defined in {grid.dim}D")
    if field.steady:
        return _steady_face_velocity(grid, b_name, axis)
    return np.asarray(field.components(grid.face_mesh(axis), t)[axis], dtype=float)


def _axis_flux(u, spec, grid, axis, t):
    """
    Local Lax-Friedrichs flux H(u_L, u_R) on the interior faces normal to `axis`
    and the wave speed lambda used in it.
    """
    n = u.shape[axis]
    u_left = np.take(u, np.arange(0, n - 1), axis=axis)
    u_right = np.take(u, np.arange(1, n), axis=axis)
    a_max = np.maximum(np.abs(u_left), np.abs(u_right))

    flux = np.zeros_like(u_left)
    speed = np.zeros_like(u_left)
    if spec.has_f:
        b = face_velocity(grid, spec.b_name, axis, t)
        flux += 0.5 * b * (_signed_power(u_left, spec.kappa) + _signed_power(u_right, spec.kappa))
        speed += np.abs(b) * (spec.kappa + 1.0) * _abs_power(a_max, spec.kappa)
    if spec.g_coeff is not None:
        c = spec.g_coeff[axis]
        flux += 0.5 * c * (_signed_power(u_left, spec.g_kappa) + _signed_power(u_right, spec.g_kappa))
        speed += abs(c) * (spec.g_kappa + 1.0) * _abs_power(a_max, spec.g_kappa)

    flux -= 0.5 * speed * (u_right - u_left)
    return flux, speed


def advection_rhs(field, spec, t):
    """Discrete divergence of the LLF flux of f + g; boundary faces carry zero flux."""
    grid = field.grid
    increment = np.zeros(grid.cells)
    if not spec.has_f and spec.g_coeff is None:
        return increment
    for axis in range(grid.dim):
        flux, _ = _axis_flux(field.values, spec, grid, axis, t)
        increment += np.diff(_pad_faces(flux, axis), axis=axis) / grid.h[axis]
    return increment


def max_wave_speed(field, spec, t):
    """Largest LLF wave speed lambda over every interior face of the grid."""
    grid = field.grid
    if not spec.has_f and spec.g_coeff is None:
        return 0.0
    lambda_max = 0.0
    for axis in range(grid.dim):
        _, speed = _axis_flux(field.values, spec, grid, axis, t)
        if speed.size:
            lambda_max = max(lambda_max, float(np.max(speed)))
    return lambda_max


def stable_dt(state, problem, config, cap=math.inf):
    """
    dt = min(cfl_adv h / lambda_max, cfl_diff h^2 / (2 n mu(t) Phi'_max)) with h = h_min,
    lambda_max the largest face wave speed and Phi'_max = max |u|^alpha. Returns `cap`
    when nothing moves (u = 0).
    """
    field = state.field
    grid = field.grid

    lambda_max = max_wave_speed(field, problem.advection, state.t)
    dt_adv = config.cfl_adv * grid.h_min / lambda_max if lambda_max > 0 else math.inf

    peak = field.max_abs
    phi_prime_max = peak ** problem.diffusion.alpha if peak > 0 else 0.0
    mu_t = problem.diffusion.mu(state.t)
    if phi_prime_max > 0:
        dt_diff = config.cfl_diff * grid.h_min ** 2 / (2.0 * grid.dim * mu_t * phi_prime_max)
    else:
        dt_diff = math.inf

    if math.isinf(dt_adv) and math.isinf(dt_diff):
        return cap
    return min(dt_adv, dt_diff)


def _rhs(field, problem, t):
    increment = diffusion_rhs(field, problem.diffusion.alpha, problem.diffusion.mu(t))
    increment -= advection_rhs(field, problem.advection, t)
    return increment


def _check_finite(values, t):
    bad = ~np.isfinite(values) | (np.abs(values) > OVERFLOW_LIMIT)
    if np.any(bad):
        index = tuple(int(i) for i in np.unravel_index(int(np.flatnonzero(bad)[0]), values.shape))
        logging.error(f"Non-finite or overflowing value at t={t:.17g}, cell {index}")
        raise BlowUpError(t, index, float(values[index]))


def guard_hit(field, guard):
    """True when a cell of the outermost ring exceeds guard * max|u|."""
    magnitudes = np.abs(field.values)
    peak = float(np.max(magnitudes))
    if peak == 0.0:
        return False
    return float(np.max(magnitudes[field.grid.boundary_ring])) > guard * peak


def step(state, problem, config, dt):
    """One forward Euler or Heun step of size dt (the caller keeps dt <= stable_dt)."""
    if not dt > 0:
        raise DomainError(f"Time step must be positive, got {dt}")

    field = state.field
    t_new = state.t + dt
    u = field.values

    stage = u + dt * _rhs(field, problem, state.t)
    if config.integrator is Integrator.HEUN:
        _check_finite(stage, t_new)
        stage_field = Field(field.grid, stage, t_new)
        u_new = 0.5 * (u + stage + dt * _rhs(stage_field, problem, t_new))
    else:
        u_new = stage
    _check_finite(u_new, t_new)

    new_field = Field(field.grid, u_new, t_new)
    violations = state.guard_violations
    if guard_hit(new_field, config.boundary_guard):
        if violations == 0:
            logging.warning(f"Boundary guard exceeded at t={t_new:.6g}: the box looks too small")
        violations += 1

    return SolverState(new_field, t_new, state.step_count + 1, dt, violations)


# Zero cells required between the initial support and the outermost ring
SUPPORT_MARGIN_CELLS = 3


def support_margin(field):
    """Smallest number of zero cells separating the support of u from the outermost ring."""
    grid = field.grid
    occupied_mask = field.values != 0.0
    if not occupied_mask.any():
        return min(grid.cells)
    margin = min(grid.cells)
    for axis in range(grid.dim):
        others = tuple(a for a in range(grid.dim) if a != axis)
        occupied = np.flatnonzero(occupied_mask.any(axis=others) if others else occupied_mask)
        margin = min(margin, int(occupied[0]) - 1, grid.cells[axis] - 2 - int(occupied[-1]))
    return margin


def initial_state(problem, grid):
    field = problem.initial.field(grid)
    if grid.dim != problem.dim:
        raise ConfigurationError(f"Grid is {grid.dim}D but the problem is {problem.dim}D")
    if not field.is_finite():
        raise DomainError("The initial datum is not finite")
    return SolverState(field, 0.0)


def _output_times(horizon, interval):
    count = math.ceil(horizon / interval - 1e-9) if horizon > 0 else 0
    return [min(k * interval, horizon) for k in range(1, count + 1)]


def _record(report, state, problem, grid, dt_elapsed):
    spec = problem.advection
    u_range = max(state.field.max_abs, 1.0)
    F_t = model.empirical_F(spec, grid, state.t, u_range)
    diagnostics.update_diagnostics(report, state.field, dt_elapsed, F_t,
                                   problem.diffusion.mu(state.t), problem.diffusion.alpha)


def run(problem, grid, config, horizon, output_interval, observer=None, name="", p=4.0, extra_orders=()):
    """
    Advance from t = 0 to `horizon`, collecting diagnostics every `output_interval`.

    observer(state, report) is called after the initial record and after every output
    time. A blow-up stops the loop and flags the report; guard violations flag it as
    boundary-contaminated.
    """
    if horizon < 0:
        raise DomainError(f"horizon must be >= 0, got {horizon}")
    if not output_interval > 0:
        raise DomainError(f"output_interval must be positive, got {output_interval}")

    state = initial_state(problem, grid)
    report = diagnostics.new_report(name, grid.dim, p, extra_orders)
    report.initial_field = state.field
    report.notes.append("F(t) is sampled on the cell centres of the truncated box only.")
    if guard_hit(state.field, config.boundary_guard) or support_margin(state.field) < SUPPORT_MARGIN_CELLS:
        logging.warning(f"The initial support is within {SUPPORT_MARGIN_CELLS} cells of the boundary ring")
        state = replace(state, guard_violations=1)

    logging.info(f"Run '{name}' started: {grid.describe()}, horizon {horizon:g}, "
                 f"{problem.advection.describe()}, alpha={problem.diffusion.alpha:g}")

    _record(report, state, problem, grid, 0.0)
    if observer:
        observer(state, report)

    last_output = 0.0
    for target in _output_times(horizon, output_interval):
        try:
            while target - state.t > 1e-12 * max(1.0, target):
                dt = min(stable_dt(state, problem, config, cap=output_interval), target - state.t)
                if not dt > 1e-300 * max(1.0, target):
                    raise BlowUpError(state.t, None, state.field.max_abs)
                state = step(state, problem, config, dt)
        except BlowUpError as e:
            logging.error(f"Run '{name}' blew up: {e}")
            report.flags.add(diagnostics.RunFlag.BLOW_UP)
            report.blow_up_time = state.t
            report.blow_up_cell = e.cell_index
            break

        # Land exactly on the output time
        state = replace(state, t=target, field=state.field.with_values(state.field.values, target))
        _record(report, state, problem, grid, state.t - last_output)
        last_output = state.t
        logging.debug(f"t={state.t:.6g} steps={state.step_count} dt={state.dt_last:.3e} "
                      f"linf={lq_norm(state.field, math.inf):.6g}")
        if observer:
            observer(state, report)

    report.final_field = state.field
    report.steps = state.step_count
    report.guard_violations = state.guard_violations
    if state.guard_violations > 0:
        report.flags.add(diagnostics.RunFlag.BOUNDARY_CONTAMINATED)

    logging.info(f"Run '{name}' finished at t={state.t:.6g} after {state.step_count} steps, "
                 f"flags={sorted(flag.value for flag in report.flags)}")
    return report
