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
Continuous problem data for

    u_t + div f(x,t,u) + div g(t,u) = mu(t) div(|u|^alpha grad u)

with f = b(x,t) |u|^kappa u and g = c |u|^kappa_g u, plus sample-based checkers
for the structural conditions of the theory:

- the flux growth bound |f| <= F(t) |u|^(kappa+1)   (empirical_F)
- the monotonicity condition sum_i u df_i/dx_i >= 0  (check_condition_1_6)
- the ellipticity bounds of a general diffusion flux A(x,t,u,v) (check_ellipticity_2_2)

Velocity fields b come from a closed catalog addressed by name, e.g. "fig1_eps:1e-4",
"rotation" or "constant:1,0.5". Every evaluator accepts a single point of shape (n,)
or a stack of points of shape (..., n).
"""
__author__ = "PorousFlow developers"
__date__ = "2026-10-18"  # Last update


# model.py


import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, TYPE_CHECKING

import numpy as np

from utils import DomainError, ConfigurationError

if TYPE_CHECKING:
    from scenarios import InitialDatum

# Negative values of sum_i u df_i/dx_i above this are not counted as violations
CONDITION_TOLERANCE = -1e-9


class AdvectionKind(Enum):
    ZERO = "zero"
    POWER_LAW_B = "power_law_b"


@dataclass(frozen=True)
class VelocityField:
    name: str
    dims: tuple
    components: Callable
    steady: bool = True


def _fig1(eps):
    def components(coords, t):
        r2 = sum(x * x for x in coords)
        scale = -r2 / (eps + r2 * r2 / 4.0)
        return tuple(scale * x for x in coords)
    return components


def _fig2(coefficient, shift, eps):
    def components(coords, t):
        x1, x2 = coords
        a = shift + x1 * x1
        c = eps + x2 * x2
        return (-coefficient * x1 / (a * a * c),
                -coefficient * x2 / (a * c * c))
    return components


def _parse_vector(text, b_name):
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as e:
        raise ConfigurationError(f"Malformed constant velocity '{b_name}': {e}") from e


def _optional_float(text, default, b_name):
    if not text:
        return default
    try:
        return float(text)
    except ValueError as e:
        raise ConfigurationError(f"Malformed parameter in velocity '{b_name}': {e}") from e


@lru_cache(maxsize=None)
def velocity_field(b_name: str) -> VelocityField:
    """Resolve a catalog identifier into a VelocityField."""
    name, _, arg = str(b_name).strip().partition(":")

    if name == "zero":
        return VelocityField(b_name, (1, 2), lambda coords, t: tuple(np.zeros_like(x) for x in coords))
    if name == "linear":
        return VelocityField(b_name, (1, 2), lambda coords, t: tuple(-x for x in coords))
    if name == "expanding":
        return VelocityField(b_name, (1, 2), lambda coords, t: tuple(x + 0.0 for x in coords))
    if name == "rotation":
        return VelocityField(b_name, (2,), lambda coords, t: (-coords[1], coords[0] + 0.0))
    if name == "constant":
        if not arg:
            raise ConfigurationError(f"Velocity '{b_name}' needs a value, e.g. constant:1 or constant:1,0.5")
        vector = _parse_vector(arg, b_name)
        dims = (1, 2) if len(vector) == 1 else (len(vector),)

        def constant(coords, t):
            values = vector * len(coords) if len(vector) == 1 else vector
            return tuple(np.full_like(x, v, dtype=float) for x, v in zip(coords, values))
        return VelocityField(b_name, dims, constant)
    if name == "fig1_eps":
        return VelocityField(b_name, (1, 2), _fig1(_optional_float(arg, 1e-4, b_name)))
    if name == "fig2_eps":
        return VelocityField(b_name, (2,), _fig2(4.0 / 25.0, 16.0, _optional_float(arg, 1e-4, b_name)))
    if name == "fig2b":
        return VelocityField(b_name, (2,), _fig2(1e-5, 4.0, _optional_float(arg, 1e-10, b_name)))

    logging.error(f"Unknown velocity field '{b_name}'")
    raise ConfigurationError(f"Unknown velocity field '{b_name}'")


def _as_points(x):
    points = np.asarray(x, dtype=float)
    if points.ndim == 0:
        points = points.reshape(1)
    return points


def _components(b_name, points, t):
    field = velocity_field(b_name)
    n = points.shape[-1]
    if n not in field.dims:
        raise ConfigurationError(f"Velocity '{b_name}' is not defined in {n} dimension(s)")
    coords = tuple(points[..., i] for i in range(n))
    return field.components(coords, t)


def eval_b(b_name, x, t=0.0):
    """Velocity b(x, t) with the same trailing shape as x."""
    points = _as_points(x)
    return np.stack(_components(b_name, points, t), axis=-1)


def beta(b_name, x, t=0.0):
    """beta = -div b by central differences with step 1e-6 (1 + |x|)."""
    points = _as_points(x)
    n = points.shape[-1]
    step = 1e-6 * (1.0 + np.linalg.norm(points, axis=-1))
    divergence = np.zeros(points.shape[:-1])
    for i in range(n):
        shift = np.zeros_like(points)
        shift[..., i] = step
        forward = _components(b_name, points + shift, t)[i]
        backward = _components(b_name, points - shift, t)[i]
        divergence = divergence + (forward - backward) / (2.0 * step)
    result = -divergence
    return float(result) if result.ndim == 0 else result


@dataclass(frozen=True)
class AdvectionSpec:
    kind: AdvectionKind = AdvectionKind.ZERO
    b_name: str = "zero"
    kappa: float = 0.0
    g_coeff: tuple | None = None
    g_kappa: float = 0.0

    def __post_init__(self):
        if self.kappa < 0 or self.g_kappa < 0:
            raise DomainError(f"kappa and kappa_g must be >= 0 (got {self.kappa}, {self.g_kappa})")
        if self.kind is AdvectionKind.POWER_LAW_B:
            velocity_field(self.b_name)
        if self.g_coeff is not None:
            object.__setattr__(self, "g_coeff", tuple(float(c) for c in self.g_coeff))

    @classmethod
    def power_law(cls, b_name, kappa, g_coeff=None, g_kappa=0.0):
        return cls(AdvectionKind.POWER_LAW_B, b_name, kappa, g_coeff, g_kappa)

    @classmethod
    def g_only(cls, g_coeff, g_kappa):
        return cls(AdvectionKind.ZERO, "zero", 0.0, g_coeff, g_kappa)

    @property
    def has_f(self):
        return self.kind is AdvectionKind.POWER_LAW_B

    def describe(self):
        parts = [f"f = b|u|^{self.kappa:g} u, b = {self.b_name}" if self.has_f else "f = 0"]
        if self.g_coeff is not None:
            parts.append(f"g = {self.g_coeff}|u|^{self.g_kappa:g} u")
        return "; ".join(parts)


@dataclass(frozen=True)
class TimeFunction:
    """mu(t) or M(t): a constant or a table of (t, value) pairs, linearly interpolated and clamped."""
    times: tuple
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(v) for v in self.times))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.times or len(self.times) != len(self.values):
            raise ConfigurationError("A time table needs matching, nonempty times and values")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ConfigurationError(f"Time table abscissae must increase strictly: {self.times}")

    @classmethod
    def constant(cls, value):
        return cls((0.0,), (value,))

    @classmethod
    def table(cls, pairs):
        pairs = sorted(pairs)
        return cls(tuple(t for t, _ in pairs), tuple(v for _, v in pairs))

    def __call__(self, t):
        return float(np.interp(t, self.times, self.values))

    @property
    def minimum(self):
        return min(self.values)


@dataclass(frozen=True)
class DiffusionSpec:
    alpha: float
    mu: TimeFunction = TimeFunction.constant(1.0)
    M_bound: TimeFunction | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        # Piecewise linear interpolation of positive nodes stays positive
        if not self.mu.minimum > 0:
            raise DomainError(f"mu(t) must stay positive, table values {self.mu.values}")


@dataclass(frozen=True)
class ProblemSpec:
    advection: AdvectionSpec
    diffusion: DiffusionSpec
    initial: "InitialDatum"
    dim: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ConfigurationError(f"Problem dimension must be 1 or 2, got {self.dim}")
        if self.advection.has_f and self.dim not in velocity_field(self.advection.b_name).dims:
            raise ConfigurationError(f"Velocity '{self.advection.b_name}' is not defined in {self.dim}D")
        if self.advection.g_coeff is not None and len(self.advection.g_coeff) != self.dim:
            raise ConfigurationError(f"g coefficient {self.advection.g_coeff} does not match dimension {self.dim}")


def eval_f(spec, x, t, u):
    """f(x,t,u) = b(x,t) |u|^kappa u; zero vector for the zero kind."""
    points = _as_points(x)
    if not spec.has_f:
        return np.zeros_like(points)
    u = np.asarray(u, dtype=float)
    return eval_b(spec.b_name, points, t) * (np.abs(u) ** spec.kappa * u)[..., None]


def eval_g(spec, t, u):
    """g(t,u) = c |u|^kappa_g u; None when the spec has no g."""
    if spec.g_coeff is None:
        return None
    u = np.asarray(u, dtype=float)
    return np.asarray(spec.g_coeff) * (np.abs(u) ** spec.g_kappa * u)[..., None]


def _cell_centres(grid):
    return np.stack(grid.mesh(), axis=-1)


def _condition_points(grid):
    """Cell centres followed by the interior face points, flattened to shape (N, n)."""
    meshes = [grid.mesh()] + [grid.face_mesh(axis) for axis in range(grid.dim)]
    return np.concatenate([np.stack(mesh, axis=-1).reshape(-1, grid.dim) for mesh in meshes])


def empirical_F(spec, grid, t, u_range, samples=33):
    """
    Tightest F(t) on the sample: max over cell centres and u in [-u_range, u_range]
    of |f(x,t,u)| / |u|^(kappa+1).
    """
    if not u_range > 0:
        raise DomainError(f"u_range must be positive, got {u_range}")
    if not spec.has_f:
        return 0.0

    centres = _cell_centres(grid)
    speed = np.linalg.norm(eval_b(spec.b_name, centres, t), axis=-1)
    u = np.linspace(-u_range, u_range, samples)
    u = u[u != 0.0]
    growth = np.abs(u) ** spec.kappa * np.abs(u) / np.abs(u) ** (spec.kappa + 1.0)
    ratios = speed[..., None] * growth

    if not np.all(np.isfinite(ratios)):
        index = np.unravel_index(np.flatnonzero(~np.isfinite(ratios))[0], ratios.shape)
        x_bad = tuple(float(c) for c in centres[index[:-1]])
        u_bad = float(u[index[-1]])
        logging.error(f"Non-finite flux sample at x={x_bad}, u={u_bad}")
        raise DomainError(f"Non-finite flux sample at x={x_bad}, u={u_bad}")
    return float(np.max(ratios))


@dataclass(frozen=True)
class ConditionReport:
    holds: bool
    worst_x: tuple
    worst_u: float
    worst_value: float


def check_condition_1_6(spec, grid, t, u_samples):
    """
    Sample sum_i u df_i/dx_i (x,t,u) >= 0 on cell centres and interior faces x u_samples.
    For the power-law flux this is -beta(x,t) |u|^kappa u^2; g never contributes. Faces
    are where the scheme evaluates b.
    """
    u = np.asarray(list(u_samples), dtype=float)
    if u.size == 0:
        raise DomainError("check_condition_1_6 needs at least one u sample")

    points = _condition_points(grid)
    if spec.has_f:
        b = beta(spec.b_name, points, t)
        values = -np.asarray(b)[..., None] * (np.abs(u) ** spec.kappa * u * u)
    else:
        values = np.zeros(points.shape[:-1] + (u.size,))

    flat = int(np.argmin(values))
    index = np.unravel_index(flat, values.shape)
    worst_value = float(values[index])
    report = ConditionReport(
        holds=worst_value >= CONDITION_TOLERANCE,
        worst_x=tuple(float(c) for c in points[index[:-1]]),
        worst_u=float(u[index[-1]]),
        worst_value=worst_value,
    )
    logging.debug(f"Condition check on {spec.describe()}: {report}")
    return report


@dataclass(frozen=True)
class BetaSummary:
    minimum: float
    maximum: float
    argmax: tuple


def beta_summary(b_name, grid, t=0.0):
    """Range of beta over cell centres and interior faces, for the validator's sign report."""
    points = _condition_points(grid)
    values = np.asarray(beta(b_name, points, t))
    index = np.unravel_index(int(np.argmax(values)), values.shape)
    return BetaSummary(float(values.min()), float(values.max()),
                       tuple(float(c) for c in points[index]))


def isotropic_flux(diffusion):
    """A(x,t,u,v) = mu(t) |u|^alpha v."""
    def flux(x, t, u, v):
        return diffusion.mu(t) * abs(u) ** diffusion.alpha * np.asarray(v, dtype=float)
    return flux


@dataclass(frozen=True)
class EllipticityReport:
    lower_holds: bool
    upper_holds: bool
    worst_lower_margin: float
    worst_upper_margin: float
    worst_lower_sample: tuple | None
    worst_upper_sample: tuple | None
    required_M: float


def check_ellipticity_2_2(A_eval, diffusion, samples, rel_tol=1e-12):
    """
    Check <A, v> >= mu(t)|u|^alpha |v|^2 and |A| <= M(t)|u|^alpha |v| on samples (x,t,u,v).

    Margins are left side minus right side for the lower bound and right minus left
    for the upper one, so a negative margin is a violation. required_M is the smallest
    M that would satisfy the upper bound on every sample.
    """
    if diffusion.M_bound is None:
        logging.error("check_ellipticity_2_2 called without M(t)")
        raise ConfigurationError("The ellipticity check needs M(t) in the diffusion spec")

    worst_lower, worst_upper = np.inf, np.inf
    lower_sample = upper_sample = None
    lower_holds = upper_holds = True
    required_M = 0.0

    for sample in samples:
        x, t, u, v = sample
        v = np.asarray(v, dtype=float)
        a = np.asarray(A_eval(x, t, u, v), dtype=float)
        weight = abs(u) ** diffusion.alpha
        v_norm = float(np.linalg.norm(v))
        a_norm = float(np.linalg.norm(a))

        lower_rhs = diffusion.mu(t) * weight * v_norm ** 2
        lower_margin = float(np.dot(a, v)) - lower_rhs
        upper_rhs = diffusion.M_bound(t) * weight * v_norm
        upper_margin = upper_rhs - a_norm

        if lower_margin < -rel_tol * max(1.0, abs(lower_rhs)):
            lower_holds = False
        if upper_margin < -rel_tol * max(1.0, abs(upper_rhs)):
            upper_holds = False
        if lower_margin < worst_lower:
            worst_lower, lower_sample = lower_margin, sample
        if upper_margin < worst_upper:
            worst_upper, upper_sample = upper_margin, sample
        if weight * v_norm > 0:
            required_M = max(required_M, a_norm / (weight * v_norm))

    return EllipticityReport(lower_holds, upper_holds,
                             0.0 if lower_sample is None else worst_lower,
                             0.0 if upper_sample is None else worst_upper,
                             lower_sample, upper_sample, required_M)
