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
Discrete geometry and field storage.

A Grid is a uniform cell-centred Cartesian mesh on a box in 1 or 2 dimensions.
A Field holds one value of u per cell at one time level. Values are stored as a
numpy array of shape grid.cells (axis 0 is x1, axis 1 is x2), read-only once built.

Key functionalities include:
- Discrete L^q norms and signed mass with midpoint quadrature (value x cell volume).
- The discrete space integral of |grad Phi(u)|^2 with no-flux (mirror) boundaries.
- Snapshot export/import as CSV (header x[,y],u; row-major; 17 significant digits).
"""
__author__ = "PorousFlow developers"
__date__ = "2026-10-18"  # Last update


# grid_field.py


import logging
import math
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from pathlib import Path

import numpy as np

from utils import DomainError, ConfigurationError

AXIS_NAMES = ("x", "y")


@dataclass(frozen=True)
class Grid:
    extent_min: tuple
    extent_max: tuple
    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, "extent_min", tuple(float(v) for v in self.extent_min))
        object.__setattr__(self, "extent_max", tuple(float(v) for v in self.extent_max))
        object.__setattr__(self, "cells", tuple(int(v) for v in self.cells))

        if len(self.cells) not in (1, 2):
            raise ConfigurationError(f"Grid dimension must be 1 or 2, got {len(self.cells)}")
        if not len(self.extent_min) == len(self.extent_max) == len(self.cells):
            raise ConfigurationError("extent_min, extent_max and cells must have the same length")
        for axis in range(len(self.cells)):
            if self.cells[axis] < 4:
                raise ConfigurationError(f"Grid needs at least 4 cells per axis (axis {axis}: {self.cells[axis]})")
            if not self.extent_max[axis] > self.extent_min[axis]:
                raise ConfigurationError(f"Empty extent on axis {axis}: [{self.extent_min[axis]}, {self.extent_max[axis]}]")

    @classmethod
    def square(cls, lo, hi, cells, dim=2):
        return cls((lo,) * dim, (hi,) * dim, (cells,) * dim)

    @property
    def dim(self):
        return len(self.cells)

    @property
    def h(self):
        return tuple((hi - lo) / n for lo, hi, n in zip(self.extent_min, self.extent_max, self.cells))

    @property
    def h_min(self):
        return min(self.h)

    @property
    def cell_volume(self):
        return math.prod(self.h)

    @property
    def size(self):
        return math.prod(self.cells)

    def centers(self, axis):
        """Cell centre coordinates x_i = extent_min + (i + 1/2) h along one axis."""
        return self.extent_min[axis] + (np.arange(self.cells[axis]) + 0.5) * self.h[axis]

    def mesh(self):
        """Cell centres as a tuple of arrays of shape cells (ij indexing)."""
        return tuple(np.meshgrid(*(self.centers(axis) for axis in range(self.dim)), indexing="ij"))

    def face_mesh(self, axis):
        """
        Coordinates of the interior faces normal to `axis`: arrays of shape cells with
        cells[axis] reduced by one. The face between cells i and i+1 sits at
        extent_min + (i + 1) h.
        """
        axes = []
        for a in range(self.dim):
            if a == axis:
                axes.append(self.extent_min[a] + np.arange(1, self.cells[a]) * self.h[a])
            else:
                axes.append(self.centers(a))
        return tuple(np.meshgrid(*axes, indexing="ij"))

    @cached_property
    def boundary_ring(self):
        """Boolean mask of the outermost ring of cells."""
        mask = np.zeros(self.cells, dtype=bool)
        for axis in range(self.dim):
            index = [slice(None)] * self.dim
            index[axis] = 0
            mask[tuple(index)] = True
            index[axis] = -1
            mask[tuple(index)] = True
        return mask

    def refined(self, factor):
        return Grid(self.extent_min, self.extent_max, tuple(n * int(factor) for n in self.cells))

    def describe(self):
        box = " x ".join(f"[{lo:g}, {hi:g}]" for lo, hi in zip(self.extent_min, self.extent_max))
        return f"{'x'.join(str(n) for n in self.cells)} cells on {box}"


@dataclass(frozen=True, eq=False)
class Field:
    grid: Grid
    values: np.ndarray = dc_field(repr=False)
    time: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(self.grid.cells)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        if self.time < 0:
            raise DomainError(f"Field time must be nonnegative, got {self.time}")

    @classmethod
    def zeros(cls, grid, time=0.0):
        return cls(grid, np.zeros(grid.cells), time)

    @classmethod
    def from_function(cls, grid, func, time=0.0):
        """Sample func(*coords) at the cell centres."""
        return cls(grid, func(*grid.mesh()), time)

    def with_values(self, values, time=None):
        return Field(self.grid, values, self.time if time is None else time)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.values)))

    @property
    def max_abs(self):
        return float(np.max(np.abs(self.values)))


def lq_norm(field, q):
    """
    Discrete L^q norm (sum |u_i|^q h^n)^(1/q), or max |u_i| for q = inf.

    The sum is taken on u / max|u| so large q does not overflow.
    """
    if not q >= 1:
        logging.error(f"lq_norm called with q={q}")
        raise DomainError(f"L^q norm needs q >= 1 or q = inf, got q={q}")

    magnitudes = np.abs(field.values)
    peak = float(np.max(magnitudes))
    if peak == 0.0:
        return 0.0
    if math.isinf(q):
        return peak
    scaled = magnitudes / peak
    return peak * float(np.sum(scaled ** q) * field.grid.cell_volume) ** (1.0 / q)


def mass(field):
    """Signed mass sum u_i h^n."""
    return float(np.sum(field.values) * field.grid.cell_volume)


def phi(u, alpha):
    """Phi(u) = |u|^alpha u / (alpha + 1); odd, increasing, Phi(0) = 0."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    u = np.asarray(u, dtype=float)
    result = np.abs(u) ** alpha * u / (alpha + 1.0)
    return float(result) if result.ndim == 0 else result


def grad_sq_phi(field, alpha):
    """
    sum over faces of ((Phi_{i+1} - Phi_i) / h)^2 h^n, the discrete form of
    the space integral of |u|^(2 alpha) |grad u|^2. Mirror boundary faces add nothing.
    """
    if not alpha > 0:
        logging.error(f"grad_sq_phi called with alpha={alpha}")
        raise DomainError(f"alpha must be positive, got {alpha}")

    transformed = phi(field.values, alpha)
    total = 0.0
    for axis in range(field.grid.dim):
        slopes = np.diff(transformed, axis=axis) / field.grid.h[axis]
        total += float(np.sum(slopes * slopes))
    return total * field.grid.cell_volume


def write_snapshot(field, path):
    """Write the field as CSV: header x[,y],u then one row per cell, row-major."""
    grid = field.grid
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    columns = [coords.ravel() for coords in grid.mesh()] + [field.values.ravel()]
    header = ",".join(list(AXIS_NAMES[:grid.dim]) + ["u"])
    np.savetxt(path, np.column_stack(columns), fmt="%.17g", delimiter=",", header=header, comments="")
    logging.debug(f"Snapshot t={field.time:.6g} written to {path}")
    return path


def read_snapshot(path, grid, time=0.0):
    """Read a snapshot written by write_snapshot (or by hand in the same layout) onto grid."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            header = handle.readline().strip().split(",")
            data = np.loadtxt(handle, delimiter=",", ndmin=2)
    except OSError as e:
        logging.error(f"Unable to read snapshot {path}: {e}")
        raise ConfigurationError(f"Unable to read snapshot {path}: {e}") from e
    except ValueError as e:
        logging.error(f"Malformed snapshot {path}: {e}")
        raise ConfigurationError(f"Malformed snapshot {path}: {e}") from e

    expected = list(AXIS_NAMES[:grid.dim]) + ["u"]
    if [column.strip() for column in header] != expected:
        raise ConfigurationError(f"Snapshot {path} header {header} does not match {expected}")
    if data.shape[0] != grid.size:
        raise ConfigurationError(f"Snapshot {path} has {data.shape[0]} rows, grid has {grid.size} cells")

    for axis, coords in enumerate(grid.mesh()):
        if not np.allclose(data[:, axis], coords.ravel(), rtol=0.0, atol=1e-9 * (1.0 + grid.h[axis])):
            raise ConfigurationError(f"Snapshot {path} cell centres do not match the grid on axis {axis}")
    return Field(grid, data[:, -1], time)
