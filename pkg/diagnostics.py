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
Time series collected along a run and the checks made on them.

At each output time the run records the L^1, L^2, L^p and L^inf norms (plus any extra
orders asked for by an audit), the signed mass, the cumulative energy
int_0^t int |grad Phi(u)|^2, the running suprema U_q(t) = sup_{s<=t} ||u(s)||_q and
the running maximum of F(s)/mu(s).

The sup-bound audit divides U_inf(t) by

    max{ ||u0||_inf , (F/mu)(t)^(n/(p-a)) U_p(t)^(p/(p-a)) },   a = n (kappa - alpha),

for admissible pairs (p, sigma). The largest value of this ratio over the run is the
empirical constant K; a bounded K along refinements is what the estimate predicts.

Suprema are taken over output times only, and the energy integral uses a rectangle
rule with the gradient at the end of each output interval.
"""
__author__ = "PorousFlow developers"
__date__ = "2026-10-08"  # Last update


# diagnostics.py


import logging
import math
from dataclasses import dataclass, field as dc_field
from enum import Enum

from grid_field import lq_norm, mass, grad_sq_phi
from utils import DomainError, ConfigurationError

# Ratio denominators below this are reported as absent
DENOMINATOR_FLOOR = 1e-300
L1_DECAY_TOLERANCE = 1e-8
LINF_DECAY_TOLERANCE = 1e-8
CONSERVATION_TOLERANCE = 1e-10


class RunFlag(Enum):
    BLOW_UP = "blow_up"
    BOUNDARY_CONTAMINATED = "boundary_contaminated"


@dataclass
class RunReport:
    scenario: str
    dim: int
    p: float
    orders: tuple
    times: list = dc_field(default_factory=list)
    norms: dict = dc_field(default_factory=dict)
    U: dict = dc_field(default_factory=dict)
    mass_series: list = dc_field(default_factory=list)
    energy_cum: list = dc_field(default_factory=list)
    F_series: list = dc_field(default_factory=list)
    mu_series: list = dc_field(default_factory=list)
    Fmu: list = dc_field(default_factory=list)
    flags: set = dc_field(default_factory=set)
    notes: list = dc_field(default_factory=list)
    steps: int = 0
    guard_violations: int = 0
    blow_up_time: float | None = None
    blow_up_cell: tuple | None = None
    initial_field: object = None
    final_field: object = None

    @property
    def M1(self):
        return max(self.norms[1], default=0.0)

    @property
    def Minf(self):
        return max(self.norms[math.inf], default=0.0)

    @property
    def u0_inf(self):
        return self.norms[math.inf][0] if self.times else 0.0

    def series(self, q):
        if q not in self.norms:
            raise ConfigurationError(f"The run did not track the L^{q} norm (tracked: {self.orders})")
        return self.norms[q]


def new_report(scenario, dim, p=4.0, extra_orders=()):
    """Empty report tracking L^1, L^2, L^p, L^inf and the extra orders."""
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    orders = []
    for q in (1.0, 2.0, float(p), *[float(q) for q in extra_orders], math.inf):
        if not q >= 1:
            raise DomainError(f"Norm order must be >= 1, got {q}")
        if q not in orders:
            orders.append(q)
    report = RunReport(scenario, dim, float(p), tuple(orders))
    report.norms = {q: [] for q in orders}
    report.U = {q: [] for q in orders}
    return report


def update_diagnostics(report, field, dt_elapsed, F_t, mu_t, alpha):
    """Append the values of one output time to every series of the report."""
    if not mu_t > 0:
        logging.error(f"update_diagnostics called with mu_t={mu_t}")
        raise DomainError(f"mu(t) must be positive, got {mu_t}")
    if not field.is_finite():
        raise DomainError(f"Cannot record a non-finite field at t={field.time}")
    if dt_elapsed < 0:
        raise DomainError(f"dt_elapsed must be >= 0, got {dt_elapsed}")

    report.times.append(field.time)
    for q in report.orders:
        value = lq_norm(field, q)
        report.norms[q].append(value)
        previous = report.U[q][-1] if report.U[q] else value
        report.U[q].append(max(previous, value))

    report.mass_series.append(mass(field))
    previous_energy = report.energy_cum[-1] if report.energy_cum else 0.0
    report.energy_cum.append(previous_energy + dt_elapsed * grad_sq_phi(field, alpha))

    report.F_series.append(F_t)
    report.mu_series.append(mu_t)
    previous_ratio = report.Fmu[-1] if report.Fmu else 0.0
    report.Fmu.append(max(previous_ratio, F_t / mu_t))
    return report


def positive_part_negative(s):
    """(s)_- = max(-s, 0)."""
    return max(-s, 0.0)


def admissible(p, sigma, kappa, alpha, n):
    """p >= 1, p > n(kappa - alpha), sigma > 1 and sigma >= max{2/p, 1 + (2 kappa - alpha)_-/p}."""
    if not p >= 1 or not sigma > 1:
        return False
    if not p > n * (kappa - alpha):
        return False
    return sigma >= max(2.0 / p, 1.0 + positive_part_negative(2.0 * kappa - alpha) / p)


ADMISSIBILITY_TEXT = "p >= 1, p > n(kappa - alpha), sigma > 1, sigma >= max{2/p, 1 + (2kappa - alpha)_-/p}"


@dataclass(frozen=True)
class AdmissiblePair:
    p: float
    sigma: float
    kappa: float
    alpha: float
    n: int

    def __post_init__(self):
        if not admissible(self.p, self.sigma, self.kappa, self.alpha, self.n):
            logging.error(f"Rejected pair p={self.p}, sigma={self.sigma} "
                          f"(kappa={self.kappa}, alpha={self.alpha}, n={self.n})")
            raise DomainError(f"(p={self.p:g}, sigma={self.sigma:g}) violates the admissibility "
                              f"condition {ADMISSIBILITY_TEXT} for kappa={self.kappa:g}, "
                              f"alpha={self.alpha:g}, n={self.n}")

    @property
    def a(self):
        return self.n * (self.kappa - self.alpha)


@dataclass(frozen=True)
class RatioSeries:
    pair: AdmissiblePair
    values: tuple
    times: tuple
    empirical_K: float | None
    t_of_sup: float | None


def theorem2_ratio(report, pair, u0_inf):
    """
    U_inf(t) / max{u0_inf, (F/mu)(t)^(n/(p-a)) U_p(t)^(p/(p-a))} per output time.
    Entries whose denominator is below 1e-300 are None.
    """
    if not isinstance(pair, AdmissiblePair):
        raise DomainError("theorem2_ratio needs an AdmissiblePair")
    if pair.p not in report.U:
        raise ConfigurationError(f"The run did not track the L^{pair.p:g} norm needed by the pair")

    gap = pair.p - pair.a
    flux_exponent = pair.n / gap
    norm_exponent = pair.p / gap

    values = []
    for k in range(len(report.times)):
        denominator = max(u0_inf, report.Fmu[k] ** flux_exponent * report.U[pair.p][k] ** norm_exponent)
        if denominator < DENOMINATOR_FLOOR:
            values.append(None)
        else:
            values.append(report.U[math.inf][k] / denominator)

    present = [(value, report.times[k]) for k, value in enumerate(values) if value is not None]
    if present:
        empirical_K, t_of_sup = max(present, key=lambda item: item[0])
    else:
        empirical_K, t_of_sup = None, None

    logging.debug(f"Ratio for p={pair.p:g}, sigma={pair.sigma:g}: K={empirical_K}")
    return RatioSeries(pair, tuple(values), tuple(report.times), empirical_K, t_of_sup)


@dataclass(frozen=True)
class DecayCheck:
    passed: bool
    worst_increment: float
    worst_index: int | None


def _decay_check(series, tolerance):
    worst, worst_index = -math.inf, None
    for k in range(1, len(series)):
        increment = series[k] - series[k - 1]
        if increment > worst:
            worst, worst_index = increment, k
    if worst_index is None:
        return DecayCheck(True, 0.0, None)
    return DecayCheck(worst <= tolerance, worst, worst_index)


def check_l1_decay(report):
    """||u(t)||_1 must not increase by more than 1e-8 ||u0||_1 between output times."""
    l1 = report.norms[1.0]
    tolerance = L1_DECAY_TOLERANCE * (l1[0] if l1 else 0.0)
    return _decay_check(l1, tolerance)


def check_linf_decay(report):
    """||u(t)||_inf must not increase by more than 1e-8 ||u0||_inf (maximum principle)."""
    linf = report.norms[math.inf]
    tolerance = LINF_DECAY_TOLERANCE * (linf[0] if linf else 0.0)
    return _decay_check(linf, tolerance)


def conservation_error(report):
    """|mass(T) - mass(0)|, with the tolerance 1e-10 (1 + ||u0||_1) it is compared to."""
    if not report.mass_series:
        return 0.0, CONSERVATION_TOLERANCE
    error = abs(report.mass_series[-1] - report.mass_series[0])
    return error, CONSERVATION_TOLERANCE * (1.0 + report.norms[1.0][0])


def growth_factor(report):
    """max_t ||u(t)||_inf / ||u0||_inf."""
    linf = report.norms[math.inf]
    if not linf or linf[0] == 0.0:
        return 1.0
    return max(linf) / linf[0]
