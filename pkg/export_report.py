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
This module writes the result files of a run.

- diagnostics.csv: one row per output time (t, l1, l2, lp, linf, mass, energy_cum, U1, Up, Uinf, Fmu)
- summary.txt: flags, M1, Minf, empirical K per pair, expectation verdicts and notes
- audit.csv: p, sigma, a, empirical_K, t_of_sup
- convergence.csv: cells, h, l1_error, order

Numbers are written with 17 significant digits. Write failures are logged and
reported, and the function returns None instead of raising.
"""

__author__ = "PorousFlow developers"
__date__ = "2026-10-18"  # Last update

# export_report.py

import logging
import math
from datetime import datetime
from pathlib import Path

import numpy as np
from rich import print

import lang
from utils import format_full

DIAGNOSTICS_COLUMNS = ("t", "l1", "l2", "lp", "linf", "mass", "energy_cum", "U1", "Up", "Uinf", "Fmu")


def _write_lines(path, lines):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            f.write('\n'.join(lines) + '\n')
        logging.info(f"{path} has been created successfully.")
        return path
    except PermissionError:
        logging.error(f"Error: No write permission for {path}.")
    except OSError as e:
        logging.error(f"Unexpected error while saving {path}: {e}")
    print(f"[bold red]{lang.get_translation('export_write_failed')} {path}[/bold red]")
    return None


def write_diagnostics_csv(report, path):
    """Time series of the run, one row per output time."""
    p = report.p
    table = np.column_stack([
        report.times,
        report.series(1.0),
        report.series(2.0),
        report.series(p),
        report.series(math.inf),
        report.mass_series,
        report.energy_cum,
        report.U[1.0],
        report.U[p],
        report.U[math.inf],
        report.Fmu,
    ]) if report.times else np.empty((0, len(DIAGNOSTICS_COLUMNS)))

    lines = [",".join(DIAGNOSTICS_COLUMNS)]
    lines.extend(",".join(format_full(value) for value in row) for row in table)
    return _write_lines(path, lines)


def write_audit_csv(ratios, path):
    """One row per audited pair."""
    lines = ["p,sigma,a,empirical_K,t_of_sup"]
    for ratio in ratios:
        pair = ratio.pair
        K = "" if ratio.empirical_K is None else format_full(ratio.empirical_K)
        t_sup = "" if ratio.t_of_sup is None else format_full(ratio.t_of_sup)
        lines.append(f"{format_full(pair.p)},{format_full(pair.sigma)},{format_full(pair.a)},{K},{t_sup}")
    return _write_lines(path, lines)


def write_convergence_csv(rows, path):
    """rows: (cells, h, l1_error, order or None)."""
    lines = ["cells,h,l1_error,order"]
    for cells, h, error, order in rows:
        lines.append(f"{cells},{format_full(h)},{format_full(error)},{'' if order is None else format_full(order)}")
    return _write_lines(path, lines)


def write_summary(report, path, ratios=(), expectations=(), description=""):
    """Human readable summary of one run."""
    current_time = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    report_content = [
        f"{lang.get_translation('summary_header')} {report.scenario}",
        f"{lang.get_translation('summary_generated_on')} {current_time}",
        "=" * 50,
    ]
    if description:
        report_content.append(description)
    report_content.append("")

    flags = ", ".join(sorted(flag.value for flag in report.flags)) or lang.get_translation('summary_no_flags')
    report_content.append(f"{lang.get_translation('summary_flags')}: {flags}")
    if report.blow_up_time is not None:
        report_content.append(f"  blow_up_time: {format_full(report.blow_up_time)} cell {report.blow_up_cell}")
    report_content.append(f"steps: {report.steps}")
    report_content.append(f"guard_violations: {report.guard_violations}")
    report_content.append(f"M1: {format_full(report.M1)}")
    report_content.append(f"Minf: {format_full(report.Minf)}")

    if ratios:
        report_content.append("")
        report_content.append(lang.get_translation('summary_audit'))
        for ratio in ratios:
            K = "n/a" if ratio.empirical_K is None else format_full(ratio.empirical_K)
            report_content.append(f"  p={ratio.pair.p:g} sigma={ratio.pair.sigma:g} a={ratio.pair.a:g}: K={K}")

    if expectations:
        report_content.append("")
        report_content.append(lang.get_translation('summary_expectations'))
        for result in expectations:
            verdict = "PASS" if result.passed else "FAIL"
            value = "" if result.value is None else f" value={format_full(result.value)}"
            threshold = "" if result.threshold is None else f" threshold={format_full(result.threshold)}"
            detail = f" ({result.detail})" if result.detail else ""
            report_content.append(f"  [{verdict}] {result.name}{value}{threshold}{detail}")

    if report.notes:
        report_content.append("")
        report_content.extend(f"note: {note}" for note in report.notes)

    return _write_lines(path, report_content)


def log_run_summary(report, horizon, expectations=()):
    """Append one line to runs_summary.txt through the run logger."""
    run_logger = logging.getLogger('run_logger')
    failed = [result.name for result in expectations if not result.passed]
    flags = ",".join(sorted(flag.value for flag in report.flags)) or "none"
    run_logger.info(f"{datetime.now():%Y-%m-%d %H:%M:%S} {report.scenario}: "
                    f"horizon={horizon:g} steps={report.steps} flags={flags} "
                    f"M1={report.M1:.6g} Minf={report.Minf:.6g} "
                    f"failed={','.join(failed) or 'none'}")
