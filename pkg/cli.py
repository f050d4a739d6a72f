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
Command-line surface of PorousFlow.

Subcommands:
- run <scenario>: simulate, write diagnostics.csv, summary.txt and snapshots.
- validate <scenario>: empirical F(t), beta sign report and structural condition verdicts.
- audit <scenario>: run and compute the empirical sup-bound constant K per (p, sigma) pair.
- convergence <scenario>: L1 errors and observed orders at N, 2N, 4N cells against the exact solution.
- list: the scenario registry.

Exit statuses: 0 success, 1 configuration error, 2 blow-up, 3 boundary contamination,
4 convergence order below 0.8, 5 a scenario expectation failed.
"""


__author__ = "PorousFlow developers"
__date__ = "2026-10-18"  # Last update


# cli.py


import argparse
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path

import numpy as np
from rich import print
from rich.console import Console
from rich.progress import Progress, TextColumn, BarColumn, TimeElapsedColumn
from rich.table import Table

import config
import diagnostics
import export_report
import lang
import model
import scenarios
import solver
from grid_field import write_snapshot
from utils import ConfigurationError, DomainError, PorousFlowError, validate_workers, escape_rich_tags

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BLOW_UP = 2
EXIT_BOUNDARY = 3
EXIT_ORDER = 4
EXIT_EXPECTATION = 5

MIN_OBSERVED_ORDER = 0.8
CONVERGENCE_FACTORS = (1, 2, 4)

console = Console()
progress_console = Console(stderr=True)


@dataclass
class RunConfig:
    command: str
    scenario: str | None = None
    overrides: dict = dc_field(default_factory=dict)
    output_dir: Path = Path("results")
    pairs: list = dc_field(default_factory=list)
    refine: int = 1
    max_workers: int | None = None


def parse_overrides(items):
    """['k=v', ...] -> {k: v}; later keys win."""
    overrides = {}
    for item in items or []:
        key, sep, value = str(item).partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"Malformed override '{item}', expected key=value")
        overrides[key.strip()] = value.strip()
    return overrides


def parse_args(argv=None):
    """Parses command-line arguments."""
    parser = argparse.ArgumentParser(description="PorousFlow options")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config-path', type=str, help='Path to a custom configuration file or a profile name.')
    common.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'], help='Set the logging level')
    common.add_argument('--max-workers', type=int, help='Set the maximum number of workers for sweeps')

    scenario_options = argparse.ArgumentParser(add_help=False, parents=[common])
    scenario_options.add_argument('scenario', type=str, help='Registered scenario name (see "list").')
    scenario_options.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                                  help='Override a scenario parameter (cells, horizon, output_interval, eps, amplitude, box, initial_csv).')
    scenario_options.add_argument('--out', type=str, help='Output directory (default: [Output] output_dir).')
    scenario_options.add_argument('--pair', dest='pairs', action='append', default=[], metavar='P,SIGMA',
                                  help='Pair (p, sigma) for the sup-bound audit.')
    scenario_options.add_argument('--refine', type=int, default=1, help='Multiply every grid axis cell count by M.')

    subparsers = parser.add_subparsers(dest='command', required=True)
    subparsers.add_parser('run', parents=[scenario_options], help='Run a scenario.')
    subparsers.add_parser('validate', parents=[scenario_options], help='Check the structural conditions of a scenario.')
    subparsers.add_parser('audit', parents=[scenario_options], help='Audit the sup-bound ratio on a run.')
    subparsers.add_parser('convergence', parents=[scenario_options], help='Refinement study against the exact solution.')
    subparsers.add_parser('list', parents=[common], help='List the registered scenarios.')

    args = parser.parse_args(argv)

    # Check config-path existence
    if args.config_path:
        path_config = Path(args.config_path)
        if path_config.exists() and not path_config.is_file():
            print(f"Error: '{args.config_path}' is a directory, not a file.")
            sys.exit(EXIT_CONFIG)

    # Checking max-workers
    if args.max_workers is not None and args.max_workers <= 0:
        print("Error: max-workers must be a positive integer.")
        sys.exit(EXIT_CONFIG)

    if args.command == 'list':
        return args

    if args.refine < 1:
        print("Error: refine must be a positive integer.")
        sys.exit(EXIT_CONFIG)

    try:
        args.overrides = parse_overrides(args.overrides)
        args.pairs = [config.parse_pair(pair) for pair in args.pairs]
    except ConfigurationError as e:
        print(f"Error: {e}")
        sys.exit(EXIT_CONFIG)

    return args


def run_config_from_args(args):
    if args.command == 'list':
        return RunConfig('list', max_workers=args.max_workers)
    output_dir = Path(args.out) if args.out else config.output_settings()[0]
    return RunConfig(args.command, args.scenario, dict(args.overrides), output_dir,
                     list(args.pairs), args.refine, args.max_workers)


def _report_error(e):
    logging.error(f"{type(e).__name__}: {e}")
    print(f"[indian_red1]{lang.get_translation('cli_error')} {escape_rich_tags(e)}[/indian_red1]")


def exit_status(report, expectations=()):
    """Total function of (flags, expectation results)."""
    if diagnostics.RunFlag.BLOW_UP in report.flags:
        return EXIT_BLOW_UP
    if diagnostics.RunFlag.BOUNDARY_CONTAMINATED in report.flags:
        return EXIT_BOUNDARY
    if any(not result.passed for result in expectations):
        return EXIT_EXPECTATION
    return EXIT_OK


def _snapshot_name(k, t):
    return f"snapshot_{k}_t{t:.6f}.csv"


def execute_scenario(scenario, scheme, out_dir=None, p_norm=4.0, snapshot_every=0, extra_orders=(), show_progress=True):
    """Run one scenario, writing snapshots into out_dir when it is given."""
    output_times = max(1, math.ceil(scenario.horizon / scenario.output_interval - 1e-9)) if scenario.horizon > 0 else 0

    def snapshots(state, report):
        if out_dir is None:
            return
        k = len(report.times) - 1
        if k == 0:
            write_snapshot(state.field, out_dir / "initial.csv")
        elif snapshot_every and k % snapshot_every == 0:
            write_snapshot(state.field, out_dir / _snapshot_name(k, state.t))

    if not show_progress:
        report = solver.run(scenario.problem, scenario.grid, scheme, scenario.horizon, scenario.output_interval,
                            observer=snapshots, name=scenario.name, p=p_norm, extra_orders=extra_orders)
    else:
        with Progress(
            TextColumn("[bold blue]{task.description}", justify="right"),
            TextColumn("-"),
            TimeElapsedColumn(),
            TextColumn("-"),
            BarColumn(bar_width=40),
            "[progress.percentage]{task.percentage:>3.0f}%",
            "•",
            TextColumn("[bold green]t={task.fields[time]}"),
            console=progress_console,
        ) as progress:
            task = progress.add_task(f"[cyan]{lang.get_translation('cli_progress_run')} {scenario.name}",
                                     total=output_times, time="0")

            def observer(state, report):
                snapshots(state, report)
                if len(report.times) > 1:
                    progress.update(task, advance=1, time=f"{state.t:.4g}")

            report = solver.run(scenario.problem, scenario.grid, scheme, scenario.horizon, scenario.output_interval,
                                observer=observer, name=scenario.name, p=p_norm, extra_orders=extra_orders)

    if out_dir is not None and len(report.times) > 1:
        write_snapshot(report.final_field, out_dir / "final.csv")
    return report


def _admissible_pairs(raw_pairs, scenario, strict):
    """AdmissiblePair objects for the scenario; inadmissible ones raise when strict, else are skipped."""
    template = scenario.template
    pairs, skipped = [], []
    for p, sigma in raw_pairs:
        try:
            pairs.append(diagnostics.AdmissiblePair(p, sigma, template.kappa, template.alpha, template.dim))
        except DomainError:
            if strict:
                raise
            skipped.append((p, sigma))
    return pairs, skipped


def _print_expectations(results):
    table = Table(title=lang.get_translation('cli_expectations_title'))
    table.add_column(lang.get_translation('cli_col_check'))
    table.add_column(lang.get_translation('cli_col_value'), justify="right")
    table.add_column(lang.get_translation('cli_col_threshold'), justify="right")
    table.add_column(lang.get_translation('cli_col_verdict'))
    for result in results:
        verdict = (f"[green]{lang.get_translation('cli_verdict_pass')}[/green]" if result.passed
                   else f"[indian_red1]{lang.get_translation('cli_verdict_fail')}[/indian_red1]")
        table.add_row(result.name,
                      "" if result.value is None else f"{result.value:.6g}",
                      "" if result.threshold is None else f"{result.threshold:.6g}",
                      f"{verdict} {escape_rich_tags(result.detail)}".strip())
    console.print(table)


def _print_flags(report):
    if diagnostics.RunFlag.BLOW_UP in report.flags:
        print(f"[indian_red1]{lang.get_translation('cli_flag_blow_up')} t={report.blow_up_time:.6g}[/indian_red1]")
    if diagnostics.RunFlag.BOUNDARY_CONTAMINATED in report.flags:
        print(f"[indian_red1]{lang.get_translation('cli_flag_boundary')}[/indian_red1]")


def cmd_run(run_config):
    try:
        scenario = scenarios.build(run_config.scenario, run_config.overrides, run_config.refine)
        scheme = config.scheme_config_from_cache()
        _, snapshot_every, p_norm = config.output_settings()
        pairs, skipped = _admissible_pairs(config.audit_pairs_from_cache(), scenario, strict=False)
        companion = scenarios.companion_scenario(scenario)
    except PorousFlowError as e:
        _report_error(e)
        return EXIT_CONFIG

    out_dir = Path(run_config.output_dir) / scenario.name
    report = execute_scenario(scenario, scheme, out_dir, p_norm, snapshot_every, [pair.p for pair in pairs])
    for p, sigma in skipped:
        report.notes.append(f"Configured pair (p={p:g}, sigma={sigma:g}) is not admissible here and was skipped.")

    ratios = [diagnostics.theorem2_ratio(report, pair, report.u0_inf) for pair in pairs] if report.times else []

    companion_report = None
    if companion is not None and len(report.times) > 1:
        logging.info(f"Running companion '{companion.name}' of '{scenario.name}' on {companion.grid.describe()}")
        companion_report = execute_scenario(companion, scheme, p_norm=p_norm)
    results = scenarios.evaluate_expectations(scenario, report, companion_report)

    export_report.write_diagnostics_csv(report, out_dir / "diagnostics.csv")
    export_report.write_summary(report, out_dir / "summary.txt", ratios, results, scenario.description)
    export_report.log_run_summary(report, scenario.horizon, results)

    _print_flags(report)
    _print_expectations(results)
    print(f"[dodger_blue1]{lang.get_translation('cli_results_written')}[/dodger_blue1] [green]{out_dir}[/green]")

    return exit_status(report, results)


def _beta_verdict(summary, tolerance=1e-8):
    if max(abs(summary.minimum), abs(summary.maximum)) <= tolerance:
        return lang.get_translation('cli_beta_zero')
    if summary.maximum > tolerance:
        return lang.get_translation('cli_beta_positive', x=tuple(round(c, 6) for c in summary.argmax))
    return lang.get_translation('cli_beta_nonpositive')


def _ellipticity_samples(grid, times, u_max):
    centres = np.stack(grid.mesh(), axis=-1).reshape(-1, grid.dim)
    picks = centres[[0, len(centres) // 2, len(centres) - 1]]
    directions = list(np.eye(grid.dim)) + [np.full(grid.dim, 1.0 / math.sqrt(grid.dim))]
    for t in times:
        for x in picks:
            for u in (-u_max, -0.5 * u_max, 0.5 * u_max, u_max):
                for v in directions:
                    yield tuple(x), t, u, v


def cmd_validate(run_config):
    try:
        scenario = scenarios.build(run_config.scenario, run_config.overrides, run_config.refine)
        grid, problem = scenario.grid, scenario.problem
        u_max = problem.initial.field(grid).max_abs or 1.0
        times = sorted({0.0, 0.5 * scenario.horizon, scenario.horizon})

        F_samples = [(t, model.empirical_F(problem.advection, grid, t, u_max)) for t in times]
        beta_report = model.beta_summary(problem.advection.b_name, grid, 0.0) if problem.advection.has_f else None
        condition = model.check_condition_1_6(problem.advection, grid, 0.0, np.linspace(-u_max, u_max, 9))
        diffusion = replace(problem.diffusion, M_bound=problem.diffusion.mu)
        ellipticity = model.check_ellipticity_2_2(model.isotropic_flux(diffusion), diffusion,
                                                  _ellipticity_samples(grid, times, u_max))
    except PorousFlowError as e:
        _report_error(e)
        return EXIT_CONFIG

    table = Table(title=f"{lang.get_translation('cli_validate_title')} {scenario.name}")
    table.add_column(lang.get_translation('cli_col_check'))
    table.add_column(lang.get_translation('cli_col_value'))

    table.add_row(lang.get_translation('cli_validate_flux'), escape_rich_tags(problem.advection.describe()))
    for t, F in F_samples:
        table.add_row(f"F(t={t:g})", f"{F:.6g}")
    if beta_report is None:
        table.add_row("beta", lang.get_translation('cli_no_f_flux'))
    else:
        table.add_row("beta", f"[{beta_report.minimum:.6g}, {beta_report.maximum:.6g}]")
        table.add_row(lang.get_translation('cli_validate_beta_sign'), escape_rich_tags(_beta_verdict(beta_report)))

    if condition.holds:
        verdict = f"[green]{lang.get_translation('cli_condition_satisfied')}[/green]"
    else:
        worst = escape_rich_tags(f"x={tuple(round(c, 6) for c in condition.worst_x)} u={condition.worst_u:.6g} "
                                 f"value={condition.worst_value:.6g}")
        verdict = f"[indian_red1]{lang.get_translation('cli_condition_violated')}[/indian_red1] {worst}"
    table.add_row(lang.get_translation('cli_validate_condition'), verdict)
    elliptic = ellipticity.lower_holds and ellipticity.upper_holds
    table.add_row(lang.get_translation('cli_validate_ellipticity'),
                  lang.get_translation('cli_condition_satisfied') if elliptic else lang.get_translation('cli_condition_violated'))
    console.print(table)

    logging.info(f"Validated '{scenario.name}': condition holds={condition.holds}, "
                 f"F(0)={F_samples[0][1]:.6g}, ellipticity={elliptic}")
    return EXIT_OK


def cmd_audit(run_config):
    try:
        scenario = scenarios.build(run_config.scenario, run_config.overrides, run_config.refine)
        scheme = config.scheme_config_from_cache()
        _, snapshot_every, p_norm = config.output_settings()
        raw_pairs = run_config.pairs or config.audit_pairs_from_cache()
        pairs, _ = _admissible_pairs(raw_pairs, scenario, strict=True)
    except DomainError as e:
        _report_error(e)
        print(f"[indian_red1]{lang.get_translation('cli_audit_rejected')} {diagnostics.ADMISSIBILITY_TEXT}[/indian_red1]")
        return EXIT_CONFIG
    except PorousFlowError as e:
        _report_error(e)
        return EXIT_CONFIG

    if not pairs:
        _report_error(ConfigurationError("No (p, sigma) pair to audit"))
        return EXIT_CONFIG

    out_dir = Path(run_config.output_dir) / scenario.name
    report = execute_scenario(scenario, scheme, out_dir, p_norm, snapshot_every, [pair.p for pair in pairs])
    ratios = [diagnostics.theorem2_ratio(report, pair, report.u0_inf) for pair in pairs]

    export_report.write_audit_csv(ratios, out_dir / "audit.csv")
    export_report.write_diagnostics_csv(report, out_dir / "diagnostics.csv")
    export_report.write_summary(report, out_dir / "summary.txt", ratios, (), scenario.description)
    export_report.log_run_summary(report, scenario.horizon)

    table = Table(title=f"{lang.get_translation('cli_audit_title')} {scenario.name}")
    for column in ("p", "sigma", "a", "empirical_K", "t_of_sup"):
        table.add_column(column, justify="right")
    for ratio in ratios:
        table.add_row(f"{ratio.pair.p:g}", f"{ratio.pair.sigma:g}", f"{ratio.pair.a:g}",
                      "n/a" if ratio.empirical_K is None else f"{ratio.empirical_K:.10g}",
                      "n/a" if ratio.t_of_sup is None else f"{ratio.t_of_sup:.6g}")
    console.print(table)
    _print_flags(report)

    status = exit_status(report)
    if status == EXIT_OK:
        finite = all(ratio.empirical_K is not None and
                     all(value is None or math.isfinite(value) for value in ratio.values)
                     for ratio in ratios)
        status = EXIT_OK if finite else EXIT_EXPECTATION
    return status


def _convergence_job(name, overrides, cells, scheme):
    scenario = scenarios.build(name, {**overrides, "cells": cells})
    report = execute_scenario(scenario, scheme, show_progress=False)
    error = scenarios.barenblatt_l1_error(scenario, report.final_field)
    return cells, scenario.grid.h_min, error, report


def observed_orders(errors):
    """log2(e_k / e_(k+1)) for successive halvings of h; None when an error is zero."""
    orders = []
    for coarse, fine in zip(errors, errors[1:]):
        orders.append(math.log2(coarse / fine) if coarse > 0 and fine > 0 else None)
    return orders


def cmd_convergence(run_config):
    try:
        scenario = scenarios.build(run_config.scenario, run_config.overrides, run_config.refine)
        scheme = config.scheme_config_from_cache()
    except PorousFlowError as e:
        _report_error(e)
        return EXIT_CONFIG

    if not scenario.has_exact_solution:
        _report_error(ConfigurationError(lang.get_translation('cli_convergence_no_oracle', name=scenario.name)))
        return EXIT_CONFIG

    base = scenario.grid.cells[0]
    resolutions = [base * factor for factor in CONVERGENCE_FACTORS]
    overrides = {key: value for key, value in run_config.overrides.items() if key != "cells"}
    results = {}

    with Progress(
        TextColumn("[bold blue]{task.description}", justify="right"),
        TextColumn("-"),
        TimeElapsedColumn(),
        TextColumn("-"),
        BarColumn(bar_width=40),
        "[progress.percentage]{task.percentage:>3.0f}%",
        "•",
        TextColumn("[bold green]{task.fields[cells]}"),
        console=progress_console,
    ) as progress:
        task = progress.add_task(f"[cyan]{lang.get_translation('cli_progress_convergence')}",
                                 total=len(resolutions), cells=" ")
        max_workers = validate_workers(run_config.max_workers)
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            future_to_cells = {executor.submit(_convergence_job, scenario.name, overrides, cells, scheme): cells
                               for cells in resolutions}
            for future in as_completed(future_to_cells):
                cells = future_to_cells[future]
                results[cells] = future.result()
                progress.update(task, advance=1, cells=f"N={cells}")

    rows = [results[cells] for cells in resolutions]
    errors = [error for _, _, error, _ in rows]
    orders = observed_orders(errors)

    out_dir = Path(run_config.output_dir) / scenario.name
    export_report.write_convergence_csv(
        [(cells, h, error, None if k == 0 else orders[k - 1]) for k, (cells, h, error, _) in enumerate(rows)],
        out_dir / "convergence.csv")
    for cells, _, _, report in rows:
        export_report.write_diagnostics_csv(report, out_dir / f"N{cells}" / "diagnostics.csv")

    table = Table(title=f"{lang.get_translation('cli_convergence_title')} {scenario.name}")
    for column in ("cells", "h", "l1_error", "order"):
        table.add_column(column, justify="right")
    for k, (cells, h, error, _) in enumerate(rows):
        order = "" if k == 0 or orders[k - 1] is None else f"{orders[k - 1]:.4f}"
        table.add_row(str(cells), f"{h:.6g}", f"{error:.6e}", order)
    console.print(table)

    logging.info(f"Convergence '{scenario.name}': errors={errors}, orders={orders}")
    for _, _, _, report in rows:
        status = exit_status(report)
        if status != EXIT_OK:
            _print_flags(report)
            return status
    if any(order is None or order < MIN_OBSERVED_ORDER for order in orders):
        print(f"[indian_red1]{lang.get_translation('cli_convergence_failed', minimum=MIN_OBSERVED_ORDER)}[/indian_red1]")
        return EXIT_ORDER
    return EXIT_OK


def cmd_list(run_config=None):
    table = Table(title=lang.get_translation('cli_list_title'))
    for column in ("name", "dim", "alpha", "kappa", "velocity", "cells", "horizon", "description"):
        table.add_column(lang.get_translation(f'cli_col_{column}'))
    for template in scenarios.REGISTRY.values():
        velocity = template.b_name or ("g" if template.g_coeff is not None else "-")
        table.add_row(template.name, str(template.dim), f"{template.alpha:g}", f"{template.kappa:g}",
                      velocity, str(template.cells), f"{template.horizon:g}", template.description)
    console.print(table)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "validate": cmd_validate,
    "audit": cmd_audit,
    "convergence": cmd_convergence,
    "list": cmd_list,
}
