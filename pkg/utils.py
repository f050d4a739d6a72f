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
Shared helpers for PorousFlow: exception hierarchy, directory setup, worker
validation, number formatting and program exit.
"""

__author__ = "PorousFlow developers"
__date__ = "2026-09-30"  # Last update


# utils.py

import logging
import sys
from pathlib import Path

from rich import print

import global_cache


class PorousFlowError(Exception):
    """Base class of every error raised on purpose by PorousFlow."""


class DomainError(PorousFlowError, ValueError):
    """A mathematical precondition is not met (q < 1, alpha <= 0, t <= 0, ...)."""


class ConfigurationError(PorousFlowError, ValueError):
    """Unknown catalog entry, unknown scenario, malformed override or config value."""


class BlowUpError(PorousFlowError, RuntimeError):
    """The discrete solution lost finiteness during a step."""

    def __init__(self, t, cell_index, value):
        self.t = t
        self.cell_index = cell_index
        self.value = value
        super().__init__(f"Blow-up at t={t:.17g} in cell {cell_index} (value {value!r})")


# Values beyond this magnitude are treated like non-finite ones
OVERFLOW_LIMIT = 1e100


def setup_directories(path_dir):
    path_dir = Path(path_dir)
    if not path_dir.exists():
        path_dir.mkdir(parents=True, exist_ok=True)
    return path_dir


def validate_workers(requested=None):
    """
    Validates and returns the number of workers for sweeps.

    The --max-workers argument wins over the config value; the result is clamped
    to [1, 10].

    :return: The validated and adjusted number of workers.
    """
    max_workers_limit = 10
    min_workers_limit = 1

    if requested is None:
        requested = global_cache.config_cache.get("Options", {}).get("max_workers", 3)

    try:
        workers = int(requested)
    except (TypeError, ValueError):
        logging.warning(f"Invalid max_workers value '{requested}'. Falling back to 1.")
        return min_workers_limit

    if workers > max_workers_limit:
        logging.warning(f"max_workers={workers} exceeds the limit, using {max_workers_limit}.")
        return max_workers_limit
    if workers < min_workers_limit:
        logging.warning(f"max_workers={workers} is below the minimum, using {min_workers_limit}.")
        return min_workers_limit
    return workers


def format_full(value):
    """Full precision (17 significant digits) text for CSV files."""
    return f"{float(value):.17g}"


def escape_rich_tags(text):
    return str(text).replace("[", r"\[")


def exit_program(msg=None, extra_msg=None, do_exit=True, status=0):
    """Exits the program with an optional message."""
    if msg is None:
        import lang
        msg = lang.get_translation("utils_prg_terminated")

    if extra_msg:
        msg += " " + extra_msg

    logging.info(f"Program terminated (status {status})")
    colour = "green" if status == 0 else "indian_red1"
    print(f"\n\t*** [{colour}]{msg}[/{colour}] ***")

    if do_exit:
        sys.exit(status)


def get_app_dir():
    """Determine the base directory of the application."""
    if getattr(sys, 'frozen', False):
        return Path(sys.executable).parent
    return Path(__file__).resolve().parent
