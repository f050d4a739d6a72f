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
Main entry point of PorousFlow, a finite-volume simulator and verification harness for
degenerate porous-medium advection-diffusion equations.

Key functionalities include:
- Resolving the configuration profile and creating config.ini on first run.
- Migrating configuration files written by older versions.
- Configuring logging and loading the language translations.
- Dispatching the run, validate, audit, convergence and list subcommands.
- Exiting with the status of the subcommand.

"""
__author__ = "PorousFlow developers"
__license__ = "GNU GPL v3"
__description__ = "Porous-medium advection-diffusion simulator"
__date__ = "2026-10-15"  # Last update

# main.py


import logging
import sys

from rich import print
from rich.console import Console

import cli
import config
import global_cache
import lang
import utils
from app_version import __version__

console = Console()


def initialize_config(args):
    # Create config.ini if not present
    if not config.config_exists():
        print(f'\n\t[dark_goldenrod]First run detected - config.ini created with defaults -[/dark_goldenrod]\n')
        config.create_config()

    migration_performed = config.migrate_config_if_needed()

    # Load the configuration into the global cache
    config.load_config()

    # Command-line flags win over the file
    if args.max_workers is not None:
        global_cache.config_cache["Options"]["max_workers"] = args.max_workers

    # Configure the logging
    log_level = args.log_level or global_cache.config_cache["Logging"]["log_level"]
    config.configure_logging(log_level.upper())
    config.configure_run_logging()

    # Load the language translations from the config file into the global cache
    lang_path = config.LANG_PATH / f"{global_cache.config_cache['Language']['language']}.json"
    lang.load_translations(lang_path)

    if migration_performed:
        print(f"[dark_goldenrod]{lang.get_translation('config_configuration_migrated', EXPECTED_VERSION=config.EXPECTED_VERSION)}[/dark_goldenrod]")


def welcome_display():
    """Displays the title centered in the console."""
    title_text = f"\n[dodger_blue1]{lang.get_translation('main_title', version=__version__)}[/dodger_blue1]\n"
    console.print(title_text, justify="center")


def main(argv=None):
    args = cli.parse_args(argv)

    # Resolve config_path and profile directory structure
    if args.config_path:
        path_config = config.resolve_config_path(args.config_path)
        try:
            path_config.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            print(f"Error: Could not create directory '{path_config.parent}': {e}")
            return cli.EXIT_CONFIG
        config.set_config_file(path_config)

    try:
        initialize_config(args)
    except (FileNotFoundError, ValueError) as e:
        print(f"[indian_red1]Error: {utils.escape_rich_tags(e)}[/indian_red1]")
        return cli.EXIT_CONFIG

    welcome_display()

    run_config = cli.run_config_from_args(args)
    status = cli.COMMANDS[args.command](run_config)
    logging.info(f"Command '{args.command}' finished with status {status}")

    # display logs path
    log_file_path = global_cache.config_cache.get('LOGS_PATH')
    if log_file_path:
        print(f"[dodger_blue1]{lang.get_translation('main_logs_location')}[/dodger_blue1] [green]{log_file_path}[/green]")
    return status


if __name__ == "__main__":
    exit_status = main()
    utils.exit_program(do_exit=False, status=exit_status)
    sys.exit(exit_status)
