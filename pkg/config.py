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
Configuration management for PorousFlow.

The configuration lives in a config.ini inside a profile directory
(~/.config/PorousFlow/profiles/<profile>/config.ini). This module creates it with
defaults on first run, migrates files written by older versions, loads it into
global_cache.config_cache, configures logging and turns the [Scheme], [Output] and
[Audit] sections into the objects the solver and the CLI use.
"""
__author__ = "PorousFlow developers"
__date__ = "2026-10-18"  # Last update


# config.py


import configparser
import logging
import shutil
from pathlib import Path

from packaging.version import Version, InvalidVersion

import global_cache
import utils
from app_version import __version__
from utils import ConfigurationError

# The target version after migration
EXPECTED_VERSION = __version__

APP_NAME = "PorousFlow"
APPLICATION_PATH = utils.get_app_dir()
USER_CONFIG_DIR = Path.home() / ".config" / APP_NAME

# Root directory for all profiles
PROFILES_ROOT = USER_CONFIG_DIR / 'profiles'

# Default profile values
ACTIVE_PROFILE = "default"
PROFILE_DIR = PROFILES_ROOT / ACTIVE_PROFILE

# Dynamic paths for the active profile
CONFIG_FILE = PROFILE_DIR / 'config.ini'
LOGS_PATH = PROFILE_DIR / 'logs'

LANG_PATH = APPLICATION_PATH / 'lang'

SUPPORTED_LANGUAGES = {
    "en_US": "English",
    "fr_FR": "Français",
}
DEFAULT_LANGUAGE = "en_US"

VALID_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}

# Default configuration
DEFAULT_CONFIG = {
    "PorousFlow": {"version": __version__},
    "Logging": {"log_level": "INFO"},
    "Language": {"language": DEFAULT_LANGUAGE},
    "Scheme": {
        "cfl_adv": "0.4",
        "cfl_diff": "0.4",
        "integrator": "euler",
        "boundary_guard": "1e-8",
    },
    "Output": {
        "output_dir": "results",
        "snapshot_every": "10",
        "p_norm": "4",
    },
    "Audit": {"pairs": "2,1.01"},
    "Options": {"max_workers": "3"},
}

# Keys renamed between releases (old name -> new name)
RENAME_MAP = {
    "cfl": "cfl_adv",
    "guard": "boundary_guard",
    "workers": "max_workers",
}


def set_config_file(custom_path: Path) -> None:
    """
    Override the default configuration file path and adjust the logs path
    to the active profile directory.
    """
    global CONFIG_FILE, LOGS_PATH, ACTIVE_PROFILE, PROFILE_DIR

    CONFIG_FILE = Path(custom_path).resolve()
    logging.debug(f"Configuration file path overridden to: {CONFIG_FILE}")

    # Use parent directory name as profile name if config.ini, otherwise use the filename stem
    if CONFIG_FILE.name == "config.ini":
        ACTIVE_PROFILE = CONFIG_FILE.parent.name
        PROFILE_DIR = CONFIG_FILE.parent
    else:
        ACTIVE_PROFILE = CONFIG_FILE.stem
        PROFILE_DIR = CONFIG_FILE.parent / ACTIVE_PROFILE

    LOGS_PATH = PROFILE_DIR / 'logs'

    logging.debug(f"Active profile: '{ACTIVE_PROFILE}'")
    logging.debug(f"  - Logs: {LOGS_PATH}")


def resolve_config_path(raw_path) -> Path:
    """A bare profile name maps to profiles/<name>/config.ini; anything else is a path."""
    path_config = Path(raw_path)
    if len(path_config.parts) == 1:
        if not path_config.suffix:
            return PROFILES_ROOT / path_config / 'config.ini'
        return PROFILES_ROOT / path_config
    return path_config.resolve()


def config_exists():
    return CONFIG_FILE.exists()


def create_config():
    """
    Create the config.ini file with default values.
    """
    CONFIG_FILE.parent.mkdir(parents=True, exist_ok=True)

    config_parser = configparser.ConfigParser()
    for section, options in DEFAULT_CONFIG.items():
        config_parser.add_section(section)
        for key, value in options.items():
            config_parser.set(section, key, str(value))
    try:
        with open(CONFIG_FILE, 'w', encoding='utf-8') as configfile:
            config_parser.write(configfile)
            logging.info(f"Config.ini file created at {CONFIG_FILE}")
    except (FileNotFoundError, IOError, PermissionError) as e:
        logging.error(f"Failed to create config file at {CONFIG_FILE}: {e}")


def rename_old_config(config_file_path):
    """
    Renames the old config.ini file to config.old.

    Args:
        config_file_path (Path): The path to the config.ini file.
    """
    old_config_path = config_file_path.with_suffix(".old")
    try:
        if config_file_path.exists():
            shutil.move(str(config_file_path), str(old_config_path))
            logging.info(f"Old configuration file renamed to '{old_config_path.name}'.")
        else:
            logging.info(f"Configuration file '{config_file_path.name}' not found, no action needed.")
    except PermissionError:
        logging.error(f"Error: Permission denied while renaming '{config_file_path.name}' to '{old_config_path.name}'.")
    except OSError as e:
        logging.error(f"System error occurred while renaming '{config_file_path.name}': {e}")


def read_version_from_config_file():
    config_parser = configparser.ConfigParser()
    config_parser.read(CONFIG_FILE, encoding='utf-8')
    return config_parser.get('PorousFlow', 'version', fallback=None)


def needs_migration(current_version) -> bool:
    if current_version is None:
        return True
    try:
        return Version(current_version) < Version(EXPECTED_VERSION)
    except InvalidVersion:
        logging.warning(f"Unreadable config version '{current_version}', migrating.")
        return True


def migrate_config_if_needed():
    current_version = read_version_from_config_file()
    if needs_migration(current_version):
        old_config = configparser.ConfigParser()
        old_config.read(CONFIG_FILE, encoding='utf-8')
        rename_old_config(CONFIG_FILE)
        migrate_config(old_config)
        return True  # Migration done
    return False  # Migration not done


def migrate_config(old_config):
    """
    Migrate the configuration from an old version to the new format.
    - Ensures all sections and options from DEFAULT_CONFIG are present.
    - Preserves user-defined values when possible, following RENAME_MAP.
    - Removes obsolete keys and sections.
    - Keeps the order of sections and keys as defined in DEFAULT_CONFIG.
    """
    logging.info("Starting migration process of old config.ini...")

    # Flatten the old values once so renamed keys can move across sections
    old_values = {}
    for section in old_config.sections():
        for key, value in old_config[section].items():
            old_values[(section, RENAME_MAP.get(key, key))] = value

    new_config = configparser.ConfigParser()
    for section, default_options in DEFAULT_CONFIG.items():
        new_config[section] = {}
        for key, default in default_options.items():
            new_config[section][key] = str(old_values.get((section, key), default))

    new_config["PorousFlow"]["version"] = EXPECTED_VERSION
    logging.debug("Set PorousFlow version to %s", EXPECTED_VERSION)

    try:
        CONFIG_FILE.parent.mkdir(parents=True, exist_ok=True)
        with open(CONFIG_FILE, "w", encoding='utf-8') as configfile:
            new_config.write(configfile)
        logging.info("Configuration migration completed successfully.")
    except OSError as e:
        logging.error("Error occurred while writing the migrated config: %s", str(e))


def load_config():
    """
    Load the configuration from config.ini into the global cache.
    """
    config_parser = configparser.ConfigParser()
    config_parser.read(CONFIG_FILE, encoding='utf-8')

    for section, default_options in DEFAULT_CONFIG.items():
        global_cache.config_cache[section] = dict(default_options)
    for section in config_parser.sections():
        global_cache.config_cache.setdefault(section, {}).update(
            {key: value for key, value in config_parser.items(section)})

    # Paths
    global_cache.config_cache['APPLICATION_PATH'] = APPLICATION_PATH
    global_cache.config_cache['CONFIG_FILE'] = CONFIG_FILE
    global_cache.config_cache['PROFILE_DIR'] = PROFILE_DIR
    global_cache.config_cache['LOGS_PATH'] = LOGS_PATH
    global_cache.config_cache['LANG_PATH'] = LANG_PATH

    language = global_cache.config_cache["Language"].get("language", DEFAULT_LANGUAGE)
    if language not in SUPPORTED_LANGUAGES:
        logging.warning(f"Unsupported language '{language}', falling back to {DEFAULT_LANGUAGE}.")
        global_cache.config_cache["Language"]["language"] = DEFAULT_LANGUAGE

    logging.debug(f"Configuration loaded from {CONFIG_FILE}")
    return global_cache.config_cache


def _writes_to(logger, log_file):
    target = str(Path(log_file).resolve())
    return any(isinstance(handler, logging.FileHandler) and handler.baseFilename == target
               for handler in logger.handlers)


def configure_logging(logging_level):
    log_file = Path(LOGS_PATH) / 'app_log.txt'

    # Only install the file handler once per log file
    if not _writes_to(logging.getLogger(), log_file):
        if logging.getLogger().hasHandlers():
            logging.getLogger().handlers.clear()

        utils.setup_directories(LOGS_PATH)

        file_handler = logging.FileHandler(log_file, mode='w', encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)

        formatter = logging.Formatter("%(asctime)s - %(levelname)s - %(message)s")
        file_handler.setFormatter(formatter)

        logging.getLogger().addHandler(file_handler)

        log_level = str(logging_level).upper()

        if log_level not in VALID_LOG_LEVELS:
            logging.warning(
                f"Invalid log level '{log_level}' in configuration. Defaulting to 'DEBUG'.")
            log_level = "DEBUG"

        logging.getLogger().setLevel(getattr(logging, log_level, logging.DEBUG))

        logging.debug(
            f"Logging configured successfully with '{log_level}' level and custom file handler!")


def configure_run_logging():
    # Distinct logger for runs_summary.txt, one line per completed run
    run_logger = logging.getLogger('run_logger')

    log_file = Path(LOGS_PATH) / 'runs_summary.txt'

    if not _writes_to(run_logger, log_file):
        utils.setup_directories(LOGS_PATH)

        file_handler = logging.FileHandler(log_file, mode='a', encoding='utf-8')
        file_handler.setLevel(logging.INFO)
        file_handler.setFormatter(logging.Formatter("%(message)s"))

        run_logger.addHandler(file_handler)
        run_logger.setLevel(logging.INFO)
        run_logger.propagate = False

    return run_logger


def _section(name):
    return global_cache.config_cache.get(name, DEFAULT_CONFIG[name])


def scheme_config_from_cache():
    """Build the solver SchemeConfig from the [Scheme] section."""
    from solver import SchemeConfig, Integrator

    scheme = _section("Scheme")
    try:
        return SchemeConfig(
            cfl_adv=float(scheme.get("cfl_adv", 0.4)),
            cfl_diff=float(scheme.get("cfl_diff", 0.4)),
            integrator=Integrator(str(scheme.get("integrator", "euler")).strip().lower()),
            boundary_guard=float(scheme.get("boundary_guard", 1e-8)),
        )
    except ValueError as e:
        logging.error(f"Invalid [Scheme] section in {CONFIG_FILE}: {e}")
        raise ConfigurationError(f"Invalid [Scheme] section: {e}") from e


def output_settings():
    """Return (output_dir, snapshot_every, p_norm) from the [Output] section."""
    output = _section("Output")
    try:
        snapshot_every = int(output.get("snapshot_every", 10))
        p_norm = float(output.get("p_norm", 4))
    except ValueError as e:
        logging.error(f"Invalid [Output] section in {CONFIG_FILE}: {e}")
        raise ConfigurationError(f"Invalid [Output] section: {e}") from e
    if snapshot_every < 0 or p_norm < 1:
        raise ConfigurationError("snapshot_every must be >= 0 and p_norm >= 1")
    return Path(output.get("output_dir", "results")), snapshot_every, p_norm


def parse_pair(text):
    """'p,sigma' -> (p, sigma)."""
    parts = [part.strip() for part in str(text).split(",")]
    if len(parts) != 2:
        raise ConfigurationError(f"Malformed pair '{text}', expected 'p,sigma'")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as e:
        raise ConfigurationError(f"Malformed pair '{text}': {e}") from e


def audit_pairs_from_cache():
    raw = _section("Audit").get("pairs", "")
    return [parse_pair(item) for item in raw.split(";") if item.strip()]
