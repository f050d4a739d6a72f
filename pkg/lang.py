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
Console text of PorousFlow, looked up by key in lang/<language>.json.

The active language comes from [Language] in config.ini. Keys missing from a translation
fall back to the English file, then to a visible "Translation not found" marker.
"""
__author__ = "PorousFlow developers"
__date__ = "2026-10-16"  # Last update

# lang.py

import json
import logging
from pathlib import Path

import global_cache
from utils import get_app_dir

DEFAULT_LANGUAGE = "en_US"

_english = {}


def language_file(language):
    return get_app_dir() / "lang" / f"{language}.json"


def get_language_setting():
    return global_cache.config_cache.get("Language", {}).get("language", DEFAULT_LANGUAGE)


def _read_json(path):
    path = Path(path)
    if not path.exists():
        logging.error(f"Language file not found: {path}")
        raise FileNotFoundError(f"Language file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as file:
            return json.load(file)
    except json.JSONDecodeError as e:
        logging.error(f"Failed to parse language file {path}: {e}")
        raise ValueError(f"Failed to parse language file {path}: {e}") from e


def load_translations(path=None):
    """Fill the language cache once, from `path` or from the configured language."""
    if global_cache.language_cache:
        return global_cache.language_cache

    lang_file_path = Path(path) if path else language_file(get_language_setting())
    global_cache.language_cache.update(_read_json(lang_file_path))
    logging.debug(f"Loaded {len(global_cache.language_cache)} translations from {lang_file_path}")
    return global_cache.language_cache


def _english_text(key):
    if not _english:
        try:
            _english.update(_read_json(language_file(DEFAULT_LANGUAGE)))
        except (FileNotFoundError, ValueError):
            return None
    return _english.get(key)


def get_translation(key, **fields):
    """Text for `key`, formatted with `fields` when any are given."""
    if not global_cache.language_cache:
        load_translations()
    text = global_cache.language_cache.get(key)
    if text is None:
        text = _english_text(key)
        if text is None:
            logging.warning(f"Missing translation key '{key}'")
            return f"Translation not found: {key}"
    return text.format(**fields) if fields else text
