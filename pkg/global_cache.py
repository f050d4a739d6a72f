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
Global cache for PorousFlow

This module holds process-wide data:
- Configuration data loaded from config.ini and resolved paths
- Language translations loaded from JSON files
"""
__author__ = "PorousFlow developers"
__date__ = "2026-10-18"  # Last update


# global_cache.py


config_cache = {}  # Configuration cache
# Defaults usable before config.ini has been read (tests, library use)
config_cache.setdefault("Options", {"max_workers": 3})

language_cache = {}  # Translation cache
