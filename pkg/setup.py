import sys
import os
from cx_Freeze import setup, Executable

from app_version import __version__

# Define the assets directory
assets_dir = "assets"

# --- Icon Logic ---
# Icons are optional; the build works without an assets folder
icon_files = {
    "win32": os.path.join(assets_dir, "porousflow.ico"),
    "darwin": os.path.join(assets_dir, "porousflow.icns"),
    "linux": os.path.join(assets_dir, "porousflow.png")
}

icon_path = None
platform_icon_for_exe = icon_files.get(sys.platform)
if platform_icon_for_exe and os.path.exists(platform_icon_for_exe):
    icon_path = platform_icon_for_exe

# --- Include Files Logic ---
include_files = ["README.md", "CHANGELOG.md", "requirements.txt", "lang"]
if os.path.isdir(assets_dir):
    include_files.append(assets_dir)

# Options for cx_Freeze
build_exe_options = {
    "include_files": include_files,
    "packages": ["rich", "numpy"],
    "excludes": ["pytest", "tests"]
}

# Executable definition
exe = Executable(
    script="main.py",
    icon=icon_path,
    target_name="PorousFlow",
    copyright="PorousFlow developers",
)

setup(
    name="PorousFlow",
    version=__version__,
    description="Finite-volume simulator and verification harness for porous-medium advection-diffusion",
    author="PorousFlow developers",
    license="GNU GPLv3",
    options={"build_exe": build_exe_options},
    executables=[exe]
)
