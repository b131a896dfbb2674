#!/usr/bin/env python
u"""
version.py (10/2026)
Gets version number of a package
"""
import os
import importlib.metadata

# get version
try:
    version = importlib.metadata.version("optotherm")
except importlib.metadata.PackageNotFoundError:
    # source tree without an installed distribution
    path = os.path.join(os.path.dirname(os.path.dirname(
        os.path.abspath(__file__))), 'version.txt')
    with open(path, mode='r', encoding='utf8') as fh:
        version = fh.read().strip()
# append "v" before the version
full_version = "v{0}".format(version)
# get project name
project_name = "optotherm"
