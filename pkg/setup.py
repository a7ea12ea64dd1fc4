"""Kept for editable installs of i4mirror, the metadata lives in setup.cfg."""

from setuptools import setup

setup()
