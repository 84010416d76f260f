"""Exception type shared by every covercalc module."""

from __future__ import annotations


class CoverError(Exception):
    """A domain error carrying a machine-readable code such as ``WILD_RAMIFICATION``."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message or code
        super().__init__(f"{code}: {self.message}")
