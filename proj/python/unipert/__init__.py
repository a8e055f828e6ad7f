"""Perturbed unipotent flows on SL(3,R).

Thin wrapper over the compiled ``_core`` extension.
"""

from ._core import *  # noqa: F401,F403
from ._core import frame, Error, DomainError, NumericalError, ParseError  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
