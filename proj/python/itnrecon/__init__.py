"""Maximum-entropy reconstruction of trade networks (C++ core)."""

from ._core import *  # noqa: F401,F403
from ._core import (
    DomainError,
    InfeasibleError,
    ItnError,
    ParseError,
    ValidationError,
)

__all__ = [name for name in dir() if not name.startswith("_")]
