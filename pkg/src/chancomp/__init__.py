"""Complementary quantum channels: construction, families and output-purity checks.

Channels are :class:`KrausMap` objects holding a stack of Kraus operators.
Submodules: :mod:`.numerics` (linear algebra), :mod:`.channels`
(representations), :mod:`.families` (generators), :mod:`.complement`
(complements and witnesses), :mod:`.purity` (optimizers), :mod:`.gaussian`
(one-mode Gaussian channels) and :mod:`.cli`.
"""
from ._config import (
    TOL,
    DimensionLimitError,
    DomainError,
    NotCPError,
    NotSameChannelError,
    Tolerances,
    ValidationError,
    max_dim,
)
from .channels import *  # noqa: F401,F403
from .complement import *  # noqa: F401,F403
from .families import *  # noqa: F401,F403
from .gaussian import *  # noqa: F401,F403
from .numerics import *  # noqa: F401,F403
from .purity import *  # noqa: F401,F403
import importlib as _importlib

__version__ = "0.1.0"

# ``complement`` names both a submodule and a function; the function wins here.
_SUBMODULES = ("channels", "complement", "families", "gaussian", "numerics", "purity")

__all__ = [
    "TOL",
    "Tolerances",
    "max_dim",
    "DimensionLimitError",
    "DomainError",
    "NotCPError",
    "NotSameChannelError",
    "ValidationError",
]
for _name in _SUBMODULES:
    __all__ += _importlib.import_module(f".{_name}", __name__).__all__
