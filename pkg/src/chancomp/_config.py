"""Global tolerances and limits.

Values can be overridden per call where an operation accepts ``tol`` or via
the environment (``CHANCOMP_MAX_DIM``).
"""
import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9
    trace: float = 1e-9
    norm: float = 1e-9
    psd: float = 1e-10
    rank: float = 1e-9  # relative to the largest eigenvalue
    tp: float = 1e-9
    equiv: float = 1e-9  # scaled by max(1, ||Choi||)

    def with_(self, **kw) -> "Tolerances":
        return replace(self, **kw)


TOL = Tolerances()


def max_dim() -> int:
    """Largest total tensor dimension any operation may build."""
    raw = os.environ.get("CHANCOMP_MAX_DIM")
    if raw is None:
        return 4096
    return int(raw)


class DimensionLimitError(ValueError):
    pass


class ValidationError(ValueError):
    pass


class DomainError(ValueError):
    pass


class NotCPError(ValueError):
    pass


class NotSameChannelError(ValueError):
    pass


def check_dim(n: int) -> int:
    limit = max_dim()
    if n > limit:
        raise DimensionLimitError(f"dimension {n} exceeds max_dim={limit}")
    return n
