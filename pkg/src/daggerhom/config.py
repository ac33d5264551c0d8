"""Resource caps shared by the enumeration-heavy modules."""

import os

DEFAULT_CAP = 10**6


class CapExceeded(RuntimeError):
    """Raised instead of silently truncating an enumeration."""


def resource_cap() -> int:
    """Ball/dimension cap; ``DAGGERHOM_CAP`` overrides the default."""
    raw = os.environ.get("DAGGERHOM_CAP")
    if raw is None:
        return DEFAULT_CAP
    cap = int(raw)
    if cap <= 0:
        raise ValueError("DAGGERHOM_CAP must be positive")
    return cap
