"""Input validation helpers shared across the package.

Small ``check_*`` functions in the scikit-learn style: validate one
contract, raise ``ValueError`` with a message naming the offending value,
return the (possibly coerced) input.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence


def check_outcome(y) -> int:
    """Validate a pairwise comparison outcome, returning it as int.

    Only -1 (right preferred) and +1 (left preferred) are legal.
    """
    if isinstance(y, bool) or not isinstance(y, (int, float)):
        raise ValueError(f"outcome must be -1 or +1, got {y!r}")
    if isinstance(y, float) and not y.is_integer():
        raise ValueError(f"outcome must be -1 or +1, got {y!r}")
    y = int(y)
    if y not in (-1, 1):
        raise ValueError(f"outcome must be -1 or +1, got {y}")
    return y


def check_fractions(fractions: Sequence[float]) -> tuple[float, float, float]:
    """Validate (train, val, test) fractions: three positives summing to 1."""
    if len(fractions) != 3:
        raise ValueError(f"expected 3 fractions (train, val, test), got {len(fractions)}")
    train, val, test = (float(f) for f in fractions)
    if min(train, val, test) <= 0:
        raise ValueError(f"fractions must be positive, got {fractions}")
    total = train + val + test
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1 (got {total!r})")
    return train, val, test


def check_finite(value: float, name: str = "value") -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


def check_positive(value, name: str = "value"):
    if value <= 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    return value


def check_unit_interval(value: float, name: str = "value", *, open_ends: bool = False) -> float:
    value = float(value)
    if open_ends:
        if not 0.0 < value < 1.0:
            raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
    elif not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def check_non_empty(items: Iterable, name: str = "collection"):
    items = list(items)
    if not items:
        raise ValueError(f"{name} must not be empty")
    return items
