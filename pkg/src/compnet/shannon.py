"""Gaussian channel capacity primitives, in bits per channel use.

Real-channel forms are the default throughout the package; the complex
forms (no factor 1/2) are used by the fading routines.
"""

from __future__ import annotations

import math


def c_awgn(x: float) -> float:
    """Capacity 0.5 * log2(1 + x) of a real AWGN channel at SNR ``x >= 0``."""
    if x < 0:
        raise ValueError(f"SNR must be nonnegative, got {x}")
    return 0.5 * math.log2(1.0 + x)


def c_plus(x: float) -> float:
    """max(0.5 * log2(x), 0) for ``x >= 0``."""
    if x < 0:
        raise ValueError(f"argument must be nonnegative, got {x}")
    if x <= 1.0:
        return 0.0
    return 0.5 * math.log2(x)


def c_awgn_complex(x: float) -> float:
    """Capacity log2(1 + x) of a complex AWGN channel at SNR ``x >= 0``."""
    if x < 0:
        raise ValueError(f"SNR must be nonnegative, got {x}")
    return math.log2(1.0 + x)


def c_plus_complex(x: float) -> float:
    """max(log2(x), 0) for ``x >= 0``."""
    if x < 0:
        raise ValueError(f"argument must be nonnegative, got {x}")
    if x <= 1.0:
        return 0.0
    return math.log2(x)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)
