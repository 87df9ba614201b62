"""Shared brute-force oracles, independent of the library's own quadrature."""

from __future__ import annotations

import math

import numpy as np
import hypothesis

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.load_profile("ci")


def simpson(y: np.ndarray, x: np.ndarray) -> float:
    # composite Simpson on an odd-length uniform grid
    n = len(x)
    assert n % 2 == 1
    h = x[1] - x[0]
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def branch_integral_oracle(decay: float, sqrt_pow: int = 1, y_pow: int = 1,
                           umax: float = 9.0, n: int = 2_000_001) -> float:
    """int_1^inf exp(-decay*y) (y^2-1)^(sqrt_pow/2) / y^y_pow dy.

    Substitutes y = 1 + u^2 so the endpoint derivative singularity
    disappears, then applies fine-grid composite Simpson.
    """
    u = np.linspace(0.0, umax / math.sqrt(max(decay, 0.02)), n)
    y = 1.0 + u * u
    f = (y * y - 1.0) ** (0.5 * sqrt_pow) / y**y_pow * np.exp(-decay * y) * 2.0 * u
    return simpson(f, u)


def sine_integral_oracle(f, k: float, zmax: float, n: int = 2_000_001) -> float:
    """Fine-grid Simpson for int_0^inf sin(k z) f(z) dz, truncated at zmax."""
    z = np.linspace(0.0, zmax, n)
    z[0] = 1e-300  # keep 1/z-type integrands finite; sin regularizes anyway
    vals = np.sin(k * z) * f(z)
    return simpson(vals, z)
