"""Symmetric alpha-stable (SaS) sample generation.

Only the symmetric, centered, unit-scale family S(alpha, 0, 1, 0) is
supported.  Samples are produced with the exact Chambers-Mallows-Stuck
transform of a uniform angle and a unit-rate exponential, so there is no
rejection step and no tail truncation.

Under this (standard "1-") parameterization S(2, 0, 1, 0) is the normal
distribution with variance 2, not variance 1, and S(1, 0, 1, 0) is the
standard Cauchy distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .rng import make_generator


@dataclass(frozen=True)
class StableParams:
    """Parameters of a symmetric alpha-stable law S(alpha, 0, 1, 0).

    ``alpha`` is the stability index in (0, 2].  The remaining three
    parameters exist for completeness of the stable-family notation but
    are pinned to the symmetric, centered, normalized case.
    """

    alpha: float
    beta: float = 0.0
    gamma: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or not 0.0 < alpha <= 2.0:
            raise ParameterError(f"alpha must lie in (0, 2], got {self.alpha!r}")
        if self.beta != 0.0 or self.gamma != 1.0 or self.delta != 0.0:
            raise ParameterError(
                "only the symmetric case S(alpha, 0, 1, 0) is supported; "
                f"got beta={self.beta!r}, gamma={self.gamma!r}, delta={self.delta!r}"
            )
        object.__setattr__(self, "alpha", alpha)


def sample_sas(params: StableParams, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` i.i.d. values from S(alpha, 0, 1, 0).

    Chambers-Mallows-Stuck construction: with V uniform on (-pi/2, pi/2)
    and W unit-rate exponential,

        X = sin(alpha V) / cos(V)^(1/alpha) * (cos((1-alpha) V) / W)^((1-alpha)/alpha)

    for alpha != 1, and X = tan(V) for the Cauchy case alpha = 1 (the
    general formula degenerates to 0/0 there).  Output is deterministic
    given (params, n, seed).
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    alpha = params.alpha
    rng = make_generator(seed)
    v = rng.uniform(-np.pi / 2.0, np.pi / 2.0, size=n)
    if alpha == 1.0:
        return np.tan(v)
    w = rng.standard_exponential(size=n)
    return (
        np.sin(alpha * v)
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha)
    )


def stability_scale(a: float, b: float, alpha: float) -> float:
    """Scale c such that a*X1 + b*X2 has the law of c*X for SaS X.

    For i.i.d. copies X1, X2 of an SaS variable, c = (a^alpha + b^alpha)^(1/alpha).
    """
    if not a > 0 or not b > 0:
        raise ParameterError(f"a and b must be positive, got a={a!r}, b={b!r}")
    if not 0.0 < alpha <= 2.0:
        raise ParameterError(f"alpha must lie in (0, 2], got {alpha!r}")
    return float((a**alpha + b**alpha) ** (1.0 / alpha))
