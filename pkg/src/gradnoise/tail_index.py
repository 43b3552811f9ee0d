"""Block-sum log-moment estimator of the stability index alpha.

For an i.i.d. symmetric alpha-stable sample the sum of k1 consecutive
values is again stable with scale k1^(1/alpha), so the gap between the
log-mean of block-sum magnitudes and the log-mean of sample magnitudes
is (1/alpha) * log k1.  The estimator inverts that identity:

    1/alpha_hat = (1/log k1) * [ mean_j log|Y_j| - mean_i log|X_i| ]

with Y_j the sum of the j-th block of k1 consecutive samples.  It is
consistent only when the data really are i.i.d. stable; on dependent or
non-stable data it returns a number that need not mean anything, which
is exactly the failure mode the probing pipeline is designed to expose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DegenerateSampleError, ParameterError
from .projection import NoiseMatrix


@dataclass(frozen=True)
class TailIndexEstimate:
    """Clamped estimate plus enough context to judge it.

    ``alpha_hat`` always lies in (0, 2].  When the raw estimate was
    non-positive or above 2 it is clamped to 2.0, ``clamped`` is set,
    and ``raw_alpha`` keeps the unclamped value (possibly infinite or
    negative).  ``degenerate_input`` marks a constant input sample, for
    which the formula collapses to alpha_hat = 1 regardless of the data.
    """

    alpha_hat: float
    raw_alpha: float
    clamped: bool
    k1: int
    k2: int
    n: int
    degenerate_input: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha_hat <= 2.0:
            raise ParameterError(f"alpha_hat must lie in (0, 2], got {self.alpha_hat!r}")
        if self.k1 < 2 or self.k2 < 1 or self.n != self.k1 * self.k2:
            raise ParameterError(
                f"inconsistent blocking: k1={self.k1}, k2={self.k2}, n={self.n}"
            )

    def to_dict(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat,
            "raw_alpha": self.raw_alpha,
            "clamped": self.clamped,
            "k1": self.k1,
            "k2": self.k2,
            "n": self.n,
            "degenerate_input": self.degenerate_input,
        }


def default_block_length(n: int) -> int:
    """The divisor of n closest to floor(sqrt(n)), at least 2.

    Balanced blocking (k1 near k2) gives the estimator the most blocks
    for a given block length.  Ties go to the smaller divisor.
    """
    if n < 2:
        raise ParameterError(f"need at least 2 samples, got {n}")
    target = math.isqrt(n)
    best: Optional[int] = None
    for d in range(1, target + 1):
        if n % d:
            continue
        for cand in (d, n // d):
            if cand < 2:
                continue
            if best is None or abs(cand - target) < abs(best - target) or (
                abs(cand - target) == abs(best - target) and cand < best
            ):
                best = cand
    if best is None:
        raise ParameterError(f"n={n} admits no block length >= 2")
    return best


def estimate_alpha(samples, k1: Optional[int] = None) -> TailIndexEstimate:
    """Estimate the stability index of an i.i.d. scalar sample.

    ``k1`` must divide the sample count; it defaults to the divisor
    nearest floor(sqrt(n)).  Exact zeros among the samples or the block
    sums are rejected rather than dropped, keeping the estimator a pure
    function of its declared input.  Scale-invariant: multiplying the
    sample by any c != 0 shifts both log-means by log|c|, which cancels.
    """
    x = np.ascontiguousarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise ParameterError(f"samples must be 1-D, got shape {x.shape}")
    n = x.size
    if n < 2:
        raise ParameterError(f"need at least 2 samples, got {n}")
    if not np.all(np.isfinite(x)):
        raise ParameterError("samples contain non-finite values")
    if k1 is None:
        k1 = default_block_length(n)
    k1 = int(k1)
    if k1 < 2:
        raise ParameterError(f"block length must be >= 2, got {k1}")
    if n % k1:
        raise ParameterError(f"block length {k1} does not divide sample count {n}")
    k2 = n // k1
    if np.any(x == 0.0):
        raise DegenerateSampleError("samples contain exact zeros; log|x| undefined")
    block_sums = x.reshape(k2, k1).sum(axis=1)
    if np.any(block_sums == 0.0):
        raise DegenerateSampleError("a block sum is exactly zero; log|Y| undefined")

    inv = (np.log(np.abs(block_sums)).mean() - np.log(np.abs(x)).mean()) / math.log(k1)
    if inv > 0.0:
        raw = 1.0 / inv
    elif inv == 0.0:
        raw = math.inf
    else:
        raw = 1.0 / inv
    clamped = not 0.0 < raw <= 2.0
    return TailIndexEstimate(
        alpha_hat=2.0 if clamped else raw,
        raw_alpha=raw,
        clamped=clamped,
        k1=k1,
        k2=k2,
        n=n,
        degenerate_input=bool(np.ptp(x) == 0.0),
    )


def estimate_alpha_on_noise(noise: NoiseMatrix, k1: Optional[int] = None) -> TailIndexEstimate:
    """Estimate alpha from a noise matrix flattened row-major.

    This treats all M*p entries as one i.i.d. scalar sample, mirroring
    the practice the estimator is meant to interrogate; when coordinates
    are strongly dependent the result can sit far from the truth even
    though every marginal is Gaussian.
    """
    return estimate_alpha(noise.data.reshape(-1), k1=k1)
