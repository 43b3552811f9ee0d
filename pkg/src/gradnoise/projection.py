"""Random-projection battery for multivariate Gaussianity.

A vector sample whose one-dimensional marginals are all Gaussian is
multivariate Gaussian, so the battery projects the sample onto random
unit directions and tests each projection with the scalar tests.  Per
checkpoint it aggregates the mean Shapiro-Wilk p-value and the
Anderson-Darling acceptance fraction, alongside the same two quantities
for a matched Gaussian sample of identical shape projected along the
same directions.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    EmptyBatteryError,
    ParameterError,
    SampleSizeError,
    ShapeMismatchError,
)
from .rng import child_seed, make_generator
from .stable import StableParams, sample_sas
from .univariate_tests import (
    SHAPIRO_WILK_MAX_N,
    anderson_darling,
    shapiro_wilk,
)

# Shapiro-Wilk p-values below this are treated as overwhelming evidence
# against Gaussianity of the projected marginal, and hence against the
# multivariate-Gaussian hypothesis.  Under a true Gaussian with k = 1000
# directions the flag trips with probability about 1e-3.
STRONG_REJECTION_P = 1e-6

_UNIT_NORM_TOL = 1e-12


@dataclass(frozen=True)
class NoiseMeta:
    """Provenance of a noise sample: where in training it was taken."""

    iteration: Optional[int] = None
    batch_size: Optional[int] = None
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {"iteration": self.iteration, "batch_size": self.batch_size, "seed": self.seed}


@dataclass(frozen=True, eq=False)
class NoiseMatrix:
    """M noise vectors of dimension p, stored as an M-by-p float64 array."""

    data: np.ndarray
    meta: NoiseMeta = field(default_factory=NoiseMeta)

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ParameterError(f"noise data must be 2-D, got shape {data.shape}")
        m, p = data.shape
        if m < 8:
            raise ParameterError(f"need at least 8 noise vectors, got {m}")
        if p < 1:
            raise ParameterError("noise vectors must have dimension >= 1")
        if not np.all(np.isfinite(data)):
            raise ParameterError("noise data contains non-finite entries")
        object.__setattr__(self, "data", data)

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """k unit vectors in R^p used as projection directions."""

    vectors: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        vectors = np.ascontiguousarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise ParameterError(f"directions must be 2-D, got shape {vectors.shape}")
        norms = np.linalg.norm(vectors, axis=1)
        if np.any(np.abs(norms - 1.0) > _UNIT_NORM_TOL):
            worst = float(np.abs(norms - 1.0).max())
            raise ParameterError(f"direction rows must be unit vectors (worst deviation {worst:.3e})")
        object.__setattr__(self, "vectors", vectors)

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    @property
    def p(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class ProjectionReport:
    """Aggregate test outcomes for one noise sample.

    ``sw_mean_p`` and ``ad_accept_frac`` average over the non-degenerate
    directions; ``n_degenerate`` counts directions whose projected sample
    was constant and therefore excluded.  The ``baseline_*`` fields hold
    the same aggregates for the matched Gaussian data.
    ``gaussian_plausible`` is False when at least one direction rejected
    with overwhelming evidence (Shapiro-Wilk p < 1e-6).
    """

    sw_mean_p: float
    ad_accept_frac: float
    baseline_sw_mean_p: float
    baseline_ad_accept_frac: float
    level: float
    n_directions: int
    n_degenerate: int
    baseline_n_degenerate: int
    sw_min_p: float
    gaussian_plausible: bool
    iteration: Optional[int] = None

    def __post_init__(self):
        for name in ("sw_mean_p", "ad_accept_frac", "baseline_sw_mean_p", "baseline_ad_accept_frac"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {v!r}")

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "level": self.level,
            "sw_mean_p": self.sw_mean_p,
            "ad_accept_frac": self.ad_accept_frac,
            "baseline_sw_mean_p": self.baseline_sw_mean_p,
            "baseline_ad_accept_frac": self.baseline_ad_accept_frac,
            "n_directions": self.n_directions,
            "n_degenerate": self.n_degenerate,
            "baseline_n_degenerate": self.baseline_n_degenerate,
            "sw_min_p": self.sw_min_p,
            "gaussian_plausible": self.gaussian_plausible,
        }


def random_directions(p: int, k: int, seed: int) -> DirectionSet:
    """Draw k directions i.i.d. uniform on the unit sphere in R^p.

    Standard-normal coordinate vectors are normalized to unit length,
    which induces the uniform law on the sphere.  Deterministic in seed.
    """
    if p < 1 or k < 1:
        raise ParameterError(f"need p >= 1 and k >= 1, got p={p}, k={k}")
    rng = make_generator(seed, 0)
    g = rng.standard_normal((k, p))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # a zero row has probability zero; regenerate defensively
    while np.any(norms == 0.0):
        bad = norms[:, 0] == 0.0
        g[bad] = rng.standard_normal((int(bad.sum()), p))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
    return DirectionSet(g / norms, seed=seed)


def project(noise: NoiseMatrix, dirs: DirectionSet) -> np.ndarray:
    """Project every noise vector onto every direction.

    Returns an M-by-k array whose column j holds the scalar sample
    <noise row i, direction j> for i = 1..M.
    """
    if noise.p != dirs.p:
        raise ShapeMismatchError(
            f"noise dimension {noise.p} does not match direction dimension {dirs.p}"
        )
    return noise.data @ dirs.vectors.T


def _test_columns(proj: np.ndarray, lo: int, hi: int, level: float):
    """Run both scalar tests on columns [lo, hi); pure helper for the pool."""
    sw_p = np.full(hi - lo, np.nan)
    ad_ok = np.zeros(hi - lo, dtype=bool)
    degenerate = np.zeros(hi - lo, dtype=bool)
    for j in range(lo, hi):
        col = proj[:, j]
        if np.ptp(col) == 0.0:
            degenerate[j - lo] = True
            continue
        sw_p[j - lo] = shapiro_wilk(col, level=level).p_value
        ad_ok[j - lo] = anderson_darling(col, level=level).accepted
    return sw_p, ad_ok, degenerate


def _test_all(proj: np.ndarray, level: float, workers: int):
    k = proj.shape[1]
    if workers <= 1 or k < 2:
        return _test_columns(proj, 0, k, level)
    bounds = np.linspace(0, k, workers + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(
            pool.map(lambda ab: _test_columns(proj, ab[0], ab[1], level), zip(bounds[:-1], bounds[1:]))
        )
    sw_p = np.concatenate([p[0] for p in parts])
    ad_ok = np.concatenate([p[1] for p in parts])
    degenerate = np.concatenate([p[2] for p in parts])
    return sw_p, ad_ok, degenerate


def _aggregate(sw_p, ad_ok, degenerate, what: str):
    live = ~degenerate
    n_live = int(live.sum())
    if n_live == 0:
        raise EmptyBatteryError(f"every projected {what} sample is degenerate")
    return (
        float(sw_p[live].mean()),
        float(ad_ok[live].sum() / n_live),
        int(degenerate.sum()),
        float(sw_p[live].min()),
    )


def battery(
    noise: NoiseMatrix,
    dirs: DirectionSet,
    level: float = 0.05,
    baseline_seed: int = 0,
    workers: int = 1,
) -> ProjectionReport:
    """Test all projections of the noise and of a matched Gaussian sample.

    The baseline is an M-by-p matrix of i.i.d. standard normals generated
    from ``baseline_seed`` and projected along the same directions; its
    aggregates depend only on (M, p, dirs, baseline_seed), never on the
    noise data.  Directions whose projected sample is constant are
    excluded from the aggregates and counted.  Deterministic for fixed
    seeds regardless of ``workers``.
    """
    if noise.m > SHAPIRO_WILK_MAX_N:
        raise SampleSizeError(
            f"M={noise.m} exceeds the Shapiro-Wilk limit of {SHAPIRO_WILK_MAX_N}"
        )
    proj = project(noise, dirs)
    sw_p, ad_ok, degen = _test_all(proj, level, workers)
    sw_mean, ad_frac, n_degen, sw_min = _aggregate(sw_p, ad_ok, degen, "noise")

    base = make_generator(baseline_seed, 1).standard_normal((noise.m, noise.p))
    bproj = base @ dirs.vectors.T
    bsw_p, bad_ok, bdegen = _test_all(bproj, level, workers)
    bsw_mean, bad_frac, bn_degen, _ = _aggregate(bsw_p, bad_ok, bdegen, "baseline")

    return ProjectionReport(
        sw_mean_p=sw_mean,
        ad_accept_frac=ad_frac,
        baseline_sw_mean_p=bsw_mean,
        baseline_ad_accept_frac=bad_frac,
        level=level,
        n_directions=dirs.k,
        n_degenerate=n_degen,
        baseline_n_degenerate=bn_degen,
        sw_min_p=sw_min,
        gaussian_plausible=sw_min >= STRONG_REJECTION_P,
        iteration=noise.meta.iteration,
    )


def sas_sanity_sweep(
    alphas: Sequence[float],
    m: int = 1000,
    p: int = 100,
    k: int = 1000,
    level: float = 0.05,
    seed: int = 0,
    workers: int = 1,
) -> list[tuple[float, ProjectionReport]]:
    """Run the battery on synthetic SaS noise for each stability index.

    For each alpha an M-by-p matrix of i.i.d. S(alpha, 0, 1, 0) entries is
    built and fed to the battery; results are returned ordered by alpha.
    All noise, baseline, and direction streams derive from ``seed``.
    """
    params = [StableParams(a) for a in alphas]
    if not params:
        return []
    dirs = random_directions(p, k, seed)
    out = []
    order = sorted(range(len(params)), key=lambda i: params[i].alpha)
    for rank, i in enumerate(order):
        alpha = params[i].alpha
        draws = sample_sas(params[i], m * p, child_seed(seed, 1, rank))
        noise = NoiseMatrix(draws.reshape(m, p), NoiseMeta(seed=seed))
        report = battery(
            noise, dirs, level=level, baseline_seed=child_seed(seed, 2, rank), workers=workers
        )
        out.append((alpha, report))
    return out
