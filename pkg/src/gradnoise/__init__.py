"""Gaussianity testing of stochastic gradient noise via random projections.

The package answers one question about minibatch SGD: at a given point
in training, is the stochastic gradient noise (minibatch gradient minus
full-batch gradient) plausibly Gaussian?  It projects noise vectors
onto random unit directions, applies the Shapiro-Wilk and
Anderson-Darling tests to each scalar projection, and compares the
aggregates against a matched Gaussian baseline.  Symmetric alpha-stable
sampling and a block-sum tail-index estimator are included for sanity
sweeps and for examining the stable-noise alternative.
"""

from .errors import (
    ConfigError,
    DataFormatError,
    DegenerateSampleError,
    EmptyBatteryError,
    GradNoiseError,
    ParameterError,
    SampleSizeError,
    ShapeMismatchError,
)
from .noise_io import (
    read_noise,
    write_noise,
    write_reports_csv,
    write_reports_json,
)
from .projection import (
    DirectionSet,
    NoiseMatrix,
    NoiseMeta,
    ProjectionReport,
    battery,
    project,
    random_directions,
    sas_sanity_sweep,
)
from .rng import child_seed, make_generator
from .sgn_harness import (
    Checkpoint,
    Dataset,
    ModelState,
    ProbeConfig,
    TrainConfig,
    accuracy,
    extract_sgn,
    init_model,
    load_idx,
    loss_and_grad,
    sgd_step,
    synth_blobs,
    train_and_probe,
)
from .stable import StableParams, sample_sas, stability_scale
from .tail_index import (
    TailIndexEstimate,
    default_block_length,
    estimate_alpha,
    estimate_alpha_on_noise,
)
from .univariate_tests import (
    UnivariateTestResult,
    anderson_darling,
    shapiro_wilk,
)

__version__ = "0.1.0"

__all__ = [
    "Checkpoint",
    "ConfigError",
    "Dataset",
    "DataFormatError",
    "DegenerateSampleError",
    "DirectionSet",
    "EmptyBatteryError",
    "GradNoiseError",
    "ModelState",
    "NoiseMatrix",
    "NoiseMeta",
    "ParameterError",
    "ProbeConfig",
    "ProjectionReport",
    "SampleSizeError",
    "ShapeMismatchError",
    "StableParams",
    "TailIndexEstimate",
    "TrainConfig",
    "UnivariateTestResult",
    "accuracy",
    "anderson_darling",
    "battery",
    "child_seed",
    "default_block_length",
    "estimate_alpha",
    "estimate_alpha_on_noise",
    "extract_sgn",
    "init_model",
    "load_idx",
    "loss_and_grad",
    "make_generator",
    "project",
    "random_directions",
    "read_noise",
    "sample_sas",
    "sas_sanity_sweep",
    "sgd_step",
    "shapiro_wilk",
    "stability_scale",
    "synth_blobs",
    "train_and_probe",
    "write_noise",
    "write_reports_csv",
    "write_reports_json",
    "__version__",
]
