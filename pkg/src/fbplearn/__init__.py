"""Parallel-beam FBP with a trainable frequency-domain reconstruction filter."""

from ._backend import USING_EXTENSION, set_num_threads
from .core import (
    GridSpec,
    Image,
    ScanGeometry,
    Sinogram,
    bin_frequencies,
    default_geometry,
    frequency_of_bin,
)
from .learner import (
    DivergenceError,
    GradCheckReport,
    TrainConfig,
    TrainHistory,
    TrainingSample,
    auto_learning_rate,
    grad_check,
    gradient,
    objective,
    prepare_samples,
    train,
)
from .metrics import (
    DiffStats,
    abs_diff_stats,
    cupping_index,
    line_profile,
    spectrum_distance,
)
from .phantom import make_disc, make_held_out, make_training_set
from .projector import (
    DenseSystem,
    back_project,
    build_dense_system,
    forward_project,
    matched_back_project,
)
from .spectral import (
    SpectralFilter,
    apply_filter,
    modified_ramp_filter,
    ramlak_filter,
    ramp_filter,
    reconstruct,
    shepp_logan_filter,
)

__version__ = "0.1.0"


def using_extension() -> bool:
    """True when the compiled projector kernels are active."""
    return USING_EXTENSION
