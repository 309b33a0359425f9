"""Directional tensor-product complex tight framelets with mixed sampling factors."""

from .filterbank import (
    BANK_NAMES,
    BankKind,
    BumpSegment,
    FilterBank1D,
    FrameletParams,
    GridError,
    ParameterError,
    SampledFilter,
    bump_eval,
    build_bank,
    default_bank,
    filter_l2_norm_sq,
    multilevel_filter,
    reference_params,
    sample_filter,
    validate_ctf6down,
    validate_params,
)
from .processing import (
    ConfigError,
    InpaintConfig,
    ShrinkConfig,
    add_gaussian_noise,
    bivariate_shrink,
    denoise,
    inpaint,
    make_random_mask,
    psnr,
)
from .transform import CoeffPyramid, ShapeError, analyze, crop, subdivision, sym_extend, synthesize, transition
from .verify import (
    check_energy,
    check_frequency_separation,
    check_pr,
    das_equivalence,
    redundancy,
)

__version__ = "0.1.0"
