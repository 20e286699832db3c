"""Certification and synthesis of Gaussian quantum channels at the covariance level."""

__version__ = "0.1.0"

from .channels import (
    ChannelParams,
    ValidityReport,
    Verdict,
    apply,
    compose,
    dual_weyl,
    env_mode_bound,
    fd0_member,
    fd_member_sample,
    fd_sufficient,
    identity_channel,
    noise_form,
    fd_counterexample,
    transpose_map_params,
    validity,
)
from .dilation import (
    DilationSpec,
    build_dilation,
    build_l21,
    induced_channel,
    random_dilation,
    random_valid_channel,
    verify_dilation,
)
from .exceptions import *  # noqa: F401,F403
from .interferometer import InterferometerDecision, Status, attenuator, decide, find_q, trace_condition
from .numerics import (
    DEFAULT_TOLERANCES,
    HermitianPair,
    SkewCanonicalForm,
    ToleranceConfig,
    pinv_rank,
    psd_min_eig,
    skew_canonical,
    sqrt_psd,
)
from .states import GaussianState, char_fn, gu_action, is_admissible_cov, random_state, thermal, vacuum
from .symplectic import (
    GaussianUnitary,
    SymplecticForm,
    contraction_embed,
    form_matrix,
    form_permutation,
    gu_compose,
    gu_inverse,
    is_symplectic,
    orthosymplectic_blocks,
    permute_form,
    qtheta,
    random_orthosymplectic,
    random_symplectic,
    symplectic_extend,
    symplectic_inverse,
    symplectic_residual,
)
