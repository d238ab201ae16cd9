"""Monte Carlo simulator for GKP-concatenated lifted-product QLDPC codes."""

from .construction import (
    ACYCLIC,
    BaseMatrix,
    CssCode,
    TANNER_BASE,
    builtin_code,
    builtin_names,
    conjugate_transpose,
    cpm_expand,
    girth,
    lift,
    lifted_product,
    make_css_code,
)
from .decoder import DecoderConfig, DecodeResult, TannerGraph, cnu, decode, vnu
from .gf2 import BinaryMatrix, RowBasis, in_row_space, mat_mul, read_alist, write_alist
from .gkp import (
    LLR_CAP,
    SQRT_PI,
    ChannelConfig,
    GkpQubitOutcome,
    analog_error_prob,
    centered_mod,
    no_analog_llr,
    p_of_sigma,
    p_of_sigma_bound,
    prob_to_llr,
    sample_qubit,
    sample_qubits,
)
from .sim import (
    DEGENERATE_SUCCESS,
    FAILURE,
    MISCORRECTION,
    StopRule,
    SweepResult,
    ThresholdEstimate,
    TrialOutcome,
    css_hamming_rate,
    css_hamming_sigma,
    estimate_threshold,
    run_sweep,
    run_trial,
    write_sweep,
)

__version__ = "0.1.0"
