"""Polar-code toolkit: construction, encoding, sparse-graph and
transform-domain decoding, channel simulation, convergence diagnostics."""

from .codes import (
    CodeSpec,
    construct_frozen_set,
    encode,
    encode_systematic,
    generator_matrix,
    polar_transform,
)
from .graph import (
    ParityCheckMatrix,
    TannerGraph,
    build_tanner,
    derive_parity_check,
    syndrome,
    to_alist,
)
from .sparse import (
    LLR_MAX,
    DecodeOutcome,
    DecoderConfig,
    EdgeState,
    IterTrace,
    arsbp_decode,
    cn_update,
    hard_decision,
    nwrbp_decode,
    refresh_prior,
    spa_decode,
    spa_init,
    vn_update_arsbp,
    vn_update_spa,
)
from .reference import (
    dense_bp_decode,
    dense_bp_details,
    ml_decode,
    sc_decode,
    scl_decode,
)
from .channel import (
    AggregateStats,
    ChannelParams,
    DecoderSelection,
    StopRule,
    awgn_transmit,
    bpsk_modulate,
    iteration_ber_sweep,
    llr_compute,
    run_monte_carlo,
)
from .diagnostics import (
    ConvergenceReport,
    check_column_sum,
    check_row_sum,
    iteration_reports,
    rho_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateStats",
    "ChannelParams",
    "CodeSpec",
    "ConvergenceReport",
    "DecodeOutcome",
    "DecoderConfig",
    "DecoderSelection",
    "EdgeState",
    "IterTrace",
    "LLR_MAX",
    "ParityCheckMatrix",
    "StopRule",
    "TannerGraph",
    "arsbp_decode",
    "awgn_transmit",
    "bpsk_modulate",
    "build_tanner",
    "check_column_sum",
    "check_row_sum",
    "cn_update",
    "construct_frozen_set",
    "dense_bp_decode",
    "dense_bp_details",
    "derive_parity_check",
    "encode",
    "encode_systematic",
    "generator_matrix",
    "hard_decision",
    "iteration_ber_sweep",
    "iteration_reports",
    "llr_compute",
    "ml_decode",
    "nwrbp_decode",
    "polar_transform",
    "refresh_prior",
    "rho_trajectory",
    "run_monte_carlo",
    "sc_decode",
    "scl_decode",
    "spa_decode",
    "spa_init",
    "syndrome",
    "to_alist",
    "vn_update_arsbp",
    "vn_update_spa",
]
