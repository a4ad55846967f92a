"""Message-passing decoders on the sparse parity-check graph.

Three decoders share the per-edge message layout of a TannerGraph:

* ``spa_decode``: flooding sum-product with the running-prior schedule
  (lambda' carries the accumulated prior between iterations).
* ``arsbp_decode``: the adaptive reweighted variant. Each edge gets a
  weight rho driven by the mismatch between its prior and the extrinsic
  sum, signed by the direction the message was already moving.
* ``nwrbp_decode``: node-wise residual scheduling, a sequential baseline.

The step functions (spa_init, cn_update, ...) are pure: they return new
EdgeState objects and never mutate their input. The decode drivers run
fused compiled loops built from the same kernels, so a step-by-step
replay reproduces a driver's trajectory bit for bit.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .graph import ParityCheckMatrix, TannerGraph, syndrome
from .kernels import LLR_MAX


@dataclass
class EdgeState:
    """Per-edge message arrays, indexed like TannerGraph.edge_var.

    lam is the VN-to-CN message, Lam the CN-to-VN message, lam_prime the
    running prior. rho and delta exist for the reweighted decoder and stay
    at (1, +1) under the plain SPA.
    """

    lam: np.ndarray
    Lam: np.ndarray
    lam_prime: np.ndarray
    rho: np.ndarray
    delta: np.ndarray

    def copy(self) -> "EdgeState":
        return EdgeState(
            self.lam.copy(),
            self.Lam.copy(),
            self.lam_prime.copy(),
            self.rho.copy(),
            self.delta.copy(),
        )


@dataclass(frozen=True)
class DecoderConfig:
    t_max: int = 20
    beta: float = 1.0
    gamma: float = 1.0
    clamp_rho: bool = False
    vn_exclusive: bool = True
    llr_max: float = LLR_MAX

    def __post_init__(self):
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if not self.llr_max > 0:
            raise ValueError("llr_max must be positive")


@dataclass
class IterTrace:
    """One per-iteration snapshot from a traced decode."""

    hard_bits: np.ndarray
    mean_abs_rho_minus_1: float
    msg_min: float
    msg_max: float
    syndrome_ok: bool
    state: Optional[EdgeState] = None


@dataclass
class DecodeOutcome:
    hard_bits: np.ndarray
    iterations: int
    converged: bool
    trace: Optional[list] = field(default=None, repr=False)


def _as_llr(y, graph: TannerGraph) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.shape != (graph.V,):
        raise ValueError(f"expected {graph.V} channel LLRs, got shape {y.shape}")
    return y


def spa_init(graph: TannerGraph, y, llr_max: float = LLR_MAX) -> EdgeState:
    """Initial edge state: Lam = 0 everywhere, lam_prime copied from the
    channel LLR of the edge's variable (saturated)."""
    y = _as_llr(y, graph)
    E = graph.E
    lam_prime = np.empty(E)
    kernels.init_lam_prime_kernel(graph.edge_var, y, lam_prime, llr_max)
    return EdgeState(
        lam=lam_prime.copy(),
        Lam=np.zeros(E),
        lam_prime=lam_prime,
        rho=np.ones(E),
        delta=np.ones(E),
    )


def cn_update(state: EdgeState, graph: TannerGraph, llr_max: float = LLR_MAX) -> EdgeState:
    """Check-node pass: Lam on edge (c,v) = 2*atanh(prod tanh(lam'/2))
    over the other edges of c. Reads lam_prime, not lam."""
    out = state.copy()
    tanh_buf = np.empty(graph.E)
    kernels.cn_update_kernel(graph.check_ptr, state.lam_prime, tanh_buf, out.Lam, llr_max)
    return out


def vn_update_spa(state: EdgeState, graph: TannerGraph, config: DecoderConfig) -> EdgeState:
    """Variable-node pass: lam = lam_prime + extrinsic (or inclusive) sum
    of incoming Lam."""
    out = state.copy()
    kernels.vn_update_spa_kernel(
        graph.var_ptr,
        graph.var_edge_idx,
        state.lam_prime,
        state.Lam,
        config.vn_exclusive,
        out.lam,
        config.llr_max,
    )
    return out


def vn_update_arsbp(state: EdgeState, graph: TannerGraph, config: DecoderConfig) -> EdgeState:
    """Reweighted variable-node pass.

    Per edge: delta = sign of (previous lam + S) with sign(0) = +1,
    rho = gamma - beta * ||lam'| - |S|| / (|lam'| + |S|) * delta, and
    lam = rho * (lam' + S). S is the same Lam sum the SPA update uses.
    """
    out = state.copy()
    kernels.vn_update_arsbp_kernel(
        graph.var_ptr,
        graph.var_edge_idx,
        state.lam_prime,
        state.lam,
        state.Lam,
        config.beta,
        config.gamma,
        config.vn_exclusive,
        config.clamp_rho,
        out.lam,
        out.rho,
        out.delta,
        config.llr_max,
    )
    return out


def refresh_prior(state: EdgeState, reweighted: bool, llr_max: float = LLR_MAX) -> EdgeState:
    """Continuation step between iterations: lam' <- lam (plain) or
    lam' <- rho * lam (reweighted)."""
    out = state.copy()
    if reweighted:
        kernels.refresh_arsbp_kernel(state.rho, state.lam, out.lam_prime, llr_max)
    else:
        out.lam_prime = state.lam.copy()
    return out


def hard_decision(state: EdgeState, graph: TannerGraph, y) -> np.ndarray:
    """Posterior decision per variable: bit = 1 iff y[v] + sum(Lam) <= 0."""
    y = _as_llr(y, graph)
    bits = np.empty(graph.V, dtype=np.uint8)
    kernels.posterior_kernel(graph.var_ptr, graph.var_edge_idx, state.Lam, y, bits)
    return bits


def _decode_stepwise(graph, H, y, config, reweighted, full_trace):
    # slow path, used when per-edge snapshots are requested; trajectory is
    # bit-identical to the fused loop because both call the same kernels
    state = spa_init(graph, y, config.llr_max)
    trace = []
    for t in range(1, config.t_max + 1):
        state = cn_update(state, graph, config.llr_max)
        if reweighted:
            state = vn_update_arsbp(state, graph, config)
        else:
            state = vn_update_spa(state, graph, config)
        bits = hard_decision(state, graph, y)
        ok = bool(syndrome(H, bits))
        trace.append(
            IterTrace(
                hard_bits=bits,
                mean_abs_rho_minus_1=float(np.mean(np.abs(state.rho - config.gamma))) if state.rho.size else 0.0,
                msg_min=float(state.lam.min()) if state.lam.size else 0.0,
                msg_max=float(state.lam.max()) if state.lam.size else 0.0,
                syndrome_ok=ok,
                state=state.copy() if full_trace else None,
            )
        )
        if ok:
            return DecodeOutcome(bits, t, True, trace)
        state = refresh_prior(state, reweighted, config.llr_max)
    return DecodeOutcome(bits, config.t_max, False, trace)


_NO_BITS = np.empty((0, 0), dtype=np.uint8)
_NO_STATS = np.empty((0, 4))


def _decode_fused(graph, H, y, config, reweighted, light_trace):
    y = _as_llr(y, graph)
    if light_trace:
        tb = np.zeros((config.t_max, graph.V), dtype=np.uint8)
        ts = np.zeros((config.t_max, 4))
    else:
        tb, ts = _NO_BITS, _NO_STATS
    if reweighted:
        bits, iters, ok = kernels.arsbp_loop(
            graph.check_ptr,
            graph.edge_var,
            graph.var_ptr,
            graph.var_edge_idx,
            y,
            config.t_max,
            config.beta,
            config.gamma,
            config.vn_exclusive,
            config.clamp_rho,
            config.llr_max,
            light_trace,
            tb,
            ts,
        )
    else:
        bits, iters, ok = kernels.spa_loop(
            graph.check_ptr,
            graph.edge_var,
            graph.var_ptr,
            graph.var_edge_idx,
            y,
            config.t_max,
            config.vn_exclusive,
            config.llr_max,
            light_trace,
            tb,
            ts,
        )
    trace = None
    if light_trace:
        trace = [
            IterTrace(
                hard_bits=tb[t].copy(),
                mean_abs_rho_minus_1=float(ts[t, 0]),
                msg_min=float(ts[t, 1]),
                msg_max=float(ts[t, 2]),
                syndrome_ok=bool(ts[t, 3]),
            )
            for t in range(iters)
        ]
    return DecodeOutcome(np.asarray(bits), int(iters), bool(ok), trace)


def spa_decode(
    graph: TannerGraph,
    H: ParityCheckMatrix,
    y,
    config: Optional[DecoderConfig] = None,
    trace: Optional[str] = None,
) -> DecodeOutcome:
    """Sum-product decoding until the syndrome clears or t_max passes.

    trace=None runs the fused loop; 'light' adds per-iteration hard bits
    and summary stats; 'full' additionally snapshots every EdgeState.
    """
    config = config or DecoderConfig()
    if trace == "full":
        return _decode_stepwise(graph, H, _as_llr(y, graph), config, False, True)
    return _decode_fused(graph, H, y, config, False, trace == "light")


def arsbp_decode(
    graph: TannerGraph,
    H: ParityCheckMatrix,
    y,
    config: Optional[DecoderConfig] = None,
    trace: Optional[str] = None,
) -> DecodeOutcome:
    """Adaptive reweighted decoding. beta = 0 reproduces spa_decode
    bit for bit (rho stays exactly 1)."""
    config = config or DecoderConfig()
    if trace == "full":
        return _decode_stepwise(graph, H, _as_llr(y, graph), config, True, True)
    return _decode_fused(graph, H, y, config, True, trace == "light")


def nwrbp_decode(
    graph: TannerGraph,
    H: ParityCheckMatrix,
    y,
    budget: int = 20,
    llr_max: float = LLR_MAX,
) -> DecodeOutcome:
    """Residual-scheduled decoding; budget is in iteration-equivalents
    (one equivalent = num_checks committed check updates)."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    y = _as_llr(y, graph)
    bits, iters, ok = kernels.nwrbp_loop(
        graph.check_ptr,
        graph.edge_check,
        graph.edge_var,
        graph.var_ptr,
        graph.var_edge_idx,
        y,
        budget,
        llr_max,
    )
    return DecodeOutcome(np.asarray(bits), int(iters), bool(ok), None)
