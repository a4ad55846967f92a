"""BPSK/AWGN channel model and the Monte Carlo experiment engine.

Reproducibility contract: frame f draws its generator from
SeedSequence([master_seed, f]), the message is drawn before the noise,
frames are processed in fixed-size batches, and the stop rule is only
evaluated at batch boundaries with batches merged in index order. Worker
threads may compute batches speculatively but results past the stopping
batch are discarded, so the aggregate statistics are identical for any
worker count.
"""

import concurrent.futures
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .codes import CodeSpec, encode, polar_transform
from .graph import build_tanner, derive_parity_check
from .reference import dense_bp_details, sc_decode, scl_decode
from .sparse import DecoderConfig, arsbp_decode, nwrbp_decode, spa_decode

DEFAULT_BATCH = 256

SPARSE_DECODERS = ("spa", "arsbp", "nwrbp")
DECODER_NAMES = SPARSE_DECODERS + ("sc", "scl", "dense-bp")


@dataclass(frozen=True)
class ChannelParams:
    ebn0_db: float
    rate: float
    sigma: float

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError("rate must lie in (0, 1]")
        if not self.sigma > 0.0:
            raise ValueError("sigma must be positive")

    @classmethod
    def from_ebn0(cls, ebn0_db: float, rate: float) -> "ChannelParams":
        if not 0.0 < rate <= 1.0:
            raise ValueError("rate must lie in (0, 1]")
        sigma = float(np.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))))
        return cls(ebn0_db=float(ebn0_db), rate=float(rate), sigma=sigma)


@dataclass(frozen=True)
class StopRule:
    """Stop once frames >= min_frames or frame errors >= min_frame_errors,
    whichever happens first; evaluated at batch boundaries."""

    min_frames: Optional[int] = 100_000
    min_frame_errors: Optional[int] = 200

    def __post_init__(self):
        if self.min_frames is None and self.min_frame_errors is None:
            raise ValueError("at least one stopping target is required")
        if self.min_frames is not None and self.min_frames < 1:
            raise ValueError("min_frames must be >= 1")
        if self.min_frame_errors is not None and self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be >= 1")

    def satisfied(self, frames: int, frame_errors: int) -> bool:
        if self.min_frames is not None and frames >= self.min_frames:
            return True
        if self.min_frame_errors is not None and frame_errors >= self.min_frame_errors:
            return True
        return False


@dataclass(frozen=True)
class DecoderSelection:
    """Names one decoder plus its knobs. config applies to spa/arsbp,
    budget to nwrbp, list_size to scl, t_max to dense-bp."""

    name: str
    config: Optional[DecoderConfig] = None
    list_size: int = 32
    t_max: int = 60
    budget: int = 20

    def __post_init__(self):
        if self.name not in DECODER_NAMES:
            raise ValueError(
                f"unknown decoder {self.name!r}; expected one of {', '.join(DECODER_NAMES)}"
            )


@dataclass
class AggregateStats:
    frames: int
    bit_errors: int
    frame_errors: int
    iteration_sum: int
    ber: float
    fer: float
    avg_iterations: float


def bpsk_modulate(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint8)
    return 1.0 - 2.0 * x.astype(np.float64)


def awgn_transmit(s, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    s = np.asarray(s, dtype=np.float64)
    return s + sigma * rng.standard_normal(s.size)


def llr_compute(r, sigma: float) -> np.ndarray:
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    return 2.0 * np.asarray(r, dtype=np.float64) / (sigma * sigma)


def _frame_rng(seed: int, frame: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, frame]))


class _FrameWorker:
    """Decodes one frame end to end; immutable after construction, safe
    to share across threads."""

    def __init__(self, spec, selection, channel, noiseless, all_zero, codeword_ber):
        self.spec = spec
        self.sel = selection
        self.channel = channel
        self.noiseless = noiseless
        self.all_zero = all_zero
        self.codeword_ber = codeword_ber
        if selection.name in SPARSE_DECODERS:
            self.H = derive_parity_check(spec)
            self.graph = build_tanner(self.H)
        else:
            self.H = None
            self.graph = None
        self.config = selection.config or DecoderConfig()

    def decode(self, y):
        sel = self.sel
        if sel.name == "spa":
            out = spa_decode(self.graph, self.H, y, self.config)
            return out.hard_bits, out.iterations
        if sel.name == "arsbp":
            out = arsbp_decode(self.graph, self.H, y, self.config)
            return out.hard_bits, out.iterations
        if sel.name == "nwrbp":
            out = nwrbp_decode(self.graph, self.H, y, sel.budget)
            return out.hard_bits, out.iterations
        if sel.name == "sc":
            return sc_decode(self.spec, y), 1
        if sel.name == "scl":
            return scl_decode(self.spec, y, sel.list_size), 1
        xw, iters, _ = dense_bp_details(self.spec, y, sel.t_max)
        return xw, iters

    def run(self, seed: int, frame: int):
        spec = self.spec
        rng = _frame_rng(seed, frame)
        if self.all_zero:
            msg = np.zeros(spec.K, dtype=np.uint8)
        else:
            msg = rng.integers(0, 2, size=spec.K, dtype=np.uint8)
        x = encode(msg, spec)
        s = bpsk_modulate(x)
        if self.noiseless:
            r = s
        else:
            r = awgn_transmit(s, self.channel.sigma, rng)
        y = llr_compute(r, self.channel.sigma)
        x_hat, iters = self.decode(y)
        if self.codeword_ber:
            errs = int(np.count_nonzero(x_hat != x))
        else:
            u_hat = polar_transform(x_hat)
            errs = int(np.count_nonzero(u_hat[spec.info_set] != msg))
        return errs, iters

    def run_batch(self, seed: int, lo: int, hi: int):
        bit_errors = 0
        frame_errors = 0
        iteration_sum = 0
        for f in range(lo, hi):
            errs, iters = self.run(seed, f)
            bit_errors += errs
            frame_errors += 1 if errs else 0
            iteration_sum += iters
        return bit_errors, frame_errors, iteration_sum


def _finalize(spec, frames, bit_errors, frame_errors, iteration_sum, codeword_ber):
    bits_per_frame = spec.N if codeword_ber else spec.K
    denom = frames * bits_per_frame
    return AggregateStats(
        frames=frames,
        bit_errors=bit_errors,
        frame_errors=frame_errors,
        iteration_sum=iteration_sum,
        ber=bit_errors / denom if denom else 0.0,
        fer=frame_errors / frames if frames else 0.0,
        avg_iterations=iteration_sum / frames if frames else 0.0,
    )


def run_monte_carlo(
    spec: CodeSpec,
    selection: DecoderSelection,
    channel: ChannelParams,
    stop_rule: Optional[StopRule] = None,
    seed: int = 0,
    workers: int = 1,
    batch_size: int = DEFAULT_BATCH,
    noiseless: bool = False,
    all_zero: bool = False,
    codeword_ber: bool = False,
) -> AggregateStats:
    """Simulates frames until the stop rule fires; deterministic in
    (seed, batch_size) and independent of the worker count."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    stop_rule = stop_rule or StopRule()
    worker = _FrameWorker(spec, selection, channel, noiseless, all_zero, codeword_ber)

    bit_errors = 0
    frame_errors = 0
    iteration_sum = 0
    frames = 0

    def merge(res) -> bool:
        nonlocal bit_errors, frame_errors, iteration_sum, frames
        bit_errors += res[0]
        frame_errors += res[1]
        iteration_sum += res[2]
        frames += batch_size
        return stop_rule.satisfied(frames, frame_errors)

    if workers == 1:
        k = 0
        while True:
            res = worker.run_batch(seed, k * batch_size, (k + 1) * batch_size)
            if merge(res):
                break
            k += 1
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as ex:
            pending = {}
            submitted = 0
            k = 0
            stop = False
            while not stop:
                while submitted < k + workers:
                    lo = submitted * batch_size
                    pending[submitted] = ex.submit(
                        worker.run_batch, seed, lo, lo + batch_size
                    )
                    submitted += 1
                stop = merge(pending.pop(k).result())
                k += 1
            for fut in pending.values():
                fut.cancel()
    return _finalize(spec, frames, bit_errors, frame_errors, iteration_sum, codeword_ber)


def iteration_ber_sweep(
    spec: CodeSpec,
    decoder: str,
    channel: ChannelParams,
    t_values,
    frames: int,
    seed: int = 0,
    config: Optional[DecoderConfig] = None,
):
    """Per-iteration-budget error counts for spa/arsbp, from a single
    traced decode per frame (the trajectory up to iteration t equals a
    run capped at t, because the syndrome stop is trajectory-consistent).

    Returns {t: (bit_errors, frame_errors)} over info bits, plus the
    frame count under key 'frames'.
    """
    if decoder not in ("spa", "arsbp"):
        raise ValueError("iteration sweep supports spa and arsbp only")
    t_values = sorted(set(int(t) for t in t_values))
    if not t_values or t_values[0] < 1:
        raise ValueError("iteration budgets must be >= 1")
    base = config or DecoderConfig()
    cfg = DecoderConfig(
        t_max=max(t_values),
        beta=base.beta,
        gamma=base.gamma,
        clamp_rho=base.clamp_rho,
        vn_exclusive=base.vn_exclusive,
        llr_max=base.llr_max,
    )
    H = derive_parity_check(spec)
    graph = build_tanner(H)
    fn = spa_decode if decoder == "spa" else arsbp_decode
    counts = {t: [0, 0] for t in t_values}
    for f in range(frames):
        rng = _frame_rng(seed, f)
        msg = rng.integers(0, 2, size=spec.K, dtype=np.uint8)
        x = encode(msg, spec)
        r = awgn_transmit(bpsk_modulate(x), channel.sigma, rng)
        y = llr_compute(r, channel.sigma)
        out = fn(graph, H, y, cfg, trace="light")
        for t in t_values:
            row = out.trace[min(t, len(out.trace)) - 1]
            u_hat = polar_transform(row.hard_bits)
            errs = int(np.count_nonzero(u_hat[spec.info_set] != msg))
            counts[t][0] += errs
            counts[t][1] += 1 if errs else 0
    result = {t: (c[0], c[1]) for t, c in counts.items()}
    result["frames"] = frames
    return result
