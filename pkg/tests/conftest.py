import numpy as np
import pytest
from numpy.random import SeedSequence, default_rng

from polarbp import (
    ChannelParams,
    awgn_transmit,
    bpsk_modulate,
    build_tanner,
    construct_frozen_set,
    derive_parity_check,
    encode,
    llr_compute,
)


@pytest.fixture(scope="session")
def pc84():
    """PC(8,4) with frozen {0,1,2,4}, plus its parity-check matrix and graph."""
    spec = construct_frozen_set(8, 4, 0.0)
    H = derive_parity_check(spec)
    return spec, H, build_tanner(H)


@pytest.fixture(scope="session")
def pc168():
    spec = construct_frozen_set(16, 8, 1.0)
    H = derive_parity_check(spec)
    return spec, H, build_tanner(H)


def noisy_frame(spec, ebn0_db, seed, frame):
    """One random transmitted frame: (message, codeword, channel LLRs).

    Same per-frame seed derivation the simulation engine uses, so values
    here are reproducible against it.
    """
    ch = ChannelParams.from_ebn0(ebn0_db, spec.rate)
    rng = default_rng(SeedSequence([seed, frame]))
    msg = rng.integers(0, 2, size=spec.K, dtype=np.uint8)
    x = encode(msg, spec)
    r = awgn_transmit(bpsk_modulate(x), ch.sigma, rng)
    return msg, x, llr_compute(r, ch.sigma)
