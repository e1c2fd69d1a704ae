"""Binary-antipodal AWGN channel and its log-likelihood field.

The transition density for one bit is
p(x | sigma) = sqrt(s^2 / 2 pi) * exp(-s^2 (x - sigma)^2 / 2),
so the noise variance is 1/s^2 with s^2 the linear SNR.  Log-likelihoods
use the half-LLR convention h = (1/2) ln[p(x|+1)/p(x|-1)] = s^2 * x,
which feeds the decoder's message update unscaled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelOutput:
    """Received real values plus the linear SNR that produced them."""

    received: np.ndarray
    snr: float

    def __post_init__(self):
        if self.snr <= 0:
            raise ValueError("snr must be positive")


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Random stream for one Monte-Carlo trial.

    A pure function of (master_seed, trial_index), so results never
    depend on execution order, chunking, or worker count.
    """
    return np.random.default_rng([master_seed % 2**64, trial_index])


def transmit_awgn(word, snr: float, rng: np.random.Generator) -> ChannelOutput:
    """Send a spin word through the AWGN channel: x = sigma + noise.

    Noise samples are independent zero-mean Gaussians of variance 1/snr.
    """
    if snr <= 0:
        raise ValueError("snr must be positive")
    w = np.asarray(word, dtype=np.float64)
    noise = rng.standard_normal(w.shape) / np.sqrt(snr)
    return ChannelOutput(received=w + noise, snr=float(snr))


def llr_from_channel(out: ChannelOutput) -> np.ndarray:
    """Half log-likelihood ratios h = snr * x for the channel density."""
    return out.snr * out.received
