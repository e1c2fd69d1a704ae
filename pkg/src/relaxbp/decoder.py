"""Iterative message-passing decoding with tunable relaxation (damping).

Messages are half-LLR values eta, one per Tanner-graph edge.  The
relaxed flooding update couples each bit's new messages through a
damping term of weight 1/Delta:

    eta'[i,a] + (1/Delta) sum_b eta'[i,b]
        = h[i] + sum_{b in i, b != a} C(b -> i) + (1/Delta) sum_b eta[i,b]

where b ranges over the checks containing bit i and C is the variant's
check-to-bit rule: atanh of the product of tanh of the other incoming
messages (sum-product), or the product of their signs times the minimum
magnitude (min-sum).  The implicit left-hand side solves in closed form
per bit: with R the right-hand side and S_i = sum_a R[i,a] / (1 + q_i/Delta),

    eta'[i,a] = R[i,a] - S_i / Delta.

Delta is stored as 1/Delta, so Delta = infinity is exactly 0.0 and the
update is the plain flooding BP step with no special-casing.  Decoding
stops the first time the hard decision satisfies every parity check,
starting with the raw channel decision before any iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .codes import ParityCheckCode, is_codeword

SUM_PRODUCT = "sum_product"
MIN_SUM = "min_sum"

CONVERGED = "converged"
EXHAUSTED = "exhausted"

# Messages are clipped to +-CLAMP; tanh(19) is within 1e-16 of 1, so the
# cap never changes a hard decision.  Products fed to atanh are pulled
# inside +-(1 - 1e-12) to keep it finite.
CLAMP = 19.0
_ATANH_ARG_MAX = 1.0 - 1e-12


@dataclass
class Messages:
    """Per-edge messages at one iteration, indexed by dense edge id."""

    eta: np.ndarray
    iteration: int = 0


@dataclass(frozen=True)
class DecoderConfig:
    variant: str = MIN_SUM
    delta: float = math.inf
    max_iterations: int = 16384

    def __post_init__(self):
        if self.variant not in (SUM_PRODUCT, MIN_SUM):
            raise ValueError(f"unknown variant {self.variant!r}")
        if not self.delta > 0:
            raise ValueError("delta must be positive (math.inf allowed)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")

    @property
    def inv_delta(self) -> float:
        return 1.0 / self.delta


@dataclass
class DecodeResult:
    status: str
    word: np.ndarray
    terminated_at: Optional[int]
    iterations_run: int
    bethe_trace: Optional[list] = field(default=None, repr=False)


def init_messages(code: ParityCheckCode, h) -> Messages:
    """Initial messages: every edge of bit i carries h[i]."""
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (code.n_bits,):
        raise ValueError(f"h has shape {h.shape}, expected ({code.n_bits},)")
    return Messages(eta=np.clip(h[code.edge_bit], -CLAMP, CLAMP), iteration=0)


# ---------------------------------------------------------------------------
# Vectorized kernels.  All operate on batched (n_trials, n_edges) arrays;
# single-trial entry points add and strip a leading axis of length 1.
# ---------------------------------------------------------------------------

def _check_messages(code: ParityCheckCode, eta: np.ndarray, variant: str) -> np.ndarray:
    """Check-to-bit values C for every edge, from messages eta of shape (B, E).

    Uses forward/backward prefix aggregates per check, so each check of
    degree d costs O(d) rather than O(d^2).
    """
    out = np.empty_like(eta)
    for group in code.check_groups:
        x = eta[:, group.edge_ids]  # (B, g, d)
        d = group.degree
        if variant == SUM_PRODUCT:
            t = np.tanh(x)
            left = np.ones_like(t)
            right = np.ones_like(t)
            if d > 1:
                left[:, :, 1:] = np.cumprod(t[:, :, :-1], axis=2)
                right[:, :, :-1] = np.cumprod(t[:, :, ::-1], axis=2)[:, :, d - 2::-1]
            prod = np.clip(left * right, -_ATANH_ARG_MAX, _ATANH_ARG_MAX)
            c = np.arctanh(prod)
        else:
            mag = np.abs(x)
            sgn = np.where(x < 0, -1.0, 1.0)
            # Excluding one factor from a +-1 product is a multiplication.
            excl_sign = sgn.prod(axis=2, keepdims=True) * sgn
            left = np.full_like(mag, np.inf)
            right = np.full_like(mag, np.inf)
            if d > 1:
                left[:, :, 1:] = np.minimum.accumulate(mag[:, :, :-1], axis=2)
                right[:, :, :-1] = np.minimum.accumulate(
                    mag[:, :, ::-1], axis=2)[:, :, d - 2::-1]
            excl_min = np.minimum(np.minimum(left, right), CLAMP)
            c = excl_sign * excl_min
        out[:, group.edge_ids] = c
    return out


def _bit_reduce(code: ParityCheckCode, values: np.ndarray) -> np.ndarray:
    """Sum per-edge values over each bit's edges: (B, E) -> (B, N)."""
    out = np.zeros((values.shape[0], code.n_bits), dtype=values.dtype)
    for group in code.bit_groups:
        out[:, group.nodes] = values[:, group.edge_ids].sum(axis=2)
    return out


def _extrinsic(code: ParityCheckCode, checks: np.ndarray, h: np.ndarray) -> np.ndarray:
    """h[i] plus the sum of incoming check values excluding the edge's own."""
    total = _bit_reduce(code, checks)
    return h[:, code.edge_bit] + (total[:, code.edge_bit] - checks)


def _bp_from_checks(code, checks, h):
    return np.clip(_extrinsic(code, checks, h), -CLAMP, CLAMP)


def _relaxed_from_checks(code, eta, checks, h, inv_delta):
    r = _extrinsic(code, checks, h) + inv_delta * _bit_reduce(code, eta)[:, code.edge_bit]
    s = _bit_reduce(code, r) / (1.0 + code.bit_degrees * inv_delta)
    return np.clip(r - inv_delta * s[:, code.edge_bit], -CLAMP, CLAMP)


def _posterior_from_checks(code, checks, h):
    return h + _bit_reduce(code, checks)


def _hard_decision_2d(fields: np.ndarray) -> np.ndarray:
    return np.where(fields >= 0, 1, -1).astype(np.int64)


def _syndrome_ok_2d(code: ParityCheckCode, words: np.ndarray) -> np.ndarray:
    """Per-trial flag: does the word satisfy every parity check?"""
    ok = np.ones(words.shape[0], dtype=bool)
    for group in code.check_groups:
        ok &= (words[:, group.neighbor_ids].prod(axis=2) == 1).all(axis=1)
    return ok


# ---------------------------------------------------------------------------
# Public single-trial operations.
# ---------------------------------------------------------------------------

def check_to_bit_sum_product(messages: Messages, code: ParityCheckCode,
                             bit: int, check: int) -> float:
    """atanh of the product of tanh(eta) over the check's other bits."""
    if (bit, check) not in code.edge_index:
        raise ValueError(f"edge ({bit}, {check}) does not exist")
    prod = 1.0
    for j in code.check_neighbors[check]:
        if j != bit:
            prod *= math.tanh(messages.eta[code.edge_index[(j, check)]])
    return math.atanh(min(max(prod, -_ATANH_ARG_MAX), _ATANH_ARG_MAX))


def check_to_bit_min_sum(messages: Messages, code: ParityCheckCode,
                         bit: int, check: int) -> float:
    """Product of signs times minimum magnitude over the check's other bits."""
    if (bit, check) not in code.edge_index:
        raise ValueError(f"edge ({bit}, {check}) does not exist")
    sign = 1.0
    magnitude = CLAMP
    for j in code.check_neighbors[check]:
        if j != bit:
            v = messages.eta[code.edge_index[(j, check)]]
            if v < 0:
                sign = -sign
            magnitude = min(magnitude, abs(v))
    return sign * magnitude


def bp_step(messages: Messages, code: ParityCheckCode, h, variant: str) -> Messages:
    """One standard flooding BP update: eta'[i,a] = h[i] + sum_{b != a} C(b -> i)."""
    h = np.asarray(h, dtype=np.float64)
    eta = messages.eta[None, :]
    checks = _check_messages(code, eta, variant)
    return Messages(eta=_bp_from_checks(code, checks, h[None, :])[0],
                    iteration=messages.iteration + 1)


def relaxed_step(messages: Messages, code: ParityCheckCode, h,
                 config: DecoderConfig) -> Messages:
    """One relaxed update; delta = inf reduces exactly to bp_step."""
    h = np.asarray(h, dtype=np.float64)
    if messages.eta.shape != (code.n_edges,):
        raise ValueError("messages do not belong to this code")
    eta = messages.eta[None, :]
    checks = _check_messages(code, eta, config.variant)
    new = _relaxed_from_checks(code, eta, checks, h[None, :], config.inv_delta)
    return Messages(eta=new[0], iteration=messages.iteration + 1)


def posterior_field(messages: Messages, code: ParityCheckCode, h,
                    variant: str = SUM_PRODUCT) -> np.ndarray:
    """Per-bit belief half-LLR m[i] = h[i] + sum of incoming check values."""
    h = np.asarray(h, dtype=np.float64)
    checks = _check_messages(code, messages.eta[None, :], variant)
    return _posterior_from_checks(code, checks, h[None, :])[0]


def hard_decision(fields) -> np.ndarray:
    """Spin decision per bit: +1 where the field is >= 0, else -1."""
    return np.where(np.asarray(fields) >= 0, 1, -1).astype(np.int64)


def decode(code: ParityCheckCode, h, config: DecoderConfig, *,
           bethe_trace: bool = False) -> DecodeResult:
    """Decode one channel realization.

    The hard decision is tested before any message update (iteration 0
    is the raw channel decision) and after every relaxed step; the run
    stops at the first decision that is a codeword, else after
    ``config.max_iterations`` updates.

    With ``bethe_trace=True`` the result carries, for the last ten
    visited message states, ``(iteration, FreeEnergyReport)`` pairs
    evaluated through the belief reconstruction (slower; intended for
    diagnostics, not Monte-Carlo loops).
    """
    h = np.asarray(h, dtype=np.float64)
    states: list[tuple[int, np.ndarray]] = []

    def record(iteration, eta):
        if bethe_trace:
            states.append((iteration, eta))
            if len(states) > 10:
                states.pop(0)

    messages = init_messages(code, h)
    record(0, messages.eta)

    word = hard_decision(h)
    if is_codeword(code, word):
        return DecodeResult(CONVERGED, word, 0, 0, _trace_reports(code, h, states))

    for n in range(1, config.max_iterations + 1):
        messages = relaxed_step(messages, code, h, config)
        record(n, messages.eta)
        word = hard_decision(posterior_field(messages, code, h, config.variant))
        if is_codeword(code, word):
            return DecodeResult(CONVERGED, word, n, n, _trace_reports(code, h, states))

    return DecodeResult(EXHAUSTED, word, None, config.max_iterations,
                        _trace_reports(code, h, states))


def _trace_reports(code, h, states):
    if not states:
        return None
    # Imported here: bethe builds beliefs from decoder kernels.
    from .bethe import beliefs_from_messages, bethe_free_energy

    reports = []
    for iteration, eta in states:
        beliefs = beliefs_from_messages(code, h, Messages(eta, iteration))
        reports.append((iteration, bethe_free_energy(code, h, beliefs)))
    return reports
