"""Event-level simulation of secure HARQ sessions.

Each session draws a fresh block-fading realization, keeps transmitting
until the receiver's accumulated mutual information reaches ``r0`` (ACK) or
``M`` blocks have been sent, and then checks whether the eavesdropper,
having seen exactly the transmitted blocks, gathered more than the secrecy
gap ``r0 - rs``.  The estimates produced here are independent of the CDF
machinery in :mod:`secure_harq.outage_metrics` and serve as its cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _streams
from .channel_model import (
    ChannelRealization,
    Protocol,
    SystemParams,
    WynerRates,
    acc_mi_prefix,
    sample_snrs,
)
from .empirical_cdf import _Z95


@dataclass(frozen=True)
class SessionOutcome:
    m_stop: int
    decoded: bool
    secrecy_violated: bool
    reward_bits_per_symbol: float


@dataclass(frozen=True)
class EmpiricalReport:
    sessions: int
    eta_hat: float
    eta_ci: float
    pe_hat: float
    pe_ci: float
    ps_hat: float
    ps_ci: float
    expected_m_hat: float
    expected_m_ci: float
    m_stop_counts: tuple[int, ...]


@dataclass(frozen=True)
class SessionBatch:
    """Per-session arrays for a block of sessions."""

    m_stop: np.ndarray
    decoded: np.ndarray
    secrecy_violated: np.ndarray


def simulate_block(
    rates: WynerRates, protocol: Protocol | str, main_snrs: np.ndarray, eve_snrs: np.ndarray
) -> SessionBatch:
    """Run sessions on given SNR matrices of shape ``(sessions, M)``."""
    main_snrs = np.atleast_2d(main_snrs)
    eve_snrs = np.atleast_2d(eve_snrs)
    M = main_snrs.shape[1]
    main_mi = acc_mi_prefix(protocol, main_snrs, M)
    eve_mi = acc_mi_prefix(protocol, eve_snrs, M)
    reached = main_mi >= rates.r0
    decoded = reached.any(axis=1)
    # first index reaching r0; undecoded sessions use all M blocks
    m_stop = np.where(decoded, reached.argmax(axis=1) + 1, M)
    eve_at_stop = eve_mi[np.arange(len(m_stop)), m_stop - 1]
    violated = eve_at_stop > rates.r0 - rates.rs
    return SessionBatch(m_stop.astype(np.int64), decoded, violated)


def draw_realization(params: SystemParams, stream: np.random.Generator) -> ChannelRealization:
    main = sample_snrs(params.main, params.max_tx, stream)
    eve = sample_snrs(params.eve, params.max_tx, stream)
    return ChannelRealization(main, eve)


def run_session(
    rates: WynerRates,
    params: SystemParams,
    protocol: Protocol | str,
    stream: np.random.Generator | None = None,
    realization: ChannelRealization | None = None,
) -> SessionOutcome:
    """Simulate one session on a drawn or an injected channel realization."""
    if realization is None:
        if stream is None:
            raise ValueError("need either a random stream or an explicit realization")
        realization = draw_realization(params, stream)
    if realization.max_tx != params.max_tx:
        raise ValueError(f"realization has {realization.max_tx} blocks, params say M={params.max_tx}")
    batch = simulate_block(rates, protocol, realization.main_snrs[None, :], realization.eve_snrs[None, :])
    decoded = bool(batch.decoded[0])
    return SessionOutcome(
        m_stop=int(batch.m_stop[0]),
        decoded=decoded,
        secrecy_violated=bool(batch.secrecy_violated[0]),
        reward_bits_per_symbol=params.max_tx * rates.rs if decoded else 0.0,
    )


def chunk_snrs(params: SystemParams, seed: int, chunk: int, size: int) -> tuple[np.ndarray, np.ndarray]:
    """SNR matrices used for session chunk ``chunk`` of a campaign."""
    M = params.max_tx
    gen_main = _streams.substream(seed, _streams.DOMAIN_SESSIONS, _streams.LINK_MAIN, chunk)
    gen_eve = _streams.substream(seed, _streams.DOMAIN_SESSIONS, _streams.LINK_EVE, chunk)
    main = gen_main.standard_exponential((size, M)) * params.main.mean_snr_linear
    eve = gen_eve.standard_exponential((size, M)) * params.eve.mean_snr_linear
    return main, eve


def simulate_sessions(
    rates: WynerRates, params: SystemParams, protocol: Protocol | str, sessions: int, seed: int
) -> SessionBatch:
    """All per-session outcomes of a campaign, in session order."""
    if sessions < 1:
        raise ValueError("sessions must be >= 1")

    def work(bounds):
        lo, hi = bounds
        main, eve = chunk_snrs(params, seed, lo // _streams.CHUNK_SIZE, hi - lo)
        return simulate_block(rates, protocol, main, eve)

    parts = _streams.ordered_map(work, _streams.chunk_bounds(sessions))
    return SessionBatch(
        np.concatenate([p.m_stop for p in parts]),
        np.concatenate([p.decoded for p in parts]),
        np.concatenate([p.secrecy_violated for p in parts]),
    )


def summarize(batch: SessionBatch, rates: WynerRates, M: int) -> EmpiricalReport:
    n = len(batch.m_stop)
    slots = batch.m_stop.astype(float)
    reward = np.where(batch.decoded, M * rates.rs, 0.0)
    mean_slots = slots.mean()
    eta = reward.sum() / slots.sum()
    pe = 1.0 - batch.decoded.mean()
    ps = batch.secrecy_violated.mean()
    if n > 1:
        # ratio estimator: linearise reward - eta * slots
        resid = reward - eta * slots
        eta_ci = _Z95 * math.sqrt(resid.var(ddof=1) / n) / mean_slots
        em_ci = _Z95 * slots.std(ddof=1) / math.sqrt(n)
    else:
        eta_ci = em_ci = 0.0
    counts = np.bincount(batch.m_stop, minlength=M + 1)[1:]
    return EmpiricalReport(
        sessions=n,
        eta_hat=float(eta),
        eta_ci=float(eta_ci),
        pe_hat=float(pe),
        pe_ci=_Z95 * math.sqrt(pe * (1 - pe) / n),
        ps_hat=float(ps),
        ps_ci=_Z95 * math.sqrt(ps * (1 - ps) / n),
        expected_m_hat=float(mean_slots),
        expected_m_ci=float(em_ci),
        m_stop_counts=tuple(int(c) for c in counts),
    )


def run_campaign(
    rates: WynerRates, params: SystemParams, protocol: Protocol | str, sessions: int, seed: int = 0
) -> EmpiricalReport:
    """Aggregate ``sessions`` i.i.d. sessions into time-average estimates."""
    batch = simulate_sessions(rates, params, protocol, sessions, seed)
    return summarize(batch, rates, params.max_tx)
