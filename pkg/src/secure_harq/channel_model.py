"""SNR distributions, accumulated mutual information and outage indicators.

Channel gains only enter the formulas through the received SNRs, so a link
is described by its mean SNR alone (transmit power already folded in).
All rates are in bits per channel use, normalised by the full mother-code
length of ``M`` blocks, and use the real-channel ``1/2`` factor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)
MAX_TX_CEILING = 1024


class Protocol(str, enum.Enum):
    RTD = "rtd"
    INR = "inr"

    @classmethod
    def parse(cls, value: "Protocol | str") -> "Protocol":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class FadingSpec:
    """Rayleigh link: instantaneous SNR is exponential with this mean."""

    mean_snr_linear: float

    def __post_init__(self):
        if not (math.isfinite(self.mean_snr_linear) and self.mean_snr_linear > 0):
            raise ValueError(f"mean_snr_linear must be positive, got {self.mean_snr_linear!r}")

    @classmethod
    def from_db(cls, snr_db: float) -> "FadingSpec":
        return cls(db_to_linear(snr_db))


@dataclass(frozen=True)
class SystemParams:
    max_tx: int
    main: FadingSpec
    eve: FadingSpec
    max_tx_ceiling: int = MAX_TX_CEILING

    def __post_init__(self):
        if isinstance(self.max_tx, bool) or int(self.max_tx) != self.max_tx:
            raise ValueError(f"max_tx must be an integer, got {self.max_tx!r}")
        if not 1 <= self.max_tx <= self.max_tx_ceiling:
            raise ValueError(f"max_tx must lie in [1, {self.max_tx_ceiling}], got {self.max_tx}")


@dataclass(frozen=True)
class WynerRates:
    """Mother-code rate ``r0`` and secret-message rate ``rs``."""

    r0: float
    rs: float

    def __post_init__(self):
        if not (math.isfinite(self.r0) and math.isfinite(self.rs)):
            raise ValueError("rates must be finite")
        if not 0.0 <= self.rs <= self.r0:
            raise ValueError(f"need 0 <= rs <= r0, got r0={self.r0!r}, rs={self.rs!r}")

    @property
    def gap(self) -> float:
        return self.r0 - self.rs


@dataclass(frozen=True)
class ChannelRealization:
    main_snrs: np.ndarray
    eve_snrs: np.ndarray

    def __post_init__(self):
        main = np.asarray(self.main_snrs, dtype=float)
        eve = np.asarray(self.eve_snrs, dtype=float)
        if main.ndim != 1 or main.shape != eve.shape:
            raise ValueError("main_snrs and eve_snrs must be 1-D vectors of equal length")
        if np.any(main < 0) or np.any(eve < 0):
            raise ValueError("SNRs must be nonnegative")
        main.setflags(write=False)
        eve.setflags(write=False)
        object.__setattr__(self, "main_snrs", main)
        object.__setattr__(self, "eve_snrs", eve)

    @property
    def max_tx(self) -> int:
        return len(self.main_snrs)


@dataclass(frozen=True)
class OutageFlags:
    connection_outage: bool
    secrecy_outage: bool


def db_to_linear(snr_db: float) -> float:
    if not math.isfinite(snr_db):
        raise ValueError(f"SNR in dB must be finite, got {snr_db!r}")
    return 10.0 ** (snr_db / 10.0)


def sample_snrs(spec: FadingSpec, count: int, stream: np.random.Generator) -> np.ndarray:
    """Draw ``count`` i.i.d. exponential SNRs with mean ``spec.mean_snr_linear``.

    Unit-mean draws are scaled afterwards, so consecutive calls on one
    stream produce the same values as a single call of the combined size.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    return stream.standard_exponential(count) * spec.mean_snr_linear


def _check_range(m: int, M: int, snrs) -> None:
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if not 0 <= m <= M:
        raise ValueError(f"m must lie in [0, {M}], got {m}")
    if len(snrs) < M:
        raise ValueError(f"need at least M={M} SNR values, got {len(snrs)}")


def acc_mi_inr(m: int, M: int, snrs) -> float:
    """Accumulated mutual information after ``m`` INR blocks."""
    _check_range(m, M, snrs)
    total = math.fsum(math.log1p(float(s)) for s in snrs[:m])
    return total / (2.0 * M * LN2)


def acc_mi_rtd(m: int, M: int, snrs) -> float:
    """Accumulated mutual information after ``m`` RTD blocks (SNRs add under MRC)."""
    _check_range(m, M, snrs)
    return math.log1p(math.fsum(float(s) for s in snrs[:m])) / (2.0 * M * LN2)


def acc_mi(protocol: Protocol | str, m: int, M: int, snrs) -> float:
    if Protocol.parse(protocol) is Protocol.INR:
        return acc_mi_inr(m, M, snrs)
    return acc_mi_rtd(m, M, snrs)


def acc_mi_prefix(protocol: Protocol | str, snrs: np.ndarray, M: int | None = None) -> np.ndarray:
    """Vectorised accumulated MI for every prefix ``m = 1..M``.

    ``snrs`` has shape ``(..., M)``; the result has the same shape and its
    entry ``[..., m-1]`` is the MI after ``m`` transmissions.
    """
    snrs = np.asarray(snrs, dtype=float)
    if M is None:
        M = snrs.shape[-1]
    scale = 1.0 / (2.0 * M * LN2)
    if Protocol.parse(protocol) is Protocol.INR:
        out = np.cumsum(np.log1p(snrs), axis=-1)
    else:
        out = np.log1p(np.cumsum(snrs, axis=-1))
    out *= scale
    return out


def outage_flags(protocol: Protocol | str, rates: WynerRates, real: ChannelRealization, m: int) -> OutageFlags:
    """Connection/secrecy outage after ``m`` transmissions of one realization.

    Outage uses strict inequalities; hitting a threshold exactly counts as
    success.
    """
    M = real.max_tx
    if not 1 <= m <= M:
        raise ValueError(f"m must lie in [1, {M}], got {m}")
    main_mi = acc_mi(protocol, m, M, real.main_snrs)
    eve_mi = acc_mi(protocol, m, M, real.eve_snrs)
    return OutageFlags(
        connection_outage=main_mi < rates.r0,
        secrecy_outage=eve_mi > rates.r0 - rates.rs,
    )
