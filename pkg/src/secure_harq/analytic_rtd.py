"""Closed-form RTD outage probabilities.

Under maximal-ratio combining the accumulated SNR after ``m`` repetitions is
a sum of ``m`` i.i.d. exponentials, i.e. gamma distributed with integer
shape ``m``.  The CDF of the accumulated mutual information is therefore a
regularized lower incomplete gamma function evaluated at the SNR threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel_model import FadingSpec, SystemParams

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000
# beyond this exponent the threshold 2**(2*M*r) - 1 is treated as infinite
_LOG_GUARD = 1000.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GammaParams:
    shape: int
    scale: float

    def __post_init__(self):
        if int(self.shape) != self.shape or self.shape < 1:
            raise ValueError(f"shape must be a positive integer, got {self.shape!r}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale!r}")

    def cdf(self, x: float) -> float:
        return reg_gamma_lower(self.shape, x / self.scale)


def _log_prefactor(a: float, x: float) -> float:
    """``log(e^{-x} x^a / Gamma(a))`` without large cancelling terms."""
    if a < 30.0:
        return -x + a * math.log(x) - math.lgamma(a)
    # Stirling remainder: lgamma(a) = (a - 1/2) ln a - a + ln(2 pi)/2 + corr
    inv = 1.0 / a
    inv2 = inv * inv
    corr = inv * (1.0 / 12 - inv2 * (1.0 / 360 - inv2 * (1.0 / 1260 - inv2 / 1680)))
    d = (x - a) / a
    log_ratio = math.log1p(d) if abs(d) < 0.5 else math.log(x) - math.log(a)
    return (a - x) + a * log_ratio + 0.5 * math.log(a) - _HALF_LOG_2PI - corr


def _series(a: float, x: float) -> float:
    # P(a, x) = e^{-x} x^a / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(_log_prefactor(a, x))


def _continued_fraction(a: float, x: float) -> float:
    # Q(a, x) by the modified Lentz method
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(_log_prefactor(a, x)) * h


def _reg_gamma_pair(a: int, x: float) -> tuple[float, float]:
    if a < 1 or int(a) != a:
        raise ValueError(f"a must be a positive integer, got {a!r}")
    if math.isnan(x) or x < 0:
        raise ValueError(f"x must be nonnegative, got {x!r}")
    if x == 0.0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    a = float(a)
    if x < a + 1.0:
        p = min(_series(a, x), 1.0)
        return p, 1.0 - p
    q = min(_continued_fraction(a, x), 1.0)
    return 1.0 - q, q


def reg_gamma_lower(a: int, x: float) -> float:
    """Regularized lower incomplete gamma ``P(a, x)`` for integer ``a >= 1``."""
    return _reg_gamma_pair(a, x)[0]


def reg_gamma_upper(a: int, x: float) -> float:
    """Complement ``Q(a, x) = 1 - P(a, x)``, accurate in the far tail."""
    return _reg_gamma_pair(a, x)[1]


def _snr_threshold(M: int, r: float) -> float:
    # SNR sum needed so that log2(1 + s) / (2M) reaches r
    exponent = 2.0 * M * r
    if exponent > _LOG_GUARD:
        return math.inf
    return math.expm1(exponent * math.log(2.0))


def _check(m: int, M: int) -> None:
    if not 1 <= m <= M:
        raise ValueError(f"need 1 <= m <= M, got m={m}, M={M}")


def cdf_mi_rtd(m: int, M: int, spec: FadingSpec, r: float) -> float:
    """``Pr{I_RTD(m) < r}`` for a link with the given fading statistics."""
    _check(m, M)
    if r <= 0:
        return 0.0
    return reg_gamma_lower(m, _snr_threshold(M, r) / spec.mean_snr_linear)


def ccdf_mi_eve_rtd(m: int, M: int, spec: FadingSpec, r: float) -> float:
    """``Pr{I_RTD(m) > r}``; evaluated through ``Q`` so small tails keep precision."""
    _check(m, M)
    if r <= 0:
        return 1.0
    return reg_gamma_upper(m, _snr_threshold(M, r) / spec.mean_snr_linear)


class AnalyticRtdProvider:
    """CDF provider backed by the closed-form gamma expressions."""

    sample_count = None

    def __init__(self, params: SystemParams):
        self.params = params
        self.max_tx = params.max_tx

    def cdf_main(self, m: int, r: float) -> float:
        return cdf_mi_rtd(m, self.max_tx, self.params.main, r)

    def ccdf_eve(self, m: int, r: float) -> float:
        return ccdf_mi_eve_rtd(m, self.max_tx, self.params.eve, r)

    def __repr__(self):
        p = self.params
        return (
            f"AnalyticRtdProvider(M={p.max_tx}, main={p.main.mean_snr_linear:g}, "
            f"eve={p.eve.mean_snr_linear:g})"
        )
