"""Large-``M`` behaviour: ergodic moments, feasibility tests and limiting throughput."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy import integrate

from .channel_model import LN2, FadingSpec, Protocol, WynerRates

# quadrature runs over t in [0, _T_MAX] for X = mean * t, t ~ Exp(1)
_T_MAX = 50.0


@dataclass(frozen=True)
class ErgodicMoments:
    mu_a: float
    mu_b: float

    @classmethod
    def of(cls, main: FadingSpec, eve: FadingSpec) -> "ErgodicMoments":
        return cls(ergodic_half_log_moment(main), ergodic_half_log_moment(eve))


@lru_cache(maxsize=256)
def ergodic_half_log_moment(spec: FadingSpec) -> float:
    """``(1/2) E[log2(1 + X)]`` for exponential ``X`` with the given mean.

    Numerical quadrature against the unit exponential weight on
    ``[0, 50]``; the remaining tail is added by one integration by parts,
    leaving an error below ``e^{-50} / 50``.
    """
    mu = spec.mean_snr_linear
    body, _ = integrate.quad(
        lambda t: math.log1p(mu * t) * math.exp(-t),
        0.0,
        _T_MAX,
        epsabs=1e-13,
        epsrel=1e-12,
        limit=200,
        points=[min(1.0 / mu, _T_MAX / 2), 1.0],
    )
    tail = math.log1p(mu * _T_MAX) * math.exp(-_T_MAX)
    return (body + tail) / (2.0 * LN2)


def inr_feasible(rates: WynerRates, main: FadingSpec, eve: FadingSpec) -> bool:
    """Whether INR drives both outage probabilities to zero as ``M`` grows."""
    mom = ErgodicMoments.of(main, eve)
    return rates.r0 <= mom.mu_a and rates.r0 - rates.rs >= rates.r0 * mom.mu_b / mom.mu_a


def mfb_feasible(rates: WynerRates, main: FadingSpec, eve: FadingSpec) -> bool:
    """Same question for one-shot coding over ``M`` blocks without feedback."""
    mom = ErgodicMoments.of(main, eve)
    return rates.r0 <= mom.mu_a and rates.r0 - rates.rs >= mom.mu_b


def inr_asymptotic_throughput(rates: WynerRates, main: FadingSpec, eve: FadingSpec) -> float:
    """Limiting INR throughput of one rate pair; zero when it is not feasible.

    A feasible session needs about ``M r0 / mu_a`` transmissions to deliver
    ``M rs`` bits, so the throughput tends to ``rs mu_a / r0``.
    """
    if rates.r0 <= 0 or not inr_feasible(rates, main, eve):
        return 0.0
    return rates.rs * ergodic_half_log_moment(main) / rates.r0


def limit_throughput(protocol: Protocol | str, main: FadingSpec, eve: FadingSpec) -> float:
    if Protocol.parse(protocol) is Protocol.RTD:
        return 0.0
    mom = ErgodicMoments.of(main, eve)
    return max(mom.mu_a - mom.mu_b, 0.0)
