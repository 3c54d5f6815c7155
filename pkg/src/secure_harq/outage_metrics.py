"""Session statistics from CDFs of accumulated mutual information.

Everything here works against a *CDF provider*: any object with a
``max_tx`` attribute and the two methods

* ``cdf_main(m, r)``: ``Pr{I_XY(m) < r}``
* ``ccdf_eve(m, r)``: ``Pr{I_XZ(m) > r}``

for ``m = 1..max_tx``.  :class:`~secure_harq.analytic_rtd.AnalyticRtdProvider`
and :class:`~secure_harq.empirical_cdf.EmpiricalProvider` both qualify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol as _Protocol

import numpy as np

from .channel_model import WynerRates
from .empirical_cdf import _Z95
from .errors import ProviderViolationError

PMF_CLAMP = 1e-9


class CdfProvider(_Protocol):
    max_tx: int

    def cdf_main(self, m: int, r: float) -> float: ...

    def ccdf_eve(self, m: int, r: float) -> float: ...


@dataclass(frozen=True)
class TransmissionPmf:
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if np.any(probs < 0) or np.any(probs > 1):
            raise ValueError("pmf entries must lie in [0, 1]")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"pmf must sum to 1, got {probs.sum()!r}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, m: int) -> float:
        """Probability of exactly ``m`` transmissions (1-based)."""
        return float(self.probs[m - 1])

    def mean(self) -> float:
        return float(np.dot(np.arange(1, len(self.probs) + 1), self.probs))


@dataclass(frozen=True)
class ThroughputReport:
    rates: WynerRates
    eta: float
    pe: float
    ps: float
    expected_m: float
    feasible: bool = True


def _check_provider(provider, M: int) -> None:
    if provider.max_tx != M:
        raise ValueError(f"provider is built for M={provider.max_tx}, asked for M={M}")


def _main_cdfs(provider, M: int, r0: float) -> np.ndarray:
    # index m holds Pr{I(m) < r0}; the first transmission always happens
    cdfs = np.empty(M + 1)
    cdfs[0] = 1.0
    for m in range(1, M + 1):
        cdfs[m] = provider.cdf_main(m, r0)
    return cdfs


def pmf_transmissions(provider: CdfProvider, M: int, r0: float) -> TransmissionPmf:
    """Distribution of the number of transmissions used by one session."""
    if r0 < 0:
        raise ValueError("r0 must be nonnegative")
    _check_provider(provider, M)
    cdfs = _main_cdfs(provider, M, r0)
    probs = np.empty(M)
    probs[: M - 1] = cdfs[: M - 1] - cdfs[1:M]
    probs[M - 1] = cdfs[M - 1]
    worst = probs.min()
    if worst < -PMF_CLAMP:
        m = int(np.argmin(probs)) + 1
        raise ProviderViolationError(
            f"cdf_main is not nonincreasing in m at r0={r0!r}: p[{m}] = {worst!r}"
        )
    np.clip(probs, 0.0, None, out=probs)
    probs /= probs.sum()
    return TransmissionPmf(probs)


def connection_outage(provider: CdfProvider, M: int, r0: float) -> float:
    if r0 < 0:
        raise ValueError("r0 must be nonnegative")
    _check_provider(provider, M)
    return float(provider.cdf_main(M, r0))


def secrecy_outage(provider: CdfProvider, M: int, rates: WynerRates, pmf: TransmissionPmf | None = None) -> float:
    """Probability that the eavesdropper's MI at the stopping time exceeds the secrecy gap.

    ``pmf`` may be passed in when it has already been computed for
    ``rates.r0``.
    """
    _check_provider(provider, M)
    if pmf is None:
        pmf = pmf_transmissions(provider, M, rates.r0)
    gap = rates.r0 - rates.rs
    total = 0.0
    for m in range(1, M + 1):
        p = pmf[m]
        if p > 0.0:
            total += p * provider.ccdf_eve(m, gap)
    return min(max(total, 0.0), 1.0)


def expected_transmissions(provider: CdfProvider, M: int, r0: float, convention: str = "stopping") -> float:
    """Mean number of transmissions per session.

    ``convention="stopping"`` returns ``sum_m m p[m] = 1 + sum_{m<M} Pr{I(m) < r0}``,
    the mean of the stopping time.  ``convention="printed"`` adds the
    ``m = M`` term as well, ``1 + sum_{m<=M} Pr{I(m) < r0}``, which exceeds
    the stopping-time mean by exactly ``P_e``.
    """
    if r0 < 0:
        raise ValueError("r0 must be nonnegative")
    _check_provider(provider, M)
    cdfs = _main_cdfs(provider, M, r0)
    if convention == "stopping":
        return float(1.0 + cdfs[1:M].sum())
    if convention == "printed":
        return float(1.0 + cdfs[1:].sum())
    raise ValueError(f"unknown convention {convention!r}")


def throughput(rates: WynerRates, pe: float, expected_m: float, M: int) -> float:
    """Renewal-reward secrecy throughput ``M rs (1 - pe) / E[M]``."""
    if expected_m < 1:
        raise ValueError(f"expected_m must be >= 1, got {expected_m!r}")
    return M * rates.rs * (1.0 - pe) / expected_m


def evaluate(provider: CdfProvider, M: int, rates: WynerRates) -> ThroughputReport:
    """All session metrics for one rate pair."""
    pmf = pmf_transmissions(provider, M, rates.r0)
    pe = connection_outage(provider, M, rates.r0)
    ps = secrecy_outage(provider, M, rates, pmf)
    em = pmf.mean()
    return ThroughputReport(rates, throughput(rates, pe, em, M), pe, ps, em)


@dataclass(frozen=True)
class ReportUncertainty:
    """95% CI half-widths of a report computed from Monte-Carlo tables."""

    eta: float
    pe: float
    ps: float
    expected_m: float


def report_uncertainty(provider: CdfProvider, M: int, report: ThroughputReport) -> ReportUncertainty:
    """Delta-method CI half-widths for metrics estimated from tables.

    Analytic providers (``sample_count is None``) get zero widths.  For
    ``P_s`` the variance is bounded by ``2 P_s (1 - P_s) / n``: one term from
    the main-link samples that weight the pmf and one from the eavesdropper
    samples, each an average of ``[0, 1]``-valued variables with mean ``P_s``.
    """
    n = getattr(provider, "sample_count", None)
    if not n:
        return ReportUncertainty(0.0, 0.0, 0.0, 0.0)
    pmf = pmf_transmissions(provider, M, report.rates.r0)
    ms = np.arange(1, M + 1)
    pe, ps, em = report.pe, report.ps, report.expected_m
    var_m = max(float(np.dot(ms**2, pmf.probs)) - em**2, 0.0)
    # decoded indicator D and slot count T share samples: D = 0 forces T = M
    reward = M * report.rates.rs
    eta = report.eta
    var_d = pe * (1.0 - pe)
    cov_dt = (em - M * pe) - (1.0 - pe) * em
    var_lin = reward**2 * var_d + eta**2 * var_m - 2.0 * eta * reward * cov_dt
    return ReportUncertainty(
        eta=_Z95 * math.sqrt(max(var_lin, 0.0) / n) / em,
        pe=_Z95 * math.sqrt(var_d / n),
        ps=_Z95 * math.sqrt(2.0 * ps * (1.0 - ps) / n),
        expected_m=_Z95 * math.sqrt(var_m / n),
    )
