"""Throughput maximisation under secrecy and connection outage targets.

For a fixed mother-code rate ``r0`` the secrecy outage probability is
nondecreasing in ``rs`` while the throughput is linear in it, so the best
``rs`` is the largest one meeting the secrecy target, found by bisection.
``r0`` itself is then chosen by a grid search.  Every evaluation goes
through one CDF provider, so with Monte-Carlo tables the whole search is
deterministic and reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _streams
from .analytic_rtd import AnalyticRtdProvider
from .channel_model import Protocol, SystemParams, WynerRates
from .empirical_cdf import DEFAULT_SAMPLE_COUNT, EmpiricalProvider, cached_tables
from .errors import InfeasibleSearchError
from .outage_metrics import (
    ThroughputReport,
    connection_outage,
    evaluate,
    pmf_transmissions,
    secrecy_outage,
    throughput,
)


@dataclass(frozen=True)
class OutageConstraints:
    xi_s: float = 1.0
    xi_e: float | None = None

    def __post_init__(self):
        if not 0 < self.xi_s <= 1:
            raise ValueError(f"xi_s must lie in (0, 1], got {self.xi_s!r}")
        if self.xi_e is not None and not 0 < self.xi_e <= 1:
            raise ValueError(f"xi_e must lie in (0, 1], got {self.xi_e!r}")


@dataclass(frozen=True)
class SearchConfig:
    r0_max: float = 4.0
    r0_grid_points: int = 400
    rs_bisect_tol: float = 1e-4
    mc_samples: int = DEFAULT_SAMPLE_COUNT
    seed: int = 0
    r0_bisect_tol: float = 1e-6

    def __post_init__(self):
        if self.r0_grid_points < 2:
            raise ValueError("r0_grid_points must be >= 2")
        if not self.rs_bisect_tol > 0 or not self.r0_bisect_tol > 0:
            raise ValueError("bisection tolerances must be positive")
        if not self.r0_max > 0:
            raise ValueError("r0_max must be positive")

    def r0_grid(self, upper: float | None = None) -> np.ndarray:
        upper = self.r0_max if upper is None else upper
        k = np.arange(1, self.r0_grid_points + 1)
        return upper * k / self.r0_grid_points


def make_provider(
    params: SystemParams,
    protocol: Protocol | str,
    config: SearchConfig | None = None,
    analytic_rtd: bool = True,
    cache_dir=None,
):
    """Closed-form provider for RTD, Monte-Carlo tables otherwise."""
    config = config or SearchConfig()
    protocol = Protocol.parse(protocol)
    if protocol is Protocol.RTD and analytic_rtd:
        return AnalyticRtdProvider(params)
    tables = cached_tables(params, protocol, config.mc_samples, config.seed, cache_dir)
    return EmpiricalProvider(tables)


def max_rs_given_r0(provider, M: int, r0: float, xi_s: float, tol: float = 1e-4, pmf=None) -> float:
    """Largest ``rs`` in ``[0, r0]`` with secrecy outage at most ``xi_s`` (to ``tol``)."""
    if r0 < 0:
        raise ValueError("r0 must be nonnegative")
    if pmf is None:
        pmf = pmf_transmissions(provider, M, r0)

    def ok(rs):
        return secrecy_outage(provider, M, WynerRates(r0, rs), pmf) <= xi_s

    if ok(r0):
        return float(r0)
    lo, hi = 0.0, float(r0)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def max_r0_feasible(provider, M: int, xi_e: float, r0_max: float = 4.0, tol: float = 1e-6) -> float:
    """Largest ``r0`` in ``[0, r0_max]`` with connection outage at most ``xi_e``."""
    if not 0 < xi_e <= 1:
        raise ValueError(f"xi_e must lie in (0, 1], got {xi_e!r}")
    if connection_outage(provider, M, r0_max) <= xi_e:
        return float(r0_max)
    if connection_outage(provider, M, tol) > xi_e:
        raise InfeasibleSearchError(f"connection outage exceeds {xi_e:g} already at r0={tol:g}")
    lo, hi = tol, float(r0_max)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if connection_outage(provider, M, mid) <= xi_e:
            lo = mid
        else:
            hi = mid
    return lo


def _infeasible_report() -> ThroughputReport:
    return ThroughputReport(WynerRates(0.0, 0.0), eta=0.0, pe=0.0, ps=1.0, expected_m=1.0, feasible=False)


def throughput_curve(provider, M: int, xi_s: float, r0_values, tol: float = 1e-4) -> list[tuple[float, float, float]]:
    """``(r0, rs*(r0), eta)`` for each ``r0``; evaluated in parallel, returned in order."""

    def point(r0):
        r0 = float(r0)
        pmf = pmf_transmissions(provider, M, r0)
        rs = max_rs_given_r0(provider, M, r0, xi_s, tol, pmf)
        pe = connection_outage(provider, M, r0)
        eta = throughput(WynerRates(r0, rs), pe, pmf.mean(), M)
        return r0, rs, eta

    return _streams.ordered_map(point, list(r0_values))


def optimize(provider, M: int, constraints: OutageConstraints, config: SearchConfig | None = None) -> ThroughputReport:
    """Best rate pair on the ``r0`` grid.

    With a connection target the grid is squeezed below the largest
    admissible ``r0``.  Returns a report with ``feasible=False`` and zero
    throughput when no grid point yields positive throughput.
    """
    config = config or SearchConfig()
    upper = config.r0_max
    if constraints.xi_e is not None:
        try:
            upper = min(upper, max_r0_feasible(provider, M, constraints.xi_e, config.r0_max, config.r0_bisect_tol))
        except InfeasibleSearchError:
            return _infeasible_report()
    curve = throughput_curve(provider, M, constraints.xi_s, config.r0_grid(upper), config.rs_bisect_tol)
    etas = np.array([eta for _, _, eta in curve])
    # argmax keeps the first maximum: ties go to the smaller r0
    best = int(np.argmax(etas))
    if not etas[best] > 0:
        return _infeasible_report()
    r0, rs, _ = curve[best]
    return evaluate(provider, M, WynerRates(r0, rs))


def optimize_protocol(
    params: SystemParams,
    protocol: Protocol | str,
    constraints: OutageConstraints,
    config: SearchConfig | None = None,
    analytic_rtd: bool = True,
) -> ThroughputReport:
    """Build one provider for ``params`` and optimise against it."""
    config = config or SearchConfig()
    provider = make_provider(params, protocol, config, analytic_rtd)
    return optimize(provider, params.max_tx, constraints, config)

