import math

import pytest

from secure_harq.analytic_rtd import AnalyticRtdProvider
from secure_harq.channel_model import FadingSpec, SystemParams
from secure_harq.empirical_cdf import EmpiricalProvider, build_cdf_tables

MAIN_15DB = FadingSpec.from_db(15.0)
EVE_5DB = FadingSpec.from_db(5.0)


def default_params(max_tx=8):
    return SystemParams(max_tx, MAIN_15DB, EVE_5DB)


@pytest.fixture(scope="session")
def params8():
    return default_params(8)


@pytest.fixture(scope="session")
def rtd8(params8):
    return AnalyticRtdProvider(params8)


@pytest.fixture(scope="session")
def inr_tables8(params8):
    return build_cdf_tables(params8, "inr", 2 * 10**5, seed=11)


@pytest.fixture(scope="session")
def inr8(inr_tables8):
    return EmpiricalProvider(inr_tables8)


@pytest.fixture(scope="session")
def rtd_tables8(params8):
    return build_cdf_tables(params8, "rtd", 2 * 10**5, seed=11)


def pooled_halfwidth(p_sim, n_sim, p_ref, n_ref=None, ref_factor=1.0):
    """95% half-width of p_sim - p_ref under the null that both estimate one probability.

    ``n_ref=None`` means the reference is exact.  ``ref_factor`` scales the
    reference variance (2 for the table-based secrecy outage bound).
    """
    if n_ref is None:
        p = p_ref
        inv = 1.0 / n_sim
    else:
        p = (p_sim * n_sim + p_ref * n_ref) / (n_sim + n_ref)
        inv = 1.0 / n_sim + ref_factor / n_ref
    return 1.959963984540054 * math.sqrt(max(p * (1.0 - p), 0.0) * inv)


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
