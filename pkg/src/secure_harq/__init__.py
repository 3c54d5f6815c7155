"""Reliability, secrecy and throughput of secure HARQ over block-fading wire-tap channels."""

from .analytic_rtd import AnalyticRtdProvider, cdf_mi_rtd, ccdf_mi_eve_rtd, reg_gamma_lower, reg_gamma_upper
from .asymptotics import ErgodicMoments, ergodic_half_log_moment, inr_feasible, limit_throughput, mfb_feasible
from .channel_model import (
    ChannelRealization,
    FadingSpec,
    OutageFlags,
    Protocol,
    SystemParams,
    WynerRates,
    acc_mi_inr,
    acc_mi_rtd,
    db_to_linear,
    outage_flags,
    sample_snrs,
)
from .empirical_cdf import CdfTables, EmpiricalProvider, build_cdf_tables, cdf_eval, load_tables, save_tables
from .harq_sim import EmpiricalReport, SessionOutcome, run_campaign, run_session
from .optimizer import OutageConstraints, SearchConfig, max_r0_feasible, max_rs_given_r0, optimize
from .outage_metrics import (
    ThroughputReport,
    TransmissionPmf,
    connection_outage,
    evaluate,
    expected_transmissions,
    pmf_transmissions,
    secrecy_outage,
    throughput,
)

__version__ = "0.1.0"

__all__ = [
    "acc_mi_inr",
    "acc_mi_rtd",
    "AnalyticRtdProvider",
    "build_cdf_tables",
    "ccdf_mi_eve_rtd",
    "cdf_eval",
    "cdf_mi_rtd",
    "CdfTables",
    "ChannelRealization",
    "connection_outage",
    "db_to_linear",
    "EmpiricalProvider",
    "EmpiricalReport",
    "ergodic_half_log_moment",
    "ErgodicMoments",
    "evaluate",
    "expected_transmissions",
    "FadingSpec",
    "inr_feasible",
    "limit_throughput",
    "load_tables",
    "max_r0_feasible",
    "max_rs_given_r0",
    "mfb_feasible",
    "optimize",
    "outage_flags",
    "OutageConstraints",
    "OutageFlags",
    "pmf_transmissions",
    "Protocol",
    "reg_gamma_lower",
    "reg_gamma_upper",
    "run_campaign",
    "run_session",
    "sample_snrs",
    "save_tables",
    "SearchConfig",
    "secrecy_outage",
    "SessionOutcome",
    "SystemParams",
    "throughput",
    "ThroughputReport",
    "TransmissionPmf",
    "WynerRates",
]
