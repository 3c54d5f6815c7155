"""Command-line driver: every experiment writes a CSV table.

Exit codes: 0 on success, 2 on invalid arguments, 3 when some optimisation
had no feasible positive-throughput point (its zero row is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import asymptotics
from .channel_model import FadingSpec, Protocol, SystemParams, WynerRates
from .harq_sim import run_campaign
from .optimizer import (
    OutageConstraints,
    SearchConfig,
    make_provider,
    optimize,
    throughput_curve,
)
from .outage_metrics import connection_outage, evaluate, report_uncertainty

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

R0_SWEEP_XI_S = (1.0, 1e-2, 1e-4)


class UsageError(Exception):
    pass


@dataclass
class ExperimentSpec:
    command: str
    protocols: tuple[Protocol, ...]
    max_tx: int
    snr_main_db: float
    snr_eve_db: float
    xi_s: tuple[float, ...]
    xi_e: float | None
    sweep: tuple[float, float, float] | None
    r0_min: float
    r0_max: float
    r0_steps: int
    samples: int
    sessions: int
    seed: int
    out: str | None
    cache_dir: str | None
    r0: float | None
    rs: float | None

    def params(self, max_tx: int | None = None, snr_main_db: float | None = None) -> SystemParams:
        return SystemParams(
            max_tx=self.max_tx if max_tx is None else max_tx,
            main=FadingSpec.from_db(self.snr_main_db if snr_main_db is None else snr_main_db),
            eve=FadingSpec.from_db(self.snr_eve_db),
        )

    def config(self, r0_max: float | None = None) -> SearchConfig:
        return SearchConfig(
            r0_max=self.r0_max if r0_max is None else r0_max,
            r0_grid_points=self.r0_steps,
            mc_samples=self.samples,
            seed=self.seed,
        )

    def provider(self, params: SystemParams, protocol: Protocol):
        return make_provider(params, protocol, self.config(), cache_dir=self.cache_dir)

    def sweep_values(self) -> np.ndarray:
        lo, hi, step = self.sweep
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return lo + step * np.arange(count)


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


class Table:
    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError("row width does not match header")
        self.rows.append([fmt(v) for v in values])

    def render(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        return buf.getvalue()


def cmd_throughput_vs_r0(spec: ExperimentSpec):
    table = Table(["protocol", "xi_s", "r0", "rs_star", "eta"])
    r0_values = np.linspace(spec.r0_min, spec.r0_max, spec.r0_steps)
    for protocol in spec.protocols:
        params = spec.params()
        provider = spec.provider(params, protocol)
        for xi_s in spec.xi_s:
            for r0, rs, eta in throughput_curve(provider, params.max_tx, xi_s, r0_values):
                table.add(protocol.value, xi_s, r0, rs, eta)
    return table, False


def cmd_pe_vs_r0(spec: ExperimentSpec):
    table = Table(["protocol", "r0", "pe"])
    r0_values = np.linspace(spec.r0_min, spec.r0_max, spec.r0_steps)
    for protocol in spec.protocols:
        params = spec.params()
        provider = spec.provider(params, protocol)
        for r0 in r0_values:
            table.add(protocol.value, float(r0), connection_outage(provider, params.max_tx, float(r0)))
    return table, False


_OPT_COLUMNS = ["r0", "rs", "eta", "pe", "ps", "expected_m", "feasible"]


def _opt_row(report):
    return (report.rates.r0, report.rates.rs, report.eta, report.pe, report.ps, report.expected_m, report.feasible)


def cmd_throughput_vs_xis(spec: ExperimentSpec):
    table = Table(["protocol", "xi_s", "xi_e"] + _OPT_COLUMNS)
    infeasible = False
    xi_values = 10.0 ** spec.sweep_values()
    for protocol in spec.protocols:
        params = spec.params()
        provider = spec.provider(params, protocol)
        for xi_s in xi_values:
            xi_s = min(float(xi_s), 1.0)
            report = optimize(provider, params.max_tx, OutageConstraints(xi_s, spec.xi_e), spec.config())
            infeasible |= not report.feasible
            table.add(protocol.value, xi_s, "" if spec.xi_e is None else spec.xi_e, *_opt_row(report))
    return table, infeasible


def cmd_throughput_vs_snr(spec: ExperimentSpec):
    table = Table(["protocol", "snr_main_db", "xi_s"] + _OPT_COLUMNS)
    infeasible = False
    xi_s = spec.xi_s[0]
    for protocol in spec.protocols:
        for snr_db in spec.sweep_values():
            params = spec.params(snr_main_db=float(snr_db))
            provider = spec.provider(params, protocol)
            report = optimize(provider, params.max_tx, OutageConstraints(xi_s, spec.xi_e), spec.config())
            infeasible |= not report.feasible
            table.add(protocol.value, float(snr_db), xi_s, *_opt_row(report))
    return table, infeasible


def rtd_r0_upper(r0_max: float, max_tx: int) -> float:
    """Search ceiling for RTD: its mutual information shrinks like ``1/M``."""
    return r0_max * min(1.0, 2.0 / max_tx)


def cmd_throughput_vs_m(spec: ExperimentSpec):
    table = Table(["protocol", "max_tx", "xi_s"] + _OPT_COLUMNS)
    infeasible = False
    xi_s = spec.xi_s[0]
    m_values = sorted({int(round(v)) for v in spec.sweep_values()})
    for protocol in spec.protocols:
        for M in m_values:
            params = spec.params(max_tx=M)
            provider = spec.provider(params, protocol)
            upper = rtd_r0_upper(spec.r0_max, M) if protocol is Protocol.RTD else spec.r0_max
            report = optimize(provider, M, OutageConstraints(xi_s, spec.xi_e), spec.config(r0_max=upper))
            infeasible |= not report.feasible
            table.add(protocol.value, M, xi_s, *_opt_row(report))
    return table, infeasible


def cmd_asymptotics(spec: ExperimentSpec):
    params = spec.params()
    table = Table(["quantity", "value"])
    mom = asymptotics.ErgodicMoments.of(params.main, params.eve)
    table.add("mu_a", mom.mu_a)
    table.add("mu_b", mom.mu_b)
    if spec.r0 is not None:
        rates = WynerRates(spec.r0, spec.rs if spec.rs is not None else 0.0)
        table.add("r0", rates.r0)
        table.add("rs", rates.rs)
        table.add("inr_feasible", asymptotics.inr_feasible(rates, params.main, params.eve))
        table.add("mfb_feasible", asymptotics.mfb_feasible(rates, params.main, params.eve))
        table.add("inr_asymptotic_eta", asymptotics.inr_asymptotic_throughput(rates, params.main, params.eve))
    table.add("limit_eta_rtd", asymptotics.limit_throughput(Protocol.RTD, params.main, params.eve))
    table.add("limit_eta_inr", asymptotics.limit_throughput(Protocol.INR, params.main, params.eve))
    return table, False


def cmd_simulate(spec: ExperimentSpec):
    if spec.r0 is None:
        raise UsageError("simulate needs --r0")
    rates = WynerRates(spec.r0, spec.rs if spec.rs is not None else 0.0)
    table = Table(
        ["source", "protocol", "r0", "rs", "sessions", "eta", "eta_ci", "pe", "pe_ci",
         "ps", "ps_ci", "expected_m", "expected_m_ci"]
    )
    for protocol in spec.protocols:
        params = spec.params()
        emp = run_campaign(rates, params, protocol, spec.sessions, spec.seed)
        table.add("simulation", protocol.value, rates.r0, rates.rs, emp.sessions, emp.eta_hat, emp.eta_ci,
                  emp.pe_hat, emp.pe_ci, emp.ps_hat, emp.ps_ci, emp.expected_m_hat, emp.expected_m_ci)
        provider = spec.provider(params, protocol)
        report = evaluate(provider, params.max_tx, rates)
        ci = report_uncertainty(provider, params.max_tx, report)
        n = provider.sample_count or 0
        table.add("analytic" if n == 0 else "tables", protocol.value, rates.r0, rates.rs, n, report.eta, ci.eta,
                  report.pe, ci.pe, report.ps, ci.ps, report.expected_m, ci.expected_m)
    return table, False


COMMANDS = {
    "throughput-vs-r0": (cmd_throughput_vs_r0, "secrecy throughput versus main code rate"),
    "pe-vs-r0": (cmd_pe_vs_r0, "connection outage versus main code rate"),
    "throughput-vs-xis": (cmd_throughput_vs_xis, "optimal throughput versus secrecy outage target"),
    "throughput-vs-snr": (cmd_throughput_vs_snr, "optimal throughput versus main channel mean SNR"),
    "throughput-vs-m": (cmd_throughput_vs_m, "optimal throughput versus maximum transmissions"),
    "asymptotics": (cmd_asymptotics, "ergodic moments, feasibility and limiting throughput"),
    "simulate": (cmd_simulate, "session simulation next to the CDF-based metrics"),
}

# (min, max, step) defaults for each sweep command
SWEEP_DEFAULTS = {
    "throughput-vs-xis": (-6.0, 0.0, 0.5),
    "throughput-vs-snr": (5.0, 30.0, 2.5),
    "throughput-vs-m": (1.0, 16.0, 1.0),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shrq", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--protocol", choices=["rtd", "inr", "both"], default="both")
        p.add_argument("--max-tx", type=int, default=8)
        p.add_argument("--snr-main-db", type=float, default=15.0)
        p.add_argument("--snr-eve-db", type=float, default=5.0)
        p.add_argument("--xi-s", type=float, action="append",
                       help="secrecy outage target (repeatable where the command sweeps curves)")
        p.add_argument("--xi-e", type=float, default=None, help="connection outage target")
        p.add_argument("--samples", type=int, default=10**6, help="Monte-Carlo samples per CDF table")
        p.add_argument("--sessions", type=int, default=10**6, help="simulated sessions (simulate only)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--r0-min", type=float, default=0.01)
        p.add_argument("--r0-max", type=float, default=None)
        p.add_argument("--r0-steps", type=int, default=None)
        p.add_argument("--r0", type=float, default=None, help="main code rate (asymptotics, simulate)")
        p.add_argument("--rs", type=float, default=None, help="secrecy rate (asymptotics, simulate)")
        if name in SWEEP_DEFAULTS:
            lo, hi, step = SWEEP_DEFAULTS[name]
            unit = "log10(xi_s)" if name == "throughput-vs-xis" else ("dB" if name.endswith("snr") else "M")
            p.add_argument("--sweep-min", type=float, default=lo, help=f"sweep start in {unit}")
            p.add_argument("--sweep-max", type=float, default=hi)
            p.add_argument("--sweep-step", type=float, default=step)
        p.add_argument("--cache-dir", default=None, help="reuse Monte-Carlo tables stored here")
        p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    return parser


def spec_from_args(args) -> ExperimentSpec:
    protocols = (Protocol.RTD, Protocol.INR) if args.protocol == "both" else (Protocol.parse(args.protocol),)
    if args.command == "throughput-vs-r0":
        default_xi = R0_SWEEP_XI_S
        r0_max, r0_steps = 3.0, 300
    elif args.command == "pe-vs-r0":
        default_xi = (1.0,)
        r0_max, r0_steps = 3.0, 300
    else:
        default_xi = (1e-3,)
        r0_max, r0_steps = 4.0, 400
    sweep = None
    if args.command in SWEEP_DEFAULTS:
        sweep = (args.sweep_min, args.sweep_max, args.sweep_step)
        if not args.sweep_step > 0 or args.sweep_max < args.sweep_min:
            raise UsageError("sweep range must be non-empty with a positive step")
    spec = ExperimentSpec(
        command=args.command,
        protocols=protocols,
        max_tx=args.max_tx,
        snr_main_db=args.snr_main_db,
        snr_eve_db=args.snr_eve_db,
        xi_s=tuple(args.xi_s) if args.xi_s else default_xi,
        xi_e=args.xi_e,
        sweep=sweep,
        r0_min=args.r0_min,
        r0_max=args.r0_max if args.r0_max is not None else r0_max,
        r0_steps=args.r0_steps if args.r0_steps is not None else r0_steps,
        samples=args.samples,
        sessions=args.sessions,
        seed=args.seed,
        out=args.out,
        cache_dir=args.cache_dir,
        r0=args.r0,
        rs=args.rs,
    )
    if spec.r0_steps < 2 or not spec.r0_max > spec.r0_min:
        raise UsageError("r0 grid needs --r0-max > --r0-min and at least 2 steps")
    if spec.samples < 1 or spec.sessions < 1:
        raise UsageError("--samples and --sessions must be positive")
    for xi in spec.xi_s + ((spec.xi_e,) if spec.xi_e is not None else ()):
        if not 0 < xi <= 1:
            raise UsageError(f"outage targets must lie in (0, 1], got {xi}")
    spec.params()
    return spec


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
        return
    try:
        fh = open(Path(path), "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot open output {path}: {exc.strerror}") from exc
    with fh:
        yield fh


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        spec = spec_from_args(args)
        func, _ = COMMANDS[args.command]
        table, infeasible = func(spec)
    except (UsageError, ValueError) as exc:
        print(f"shrq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        with _output(spec.out) as fh:
            fh.write(table.render())
    except OSError as exc:
        print(f"shrq: error: {exc}", file=sys.stderr)
        return 1
    if infeasible:
        print("shrq: some optimisations had no feasible positive-throughput point", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
